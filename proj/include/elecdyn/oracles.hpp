#pragma once

/// Benchmark winner selectors that search the whole policy box: one minimizes
/// the winner radius, the other the noise-free next-round voter variance.

#include <string>

#include "elecdyn/dynamics.hpp"
#include "elecdyn/geometry.hpp"

namespace elecdyn {

enum class OracleTag { Centrality, Depolarization };

struct OracleSpec {
  OracleTag tag = OracleTag::Centrality;
  double grid_resolution = 0.02;
  int refine_iters = 20;
  double tolerance = 1e-4;  // refinement stops once the step is below this

  std::string name() const {
    return tag == OracleTag::Centrality ? "CentralityOracle" : "DepolarizationOracle";
  }

  void validate() const {
    if (!(grid_resolution > 0.0)) throw ConfigError("oracle: grid resolution must be > 0");
    if (refine_iters < 0) throw ConfigError("oracle: refine_iters must be >= 0");
    if (!(tolerance > 0.0)) throw ConfigError("oracle: tolerance must be > 0");
  }
};

/// argmin over the box of max_i |x_i - w|.
inline Point centrality_oracle(const PointSet& voters, const PolicyBox& box) {
  return chebyshev_center(voters, box).center;
}

/// Voter variance after one noise-free update toward `w`.
inline double next_round_variance(const PointSet& voters, const Point& w,
                                  const AttractionFunction& g) {
  const Eigen::Index n = voters.rows();
  const Eigen::Index d = voters.cols();
  Point sum = Point::Zero(d);
  double sumsq = 0.0;
  Point y(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = voters.row(i).transpose();
    const double eta = g((x - w).norm());
    y = x + eta * (w - x);
    sum += y;
    sumsq += y.squaredNorm();
  }
  const double nn = static_cast<double>(n);
  return std::max(0.0, sumsq / nn - (sum / nn).squaredNorm());
}

/// argmin over the box of the noise-free next-round variance: grid search at
/// the spec's resolution, then coordinate-descent refinement.
inline Point depolarization_oracle(const PointSet& voters, const AttractionFunction& g,
                                   const PolicyBox& box, const OracleSpec& spec) {
  if (voters.rows() == 0) throw std::domain_error("depolarization_oracle: no voters");
  spec.validate();
  BoxSearchOptions opt;
  opt.resolution = spec.grid_resolution;
  opt.refine_iters = spec.refine_iters;
  opt.step_floor = spec.tolerance;
  return minimize_over_box(
      [&](const Point& w) { return next_round_variance(voters, w, g); }, box, opt);
}

}  // namespace elecdyn

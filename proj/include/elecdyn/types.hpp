#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace elecdyn {

/// A position in policy space.
using Point = Eigen::VectorXd;

/// A set of positions stored one per row (n x d).
using PointSet = Eigen::MatrixXd;

/// Raised for malformed run configurations, unknown presets and bad
/// parameter values. Surfaced before any simulation work starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box [lo, hi] in R^d.
struct PolicyBox {
  Point lo;
  Point hi;

  static PolicyBox unit(int dim) {
    return PolicyBox{Point::Zero(dim), Point::Ones(dim)};
  }

  int dim() const { return static_cast<int>(lo.size()); }

  double diameter() const { return (hi - lo).norm(); }

  Point center() const { return 0.5 * (lo + hi); }

  bool contains(const Eigen::Ref<const Point>& p, double tol = 0.0) const {
    for (int k = 0; k < dim(); ++k) {
      if (p(k) < lo(k) - tol || p(k) > hi(k) + tol) return false;
    }
    return true;
  }

  Point project(const Eigen::Ref<const Point>& p) const {
    return p.cwiseMax(lo).cwiseMin(hi);
  }

  void validate() const {
    if (lo.size() == 0 || lo.size() != hi.size()) {
      throw ConfigError("policy box: lo/hi dimension mismatch");
    }
    for (int k = 0; k < dim(); ++k) {
      if (!(lo(k) <= hi(k))) throw ConfigError("policy box: lo > hi");
    }
  }
};

inline Point Point1(double x) {
  Point p(1);
  p << x;
  return p;
}

inline Point Point2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

/// Builds a one-dimensional point set from scalar coordinates.
inline PointSet PointSet1(std::initializer_list<double> xs) {
  PointSet s(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) s(i++, 0) = x;
  return s;
}

}  // namespace elecdyn

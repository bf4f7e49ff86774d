#pragma once

/// One-round state transitions for voters and candidates, the distance-to-rate
/// response functions, and the named mechanism presets.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "elecdyn/geometry.hpp"
#include "elecdyn/types.hpp"

namespace elecdyn {

using Rng = std::mt19937_64;

enum class ResponseShape {
  Ramp,     // min -> max linearly over [0, ramp_width], flat afterwards
  Backlash  // min -> max over [0, peak], back to min over the next `fall`
};

/// Distance-dependent rate r -> [lo, hi]. Used for voter attraction (eta) and
/// candidate supporter chase (lambda).
struct ResponseFunction {
  double lo = 0.1;
  double hi = 0.1;
  ResponseShape shape = ResponseShape::Ramp;
  double ramp_width = 1.0;   // Ramp
  double peak = 0.35;        // Backlash
  double fall = 0.35;        // Backlash

  static ResponseFunction constant(double rate) {
    return {rate, rate, ResponseShape::Ramp, 1.0};
  }
  static ResponseFunction ramp(double lo, double hi, double width) {
    return {lo, hi, ResponseShape::Ramp, width};
  }
  static ResponseFunction backlash(double lo, double hi, double peak, double fall) {
    return {lo, hi, ResponseShape::Backlash, 1.0, peak, fall};
  }

  double operator()(double r) const {
    const double span = hi - lo;
    switch (shape) {
      case ResponseShape::Ramp:
        return lo + span * std::min(1.0, r / ramp_width);
      case ResponseShape::Backlash:
        if (r <= peak) return lo + span * (r / peak);
        return lo + span * std::max(0.0, 1.0 - (r - peak) / fall);
    }
    return lo;
  }

  bool monotone() const { return shape == ResponseShape::Ramp; }

  /// Closed-form Lipschitz constant.
  double lipschitz() const {
    const double span = hi - lo;
    switch (shape) {
      case ResponseShape::Ramp: return span / ramp_width;
      case ResponseShape::Backlash: return std::max(span / peak, span / fall);
    }
    return 0.0;
  }

  /// Largest finite-difference slope of the implemented function over
  /// [0, max_distance] at spacing `step`.
  double empirical_lipschitz(double max_distance, double step = 1e-3) const {
    double best = 0.0;
    double prev = (*this)(0.0);
    for (double r = step; r <= max_distance + 0.5 * step; r += step) {
      const double cur = (*this)(r);
      best = std::max(best, std::abs(cur - prev) / step);
      prev = cur;
    }
    return best;
  }

  void validate(const char* what) const {
    if (!(lo > 0.0 && lo <= hi && hi < 1.0)) {
      throw ConfigError(std::string(what) + ": need 0 < min <= max < 1");
    }
    if (!(ramp_width > 0.0 && peak > 0.0 && fall > 0.0)) {
      throw ConfigError(std::string(what) + ": ramp widths must be > 0");
    }
  }
};

using AttractionFunction = ResponseFunction;
using ChaseFunction = ResponseFunction;

struct DynamicsParams {
  AttractionFunction g;
  ChaseFunction h;
  double mu = 0.0;                // centroid pull
  double nu = 0.0;                // rival repulsion strength
  double rho = 0.2;               // repulsion magnitude cap
  double repulsion_radius = 0.25;
  double sigma_eps = 0.0;         // voter noise: E|eps|^2 = sigma_eps^2
  double sigma_delta = 0.0;       // candidate noise
  double noise_truncation = 4.0;  // in per-coordinate standard deviations

  void validate() const {
    g.validate("voter attraction");
    h.validate("candidate chase");
    if (!(mu >= 0.0) || !(nu >= 0.0)) throw ConfigError("mu and nu must be >= 0");
    if (!(rho > 0.0)) throw ConfigError("repulsion cap rho must be > 0");
    if (!(repulsion_radius > 0.0)) throw ConfigError("repulsion radius must be > 0");
    if (!(sigma_eps >= 0.0) || !std::isfinite(sigma_eps) || !(sigma_delta >= 0.0) ||
        !std::isfinite(sigma_delta)) {
      throw ConfigError("noise scales must be finite and >= 0");
    }
    if (!(noise_truncation > 0.0)) throw ConfigError("noise truncation must be > 0");
  }
};

enum class VoterMechanism { ConsensusPull, Backlash, SortingPressure };
enum class CandidateMechanism { Static, BroadCoalitionChase, BaseReinforcement };

struct MechanismPreset {
  VoterMechanism voter = VoterMechanism::ConsensusPull;
  CandidateMechanism candidate = CandidateMechanism::Static;
};

/// Concrete parameters for a mechanism pair. Ramp widths scale with the box:
/// 0.75 * diameter.
inline DynamicsParams preset_params(const MechanismPreset& preset,
                                    const PolicyBox& box = PolicyBox::unit(2)) {
  const double width = 0.75 * box.diameter();
  DynamicsParams p;
  switch (preset.voter) {
    case VoterMechanism::ConsensusPull:
      p.g = ResponseFunction::ramp(0.10, 0.25, width);
      break;
    case VoterMechanism::Backlash:
      p.g = ResponseFunction::backlash(0.04, 0.22, 0.15 * box.diameter(),
                                       0.15 * box.diameter());
      break;
    case VoterMechanism::SortingPressure:
      p.g = ResponseFunction::ramp(0.02, 0.30, width);
      break;
    default:
      throw ConfigError("unknown voter mechanism");
  }
  switch (preset.candidate) {
    case CandidateMechanism::Static:
      p.h = ResponseFunction::constant(1e-6);
      break;
    case CandidateMechanism::BroadCoalitionChase:
      p.h = ResponseFunction::ramp(0.10, 0.30, width);
      p.mu = 0.05;
      break;
    case CandidateMechanism::BaseReinforcement:
      p.h = ResponseFunction::ramp(0.15, 0.35, width);
      p.nu = 0.05;
      break;
    default:
      throw ConfigError("unknown candidate mechanism");
  }
  p.rho = 0.2;
  p.repulsion_radius = 0.25;
  p.sigma_eps = 0.01;
  p.sigma_delta = 0.01;
  return p;
}

namespace detail {

// Isotropic noise with E|z|^2 ~= scale^2: each coordinate is N(0, scale^2/d),
// redrawn until within `trunc` standard deviations.
inline void add_noise(Eigen::Ref<Point> x, double scale, double trunc, Rng& rng) {
  if (scale == 0.0) return;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = scale / std::sqrt(static_cast<double>(x.size()));
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double z = normal(rng);
    while (std::abs(z) > trunc) z = normal(rng);
    x(k) += sd * z;
  }
}

}  // namespace detail

/// Draws one noise vector exactly as the update steps do.
inline Point sample_noise(int dim, double scale, double trunc, Rng& rng) {
  Point z = Point::Zero(dim);
  detail::add_noise(z, scale, trunc, rng);
  return z;
}

/// x_i' = (1 - eta_i) x_i + eta_i w + eps_i, eta_i = g(|x_i - w|), then
/// projected onto the box.
inline PointSet voter_step(const PointSet& positions, const Point& winner,
                           const DynamicsParams& params, Rng& rng,
                           const PolicyBox& box) {
  PointSet next(positions.rows(), positions.cols());
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    const Point x = positions.row(i).transpose();
    const double eta = params.g((x - winner).norm());
    Point y = (1.0 - eta) * x + eta * winner;
    detail::add_noise(y, params.sigma_eps, params.noise_truncation, rng);
    next.row(i) = box.project(y).transpose();
  }
  return next;
}

/// Push away from the nearest rival: rho * (1 - d / radius) * unit(c_j - c_rival)
/// when d < radius. Coincident rivals push along the first axis.
inline Point repulsion_vector(const PointSet& candidates, Eigen::Index j,
                              const DynamicsParams& params) {
  Point r = Point::Zero(candidates.cols());
  if (candidates.rows() < 2) return r;
  Eigen::Index rival = -1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 0; l < candidates.rows(); ++l) {
    if (l == j) continue;
    const double d = (candidates.row(j) - candidates.row(l)).norm();
    if (d < best) {
      best = d;
      rival = l;
    }
  }
  if (best >= params.repulsion_radius) return r;
  const double magnitude = params.rho * (1.0 - best / params.repulsion_radius);
  if (best == 0.0) {
    r(0) = magnitude;
    return r;
  }
  return magnitude * (candidates.row(j) - candidates.row(rival)).transpose() / best;
}

/// c_j' = c_j + lambda_j (s_j - c_j) + mu (xbar - c_j) + nu r_j + delta_j,
/// lambda_j = h(|c_j - s_j|), then projected onto the box. Repulsion reads the
/// pre-update slate.
inline PointSet candidate_step(const PointSet& candidates, const PointSet& centroids,
                               const Point& voter_mean, const DynamicsParams& params,
                               Rng& rng, const PolicyBox& box) {
  if (candidates.rows() != centroids.rows() || candidates.cols() != centroids.cols()) {
    throw std::domain_error("candidate_step: candidates and centroids not aligned");
  }
  PointSet next(candidates.rows(), candidates.cols());
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
    const Point c = candidates.row(j).transpose();
    const Point s = centroids.row(j).transpose();
    const double lambda = params.h((c - s).norm());
    Point y = c + lambda * (s - c) + params.mu * (voter_mean - c);
    if (params.nu != 0.0) y += params.nu * repulsion_vector(candidates, j, params);
    detail::add_noise(y, params.sigma_delta, params.noise_truncation, rng);
    next.row(j) = box.project(y).transpose();
  }
  return next;
}

}  // namespace elecdyn

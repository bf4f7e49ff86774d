#pragma once

/// Contraction-factor algebra and pathwise checks of the voter- and
/// candidate-side one-step bounds on recorded trajectories.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elecdyn/records.hpp"

namespace elecdyn {

/// Absolute slack allowed on every deterministic bound comparison.
inline constexpr double kBoundSlack = 1e-12;

/// q = 1 - eta_min + L_eta * R.
inline double voter_factor(double eta_min, double L_eta, double R) {
  return 1.0 - eta_min + L_eta * R;
}

/// p = 1 - lambda_min + L_h * S + lambda_max * L_s.
inline double candidate_factor(double lambda_min, double L_h, double S,
                               double lambda_max, double L_s) {
  return 1.0 - lambda_min + L_h * S + lambda_max * L_s;
}

/// Largest ratio |s_j - s_l| / |c_j - c_l| over candidate pairs more than
/// 1e-9 apart; zero when no pair qualifies.
inline double estimate_Ls(const PointSet& candidates, const PointSet& centroids) {
  if (candidates.rows() < 2) throw std::domain_error("estimate_Ls: need K >= 2");
  if (centroids.rows() != candidates.rows()) {
    throw std::domain_error("estimate_Ls: candidates and centroids not aligned");
  }
  double best = 0.0;
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
    for (Eigen::Index l = j + 1; l < candidates.rows(); ++l) {
      const double dc = (candidates.row(j) - candidates.row(l)).norm();
      if (dc <= 1e-9) continue;
      best = std::max(best, (centroids.row(j) - centroids.row(l)).norm() / dc);
    }
  }
  return best;
}

struct ContractionRow {
  int t = 0;
  double radius = 0.0;  // R_t or S_t
  double factor = 0.0;  // q_t or p_t
  double bound_rhs = 0.0;
  double realized_next = 0.0;
  bool satisfied = true;
  double slack = 0.0;
};

struct ContractionReport {
  std::string kind;
  std::string selector;
  double lipschitz = 0.0;  // L_eta or L_h used
  std::vector<ContractionRow> rows;
  bool all_satisfied = true;
  double max_violation = 0.0;

  void add(ContractionRow row) {
    row.slack = row.bound_rhs - row.realized_next;
    row.satisfied = row.realized_next <= row.bound_rhs + kBoundSlack;
    if (!row.satisfied) {
      all_satisfied = false;
      max_violation = std::max(max_violation, -row.slack);
    }
    rows.push_back(row);
  }
};

/// L_eta used by the voter check: closed form for monotone ramps, the
/// finite-difference slope otherwise.
inline double attraction_lipschitz(const AttractionFunction& g, double diameter) {
  return g.monotone() ? g.lipschitz() : g.empirical_lipschitz(diameter);
}

/// D_{t+1} <= q_t^2 D_t for every recorded step. Only meaningful without
/// voter noise; noisy trajectories are refused.
inline ContractionReport check_voter_bound(const Trajectory& traj) {
  if (traj.params.sigma_eps != 0.0) {
    throw std::domain_error(
        "check_voter_bound: trajectory has voter noise; the pathwise check "
        "needs sigma_eps = 0");
  }
  ContractionReport rep;
  rep.kind = "voter";
  rep.selector = traj.selector;
  rep.lipschitz = attraction_lipschitz(traj.params.g, traj.box_diameter);
  for (size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const auto& cur = traj.records[k];
    const double q = voter_factor(traj.params.g.lo, rep.lipschitz, cur.R);
    rep.add({cur.t, cur.R, q, q * q * cur.D, traj.records[k + 1].D});
  }
  return rep;
}

/// Candidate-side check. Without repulsion: P_{t+1} <= p_t^2 P_t. With
/// repulsion: P_{t+1} <= 2 p_t^2 P_t + 8 nu^2 rho^2. p_t uses the empirical
/// L_s of round t. Requires soft assignment, mu = 0 and no candidate noise.
inline ContractionReport check_candidate_bound(const Trajectory& traj,
                                               bool with_repulsion) {
  if (!traj.soft_assignment) {
    throw std::domain_error(
        "check_candidate_bound: '" + traj.selector +
        "' uses hard assignment; supporter centroids jump across Voronoi "
        "boundaries so no finite L_s exists");
  }
  const auto& p = traj.params;
  if (p.mu != 0.0) throw std::domain_error("check_candidate_bound: needs mu = 0");
  if (p.sigma_delta != 0.0) {
    throw std::domain_error("check_candidate_bound: needs sigma_delta = 0");
  }
  if (!with_repulsion && p.nu != 0.0) {
    throw std::domain_error(
        "check_candidate_bound: nu > 0 requires the repulsion form");
  }
  ContractionReport rep;
  rep.kind = with_repulsion ? "candidate_repulsion" : "candidate";
  rep.selector = traj.selector;
  rep.lipschitz = attraction_lipschitz(p.h, traj.box_diameter);
  const double c_rep = 8.0 * p.nu * p.nu * p.rho * p.rho;
  for (size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const auto& cur = traj.records[k];
    const double Ls = estimate_Ls(cur.candidates, cur.centroids);
    const double pt = candidate_factor(p.h.lo, rep.lipschitz, cur.S, p.h.hi, Ls);
    const double rhs = with_repulsion ? 2.0 * pt * pt * cur.P + c_rep : pt * pt * cur.P;
    rep.add({cur.t, cur.S, pt, rhs, traj.records[k + 1].P});
  }
  return rep;
}

struct EnvelopeParams {
  double a = 0.5;       // squared contraction factor
  double D0 = 0.0;      // initial disagreement
  double sigma2 = 0.0;  // per-step noise variance
};

/// a^t D0 + sigma2 (1 - a^t) / (1 - a).
inline double envelope(const EnvelopeParams& e, int t) {
  if (!(e.a > 0.0 && e.a < 1.0)) {
    throw std::domain_error("envelope: need 0 < a < 1");
  }
  const double at = std::pow(e.a, t);
  return at * e.D0 + e.sigma2 * (1.0 - at) / (1.0 - e.a);
}

/// Stationary voter bound sigma2 / (1 - q*^2); requires q* < 1.
inline double noise_floor(double sigma2, double q_star) {
  if (!(std::abs(q_star) < 1.0)) {
    throw std::domain_error("noise_floor: stability condition q* < 1 fails");
  }
  return sigma2 / (1.0 - q_star * q_star);
}

/// Stationary candidate bounds: sigma_delta^2 / (1 - p*^2) without
/// repulsion, (8 nu^2 rho^2 + sigma_delta^2) / (1 - 2 p*^2) with it.
inline double candidate_noise_floor(double sigma_delta2, double p_star, double nu,
                                    double rho) {
  if (nu == 0.0) {
    if (!(std::abs(p_star) < 1.0)) {
      throw std::domain_error("candidate_noise_floor: stability condition p* < 1 fails");
    }
    return sigma_delta2 / (1.0 - p_star * p_star);
  }
  if (!(2.0 * p_star * p_star < 1.0)) {
    throw std::domain_error(
        "candidate_noise_floor: stability condition p* < 1/sqrt(2) fails");
  }
  return (8.0 * nu * nu * rho * rho + sigma_delta2) / (1.0 - 2.0 * p_star * p_star);
}

inline nlohmann::json to_json(const ContractionReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"t", r.t},
                    {"radius", r.radius},
                    {"factor", r.factor},
                    {"bound_rhs", r.bound_rhs},
                    {"realized_next", r.realized_next},
                    {"satisfied", r.satisfied},
                    {"slack", r.slack}});
  }
  return {{"kind", rep.kind},
          {"selector", rep.selector},
          {"lipschitz", rep.lipschitz},
          {"all_satisfied", rep.all_satisfied},
          {"max_violation", rep.max_violation},
          {"rows", rows}};
}

}  // namespace elecdyn

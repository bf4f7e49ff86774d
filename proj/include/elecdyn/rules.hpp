#pragma once

/// Sincere-voting electoral rules over spatial preferences. A voter prefers
/// nearer candidates; every tie (ballot, elimination, beatpath) goes to the
/// lowest candidate index.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "elecdyn/geometry.hpp"
#include "elecdyn/types.hpp"

namespace elecdyn {

/// n x K voter-to-candidate support; rows are nonnegative and sum to one.
using AssignmentWeights = Eigen::MatrixXd;

enum class RuleTag { Plurality, IRV, Approval, Score, CondorcetSchulze, Fractional };

struct RuleSpec {
  RuleTag tag = RuleTag::Plurality;
  double approval_threshold = 0.35;
  double score_max = 10.0;
  // Distance at which a score reaches zero; <= 0 means "box diameter".
  double score_zero_distance = 0.0;
  double sigma = 1.0;

  static RuleSpec plurality() { return {RuleTag::Plurality}; }
  static RuleSpec irv() { return {RuleTag::IRV}; }
  static RuleSpec approval(double threshold = 0.35) {
    RuleSpec r{RuleTag::Approval};
    r.approval_threshold = threshold;
    return r;
  }
  static RuleSpec score() { return {RuleTag::Score}; }
  static RuleSpec condorcet() { return {RuleTag::CondorcetSchulze}; }
  static RuleSpec fractional(double sigma) {
    RuleSpec r{RuleTag::Fractional};
    r.sigma = sigma;
    return r;
  }

  /// Hard rules elect one slate member and assign each voter to one candidate.
  bool soft_assignment() const {
    return tag == RuleTag::Fractional || tag == RuleTag::Score;
  }

  std::string name() const {
    switch (tag) {
      case RuleTag::Plurality: return "Plurality";
      case RuleTag::IRV: return "IRV";
      case RuleTag::Approval: return "Approval";
      case RuleTag::Score: return "Score";
      case RuleTag::CondorcetSchulze: return "Condorcet";
      case RuleTag::Fractional: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "Fractional(%.2f)", sigma);
        return buf;
      }
    }
    return "?";
  }

  void validate() const {
    if (tag == RuleTag::Fractional && !(sigma > 0.0)) {
      throw ConfigError("Fractional rule needs sigma > 0");
    }
    if (tag == RuleTag::Approval && !(approval_threshold > 0.0)) {
      throw ConfigError("Approval rule needs threshold > 0");
    }
    if (tag == RuleTag::Score && !(score_max > 0.0)) {
      throw ConfigError("Score rule needs a positive score range");
    }
  }
};

struct ElectionOutcome {
  Point winner;
  std::optional<int> winner_index;  // absent for convex-combination outcomes
  std::vector<double> tallies;
  AssignmentWeights weights;
};

/// n x K Euclidean distances.
inline Eigen::MatrixXd distance_matrix(const PointSet& voters,
                                       const PointSet& candidates) {
  if (voters.cols() != candidates.cols()) {
    throw std::domain_error("distance_matrix: dimension mismatch");
  }
  Eigen::MatrixXd d(voters.rows(), candidates.rows());
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
    d.col(j) = (voters.rowwise() - candidates.row(j)).rowwise().norm();
  }
  return d;
}

namespace detail {

inline int nearest(const Eigen::MatrixXd& dist, Eigen::Index i) {
  int best = 0;
  for (int j = 1; j < dist.cols(); ++j) {
    if (dist(i, j) < dist(i, best)) best = j;
  }
  return best;
}

inline int argmax_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j) {
    if (v[static_cast<size_t>(j)] > v[static_cast<size_t>(best)]) best = j;
  }
  return best;
}

inline void require_nonempty(const PointSet& voters, const PointSet& candidates) {
  if (voters.rows() == 0) throw std::domain_error("election with no voters");
  if (candidates.rows() == 0) throw std::domain_error("election with no candidates");
}

inline ElectionOutcome slate_outcome(const PointSet& candidates, int winner,
                                     std::vector<double> tallies,
                                     AssignmentWeights weights) {
  return {candidates.row(winner).transpose(), winner, std::move(tallies),
          std::move(weights)};
}

}  // namespace detail

/// One-hot nearest-candidate assignment.
inline AssignmentWeights voronoi_weights(const PointSet& voters,
                                         const PointSet& candidates) {
  const Eigen::MatrixXd dist = distance_matrix(voters, candidates);
  AssignmentWeights w = AssignmentWeights::Zero(voters.rows(), candidates.rows());
  for (Eigen::Index i = 0; i < voters.rows(); ++i) w(i, detail::nearest(dist, i)) = 1.0;
  return w;
}

inline ElectionOutcome plurality_winner(const PointSet& voters,
                                        const PointSet& candidates) {
  detail::require_nonempty(voters, candidates);
  AssignmentWeights w = voronoi_weights(voters, candidates);
  std::vector<double> tallies(static_cast<size_t>(candidates.rows()));
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) tallies[static_cast<size_t>(j)] = w.col(j).sum();
  const int winner = detail::argmax_lowest(tallies);
  return detail::slate_outcome(candidates, winner, std::move(tallies), std::move(w));
}

/// Instant runoff. Tallies are the first-preference counts of the deciding
/// round; eliminated candidates report zero.
inline ElectionOutcome irv_winner(const PointSet& voters,
                                  const PointSet& candidates) {
  detail::require_nonempty(voters, candidates);
  const Eigen::MatrixXd dist = distance_matrix(voters, candidates);
  const auto n = static_cast<size_t>(voters.rows());
  const auto K = static_cast<size_t>(candidates.rows());

  std::vector<std::vector<int>> ballots(n);
  for (size_t i = 0; i < n; ++i) {
    auto& b = ballots[i];
    b.resize(K);
    std::iota(b.begin(), b.end(), 0);
    std::stable_sort(b.begin(), b.end(), [&](int a, int c) {
      return dist(static_cast<Eigen::Index>(i), a) < dist(static_cast<Eigen::Index>(i), c);
    });
  }

  std::vector<bool> active(K, true);
  size_t remaining = K;
  std::vector<double> tallies(K, 0.0);
  while (true) {
    std::fill(tallies.begin(), tallies.end(), 0.0);
    for (const auto& b : ballots) {
      for (int c : b) {
        if (active[static_cast<size_t>(c)]) {
          tallies[static_cast<size_t>(c)] += 1.0;
          break;
        }
      }
    }
    const int leader = detail::argmax_lowest(tallies);
    if (2.0 * tallies[static_cast<size_t>(leader)] > static_cast<double>(n) ||
        remaining == 1) {
      return detail::slate_outcome(candidates, leader, std::move(tallies),
                                   voronoi_weights(voters, candidates));
    }
    int loser = -1;
    for (size_t c = 0; c < K; ++c) {
      if (!active[c]) continue;
      if (loser < 0 || tallies[c] < tallies[static_cast<size_t>(loser)]) {
        loser = static_cast<int>(c);
      }
    }
    active[static_cast<size_t>(loser)] = false;
    --remaining;
  }
}

/// Each voter approves every candidate within `threshold`; a voter with no
/// candidate in range approves the nearest one.
inline ElectionOutcome approval_winner(const PointSet& voters,
                                       const PointSet& candidates,
                                       double threshold) {
  detail::require_nonempty(voters, candidates);
  if (!(threshold > 0.0)) throw std::domain_error("approval threshold must be > 0");
  const Eigen::MatrixXd dist = distance_matrix(voters, candidates);
  std::vector<double> tallies(static_cast<size_t>(candidates.rows()), 0.0);
  for (Eigen::Index i = 0; i < voters.rows(); ++i) {
    bool any = false;
    for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
      if (dist(i, j) <= threshold) {
        tallies[static_cast<size_t>(j)] += 1.0;
        any = true;
      }
    }
    if (!any) tallies[static_cast<size_t>(detail::nearest(dist, i))] += 1.0;
  }
  const int winner = detail::argmax_lowest(tallies);
  return detail::slate_outcome(candidates, winner, std::move(tallies),
                               voronoi_weights(voters, candidates));
}

/// Ballot scores: score_max * max(0, 1 - d / zero_distance).
inline Eigen::MatrixXd score_matrix(const PointSet& voters,
                                    const PointSet& candidates,
                                    double zero_distance, double score_max = 10.0) {
  if (!(zero_distance > 0.0)) throw std::domain_error("score: zero distance must be > 0");
  const Eigen::MatrixXd dist = distance_matrix(voters, candidates);
  return (score_max * (1.0 - dist.array() / zero_distance).max(0.0)).matrix();
}

/// Score rows normalized to sum to one; an all-zero row falls back to the
/// nearest candidate.
inline AssignmentWeights score_weights(const PointSet& voters,
                                       const PointSet& candidates,
                                       double zero_distance) {
  AssignmentWeights w = score_matrix(voters, candidates, zero_distance);
  const AssignmentWeights hard = voronoi_weights(voters, candidates);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double s = w.row(i).sum();
    if (s > 0.0) {
      w.row(i) /= s;
    } else {
      w.row(i) = hard.row(i);
    }
  }
  return w;
}

inline ElectionOutcome score_winner(const PointSet& voters,
                                    const PointSet& candidates,
                                    double zero_distance, double score_max = 10.0) {
  detail::require_nonempty(voters, candidates);
  const Eigen::MatrixXd scores =
      score_matrix(voters, candidates, zero_distance, score_max);
  std::vector<double> tallies(static_cast<size_t>(candidates.rows()));
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) tallies[static_cast<size_t>(j)] = scores.col(j).sum();
  const int winner = detail::argmax_lowest(tallies);
  return detail::slate_outcome(candidates, winner, std::move(tallies),
                               score_weights(voters, candidates, zero_distance));
}

/// prefs(a, b) = number of voters strictly closer to a than to b.
inline Eigen::MatrixXi pairwise_preferences(const PointSet& voters,
                                            const PointSet& candidates) {
  const Eigen::MatrixXd dist = distance_matrix(voters, candidates);
  const auto K = candidates.rows();
  Eigen::MatrixXi prefs = Eigen::MatrixXi::Zero(K, K);
  for (Eigen::Index i = 0; i < voters.rows(); ++i) {
    for (Eigen::Index a = 0; a < K; ++a) {
      for (Eigen::Index b = 0; b < K; ++b) {
        if (dist(i, a) < dist(i, b)) ++prefs(a, b);
      }
    }
  }
  return prefs;
}

/// Widest-path strengths over the defeat graph (edge a->b weighted by
/// prefs(a, b) when a beats b, else absent).
inline Eigen::MatrixXi schulze_strengths(const Eigen::MatrixXi& prefs) {
  const auto K = prefs.rows();
  Eigen::MatrixXi p = Eigen::MatrixXi::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a != b && prefs(a, b) > prefs(b, a)) p(a, b) = prefs(a, b);
    }
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index a = 0; a < K; ++a) {
      if (a == k) continue;
      for (Eigen::Index b = 0; b < K; ++b) {
        if (b == a || b == k) continue;
        p(a, b) = std::max(p(a, b), std::min(p(a, k), p(k, b)));
      }
    }
  }
  return p;
}

/// Condorcet winner when one exists, otherwise the Schulze winner. Tallies
/// count pairwise victories.
inline ElectionOutcome condorcet_schulze_winner(const PointSet& voters,
                                                const PointSet& candidates) {
  detail::require_nonempty(voters, candidates);
  const Eigen::MatrixXi prefs = pairwise_preferences(voters, candidates);
  const auto K = static_cast<int>(candidates.rows());
  std::vector<double> tallies(static_cast<size_t>(K), 0.0);
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) {
      if (a != b && prefs(a, b) > prefs(b, a)) tallies[static_cast<size_t>(a)] += 1.0;
    }
  }
  auto weights = voronoi_weights(voters, candidates);
  for (int a = 0; a < K; ++a) {
    if (tallies[static_cast<size_t>(a)] == K - 1) {
      return detail::slate_outcome(candidates, a, std::move(tallies), std::move(weights));
    }
  }
  const Eigen::MatrixXi strength = schulze_strengths(prefs);
  int winner = 0;
  for (int a = 0; a < K; ++a) {
    bool dominates = true;
    for (int b = 0; b < K && dominates; ++b) {
      if (a != b && strength(a, b) < strength(b, a)) dominates = false;
    }
    if (dominates) {
      winner = a;
      break;
    }
  }
  return detail::slate_outcome(candidates, winner, std::move(tallies), std::move(weights));
}

/// Softmax of -|x_i - c_j|^2 / sigma^2 across candidates, per voter.
inline AssignmentWeights fractional_weights(const PointSet& voters,
                                            const PointSet& candidates,
                                            double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("fractional: sigma must be > 0");
  const Eigen::MatrixXd dist = distance_matrix(voters, candidates);
  AssignmentWeights logits = -dist.array().square() / (sigma * sigma);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - m).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

/// Implements sum_j beta_j c_j where beta is the column mean of the
/// fractional weights. Tallies carry beta.
inline ElectionOutcome fractional_winner(const PointSet& voters,
                                         const PointSet& candidates, double sigma) {
  detail::require_nonempty(voters, candidates);
  AssignmentWeights w = fractional_weights(voters, candidates, sigma);
  const Eigen::VectorXd beta = w.colwise().mean().transpose();
  ElectionOutcome out;
  out.winner = candidates.transpose() * beta;
  out.tallies.assign(beta.data(), beta.data() + beta.size());
  out.weights = std::move(w);
  return out;
}

inline double score_zero_distance(const RuleSpec& rule, const PolicyBox& box) {
  return rule.score_zero_distance > 0.0 ? rule.score_zero_distance : box.diameter();
}

/// Support weights a rule induces: soft for Fractional and Score, Voronoi
/// one-hot otherwise.
inline AssignmentWeights assignment_weights(const RuleSpec& rule,
                                            const PointSet& voters,
                                            const PointSet& candidates,
                                            const PolicyBox& box) {
  rule.validate();
  switch (rule.tag) {
    case RuleTag::Fractional: return fractional_weights(voters, candidates, rule.sigma);
    case RuleTag::Score:
      return score_weights(voters, candidates, score_zero_distance(rule, box));
    default: return voronoi_weights(voters, candidates);
  }
}

inline ElectionOutcome elect(const RuleSpec& rule, const PointSet& voters,
                             const PointSet& candidates, const PolicyBox& box) {
  rule.validate();
  switch (rule.tag) {
    case RuleTag::Plurality: return plurality_winner(voters, candidates);
    case RuleTag::IRV: return irv_winner(voters, candidates);
    case RuleTag::Approval:
      return approval_winner(voters, candidates, rule.approval_threshold);
    case RuleTag::Score:
      return score_winner(voters, candidates, score_zero_distance(rule, box),
                          rule.score_max);
    case RuleTag::CondorcetSchulze: return condorcet_schulze_winner(voters, candidates);
    case RuleTag::Fractional: return fractional_winner(voters, candidates, rule.sigma);
  }
  throw ConfigError("unknown rule");
}

/// Weighted centroid of each candidate's supporters; candidates with total
/// weight below 1e-12 keep their own position.
inline PointSet supporter_centroids(const AssignmentWeights& weights,
                                    const PointSet& voters,
                                    const PointSet& candidates) {
  if (weights.rows() != voters.rows() || weights.cols() != candidates.rows()) {
    throw std::domain_error("supporter_centroids: weight matrix shape mismatch");
  }
  PointSet s = weights.transpose() * voters;
  const Eigen::VectorXd mass = weights.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < s.rows(); ++j) {
    if (mass(j) < 1e-12) {
      s.row(j) = candidates.row(j);
    } else {
      s.row(j) /= mass(j);
    }
  }
  return s;
}

}  // namespace elecdyn

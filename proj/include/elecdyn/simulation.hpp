#pragma once

/// The repeated-election round loop.

#include <cstdint>
#include <random>

#include "elecdyn/bounds.hpp"
#include "elecdyn/config.hpp"
#include "elecdyn/electorate.hpp"
#include "elecdyn/oracles.hpp"
#include "elecdyn/records.hpp"
#include "elecdyn/rules.hpp"

namespace elecdyn {

/// Deterministic 64-bit mixer used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Winner plus the support weights used for supporter centroids. Oracles
/// assign supporters by Voronoi cell.
inline ElectionOutcome select_winner(const WinnerSelector& selector,
                                     const PointSet& voters, const PointSet& candidates,
                                     const DynamicsParams& params, const PolicyBox& box) {
  if (const auto* rule = std::get_if<RuleSpec>(&selector)) {
    return elect(*rule, voters, candidates, box);
  }
  const auto& oracle = std::get<OracleSpec>(selector);
  ElectionOutcome out;
  out.winner = oracle.tag == OracleTag::Centrality
                   ? centrality_oracle(voters, box)
                   : depolarization_oracle(voters, params.g, box, oracle);
  out.weights = voronoi_weights(voters, candidates);
  return out;
}

/// Runs `cfg.rounds` rounds and returns rounds + 1 records (t = 0 included).
/// Each round: weights and centroids from the current state, elect, record,
/// then move voters and candidates simultaneously from that same state.
inline Trajectory run_simulation(const RunConfig& cfg) {
  cfg.validate();
  const PolicyBox& box = cfg.box;
  const Electorate elec =
      generate_electorate(cfg.profile, cfg.balance, cfg.n, cfg.seed, box);
  PointSet voters = elec.positions;
  PointSet candidates = generate_slate(cfg.slate, cfg.profile, cfg.seed, box);
  std::seed_seq seq{cfg.seed, std::uint64_t{0xD1A}};
  Rng rng(seq);

  Trajectory traj;
  traj.selector = selector_name(cfg.selector);
  traj.soft_assignment = selector_soft(cfg.selector);
  traj.params = cfg.dynamics;
  traj.box_diameter = box.diameter();
  traj.records.reserve(static_cast<size_t>(cfg.rounds) + 1);
  const double L_eta = attraction_lipschitz(cfg.dynamics.g, box.diameter());

  for (int t = 0;; ++t) {
    const ElectionOutcome out =
        select_winner(cfg.selector, voters, candidates, cfg.dynamics, box);
    PointSet centroids = supporter_centroids(out.weights, voters, candidates);
    const Point xbar = mean_point(voters);

    RoundRecord rec;
    rec.t = t;
    rec.winner = out.winner;
    rec.winner_index = out.winner_index;
    rec.R = winner_radius(voters, out.winner);
    rec.S = supporter_radius(candidates, centroids);
    rec.D = pairwise_variance(voters);
    rec.P = pairwise_variance(candidates);
    rec.A = camp_asymmetry(elec, voters);
    rec.A_signed = signed_camp_asymmetry(elec, voters);
    rec.dist_winner_to_mean = (out.winner - xbar).norm();
    rec.dist_winner_to_median = (out.winner - coordinatewise_median(voters)).norm();
    rec.q = voter_factor(cfg.dynamics.g.lo, L_eta, rec.R);
    rec.candidates = candidates;
    rec.centroids = centroids;
    traj.records.push_back(std::move(rec));

    if (t == cfg.rounds) break;
    PointSet next_voters = voter_step(voters, out.winner, cfg.dynamics, rng, box);
    candidates = candidate_step(candidates, centroids, xbar, cfg.dynamics, rng, box);
    voters = std::move(next_voters);
  }
  return traj;
}

}  // namespace elecdyn

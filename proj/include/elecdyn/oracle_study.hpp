#pragma once

/// Paired comparison of the centrality and depolarization oracles on one
/// fixed environment.

#include <ostream>
#include <string>
#include <vector>

#include "elecdyn/parallel.hpp"
#include "elecdyn/simulation.hpp"
#include "elecdyn/summarize.hpp"

namespace elecdyn {

/// Bridge conflict, 70:30, polarized elites, sorting pressure voters and base
/// reinforcement candidates (mu = 0).
inline RunConfig oracle_environment() {
  RunConfig c;
  c.profile = ElectorateProfile::preset(ProfileTag::BridgeConflict);
  c.balance = CampBalance::preset(BalanceTag::R70_30);
  c.slate.tag = SlateTag::PolarizedElites;
  c.mechanism = {VoterMechanism::SortingPressure, CandidateMechanism::BaseReinforcement};
  c.dynamics = preset_params(c.mechanism, c.box);
  c.dynamics.mu = 0.0;
  c.n = 1400;
  c.rounds = 16;
  return c;
}

struct Band {
  double median = 0, q25 = 0, q75 = 0;
};

inline Band band_of(const std::vector<double>& v) {
  return {quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)};
}

struct OracleRoundRow {
  std::string oracle;
  int t = 0;
  Band R, D, A;  // A is the signed camp asymmetry
};

struct OracleComparison {
  std::vector<OracleRoundRow> rows;      // oracle-major, t ascending
  std::vector<Trajectory> centrality;    // one per replicate
  std::vector<Trajectory> depolarization;
  std::vector<std::uint64_t> seeds;
};

/// Runs both oracles on `replicates` seeded copies of `env` (the same seed for
/// both oracles in a replicate). Rows cover the `rounds` election rounds
/// t = 0 .. rounds - 1, each measured before that round's update.
inline OracleComparison run_oracle_comparison(int replicates, Eigen::Index n, int rounds,
                                              RunConfig env, int workers = 1,
                                              OracleSpec depolarization = {
                                                  OracleTag::Depolarization}) {
  if (replicates < 1) throw ConfigError("oracle comparison: replicates must be >= 1");
  if (rounds < 1) throw ConfigError("oracle comparison: rounds must be >= 1");
  env.n = n;
  env.rounds = rounds;
  depolarization.tag = OracleTag::Depolarization;

  OracleComparison out;
  const auto reps = static_cast<size_t>(replicates);
  out.centrality.resize(reps);
  out.depolarization.resize(reps);
  for (size_t r = 0; r < reps; ++r) out.seeds.push_back(mix_seed(env.seed + r));

  std::vector<std::string> errors(2 * reps);
  parallel_for(2 * reps, workers, [&](size_t job) {
    const size_t r = job / 2;
    RunConfig c = env;
    c.seed = out.seeds[r];
    try {
      if (job % 2 == 0) {
        c.selector = OracleSpec{OracleTag::Centrality};
        out.centrality[r] = run_simulation(c);
      } else {
        c.selector = depolarization;
        out.depolarization[r] = run_simulation(c);
      }
    } catch (const std::exception& e) {
      errors[job] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("oracle comparison: " + e);
  }

  for (const auto* runs : {&out.centrality, &out.depolarization}) {
    for (int t = 0; t < rounds; ++t) {
      std::vector<double> R, D, A;
      for (const auto& traj : *runs) {
        const auto& rec = traj.records[static_cast<size_t>(t)];
        R.push_back(rec.R);
        D.push_back(rec.D);
        A.push_back(rec.A_signed);
      }
      out.rows.push_back({runs->front().selector, t, band_of(R), band_of(D), band_of(A)});
    }
  }
  return out;
}

inline void write_oracle_csv(std::ostream& o, const OracleComparison& cmp) {
  using detail::num;
  o << "oracle,t,R_median,R_q25,R_q75,D_median,D_q25,D_q75,A_median,A_q25,A_q75\n";
  for (const auto& r : cmp.rows) {
    o << r.oracle << "," << r.t;
    for (const Band* b : {&r.R, &r.D, &r.A}) {
      o << "," << num(b->median) << "," << num(b->q25) << "," << num(b->q75);
    }
    o << "\n";
  }
}

}  // namespace elecdyn

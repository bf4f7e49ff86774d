#pragma once

/// Factorial experiment grid: cell enumeration, parallel execution and the
/// on-disk result schemas (see docs/output_schema.md).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elecdyn/config.hpp"
#include "elecdyn/parallel.hpp"
#include "elecdyn/simulation.hpp"

namespace elecdyn {

struct GridSpec {
  std::vector<ProfileTag> profiles;
  std::vector<BalanceTag> balances;
  std::vector<SlateTag> slates;
  std::vector<VoterMechanism> voter_mechanisms;
  std::vector<CandidateMechanism> candidate_mechanisms;
  std::vector<RuleSpec> rules;
  int replicates = 1;
  Eigen::Index n = 900;
  int rounds = 20;
  std::uint64_t seed = 1;
  // Keep only cells whose resolved centroid pull is zero.
  bool mu_zero_only = false;
  // Run-config keys applied to every cell after preset expansion.
  KeyValues overrides;

  /// 3 profiles x 3 balances x 2 slates x 3 x 3 mechanisms x 7 rules.
  static GridSpec full() {
    GridSpec g;
    g.profiles = {ProfileTag::BridgeConflict, ProfileTag::AsymmetricResentment,
                  ProfileTag::Diffuse};
    g.balances = {BalanceTag::Original, BalanceTag::R70_30, BalanceTag::R50_50};
    g.slates = {SlateTag::CentristLadder, SlateTag::PolarizedElites};
    g.voter_mechanisms = {VoterMechanism::ConsensusPull, VoterMechanism::Backlash,
                          VoterMechanism::SortingPressure};
    g.candidate_mechanisms = {CandidateMechanism::Static,
                              CandidateMechanism::BroadCoalitionChase,
                              CandidateMechanism::BaseReinforcement};
    g.rules = {RuleSpec::plurality(),       RuleSpec::irv(),
               RuleSpec::approval(),        RuleSpec::score(),
               RuleSpec::condorcet(),       RuleSpec::fractional(0.3),
               RuleSpec::fractional(1.0)};
    return g;
  }

  /// The full grid restricted to mu = 0 cells.
  static GridSpec mu_zero() {
    GridSpec g = full();
    g.mu_zero_only = true;
    return g;
  }

  std::size_t axis_product() const {
    return profiles.size() * balances.size() * slates.size() *
           voter_mechanisms.size() * candidate_mechanisms.size() * rules.size() *
           static_cast<std::size_t>(replicates);
  }
};

struct CellSpec {
  int index = 0;
  int environment = 0;  // cells differing only in rule share an environment
  int replicate = 0;
  RunConfig config;
};

/// Enumerates cells in a fixed nested order (profile, balance, slate, voter
/// mechanism, candidate mechanism, replicate, rule). The seed depends on the
/// environment and replicate but not the rule, so rules are compared on
/// identical initial states.
inline std::vector<CellSpec> grid_cells(const GridSpec& g) {
  if (g.replicates < 1) throw ConfigError("grid: replicates must be >= 1");
  std::vector<CellSpec> cells;
  int env = 0;
  for (auto profile : g.profiles)
    for (auto balance : g.balances)
      for (auto slate : g.slates)
        for (auto vm : g.voter_mechanisms)
          for (auto cm : g.candidate_mechanisms) {
            for (int rep = 0; rep < g.replicates; ++rep) {
              for (const auto& rule : g.rules) {
                RunConfig c;
                c.profile = ElectorateProfile::preset(profile);
                c.balance = CampBalance::preset(balance);
                c.slate.tag = slate;
                c.mechanism = {vm, cm};
                c.dynamics = preset_params(c.mechanism, c.box);
                c.selector = rule;
                c.n = g.n;
                c.rounds = g.rounds;
                c.seed = mix_seed(g.seed ^ mix_seed(static_cast<std::uint64_t>(env) *
                                                        1000003ULL +
                                                    static_cast<std::uint64_t>(rep)));
                for (const auto& [k, v] : g.overrides) {
                  if (!apply_override(c, k, v)) {
                    throw ConfigError("grid: unknown override key '" + k + "'");
                  }
                }
                if (g.mu_zero_only && c.dynamics.mu != 0.0) continue;
                c.validate();
                cells.push_back({0, env, rep, std::move(c)});
              }
            }
            ++env;
          }
  for (size_t i = 0; i < cells.size(); ++i) cells[i].index = static_cast<int>(i);
  return cells;
}

struct CellResult {
  CellSpec cell;
  bool ok = false;
  std::string error;
  Trajectory trajectory;
};

/// Runs every cell; a failing cell records its error and the rest continue.
/// Output order is the cell order regardless of `workers`.
inline std::vector<CellResult> run_grid(const GridSpec& grid, int workers) {
  const auto cells = grid_cells(grid);
  std::vector<CellResult> out(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    out[i].cell = cells[i];
    try {
      out[i].trajectory = run_simulation(cells[i].config);
      out[i].ok = true;
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

// ---- grid spec files --------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& v, F parse) {
  std::vector<T> out;
  for (const auto& s : split_list(v)) out.push_back(parse(s));
  return out;
}

}  // namespace detail

/// Grid spec file: axis lists (`profiles`, `balances`, `slates`,
/// `voter_mechanisms`, `candidate_mechanisms`, `rules`) as comma-separated
/// names, plus `replicates`, `n`, `rounds`, `seed`, `mu_zero`. Omitted axes
/// take the full-grid values; any other key is a per-cell run override.
inline GridSpec grid_from_key_values(const KeyValues& kv) {
  GridSpec g = GridSpec::full();
  for (const auto& [key, v] : kv) {
    if (key == "profiles") g.profiles = detail::parse_list<ProfileTag>(v, parse_profile);
    else if (key == "balances") g.balances = detail::parse_list<BalanceTag>(v, parse_balance);
    else if (key == "slates") g.slates = detail::parse_list<SlateTag>(v, parse_slate);
    else if (key == "voter_mechanisms") {
      g.voter_mechanisms = detail::parse_list<VoterMechanism>(v, parse_voter_mechanism);
    } else if (key == "candidate_mechanisms") {
      g.candidate_mechanisms =
          detail::parse_list<CandidateMechanism>(v, parse_candidate_mechanism);
    } else if (key == "rules") {
      g.rules = detail::parse_list<RuleSpec>(v, [](const std::string& s) {
        auto sel = parse_selector(s);
        if (!std::holds_alternative<RuleSpec>(sel)) {
          throw ConfigError("grid: oracles are not grid rules ('" + s + "')");
        }
        return std::get<RuleSpec>(sel);
      });
    } else if (key == "replicates") g.replicates = static_cast<int>(detail::to_int(key, v));
    else if (key == "n") g.n = detail::to_int(key, v);
    else if (key == "rounds") g.rounds = static_cast<int>(detail::to_int(key, v));
    else if (key == "seed") g.seed = static_cast<std::uint64_t>(detail::to_int(key, v));
    else if (key == "mu_zero") {
      if (v != "true" && v != "false") throw ConfigError("mu_zero: expected true or false");
      g.mu_zero_only = v == "true";
    } else {
      g.overrides[key] = v;
    }
  }
  return g;
}

// ---- output ---------------------------------------------------------------

namespace detail {

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline nlohmann::json point_json(const Point& p) {
  return std::vector<double>(p.data(), p.data() + p.size());
}

inline nlohmann::json points_json(const PointSet& s) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.rows(); ++i) a.push_back(point_json(s.row(i).transpose()));
  return a;
}

}  // namespace detail

inline nlohmann::json record_json(const RoundRecord& r) {
  nlohmann::json j = {{"t", r.t},
                      {"winner", detail::point_json(r.winner)},
                      {"winner_index", r.winner_index ? nlohmann::json(*r.winner_index)
                                                      : nlohmann::json(nullptr)},
                      {"R", r.R},
                      {"S", r.S},
                      {"D", r.D},
                      {"P", r.P},
                      {"A", r.A},
                      {"A_signed", r.A_signed},
                      {"dist_winner_to_mean", r.dist_winner_to_mean},
                      {"dist_winner_to_median", r.dist_winner_to_median},
                      {"q", r.q ? nlohmann::json(*r.q) : nlohmann::json(nullptr)},
                      {"candidates", detail::points_json(r.candidates)},
                      {"centroids", detail::points_json(r.centroids)}};
  return j;
}

inline void write_jsonl(std::ostream& out, const Trajectory& traj) {
  for (const auto& r : traj.records) out << record_json(r).dump() << "\n";
}

inline const char* summary_header() {
  return "cell,profile,balance,slate,voter_mechanism,candidate_mechanism,rule,"
         "replicate,seed,n,rounds,status,R0,R_end,S_end,D0,D_end,delta_D,P0,P_end,"
         "delta_P,A_end,A_signed_end,w2c0,w2c_end,delta_w2c,w2m_end";
}

inline std::string cell_factors(const CellSpec& c) {
  const auto& cfg = c.config;
  std::ostringstream o;
  o << c.index << "," << to_string(cfg.profile.tag) << "," << to_string(cfg.balance.tag)
    << "," << to_string(cfg.slate.tag) << "," << to_string(cfg.mechanism.voter) << ","
    << to_string(cfg.mechanism.candidate) << "," << selector_name(cfg.selector) << ","
    << c.replicate;
  return o.str();
}

inline std::string summary_row(const CellResult& r) {
  using detail::num;
  std::ostringstream o;
  const auto& cfg = r.cell.config;
  o << cell_factors(r.cell) << "," << cfg.seed << "," << cfg.n << "," << cfg.rounds << ",";
  if (!r.ok || r.trajectory.records.empty()) {
    o << "error" << std::string(15, ',');
    return o.str();
  }
  const auto& first = r.trajectory.records.front();
  const auto& last = r.trajectory.records.back();
  o << "ok," << num(first.R) << "," << num(last.R) << "," << num(last.S) << ","
    << num(first.D) << "," << num(last.D) << "," << num(last.D - first.D) << ","
    << num(first.P) << "," << num(last.P) << "," << num(last.P - first.P) << ","
    << num(last.A) << "," << num(last.A_signed) << "," << num(first.dist_winner_to_mean)
    << "," << num(last.dist_winner_to_mean) << ","
    << num(last.dist_winner_to_mean - first.dist_winner_to_mean) << ","
    << num(last.dist_winner_to_median);
  return o.str();
}

inline const char* rounds_header() {
  return "cell,profile,balance,slate,voter_mechanism,candidate_mechanism,rule,"
         "replicate,t,R,S,D,P,A,A_signed,w2c,w2m";
}

/// Writes summary.csv, rounds.csv and runs/cell_NNNN.jsonl under `dir`.
/// Writing is single-threaded and ordered by cell index.
inline void write_grid_outputs(const std::filesystem::path& dir,
                               const std::vector<CellResult>& results) {
  using detail::num;
  std::filesystem::create_directories(dir / "runs");
  std::ofstream summary(dir / "summary.csv");
  std::ofstream rounds(dir / "rounds.csv");
  if (!summary || !rounds) throw std::runtime_error("cannot write to " + dir.string());
  summary << summary_header() << "\n";
  rounds << rounds_header() << "\n";
  for (const auto& r : results) {
    summary << summary_row(r) << "\n";
    if (!r.ok) continue;
    const std::string factors = cell_factors(r.cell);
    for (const auto& rec : r.trajectory.records) {
      rounds << factors << "," << rec.t << "," << num(rec.R) << "," << num(rec.S) << ","
             << num(rec.D) << "," << num(rec.P) << "," << num(rec.A) << ","
             << num(rec.A_signed) << "," << num(rec.dist_winner_to_mean) << ","
             << num(rec.dist_winner_to_median) << "\n";
    }
    char name[32];
    std::snprintf(name, sizeof name, "cell_%04d.jsonl", r.cell.index);
    std::ofstream run(dir / "runs" / name);
    write_jsonl(run, r.trajectory);
  }
}

}  // namespace elecdyn

#pragma once

/// Aggregations of grid results into the tables the figures are drawn from.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "elecdyn/grid.hpp"

namespace elecdyn {

/// One row of rounds.csv.
struct RoundRow {
  int cell = 0;
  std::string profile, balance, slate, voter_mechanism, candidate_mechanism, rule;
  int replicate = 0;
  int t = 0;
  double R = 0, S = 0, D = 0, P = 0, A = 0, A_signed = 0, w2c = 0, w2m = 0;

  /// Every factor except the rule.
  std::string environment() const {
    return profile + "|" + balance + "|" + slate + "|" + voter_mechanism + "|" +
           candidate_mechanism + "|" + std::to_string(replicate);
  }
  std::string mechanism_pair() const { return voter_mechanism + "/" + candidate_mechanism; }
};

inline std::vector<RoundRow> round_rows(const std::vector<CellResult>& results) {
  std::vector<RoundRow> rows;
  for (const auto& r : results) {
    if (!r.ok) continue;
    const auto& c = r.cell.config;
    for (const auto& rec : r.trajectory.records) {
      rows.push_back({r.cell.index, to_string(c.profile.tag), to_string(c.balance.tag),
                      to_string(c.slate.tag), to_string(c.mechanism.voter),
                      to_string(c.mechanism.candidate), selector_name(c.selector),
                      r.cell.replicate, rec.t, rec.R, rec.S, rec.D, rec.P, rec.A,
                      rec.A_signed, rec.dist_winner_to_mean, rec.dist_winner_to_median});
    }
  }
  return rows;
}

inline std::vector<RoundRow> read_rounds_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (detail::trim(line) != rounds_header()) {
    throw std::runtime_error("'" + path + "': unexpected rounds.csv header");
  }
  std::vector<RoundRow> rows;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 17) throw std::runtime_error("'" + path + "': malformed row");
    RoundRow r;
    r.cell = std::stoi(f[0]);
    r.profile = f[1];
    r.balance = f[2];
    r.slate = f[3];
    r.voter_mechanism = f[4];
    r.candidate_mechanism = f[5];
    r.rule = f[6];
    r.replicate = std::stoi(f[7]);
    r.t = std::stoi(f[8]);
    r.R = std::stod(f[9]);
    r.S = std::stod(f[10]);
    r.D = std::stod(f[11]);
    r.P = std::stod(f[12]);
    r.A = std::stod(f[13]);
    r.A_signed = std::stod(f[14]);
    r.w2c = std::stod(f[15]);
    r.w2m = std::stod(f[16]);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Linear-interpolation quantile (the usual "type 7"); q in [0, 1].
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::domain_error("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw std::domain_error("mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

namespace detail {

// Rule names in order of first appearance.
inline std::vector<std::string> systems_in_order(const std::vector<RoundRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.rule) == out.end()) out.push_back(r.rule);
  }
  return out;
}

struct RunEnds {
  const RoundRow* first = nullptr;
  const RoundRow* last = nullptr;
};

inline std::map<int, RunEnds> run_ends(const std::vector<RoundRow>& rows) {
  std::map<int, RunEnds> ends;
  for (const auto& r : rows) {
    auto& e = ends[r.cell];
    if (!e.first || r.t < e.first->t) e.first = &r;
    if (!e.last || r.t > e.last->t) e.last = &r;
  }
  return ends;
}

}  // namespace detail

struct DeltaRow {
  std::string system;
  std::string metric;  // D, P, w2c, w2m
  int t = 0;
  double median = 0, q25 = 0, q75 = 0;
  int count = 0;
};

/// Per-round difference from Plurality in the same environment, reduced to
/// median and interquartile range across environments.
inline std::vector<DeltaRow> summarize_delta(const std::vector<RoundRow>& rows) {
  std::map<std::pair<std::string, int>, const RoundRow*> baseline;
  for (const auto& r : rows) {
    if (r.rule == "Plurality") baseline[{r.environment(), r.t}] = &r;
  }
  if (baseline.empty()) {
    throw std::domain_error("summarize delta: results contain no Plurality baseline");
  }
  static const std::vector<std::pair<std::string, double RoundRow::*>> metrics{
      {"D", &RoundRow::D}, {"P", &RoundRow::P}, {"w2c", &RoundRow::w2c},
      {"w2m", &RoundRow::w2m}};
  std::map<std::tuple<std::string, std::string, int>, std::vector<double>> diffs;
  int max_t = 0;
  for (const auto& r : rows) {
    auto it = baseline.find({r.environment(), r.t});
    if (it == baseline.end()) continue;
    max_t = std::max(max_t, r.t);
    for (const auto& [name, field] : metrics) {
      diffs[{r.rule, name, r.t}].push_back(r.*field - it->second->*field);
    }
  }
  std::vector<DeltaRow> out;
  for (const auto& system : detail::systems_in_order(rows)) {
    for (const auto& [name, field] : metrics) {
      for (int t = 0; t <= max_t; ++t) {
        auto it = diffs.find({system, name, t});
        if (it == diffs.end()) continue;
        out.push_back({system, name, t, quantile(it->second, 0.5),
                       quantile(it->second, 0.25), quantile(it->second, 0.75),
                       static_cast<int>(it->second.size())});
      }
    }
  }
  return out;
}

struct HeatCell {
  std::string group;  // mechanism pair or camp balance
  std::string system;
  double mean_delta_D = 0;
  int count = 0;
};

namespace detail {

template <typename Key>
std::vector<HeatCell> heatmap(const std::vector<RoundRow>& rows, Key key) {
  const auto ends = run_ends(rows);
  std::vector<std::string> groups;
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const auto& [cell, e] : ends) {
    const std::string g = key(*e.first);
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    cells[{g, e.first->rule}].push_back(e.last->D - e.first->D);
  }
  std::vector<HeatCell> out;
  for (const auto& g : groups) {
    for (const auto& s : systems_in_order(rows)) {
      auto it = cells.find({g, s});
      if (it == cells.end()) continue;
      out.push_back({g, s, mean_of(it->second), static_cast<int>(it->second.size())});
    }
  }
  return out;
}

}  // namespace detail

/// Mean start-to-end change in D per (mechanism pair, system).
inline std::vector<HeatCell> summarize_mechanism(const std::vector<RoundRow>& rows) {
  return detail::heatmap(rows, [](const RoundRow& r) { return r.mechanism_pair(); });
}

/// Mean start-to-end change in D per (camp balance, system).
inline std::vector<HeatCell> summarize_balance(const std::vector<RoundRow>& rows) {
  return detail::heatmap(rows, [](const RoundRow& r) { return r.balance; });
}

struct TradeoffPoint {
  std::string system;
  double mean_delta_D = 0;
  double mean_delta_w2c = 0;
  int count = 0;
};

inline std::vector<TradeoffPoint> summarize_tradeoff(const std::vector<RoundRow>& rows) {
  const auto ends = detail::run_ends(rows);
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> acc;
  for (const auto& [cell, e] : ends) {
    auto& a = acc[e.first->rule];
    a.first.push_back(e.last->D - e.first->D);
    a.second.push_back(e.last->w2c - e.first->w2c);
  }
  std::vector<TradeoffPoint> out;
  for (const auto& s : detail::systems_in_order(rows)) {
    const auto& a = acc.at(s);
    out.push_back({s, mean_of(a.first), mean_of(a.second),
                   static_cast<int>(a.first.size())});
  }
  return out;
}

inline void write_delta_csv(std::ostream& o, const std::vector<DeltaRow>& rows) {
  o << "system,metric,t,median,q25,q75,count\n";
  for (const auto& r : rows) {
    o << r.system << "," << r.metric << "," << r.t << "," << detail::num(r.median) << ","
      << detail::num(r.q25) << "," << detail::num(r.q75) << "," << r.count << "\n";
  }
}

inline void write_heatmap_csv(std::ostream& o, const std::string& group_name,
                              const std::vector<HeatCell>& cells) {
  o << group_name << ",system,mean_delta_D,count\n";
  for (const auto& c : cells) {
    o << c.group << "," << c.system << "," << detail::num(c.mean_delta_D) << ","
      << c.count << "\n";
  }
}

inline void write_tradeoff_csv(std::ostream& o, const std::vector<TradeoffPoint>& pts) {
  o << "system,mean_delta_D,mean_delta_w2c,count\n";
  for (const auto& p : pts) {
    o << p.system << "," << detail::num(p.mean_delta_D) << ","
      << detail::num(p.mean_delta_w2c) << "," << p.count << "\n";
  }
}

enum class SummaryMode { Delta, Mechanism, Balance, Tradeoff };

inline SummaryMode parse_summary_mode(const std::string& s) {
  if (s == "delta") return SummaryMode::Delta;
  if (s == "mechanism") return SummaryMode::Mechanism;
  if (s == "balance") return SummaryMode::Balance;
  if (s == "tradeoff") return SummaryMode::Tradeoff;
  throw ConfigError("unknown summary mode '" + s + "'");
}

/// Writes the table for `mode` to `dir` and returns the file path.
inline std::filesystem::path summarize(const std::vector<RoundRow>& rows,
                                       SummaryMode mode,
                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path;
  switch (mode) {
    case SummaryMode::Delta: {
      const auto table = summarize_delta(rows);
      path = dir / "delta_vs_plurality.csv";
      std::ofstream o(path);
      write_delta_csv(o, table);
      break;
    }
    case SummaryMode::Mechanism: {
      const auto table = summarize_mechanism(rows);
      path = dir / "mechanism_heatmap.csv";
      std::ofstream o(path);
      write_heatmap_csv(o, "mechanism_pair", table);
      break;
    }
    case SummaryMode::Balance: {
      const auto table = summarize_balance(rows);
      path = dir / "balance_heatmap.csv";
      std::ofstream o(path);
      write_heatmap_csv(o, "balance", table);
      break;
    }
    case SummaryMode::Tradeoff: {
      const auto table = summarize_tradeoff(rows);
      path = dir / "tradeoff_scatter.csv";
      std::ofstream o(path);
      write_tradeoff_csv(o, table);
      break;
    }
  }
  return path;
}

}  // namespace elecdyn

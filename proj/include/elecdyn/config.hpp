#pragma once

/// Run configuration and its plain-text `key = value` file format.
///
/// Tags (profile, balance, slate, mechanisms, rule) expand to their preset
/// parameters first; every other key then overrides one field of the
/// expanded configuration, regardless of the order in the file. Lines starting
/// with '#' are comments. See docs/config.md for the key reference.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "elecdyn/dynamics.hpp"
#include "elecdyn/electorate.hpp"
#include "elecdyn/oracles.hpp"
#include "elecdyn/rules.hpp"

namespace elecdyn {

/// Either an electoral rule or a benchmark oracle picks each round's winner.
using WinnerSelector = std::variant<RuleSpec, OracleSpec>;

inline std::string selector_name(const WinnerSelector& s) {
  return std::visit([](const auto& x) { return x.name(); }, s);
}

inline bool selector_soft(const WinnerSelector& s) {
  const auto* rule = std::get_if<RuleSpec>(&s);
  return rule != nullptr && rule->soft_assignment();
}

struct RunConfig {
  PolicyBox box = PolicyBox::unit(2);
  ElectorateProfile profile = ElectorateProfile::preset(ProfileTag::BridgeConflict);
  CampBalance balance = CampBalance::preset(BalanceTag::Original);
  SlateSpec slate;
  MechanismPreset mechanism;
  DynamicsParams dynamics = preset_params(MechanismPreset{});
  WinnerSelector selector = RuleSpec::plurality();
  Eigen::Index n = 900;
  int rounds = 20;
  std::uint64_t seed = 1;

  void validate() const {
    box.validate();
    profile.validate(box);
    balance.validate();
    if (slate.K < 2) throw ConfigError("slate: K must be >= 2");
    if (!(slate.elite_spread >= 0.0)) throw ConfigError("slate: elite_spread must be >= 0");
    if (!(slate.ladder_extent > 0.0 && slate.ladder_extent <= 0.5)) {
      throw ConfigError("slate: ladder_extent must be in (0, 0.5]");
    }
    dynamics.validate();
    std::visit([](const auto& s) { s.validate(); }, selector);
    if (n < 2) throw ConfigError("n must be >= 2");
    if (rounds < 0) throw ConfigError("rounds must be >= 0");
  }
};

// ---- enum names -----------------------------------------------------------

inline std::string to_string(ProfileTag t) {
  switch (t) {
    case ProfileTag::BridgeConflict: return "BridgeConflict";
    case ProfileTag::AsymmetricResentment: return "AsymmetricResentment";
    case ProfileTag::Diffuse: return "Diffuse";
  }
  return "?";
}
inline std::string to_string(BalanceTag t) {
  switch (t) {
    case BalanceTag::Original: return "Original";
    case BalanceTag::R70_30: return "70:30";
    case BalanceTag::R50_50: return "50:50";
  }
  return "?";
}
inline std::string to_string(SlateTag t) {
  return t == SlateTag::CentristLadder ? "CentristLadder" : "PolarizedElites";
}
inline std::string to_string(VoterMechanism m) {
  switch (m) {
    case VoterMechanism::ConsensusPull: return "ConsensusPull";
    case VoterMechanism::Backlash: return "Backlash";
    case VoterMechanism::SortingPressure: return "SortingPressure";
  }
  return "?";
}
inline std::string to_string(CandidateMechanism m) {
  switch (m) {
    case CandidateMechanism::Static: return "Static";
    case CandidateMechanism::BroadCoalitionChase: return "BroadCoalitionChase";
    case CandidateMechanism::BaseReinforcement: return "BaseReinforcement";
  }
  return "?";
}

inline ProfileTag parse_profile(const std::string& s) {
  if (s == "BridgeConflict") return ProfileTag::BridgeConflict;
  if (s == "AsymmetricResentment") return ProfileTag::AsymmetricResentment;
  if (s == "Diffuse") return ProfileTag::Diffuse;
  throw ConfigError("unknown profile '" + s + "'");
}
inline BalanceTag parse_balance(const std::string& s) {
  if (s == "Original") return BalanceTag::Original;
  if (s == "70:30" || s == "R70_30") return BalanceTag::R70_30;
  if (s == "50:50" || s == "R50_50") return BalanceTag::R50_50;
  throw ConfigError("unknown camp balance '" + s + "'");
}
inline SlateTag parse_slate(const std::string& s) {
  if (s == "CentristLadder") return SlateTag::CentristLadder;
  if (s == "PolarizedElites") return SlateTag::PolarizedElites;
  throw ConfigError("unknown slate '" + s + "'");
}
inline VoterMechanism parse_voter_mechanism(const std::string& s) {
  if (s == "ConsensusPull") return VoterMechanism::ConsensusPull;
  if (s == "Backlash") return VoterMechanism::Backlash;
  if (s == "SortingPressure") return VoterMechanism::SortingPressure;
  throw ConfigError("unknown voter mechanism '" + s + "'");
}
inline CandidateMechanism parse_candidate_mechanism(const std::string& s) {
  if (s == "Static") return CandidateMechanism::Static;
  if (s == "BroadCoalitionChase") return CandidateMechanism::BroadCoalitionChase;
  if (s == "BaseReinforcement") return CandidateMechanism::BaseReinforcement;
  throw ConfigError("unknown candidate mechanism '" + s + "'");
}

/// Accepts "Plurality", "IRV", "Approval", "Score", "Condorcet",
/// "Fractional", "Fractional(0.3)", "CentralityOracle",
/// "DepolarizationOracle".
inline WinnerSelector parse_selector(const std::string& s) {
  if (s == "Plurality") return RuleSpec::plurality();
  if (s == "IRV") return RuleSpec::irv();
  if (s == "Approval") return RuleSpec::approval();
  if (s == "Score") return RuleSpec::score();
  if (s == "Condorcet" || s == "CondorcetSchulze") return RuleSpec::condorcet();
  if (s == "Fractional") return RuleSpec::fractional(1.0);
  if (s.rfind("Fractional(", 0) == 0 && s.back() == ')') {
    try {
      return RuleSpec::fractional(std::stod(s.substr(11, s.size() - 12)));
    } catch (const std::exception&) {
      throw ConfigError("bad Fractional bandwidth in '" + s + "'");
    }
  }
  if (s == "CentralityOracle") return OracleSpec{OracleTag::Centrality};
  if (s == "DepolarizationOracle") return OracleSpec{OracleTag::Depolarization};
  throw ConfigError("unknown rule '" + s + "'");
}

// ---- key/value text -------------------------------------------------------

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

inline Point to_point(const std::string& key, const std::string& v) {
  std::vector<double> xs;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) xs.push_back(to_double(key, trim(item)));
  if (xs.empty()) throw ConfigError("key '" + key + "': empty point");
  return Eigen::Map<Point>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt(const Point& p) {
  std::string s;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (k) s += ",";
    s += fmt(p(k));
  }
  return s;
}

inline ResponseShape to_shape(const std::string& key, const std::string& v) {
  if (v == "ramp") return ResponseShape::Ramp;
  if (v == "backlash") return ResponseShape::Backlash;
  throw ConfigError("key '" + key + "': expected ramp or backlash");
}

inline const char* shape_name(ResponseShape s) {
  return s == ResponseShape::Ramp ? "ramp" : "backlash";
}

}  // namespace detail

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

inline KeyValues parse_key_values(const std::string& text) {
  std::istringstream in(text);
  return parse_key_values(in);
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return parse_key_values(in);
}

/// Keys that select presets; consumed before the override pass.
inline const std::vector<std::string>& preset_keys() {
  static const std::vector<std::string> keys{
      "profile", "balance", "slate", "voter_mechanism", "candidate_mechanism", "rule"};
  return keys;
}

/// Applies one override key. Returns false when the key is not a run key.
inline bool apply_override(RunConfig& c, const std::string& key, const std::string& v) {
  using detail::to_double;
  auto* rule = std::get_if<RuleSpec>(&c.selector);
  auto* oracle = std::get_if<OracleSpec>(&c.selector);
  auto& g = c.dynamics.g;
  auto& h = c.dynamics.h;
  if (key == "n") c.n = detail::to_int(key, v);
  else if (key == "rounds") c.rounds = static_cast<int>(detail::to_int(key, v));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::to_int(key, v));
  else if (key == "box_lo") c.box.lo = detail::to_point(key, v);
  else if (key == "box_hi") c.box.hi = detail::to_point(key, v);
  else if (key == "K") c.slate.K = static_cast<int>(detail::to_int(key, v));
  else if (key == "elite_spread") c.slate.elite_spread = to_double(key, v);
  else if (key == "ladder_extent") c.slate.ladder_extent = to_double(key, v);
  else if (key == "majority_fraction") c.balance.majority_fraction = to_double(key, v);
  else if (key == "majority_mean") c.profile.majority_mean = detail::to_point(key, v);
  else if (key == "minority_mean") c.profile.minority_mean = detail::to_point(key, v);
  else if (key == "majority_std") c.profile.majority_std = to_double(key, v);
  else if (key == "minority_std") c.profile.minority_std = to_double(key, v);
  else if (key == "bridge_fraction") c.profile.bridge_fraction = to_double(key, v);
  else if (key == "bridge_mean") c.profile.bridge_mean = detail::to_point(key, v);
  else if (key == "bridge_std") c.profile.bridge_std = to_double(key, v);
  else if (key == "eta_min") g.lo = to_double(key, v);
  else if (key == "eta_max") g.hi = to_double(key, v);
  else if (key == "eta_shape") g.shape = detail::to_shape(key, v);
  else if (key == "eta_ramp_width") g.ramp_width = to_double(key, v);
  else if (key == "eta_peak") g.peak = to_double(key, v);
  else if (key == "eta_fall") g.fall = to_double(key, v);
  else if (key == "lambda_min") h.lo = to_double(key, v);
  else if (key == "lambda_max") h.hi = to_double(key, v);
  else if (key == "lambda_shape") h.shape = detail::to_shape(key, v);
  else if (key == "lambda_ramp_width") h.ramp_width = to_double(key, v);
  else if (key == "lambda_peak") h.peak = to_double(key, v);
  else if (key == "lambda_fall") h.fall = to_double(key, v);
  else if (key == "mu") c.dynamics.mu = to_double(key, v);
  else if (key == "nu") c.dynamics.nu = to_double(key, v);
  else if (key == "rho") c.dynamics.rho = to_double(key, v);
  else if (key == "repulsion_radius") c.dynamics.repulsion_radius = to_double(key, v);
  else if (key == "sigma_eps") c.dynamics.sigma_eps = to_double(key, v);
  else if (key == "sigma_delta") c.dynamics.sigma_delta = to_double(key, v);
  else if (key == "noise_truncation") c.dynamics.noise_truncation = to_double(key, v);
  else if (key == "approval_threshold" && rule) rule->approval_threshold = to_double(key, v);
  else if (key == "score_max" && rule) rule->score_max = to_double(key, v);
  else if (key == "score_zero_distance" && rule) rule->score_zero_distance = to_double(key, v);
  else if (key == "sigma" && rule) rule->sigma = to_double(key, v);
  else if (key == "oracle_resolution" && oracle) oracle->grid_resolution = to_double(key, v);
  else if (key == "oracle_refine_iters" && oracle) oracle->refine_iters = static_cast<int>(detail::to_int(key, v));
  else if (key == "oracle_tolerance" && oracle) oracle->tolerance = to_double(key, v);
  else if (key == "approval_threshold" || key == "score_max" ||
           key == "score_zero_distance" || key == "sigma" ||
           key == "oracle_resolution" || key == "oracle_refine_iters" ||
           key == "oracle_tolerance") {
    // Parameter of a selector other than the configured one.
    (void)to_double(key, v);
  } else {
    return false;
  }
  return true;
}

/// Builds a validated RunConfig from parsed key/values.
inline RunConfig config_from_key_values(const KeyValues& kv) {
  RunConfig c;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("profile")) c.profile = ElectorateProfile::preset(parse_profile(*v));
  if (auto v = get("balance")) c.balance = CampBalance::preset(parse_balance(*v));
  if (auto v = get("slate")) c.slate.tag = parse_slate(*v);
  if (auto v = get("voter_mechanism")) c.mechanism.voter = parse_voter_mechanism(*v);
  if (auto v = get("candidate_mechanism")) {
    c.mechanism.candidate = parse_candidate_mechanism(*v);
  }
  if (auto v = get("rule")) c.selector = parse_selector(*v);
  // Box overrides precede the mechanism expansion since ramp widths scale
  // with the box diameter.
  if (auto v = get("box_lo")) c.box.lo = detail::to_point("box_lo", *v);
  if (auto v = get("box_hi")) c.box.hi = detail::to_point("box_hi", *v);
  c.box.validate();
  c.dynamics = preset_params(c.mechanism, c.box);

  for (const auto& [key, value] : kv) {
    if (std::find(preset_keys().begin(), preset_keys().end(), key) != preset_keys().end()) {
      continue;
    }
    if (!apply_override(c, key, value)) throw ConfigError("unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline RunConfig parse_run_config(const std::string& text) {
  return config_from_key_values(parse_key_values(text));
}

inline RunConfig read_run_config(const std::string& path) {
  return config_from_key_values(read_key_values(path));
}

/// Fully expanded configuration; parsing the result reproduces `c`.
inline std::string to_config_text(const RunConfig& c) {
  using detail::fmt;
  std::ostringstream o;
  o << "# resolved run configuration\n";
  o << "profile = " << to_string(c.profile.tag) << "\n";
  o << "balance = " << to_string(c.balance.tag) << "\n";
  o << "slate = " << to_string(c.slate.tag) << "\n";
  o << "voter_mechanism = " << to_string(c.mechanism.voter) << "\n";
  o << "candidate_mechanism = " << to_string(c.mechanism.candidate) << "\n";
  o << "rule = " << selector_name(c.selector) << "\n";
  o << "n = " << c.n << "\nrounds = " << c.rounds << "\nseed = " << c.seed << "\n";
  o << "box_lo = " << fmt(c.box.lo) << "\nbox_hi = " << fmt(c.box.hi) << "\n";
  o << "K = " << c.slate.K << "\nelite_spread = " << fmt(c.slate.elite_spread) << "\n";
  o << "ladder_extent = " << fmt(c.slate.ladder_extent) << "\n";
  o << "majority_fraction = " << fmt(c.balance.majority_fraction) << "\n";
  o << "majority_mean = " << fmt(c.profile.majority_mean) << "\n";
  o << "minority_mean = " << fmt(c.profile.minority_mean) << "\n";
  o << "majority_std = " << fmt(c.profile.majority_std) << "\n";
  o << "minority_std = " << fmt(c.profile.minority_std) << "\n";
  o << "bridge_fraction = " << fmt(c.profile.bridge_fraction) << "\n";
  o << "bridge_mean = " << fmt(c.profile.bridge_mean) << "\n";
  o << "bridge_std = " << fmt(c.profile.bridge_std) << "\n";
  const auto& d = c.dynamics;
  for (const auto& [prefix, f] : {std::pair{"eta", &d.g}, std::pair{"lambda", &d.h}}) {
    const std::string p = prefix;
    o << p << "_min = " << fmt(f->lo) << "\n" << p << "_max = " << fmt(f->hi) << "\n";
    o << p << "_shape = " << detail::shape_name(f->shape) << "\n";
    o << p << "_ramp_width = " << fmt(f->ramp_width) << "\n";
    o << p << "_peak = " << fmt(f->peak) << "\n" << p << "_fall = " << fmt(f->fall) << "\n";
  }
  o << "mu = " << fmt(d.mu) << "\nnu = " << fmt(d.nu) << "\nrho = " << fmt(d.rho) << "\n";
  o << "repulsion_radius = " << fmt(d.repulsion_radius) << "\n";
  o << "sigma_eps = " << fmt(d.sigma_eps) << "\nsigma_delta = " << fmt(d.sigma_delta) << "\n";
  o << "noise_truncation = " << fmt(d.noise_truncation) << "\n";
  if (const auto* r = std::get_if<RuleSpec>(&c.selector)) {
    o << "approval_threshold = " << fmt(r->approval_threshold) << "\n";
    o << "score_max = " << fmt(r->score_max) << "\n";
    o << "score_zero_distance = " << fmt(r->score_zero_distance) << "\n";
    o << "sigma = " << fmt(r->sigma) << "\n";
  } else {
    const auto& s = std::get<OracleSpec>(c.selector);
    o << "oracle_resolution = " << fmt(s.grid_resolution) << "\n";
    o << "oracle_refine_iters = " << s.refine_iters << "\n";
    o << "oracle_tolerance = " << fmt(s.tolerance) << "\n";
  }
  return o.str();
}

}  // namespace elecdyn

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elecdyn/bounds.hpp"
#include "elecdyn/oracle_study.hpp"

using namespace elecdyn;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PointSet random_points(std::mt19937_64& gen, int n, int d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  PointSet p(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) p(i, k) = u(gen);
  return p;
}

DynamicsParams uniform_params(double eta, double lambda) {
  DynamicsParams p;
  p.g = ResponseFunction::constant(eta);
  p.h = ResponseFunction::constant(lambda);
  return p;
}

void worked_example() {
  PointSet v(4, 1);
  v << 0.0, 0.8, 0.9, 1.0;
  const Point med = coordinatewise_median(v);
  const auto cheb = chebyshev_center(v, PolicyBox::unit(1));
  const double r_med = winner_radius(v, med);
  const double r_cen = winner_radius(v, cheb.center);
  const bool ok = std::abs(med(0) - 0.85) <= 1e-9 && std::abs(cheb.center(0) - 0.5) <= 1e-9 &&
                  std::abs(r_med - 0.85) <= 1e-9 && std::abs(r_cen - 0.5) <= 1e-9;
  report(1, ok, fmt("median %.12g center %.12g R(median) %.12g R(center) %.12g", med(0),
                    cheb.center(0), r_med, r_cen));
}

void uniform_exactness() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> rate(0.01, 0.95);
  std::uniform_int_distribution<int> size(2, 60);
  const auto box = PolicyBox::unit(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PointSet v = random_points(gen, size(gen), 2);
    const Point w = random_points(gen, 1, 2).row(0).transpose();
    const double eta = rate(gen);
    Rng rng(trial);
    const PointSet vn = voter_step(v, w, uniform_params(eta, 0.1), rng, box);
    worst = std::max(worst, std::abs(pairwise_variance(vn) /
                                         ((1 - eta) * (1 - eta) * pairwise_variance(v)) - 1.0));

    // candidates chasing one common target
    const PointSet c = random_points(gen, 2 + trial % 7, 2);
    PointSet s(c.rows(), 2);
    s.rowwise() = random_points(gen, 1, 2).row(0);
    const double lambda = rate(gen);
    const PointSet cn =
        candidate_step(c, s, mean_point(v), uniform_params(0.1, lambda), rng, box);
    worst = std::max(worst, std::abs(pairwise_variance(cn) /
                                         ((1 - lambda) * (1 - lambda) * pairwise_variance(c)) -
                                     1.0));
  }
  report(2, worst <= 1e-12, fmt("max |ratio - 1| = %.3g over 100 voter + 100 candidate pairs", worst));
}

RunConfig quiet_run(const WinnerSelector& sel, std::uint64_t seed) {
  RunConfig c;
  c.slate.tag = SlateTag::PolarizedElites;
  c.mechanism = {VoterMechanism::ConsensusPull, CandidateMechanism::BaseReinforcement};
  c.dynamics = preset_params(c.mechanism, c.box);
  c.dynamics.nu = 0.0;
  c.dynamics.sigma_eps = 0.0;
  c.dynamics.sigma_delta = 0.0;
  c.selector = sel;
  c.n = 120;
  c.rounds = 12;
  c.seed = seed;
  return c;
}

void voter_pathwise() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<WinnerSelector> sels;
  for (const auto& r : GridSpec::full().rules) sels.push_back(r);
  sels.push_back(OracleSpec{OracleTag::Centrality});
  sels.push_back(OracleSpec{OracleTag::Depolarization});
  int bad = 0, rows = 0;
  double worst = 0.0;
  for (const auto& sel : sels) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto rep = check_voter_bound(run_simulation(quiet_run(sel, seed)));
      rows += static_cast<int>(rep.rows.size());
      if (!rep.all_satisfied) ++bad;
      worst = std::max(worst, rep.max_violation);
    }
  }
  const double secs = seconds_since(t0);
  report(3, bad == 0 && secs < 60.0,
         fmt("%.0f selectors x 50 seeds, %.0f round checks, %.0f failing runs, %.1f s",
             static_cast<double>(sels.size()), rows, bad, secs));
}

void candidate_pathwise(bool repulsion) {
  int bad = 0, rows = 0;
  double worst = 0.0;
  for (double sigma : {0.3, 1.0}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto c = quiet_run(RuleSpec::fractional(sigma), seed);
      c.dynamics.mu = 0.0;
      c.dynamics.nu = repulsion ? 0.05 : 0.0;
      c.dynamics.rho = 0.2;
      const auto rep = check_candidate_bound(run_simulation(c), repulsion);
      rows += static_cast<int>(rep.rows.size());
      if (!rep.all_satisfied) ++bad;
      worst = std::max(worst, rep.max_violation);
    }
  }
  report(repulsion ? 5 : 4, bad == 0,
         fmt("2 bandwidths x 20 seeds, %.0f round checks, %.0f failing runs, worst excess %.3g",
             rows, bad, worst));
}

void pairwise_identity() {
  std::mt19937_64 gen(606);
  std::uniform_int_distribution<int> size(1, 80), dim(1, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PointSet p = random_points(gen, size(gen), dim(gen), -2.0, 2.0);
    worst = std::max(worst, std::abs(pairwise_variance(p) - pairwise_variance_by_pairs(p)));
  }
  report(6, worst <= 1e-10, fmt("max |mean form - pairwise form| = %.3g over 1000 sets", worst));
}

// Strict Condorcet winner by direct pairwise counting, or -1.
int brute_condorcet(const PointSet& v, const PointSet& c) {
  for (Eigen::Index a = 0; a < c.rows(); ++a) {
    bool beats_all = true;
    for (Eigen::Index b = 0; b < c.rows() && beats_all; ++b) {
      if (a == b) continue;
      int fa = 0, fb = 0;
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double da = (v.row(i) - c.row(a)).norm();
        const double db = (v.row(i) - c.row(b)).norm();
        if (da < db) ++fa;
        else if (db < da) ++fb;
      }
      beats_all = fa > fb;
    }
    if (beats_all) return static_cast<int>(a);
  }
  return -1;
}

void schulze_correctness() {
  std::mt19937_64 gen(707);
  std::uniform_int_distribution<int> nv(1, 9), nk(2, 4);
  int with_winner = 0, wrong = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PointSet v = random_points(gen, nv(gen), 2);
    const PointSet c = random_points(gen, nk(gen), 2);
    const int cw = brute_condorcet(v, c);
    if (cw < 0) continue;
    ++with_winner;
    const auto out = condorcet_schulze_winner(v, c);
    if (!out.winner_index || *out.winner_index != cw) ++wrong;
  }
  report(7, wrong == 0 && with_winner > 0,
         fmt("%.0f of 1000 instances had a strict Condorcet winner, %.0f mismatches",
             with_winner, wrong));
}

void hull_containment() {
  std::mt19937_64 gen(808);
  std::uniform_int_distribution<int> nv(1, 60), nk(2, 7);
  std::uniform_real_distribution<double> bw(0.02, 3.0);
  const auto box = PolicyBox::unit(2);
  const std::vector<RuleSpec> slate_rules{RuleSpec::plurality(), RuleSpec::irv(),
                                          RuleSpec::approval(), RuleSpec::score(),
                                          RuleSpec::condorcet()};
  double worst_sum = 0.0, worst_neg = 0.0, worst_combo = 0.0, worst_slate = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PointSet v = random_points(gen, nv(gen), 2);
    const PointSet c = random_points(gen, nk(gen), 2);
    const auto out = fractional_winner(v, c, bw(gen));
    double sum = 0.0;
    Point combo = Point::Zero(2);
    for (size_t j = 0; j < out.tallies.size(); ++j) {
      worst_neg = std::min(worst_neg, out.tallies[j]);
      sum += out.tallies[j];
      combo += out.tallies[j] * c.row(static_cast<Eigen::Index>(j)).transpose();
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    worst_combo = std::max(worst_combo, (combo - out.winner).norm());
    for (const auto& rule : slate_rules) {
      const auto o = elect(rule, v, c, box);
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < c.rows(); ++j)
        best = std::min(best, (c.row(j).transpose() - o.winner).norm());
      worst_slate = std::max(worst_slate, best);
      if (!o.winner_index) worst_slate = std::max(worst_slate, 1.0);
    }
  }
  const bool ok = worst_neg >= 0.0 && worst_sum <= 1e-12 && worst_combo <= 1e-12 &&
                  worst_slate == 0.0;
  report(8, ok, fmt("min weight %.3g, max |sum - 1| %.3g, max slate-winner offset %.3g",
                    worst_neg, worst_sum, worst_slate));
}

void noise_floor_check() {
  RunConfig base;
  base.mechanism = {VoterMechanism::ConsensusPull, CandidateMechanism::Static};
  base.dynamics = preset_params(base.mechanism, base.box);
  base.dynamics.sigma_eps = 0.01;
  base.selector = RuleSpec::fractional(1.0);
  base.n = 200;
  base.rounds = 200;
  const int reps = 64;
  std::vector<Trajectory> runs(reps);
  parallel_for(reps, 0, [&](size_t r) {
    RunConfig c = base;
    c.seed = mix_seed(9000 + r);
    runs[r] = run_simulation(c);
  });
  // q* is the largest realized factor 1 - eta_min + L R_t along any run
  double q_star = 0.0, tail = 0.0;
  int tail_n = 0;
  for (const auto& traj : runs) {
    for (const auto& rec : traj.records) {
      if (rec.q) q_star = std::max(q_star, *rec.q);
      if (rec.t > base.rounds - 5) {
        tail += rec.D;
        ++tail_n;
      }
    }
  }
  tail /= tail_n;
  const double floor = q_star < 1.0 ? noise_floor(0.01 * 0.01, q_star) : 0.0;
  report(9, q_star < 1.0 && tail <= 1.1 * floor,
         fmt("q* %.4f, late mean D %.4g, floor %.4g, ratio %.3f", q_star, tail, floor,
             tail / floor));
}

void table_ordering() {
  const std::vector<RuleSpec> systems{RuleSpec::plurality(), RuleSpec::score(),
                                      RuleSpec::condorcet(), RuleSpec::fractional(0.3),
                                      RuleSpec::fractional(1.0)};
  const int seeds = 20;
  std::vector<double> R(systems.size()), S(systems.size()), dD(systems.size());
  std::vector<Trajectory> runs(systems.size() * seeds);
  parallel_for(runs.size(), 0, [&](size_t job) {
    RunConfig c;
    c.slate.tag = SlateTag::CentristLadder;
    c.mechanism = {VoterMechanism::Backlash, CandidateMechanism::BroadCoalitionChase};
    c.dynamics = preset_params(c.mechanism, c.box);
    c.selector = systems[job % systems.size()];
    c.n = 900;
    c.rounds = 10;
    c.seed = mix_seed(500 + job / systems.size());
    runs[job] = run_simulation(c);
  });
  for (size_t job = 0; job < runs.size(); ++job) {
    const auto& recs = runs[job].records;
    const size_t s = job % systems.size();
    R[s] += recs.back().R / seeds;
    S[s] += recs.back().S / seeds;
    dD[s] += (recs.back().D - recs.front().D) / seeds;
  }
  bool ok = true;
  std::string detail;
  for (size_t s = 0; s < systems.size(); ++s) {
    if (s > 0) ok = ok && R[0] > R[s] && S[0] < S[s] && dD[0] > dD[s];
    detail += systems[s].name() + fmt(" R10 %.3f S10 %.3f dD %.4f; ", R[s], S[s], dD[s]);
  }
  report(10, ok, detail);
}

void oracle_study() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cmp = run_oracle_comparison(24, 350, 16, oracle_environment(), 0);
  const double secs = seconds_since(t0);
  const auto rounds = cmp.rows.size() / 2;
  const auto& cent = cmp.rows;
  bool r_order = true;
  for (size_t t = 0; t < rounds; ++t) {
    r_order = r_order && cent[t].R.median <= cent[rounds + t].R.median;
  }
  const auto& c_last = cent[rounds - 1];
  const auto& d_last = cent[2 * rounds - 1];
  const bool d_order = d_last.D.median < c_last.D.median;
  const bool a_sign = d_last.A.median > 0.0 && c_last.A.median < 0.0;
  report(11, r_order && d_order && a_sign && secs < 300.0,
         std::string("R ordering ") + (r_order ? "ok" : "violated") + ", final D " +
             fmt("%.4g vs %.4g (centrality vs depolarization)", c_last.D.median,
                 d_last.D.median) +
             fmt(", signed A at t=15: depolarization %.3f, centrality %.3f, %.1f s",
                 d_last.A.median, c_last.A.median, secs));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_tree(const fs::path& a, const fs::path& b, int& files) {
  files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) return false;
    ++files;
  }
  int other = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) other += e.is_regular_file();
  return other == files;
}

void grid_integrity() {
  GridSpec g = GridSpec::full();
  g.n = 300;
  g.rounds = 20;
  const size_t cells = grid_cells(g).size();
  const fs::path root = fs::temp_directory_path() / "elecdyn_acceptance_grid";
  fs::remove_all(root);

  const auto t0 = std::chrono::steady_clock::now();
  const auto first = run_grid(g, 1);
  const double secs = seconds_since(t0);
  write_grid_outputs(root / "w1", first);
  const auto second = run_grid(g, 4);
  write_grid_outputs(root / "w4", second);

  int failed = 0;
  for (const auto& r : first) failed += !r.ok;
  int files = 0;
  const bool same = same_tree(root / "w1", root / "w4", files);
  fs::remove_all(root);
  report(12, cells == 1134 && failed == 0 && same && secs < 600.0,
         fmt("%.0f cells, %.0f failed, %.0f files byte-identical (1 vs 4 workers), %.1f s",
             static_cast<double>(cells), failed, same ? files : 0, secs));
}

}  // namespace

int main() {
  worked_example();
  uniform_exactness();
  voter_pathwise();
  candidate_pathwise(false);
  candidate_pathwise(true);
  pairwise_identity();
  schulze_correctness();
  hull_containment();
  noise_floor_check();
  table_ordering();
  oracle_study();
  grid_integrity();
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

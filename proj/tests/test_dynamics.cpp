#include <random>

#include <gtest/gtest.h>

#include "elecdyn/dynamics.hpp"

using namespace elecdyn;

namespace {

PointSet random_points(std::mt19937_64& rng, int n, int d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  PointSet p(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) p(i, k) = u(rng);
  return p;
}

DynamicsParams quiet(double eta, double lambda) {
  DynamicsParams p;
  p.g = ResponseFunction::constant(eta);
  p.h = ResponseFunction::constant(lambda);
  return p;
}

}  // namespace

TEST(Response, RampShape) {
  const auto f = ResponseFunction::ramp(0.1, 0.3, 0.5);
  EXPECT_DOUBLE_EQ(f(0.0), 0.1);
  EXPECT_DOUBLE_EQ(f(0.25), 0.2);
  EXPECT_DOUBLE_EQ(f(2.0), 0.3);
  EXPECT_TRUE(f.monotone());
  EXPECT_NEAR(f.lipschitz(), 0.4, 1e-15);
  EXPECT_NEAR(f.empirical_lipschitz(1.0), 0.4, 1e-9);
}

TEST(Response, BacklashShape) {
  const auto f = ResponseFunction::backlash(0.04, 0.22, 0.2, 0.15);
  EXPECT_DOUBLE_EQ(f(0.0), 0.04);
  EXPECT_NEAR(f(0.2), 0.22, 1e-15);
  EXPECT_NEAR(f(0.35), 0.04, 1e-15);
  EXPECT_DOUBLE_EQ(f(1.0), 0.04);
  EXPECT_FALSE(f.monotone());
  EXPECT_NEAR(f.lipschitz(), 0.18 / 0.15, 1e-12);
  EXPECT_LE(f.empirical_lipschitz(1.5), f.lipschitz() + 1e-9);
  EXPECT_NEAR(f.empirical_lipschitz(1.5), f.lipschitz(), 1e-6);
}

TEST(Response, Validation) {
  EXPECT_THROW(ResponseFunction::ramp(0.0, 0.2, 1.0).validate("g"), ConfigError);
  EXPECT_THROW(ResponseFunction::ramp(0.3, 0.2, 1.0).validate("g"), ConfigError);
  EXPECT_THROW(ResponseFunction::ramp(0.1, 1.0, 1.0).validate("g"), ConfigError);
  EXPECT_THROW(ResponseFunction::ramp(0.1, 0.2, 0.0).validate("g"), ConfigError);
  EXPECT_NO_THROW(ResponseFunction::constant(0.5).validate("g"));
}

TEST(VoterStep, SingleVoterHandComputed) {
  Rng rng(1);
  const PointSet next = voter_step(PointSet1({0.0}), Point1(1.0), quiet(0.3, 0.1), rng,
                                   PolicyBox::unit(1));
  EXPECT_NEAR(next(0, 0), 0.3, 1e-15);
}

TEST(VoterStep, TinyRateBarelyMoves) {
  std::mt19937_64 gen(2);
  const PointSet v = random_points(gen, 20, 2);
  Rng rng(1);
  const PointSet next = voter_step(v, Point2(0.5, 0.5), quiet(1e-12, 0.1), rng, PolicyBox::unit(2));
  EXPECT_LT((next - v).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(VoterStep, UniformRateContractsExactly) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 0.95);
  const auto box = PolicyBox::unit(2);
  for (int trial = 0; trial < 100; ++trial) {
    const PointSet v = random_points(gen, 5 + trial, 2);
    const Point w = random_points(gen, 1, 2).row(0).transpose();
    const double eta = u(gen);
    Rng rng(trial);
    const PointSet next = voter_step(v, w, quiet(eta, 0.1), rng, box);
    const double ratio = pairwise_variance(next) / ((1 - eta) * (1 - eta) * pairwise_variance(v));
    EXPECT_NEAR(ratio, 1.0, 1e-12);
  }
}

TEST(VoterStep, StaysInBox) {
  std::mt19937_64 gen(4);
  auto p = quiet(0.2, 0.1);
  p.sigma_eps = 0.3;
  const auto box = PolicyBox::unit(2);
  Rng rng(5);
  const PointSet next = voter_step(random_points(gen, 200, 2), Point2(0.9, 0.1), p, rng, box);
  for (Eigen::Index i = 0; i < next.rows(); ++i) EXPECT_TRUE(box.contains(next.row(i).transpose()));
}

TEST(VoterStep, Deterministic) {
  std::mt19937_64 gen(6);
  const PointSet v = random_points(gen, 50, 2);
  auto p = preset_params({VoterMechanism::SortingPressure, CandidateMechanism::Static});
  Rng a(77), b(77);
  EXPECT_TRUE(voter_step(v, Point2(0.3, 0.3), p, a, PolicyBox::unit(2)) ==
              voter_step(v, Point2(0.3, 0.3), p, b, PolicyBox::unit(2)));
}

TEST(CandidateStep, CentroidPullHandComputed) {
  PointSet c(1, 2);
  c.row(0) = Point2(0.2, 0.5).transpose();
  auto p = quiet(0.1, 0.3);
  p.mu = 0.2;
  Rng rng(1);
  const PointSet next = candidate_step(c, c, Point2(0.7, 0.5), p, rng, PolicyBox::unit(2));
  EXPECT_NEAR(next(0, 0) - 0.2, 0.1, 1e-15);
  EXPECT_NEAR(next(0, 1) - 0.5, 0.0, 1e-15);
}

TEST(CandidateStep, NoPullLeavesCandidates) {
  std::mt19937_64 gen(7);
  const PointSet c = random_points(gen, 4, 2);
  const PointSet s = random_points(gen, 4, 2);
  Rng rng(1);
  const PointSet next = candidate_step(c, s, Point2(0.5, 0.5), quiet(0.1, 1e-12), rng, PolicyBox::unit(2));
  EXPECT_LT((next - c).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(CandidateStep, UniformRateWithCommonTargetContractsExactly) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.01, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const PointSet c = random_points(gen, 2 + trial % 8, 2);
    PointSet s(c.rows(), 2);
    s.rowwise() = random_points(gen, 1, 2).row(0);
    const double lambda = u(gen);
    Rng rng(trial);
    const PointSet next = candidate_step(c, s, Point2(0.5, 0.5), quiet(0.1, lambda), rng,
                                         PolicyBox::unit(2));
    const double ratio =
        pairwise_variance(next) / ((1 - lambda) * (1 - lambda) * pairwise_variance(c));
    EXPECT_NEAR(ratio, 1.0, 1e-12);
  }
}

TEST(CandidateStep, DistinctTargetsBreakTheUniformIdentity) {
  // c' - mean(c') = (1 - lambda)(c - mean(c)) + lambda (s - mean(s)).
  PointSet c = PointSet1({0.4, 0.6});
  PointSet s = PointSet1({0.1, 0.9});
  Rng rng(1);
  const double lambda = 0.5;
  const PointSet next =
      candidate_step(c, s, Point1(0.5), quiet(0.1, lambda), rng, PolicyBox::unit(1));
  EXPECT_NEAR(next(0, 0), 0.25, 1e-15);
  EXPECT_GT(pairwise_variance(next), (1 - lambda) * (1 - lambda) * pairwise_variance(c) + 1e-3);
}

TEST(CandidateStep, MisalignedCentroidsThrow) {
  Rng rng(1);
  EXPECT_THROW(candidate_step(PointSet(2, 2), PointSet(3, 2), Point2(0, 0), quiet(0.1, 0.1), rng,
                              PolicyBox::unit(2)),
               std::domain_error);
}

TEST(Repulsion, Examples) {
  auto p = quiet(0.1, 0.1);
  p.rho = 0.2;
  p.repulsion_radius = 0.25;
  PointSet one(1, 2);
  one.row(0) = Point2(0.5, 0.5).transpose();
  EXPECT_EQ(repulsion_vector(one, 0, p).norm(), 0.0);

  PointSet far(2, 2);
  far << 0.1, 0.1, 0.9, 0.9;
  EXPECT_EQ(repulsion_vector(far, 0, p).norm(), 0.0);

  PointSet half(2, 2);
  half << 0.5, 0.5, 0.5 + 0.125, 0.5;
  const Point r = repulsion_vector(half, 0, p);
  EXPECT_NEAR(r.norm(), 0.1, 1e-15);
  EXPECT_LT(r(0), 0.0);
  EXPECT_NEAR(r(1), 0.0, 1e-15);

  PointSet same(2, 2);
  same << 0.3, 0.3, 0.3, 0.3;
  const Point rs = repulsion_vector(same, 1, p);
  EXPECT_NEAR(rs(0), 0.2, 1e-15);
  EXPECT_EQ(rs(1), 0.0);
}

TEST(Repulsion, NeverExceedsCap) {
  std::mt19937_64 gen(9);
  auto p = quiet(0.1, 0.1);
  p.rho = 0.2;
  p.repulsion_radius = 0.4;
  for (int trial = 0; trial < 200; ++trial) {
    const PointSet c = random_points(gen, 2 + trial % 5, 2);
    for (Eigen::Index j = 0; j < c.rows(); ++j) EXPECT_LE(repulsion_vector(c, j, p).norm(), 0.2 + 1e-15);
  }
}

TEST(Noise, MeanIsCentered) {
  const double sigma = 0.01;
  const int draws = 100000;
  const int d = 2;
  Rng rng(2024);
  Point sum = Point::Zero(d);
  double sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Point z = sample_noise(d, sigma, 4.0, rng);
    sum += z;
    sq += z.squaredNorm();
  }
  const Point mean = sum / draws;
  const double tol = 3 * sigma / std::sqrt(static_cast<double>(draws) * d);
  for (int k = 0; k < d; ++k) EXPECT_LT(std::abs(mean(k)), tol);
  // Truncation at 4 sd removes almost nothing.
  EXPECT_NEAR(sq / draws, sigma * sigma, 0.02 * sigma * sigma);
}

TEST(Noise, Truncated) {
  Rng rng(3);
  const double sd = 0.05 / std::sqrt(3.0);
  for (int i = 0; i < 20000; ++i) {
    const Point z = sample_noise(3, 0.05, 2.0, rng);
    EXPECT_LE(z.cwiseAbs().maxCoeff(), 2.0 * sd + 1e-15);
  }
}

TEST(Presets, Table) {
  const auto stat = preset_params({VoterMechanism::ConsensusPull, CandidateMechanism::Static});
  EXPECT_LE(stat.h.hi, 1e-6);
  EXPECT_EQ(stat.mu, 0.0);
  EXPECT_EQ(stat.nu, 0.0);
  EXPECT_DOUBLE_EQ(stat.g.lo, 0.10);
  EXPECT_DOUBLE_EQ(stat.g.hi, 0.25);

  const auto sort = preset_params({VoterMechanism::SortingPressure, CandidateMechanism::Static});
  EXPECT_DOUBLE_EQ(sort.g.lo, 0.02);
  EXPECT_DOUBLE_EQ(sort.g.hi, 0.30);

  const auto base = preset_params({VoterMechanism::Backlash, CandidateMechanism::BaseReinforcement});
  EXPECT_EQ(base.mu, 0.0);
  EXPECT_GT(base.nu, 0.0);
  EXPECT_DOUBLE_EQ(base.rho, 0.2);
  EXPECT_FALSE(base.g.monotone());
  EXPECT_DOUBLE_EQ(base.g.lo, 0.04);
  EXPECT_DOUBLE_EQ(base.g.hi, 0.22);

  const auto chase = preset_params({VoterMechanism::ConsensusPull, CandidateMechanism::BroadCoalitionChase});
  EXPECT_DOUBLE_EQ(chase.mu, 0.05);
  EXPECT_EQ(chase.nu, 0.0);

  EXPECT_THROW(preset_params({static_cast<VoterMechanism>(9), CandidateMechanism::Static}), ConfigError);
}

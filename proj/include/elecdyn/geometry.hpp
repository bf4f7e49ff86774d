#pragma once

/// Geometric primitives on point sets: dispersion, minimax center,
/// coordinatewise median and the winner / supporter-centroid radii.
///
/// All functions are pure; a PointSet holds one point per row.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "elecdyn/types.hpp"

namespace elecdyn {

struct CenterResult {
  Point center;
  double radius = 0.0;
};

inline Point mean_point(const PointSet& points) {
  if (points.rows() == 0) throw std::domain_error("mean of empty point set");
  return points.colwise().mean().transpose();
}

/// (1/n) sum_i |x_i - mean|^2.
inline double pairwise_variance(const PointSet& points) {
  if (points.rows() == 0) {
    throw std::domain_error("pairwise_variance: empty point set");
  }
  const Eigen::RowVectorXd mean = points.colwise().mean();
  return (points.rowwise() - mean).rowwise().squaredNorm().mean();
}

/// (1/(2 n^2)) sum_{i,j} |x_i - x_j|^2. Quadratic in n; the mean form above is
/// what the simulator uses, this one exists so the two can be cross-checked.
inline double pairwise_variance_by_pairs(const PointSet& points) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw std::domain_error("pairwise_variance: empty point set");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      total += (points.row(i) - points.row(j)).squaredNorm();
    }
  }
  // Each unordered pair appears twice in the full double sum.
  return 2.0 * total / (2.0 * static_cast<double>(n) * static_cast<double>(n));
}

inline double winner_radius(const PointSet& points,
                            const Eigen::Ref<const Point>& w) {
  if (points.rows() == 0) throw std::domain_error("winner_radius: empty set");
  return std::sqrt(
      (points.rowwise() - w.transpose()).rowwise().squaredNorm().maxCoeff());
}

inline double supporter_radius(const PointSet& candidates,
                               const PointSet& centroids) {
  if (candidates.rows() != centroids.rows() ||
      candidates.cols() != centroids.cols()) {
    throw std::domain_error("supporter_radius: candidate/centroid mismatch");
  }
  if (candidates.rows() == 0) return 0.0;
  return std::sqrt((candidates - centroids).rowwise().squaredNorm().maxCoeff());
}

/// Per-coordinate median; even counts take the midpoint of the two middle
/// order statistics.
inline Point coordinatewise_median(const PointSet& points) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw std::domain_error("coordinatewise_median: empty set");
  Point med(points.cols());
  std::vector<double> col(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) col[static_cast<size_t>(i)] = points(i, k);
    const auto mid = col.begin() + n / 2;
    std::nth_element(col.begin(), mid, col.end());
    if (n % 2 == 1) {
      med(k) = *mid;
    } else {
      const double upper = *mid;
      const double lower = *std::max_element(col.begin(), mid);
      med(k) = 0.5 * (lower + upper);
    }
  }
  return med;
}

/// Options for minimize_over_box.
struct BoxSearchOptions {
  double resolution = 0.02;   // grid spacing along each axis
  int refine_iters = 20;      // coordinate-descent sweeps after the grid
  double step_floor = 1e-6;   // refinement stops once the step drops below
};

/// Global grid search over the box followed by coordinate descent with a
/// halving step. The first grid point (first axis varying slowest) wins ties;
/// a probe replaces the incumbent only when it improves by more than a
/// relative 1e-12, so rounding noise cannot break ties.
inline Point minimize_over_box(const std::function<double(const Point&)>& f,
                               const PolicyBox& box,
                               const BoxSearchOptions& opt) {
  if (!(opt.resolution > 0.0)) {
    throw std::domain_error("minimize_over_box: resolution must be > 0");
  }
  const int d = box.dim();
  std::vector<int> counts(static_cast<size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double span = box.hi(k) - box.lo(k);
    counts[static_cast<size_t>(k)] =
        static_cast<int>(std::floor(span / opt.resolution + 1e-9)) + 1;
  }

  Point best = box.lo;
  double best_val = std::numeric_limits<double>::infinity();
  auto better = [&](double v) {
    if (std::isinf(best_val)) return v < best_val;
    return v < best_val - 1e-12 * std::abs(best_val);
  };
  std::vector<int> idx(static_cast<size_t>(d), 0);
  Point probe(d);
  while (true) {
    for (int k = 0; k < d; ++k) {
      probe(k) = std::min(box.hi(k), box.lo(k) + idx[static_cast<size_t>(k)] *
                                                     opt.resolution);
    }
    const double v = f(probe);
    if (better(v)) {
      best_val = v;
      best = probe;
    }
    // Odometer increment with the last axis varying fastest.
    int k = d - 1;
    while (k >= 0 && ++idx[static_cast<size_t>(k)] == counts[static_cast<size_t>(k)]) {
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }

  double step = opt.resolution;
  for (int it = 0; it < opt.refine_iters && step >= opt.step_floor; ++it) {
    for (int k = 0; k < d; ++k) {
      for (double dir : {-1.0, 1.0}) {
        Point cand = best;
        cand(k) = std::clamp(cand(k) + dir * step, box.lo(k), box.hi(k));
        const double v = f(cand);
        if (better(v)) {
          best_val = v;
          best = cand;
        }
      }
    }
    step *= 0.5;
  }
  return best;
}

namespace detail {

// Smallest ball having every point of `support` on its boundary. The center
// lies in the affine hull of the support; affinely dependent supports are
// handled through a least-squares solve.
inline CenterResult ball_through(const PointSet& points,
                                 const std::vector<Eigen::Index>& support) {
  const int d = static_cast<int>(points.cols());
  if (support.empty()) return {Point::Zero(d), -1.0};
  const Point p0 = points.row(support[0]).transpose();
  const int k = static_cast<int>(support.size()) - 1;
  if (k == 0) return {p0, 0.0};
  Eigen::MatrixXd v(d, k);
  for (int i = 0; i < k; ++i) {
    v.col(i) = points.row(support[static_cast<size_t>(i + 1)]).transpose() - p0;
  }
  const Eigen::MatrixXd gram = 2.0 * v.transpose() * v;
  const Eigen::VectorXd rhs = v.colwise().squaredNorm().transpose();
  const Eigen::VectorXd lambda = gram.completeOrthogonalDecomposition().solve(rhs);
  Point c = p0 + v * lambda;
  double r = 0.0;
  for (auto s : support) r = std::max(r, (points.row(s).transpose() - c).norm());
  return {c, r};
}

inline bool outside(const PointSet& points, Eigen::Index i,
                    const CenterResult& ball) {
  if (ball.radius < 0.0) return true;
  const double d = (points.row(i).transpose() - ball.center).norm();
  return d > ball.radius * (1.0 + 1e-12) + 1e-14;
}

// Move-to-front minimum enclosing ball; recursion depth is bounded by d + 1.
inline CenterResult mtf_ball(const PointSet& points,
                             std::vector<Eigen::Index>& order, size_t end,
                             std::vector<Eigen::Index>& support) {
  CenterResult ball = ball_through(points, support);
  if (support.size() == static_cast<size_t>(points.cols()) + 1) return ball;
  for (size_t i = 0; i < end; ++i) {
    const Eigen::Index p = order[i];
    if (outside(points, p, ball)) {
      support.push_back(p);
      ball = mtf_ball(points, order, i, support);
      support.pop_back();
      std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i),
                  order.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }
  return ball;
}

}  // namespace detail

/// Minimum enclosing ball of the points (unconstrained). Randomized
/// incremental; the shuffle uses a fixed seed so results are reproducible.
inline CenterResult min_enclosing_ball(const PointSet& points) {
  if (points.rows() == 0) throw std::domain_error("min_enclosing_ball: empty set");
  std::vector<Eigen::Index> order(static_cast<size_t>(points.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 shuffle_rng(0x5eedULL);
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  std::vector<Eigen::Index> support;
  CenterResult ball = detail::mtf_ball(points, order, order.size(), support);
  ball.radius = winner_radius(points, ball.center);
  return ball;
}

/// Point of the box minimizing the largest distance to any input point.
inline CenterResult chebyshev_center(const PointSet& points,
                                     const PolicyBox& box) {
  CenterResult ball = min_enclosing_ball(points);
  if (box.contains(ball.center, 1e-12)) {
    ball.center = box.project(ball.center);
    ball.radius = winner_radius(points, ball.center);
    return ball;
  }
  // Only reachable for inputs outside the box: the unconstrained center lies
  // in the convex hull of the points.
  BoxSearchOptions opt;
  opt.resolution = std::max(box.diameter(), 1e-12) / 50.0;
  opt.refine_iters = 60;
  opt.step_floor = 1e-7;
  const Point c = minimize_over_box(
      [&](const Point& w) { return winner_radius(points, w); }, box, opt);
  return {c, winner_radius(points, c)};
}

}  // namespace elecdyn

#pragma once

/// Voter populations drawn from two-camp Gaussian mixtures, candidate slates,
/// and the camp-displacement asymmetry statistic.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "elecdyn/geometry.hpp"
#include "elecdyn/types.hpp"

namespace elecdyn {

enum class ProfileTag { BridgeConflict, AsymmetricResentment, Diffuse };
enum class BalanceTag { Original, R70_30, R50_50 };
enum class SlateTag { CentristLadder, PolarizedElites };

/// Two-camp mixture. The first camp is always the majority.
struct ElectorateProfile {
  ProfileTag tag = ProfileTag::BridgeConflict;
  Point majority_mean = Point2(0.25, 0.5);
  Point minority_mean = Point2(0.75, 0.5);
  double majority_std = 0.08;
  double minority_std = 0.08;
  // Fraction of each camp redrawn around `bridge_mean`; zero disables.
  double bridge_fraction = 0.0;
  Point bridge_mean = Point2(0.5, 0.5);
  double bridge_std = 0.10;

  static ElectorateProfile preset(ProfileTag tag) {
    ElectorateProfile p;
    p.tag = tag;
    switch (tag) {
      case ProfileTag::BridgeConflict:
        p.bridge_fraction = 0.10;
        break;
      case ProfileTag::AsymmetricResentment:
        p.majority_mean = Point2(0.2, 0.3);
        p.minority_mean = Point2(0.7, 0.7);
        p.majority_std = 0.06;
        p.minority_std = 0.12;
        break;
      case ProfileTag::Diffuse:
        p.majority_mean = Point2(0.35, 0.5);
        p.minority_mean = Point2(0.65, 0.5);
        p.majority_std = 0.20;
        p.minority_std = 0.20;
        break;
    }
    return p;
  }

  void validate(const PolicyBox& box) const {
    if (majority_mean.size() != box.dim() || minority_mean.size() != box.dim() ||
        bridge_mean.size() != box.dim()) {
      throw ConfigError("profile: camp mean dimension does not match the box");
    }
    if (!box.contains(majority_mean) || !box.contains(minority_mean) ||
        !box.contains(bridge_mean)) {
      throw ConfigError("profile: camp means must lie inside the policy box");
    }
    if (!(majority_std > 0.0) || !(minority_std > 0.0) || !(bridge_std > 0.0)) {
      throw ConfigError("profile: camp standard deviations must be > 0");
    }
    if (!(bridge_fraction >= 0.0 && bridge_fraction <= 1.0)) {
      throw ConfigError("profile: bridge fraction must be in [0, 1]");
    }
  }
};

struct CampBalance {
  BalanceTag tag = BalanceTag::Original;
  double majority_fraction = 0.6;

  static CampBalance preset(BalanceTag tag) {
    switch (tag) {
      case BalanceTag::Original: return {tag, 0.6};
      case BalanceTag::R70_30: return {tag, 0.7};
      case BalanceTag::R50_50: return {tag, 0.5};
    }
    throw ConfigError("unknown camp balance");
  }

  void validate() const {
    if (!(majority_fraction >= 0.5 && majority_fraction < 1.0)) {
      throw ConfigError("camp balance: majority fraction must be in [0.5, 1)");
    }
  }
};

enum class Camp : std::uint8_t { Majority = 0, Minority = 1 };

struct Electorate {
  PointSet positions;
  std::vector<Camp> camp;
  Point majority_mean0;
  Point minority_mean0;

  Eigen::Index size() const { return positions.rows(); }
  Eigen::Index count(Camp c) const {
    return std::count(camp.begin(), camp.end(), c);
  }
};

struct SlateSpec {
  SlateTag tag = SlateTag::CentristLadder;
  int K = 5;
  double elite_spread = 0.10;   // PolarizedElites: max offset from camp mean
  double ladder_extent = 0.30;  // CentristLadder: half-length as a box fraction
};

/// Mean position of one camp under fixed labels.
inline Point camp_mean(const PointSet& positions, const std::vector<Camp>& labels,
                       Camp which) {
  if (static_cast<Eigen::Index>(labels.size()) != positions.rows()) {
    throw std::domain_error("camp_mean: label count does not match positions");
  }
  Point sum = Point::Zero(positions.cols());
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    if (labels[static_cast<size_t>(i)] == which) {
      sum += positions.row(i).transpose();
      ++n;
    }
  }
  if (n == 0) throw std::domain_error("camp_mean: empty camp");
  return sum / static_cast<double>(n);
}

inline Eigen::Index majority_count(const CampBalance& balance, Eigen::Index n) {
  return static_cast<Eigen::Index>(
      std::llround(balance.majority_fraction * static_cast<double>(n)));
}

namespace detail {

inline Point draw_truncated(std::mt19937_64& rng, const Point& mean, double sd,
                            const PolicyBox& box) {
  std::normal_distribution<double> normal(0.0, sd);
  Point p(mean.size());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = mean(k) + normal(rng);
    if (box.contains(p)) return p;
  }
  return box.project(p);
}

}  // namespace detail

/// Samples `n` voters from the profile's truncated two-camp mixture.
/// The majority camp holds round(fraction * n) voters and occupies the first
/// rows. Deterministic in `seed`.
inline Electorate generate_electorate(const ElectorateProfile& profile,
                                      const CampBalance& balance, Eigen::Index n,
                                      std::uint64_t seed,
                                      const PolicyBox& box = PolicyBox::unit(2)) {
  if (n < 2) throw ConfigError("electorate: need at least 2 voters");
  profile.validate(box);
  balance.validate();

  const Eigen::Index n_maj = majority_count(balance, n);
  const Eigen::Index n_min = n - n_maj;
  if (n_maj == 0 || n_min == 0) {
    throw ConfigError("electorate: balance leaves a camp empty");
  }

  std::seed_seq seq{seed, std::uint64_t{0xE1EC}};
  std::mt19937_64 rng(seq);

  Electorate e;
  e.positions.resize(n, box.dim());
  e.camp.resize(static_cast<size_t>(n));
  auto fill = [&](Eigen::Index begin, Eigen::Index count, Camp label,
                  const Point& mean, double sd) {
    const auto n_bridge = static_cast<Eigen::Index>(
        std::llround(profile.bridge_fraction * static_cast<double>(count)));
    for (Eigen::Index i = 0; i < count; ++i) {
      const bool bridge = i >= count - n_bridge;
      e.positions.row(begin + i) =
          bridge ? detail::draw_truncated(rng, profile.bridge_mean,
                                          profile.bridge_std, box)
                       .transpose()
                 : detail::draw_truncated(rng, mean, sd, box).transpose();
      e.camp[static_cast<size_t>(begin + i)] = label;
    }
  };
  fill(0, n_maj, Camp::Majority, profile.majority_mean, profile.majority_std);
  fill(n_maj, n_min, Camp::Minority, profile.minority_mean, profile.minority_std);

  e.majority_mean0 = camp_mean(e.positions, e.camp, Camp::Majority);
  e.minority_mean0 = camp_mean(e.positions, e.camp, Camp::Minority);
  return e;
}

/// Candidate positions for a slate.
///
/// CentristLadder: evenly spaced on the box diagonal from 0.5 - ladder_extent
/// to 0.5 + ladder_extent of the way from lo to hi (odd K puts the middle
/// candidate at the center).
/// PolarizedElites: candidates alternate between the majority and minority
/// camp means, each offset uniformly within `elite_spread`.
inline PointSet generate_slate(const SlateSpec& spec,
                               const ElectorateProfile& profile,
                               std::uint64_t seed,
                               const PolicyBox& box = PolicyBox::unit(2)) {
  if (spec.K < 2) throw ConfigError("slate: need at least 2 candidates");
  PointSet c(spec.K, box.dim());
  switch (spec.tag) {
    case SlateTag::CentristLadder:
      for (int j = 0; j < spec.K; ++j) {
        const double u = 0.5 - spec.ladder_extent +
                         2.0 * spec.ladder_extent * j / static_cast<double>(spec.K - 1);
        c.row(j) = (box.lo + u * (box.hi - box.lo)).transpose();
      }
      break;
    case SlateTag::PolarizedElites: {
      std::seed_seq seq{seed, std::uint64_t{0x51A7E}};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (int j = 0; j < spec.K; ++j) {
        const Point& anchor =
            j % 2 == 0 ? profile.majority_mean : profile.minority_mean;
        Point offset(box.dim());
        do {
          for (int k = 0; k < box.dim(); ++k) offset(k) = unit(rng);
        } while (offset.norm() > 1.0);
        c.row(j) = box.project(anchor + spec.elite_spread * offset).transpose();
      }
      break;
    }
  }
  return c;
}

namespace detail {

struct CampDisplacement {
  double majority;
  double minority;
};

inline CampDisplacement camp_displacement(const Electorate& elec,
                                          const PointSet& current) {
  if (current.rows() != elec.size()) {
    throw std::domain_error("camp asymmetry: positions not aligned with electorate");
  }
  return {(camp_mean(current, elec.camp, Camp::Majority) - elec.majority_mean0).norm(),
          (camp_mean(current, elec.camp, Camp::Minority) - elec.minority_mean0).norm()};
}

}  // namespace detail

/// |m_min - m_maj| / (m_min + m_maj + eps), where m_* is the distance a camp
/// mean has travelled since generation. Lies in [0, 1].
inline double camp_asymmetry(const Electorate& elec, const PointSet& current,
                             double eps = 1e-9) {
  const auto d = detail::camp_displacement(elec, current);
  const double denom = d.minority + d.majority + eps;
  if (denom == 0.0) return 0.0;
  return std::abs(d.minority - d.majority) / denom;
}

/// Same statistic without the absolute value: positive when the minority camp
/// has moved more, negative when the majority has. Lies in [-1, 1].
inline double signed_camp_asymmetry(const Electorate& elec, const PointSet& current,
                                    double eps = 1e-9) {
  const auto d = detail::camp_displacement(elec, current);
  const double denom = d.minority + d.majority + eps;
  if (denom == 0.0) return 0.0;
  return (d.minority - d.majority) / denom;
}

}  // namespace elecdyn

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elecdyn/dynamics.hpp"
#include "elecdyn/types.hpp"

namespace elecdyn {

/// Metrics of one round, measured on the pre-update state of that round.
struct RoundRecord {
  int t = 0;
  Point winner;
  std::optional<int> winner_index;
  double R = 0.0;         // winner radius
  double S = 0.0;         // supporter-centroid radius
  double D = 0.0;         // voter variance
  double P = 0.0;         // candidate variance
  double A = 0.0;         // camp-displacement asymmetry, [0, 1]
  double A_signed = 0.0;  // same without the absolute value, [-1, 1]
  double dist_winner_to_mean = 0.0;
  double dist_winner_to_median = 0.0;
  std::optional<double> q;  // voter contraction factor, when g is monotone
  PointSet candidates;
  PointSet centroids;
};

/// A recorded run together with what is needed to re-derive its bounds.
struct Trajectory {
  std::string selector;          // rule or oracle name
  bool soft_assignment = false;  // supporter weights vary continuously
  DynamicsParams params;
  double box_diameter = 1.0;
  std::vector<RoundRecord> records;
};

}  // namespace elecdyn

#pragma once

#include "amcbo/core.hpp"
#include "oracles.hpp"

#include <vector>

namespace testing_helpers {

inline oracle::Point to_point(const amcbo::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline std::vector<oracle::Point> to_points(const amcbo::PointSetXd& set) {
  std::vector<oracle::Point> out;
  for (amcbo::Index i = 0; i < set.rows(); ++i) out.push_back(to_point(set.row(i).transpose()));
  return out;
}

inline amcbo::VectorXd to_vector(const oracle::Point& p) {
  return Eigen::Map<const amcbo::VectorXd>(p.data(), amcbo::Index(p.size()));
}

inline amcbo::PointSetXd to_point_set(const std::vector<oracle::Point>& points) {
  amcbo::PointSetXd set(amcbo::Index(points.size()), amcbo::Index(points.front().size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t k = 0; k < points[i].size(); ++k) set(amcbo::Index(i), amcbo::Index(k)) = points[i][k];
  return set;
}

}  // namespace testing_helpers

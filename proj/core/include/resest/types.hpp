#pragma once

#include <Eigen/Dense>

#include <vector>

namespace resest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted list of 0-based indices (supports, targets, column subsets).
using IndexSet = std::vector<int>;

}  // namespace resest

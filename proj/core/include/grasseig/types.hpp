#pragma once

#include <Eigen/Core>

namespace grasseig {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace grasseig

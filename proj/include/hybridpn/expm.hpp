#pragma once

#include <Eigen/Dense>

namespace hybridpn {

// Matrix exponential by scaling and squaring with diagonal Pade approximants
// of degree 3..13 chosen from the 1-norm.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& A);

}  // namespace hybridpn

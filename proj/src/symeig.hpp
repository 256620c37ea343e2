#pragma once

#include <Eigen/Dense>

namespace convexsdp {

// Eigenvalues of a small symmetric matrix in ascending order. 1x1 and 2x2
// use closed forms; larger sizes go through Eigen's self-adjoint solver.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

double min_eigenvalue(const Eigen::MatrixXd& a);

}  // namespace convexsdp

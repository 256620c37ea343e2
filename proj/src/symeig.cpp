#include "symeig.hpp"

#include <cmath>

#include "error.hpp"

namespace convexsdp {

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::shape_mismatch, "eigenvalues of a non-square matrix");
  const auto n = a.rows();
  Eigen::VectorXd lambda(n);
  if (n == 0) return lambda;
  if (n == 1) {
    lambda(0) = a(0, 0);
    return lambda;
  }
  if (n == 2) {
    const double mean = 0.5 * (a(0, 0) + a(1, 1));
    const double radius = std::hypot(0.5 * (a(0, 0) - a(1, 1)), a(0, 1));
    lambda << mean - radius, mean + radius;
    return lambda;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::solver, "symmetric eigenvalue iteration failed");
  return solver.eigenvalues();
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.size() == 0) fail(ErrorCode::shape_mismatch, "eigenvalue of an empty matrix");
  return symmetric_eigenvalues(a)(0);
}

}  // namespace convexsdp

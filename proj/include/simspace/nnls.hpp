#pragma once

#include <Eigen/Dense>

namespace simspace {

struct NnlsResult {
  Eigen::VectorXd x;           // x >= 0
  Eigen::VectorXd dual;        // A^T (b - A x); <= tolerance wherever x == 0
  double residual_norm = 0.0;  // ||A x - b||
  int iterations = 0;
};

/// min ||A x - b|| subject to x >= 0, by the Lawson-Hanson active-set
/// method. Passive-set subproblems are solved on the normal equations, so
/// the cost per step is independent of the number of rows.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace simspace

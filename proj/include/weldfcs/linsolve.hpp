#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace weldfcs {

struct SolveReport {
  double residual = 0.0;  // ||A x - b|| / ||b||, recomputed after the solve
  double rcond = -1.0;    // reciprocal condition estimate; -1 when not available
  int iterations = 0;
  bool dense = false;
};

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Restarted GMRES (Eigen unsupported module) on a matrix-free operator.
Eigen::VectorXcd gmres_solve(const LinearMap& A, Eigen::Index n, const Eigen::VectorXcd& b, double tol,
                             SolveReport& rep, int restart = 200, int max_iter = 2000);

// Partial-pivot LU with a reciprocal condition estimate.
Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b, SolveReport& rep);

// Columns A e_k, for operators that are cheaper to apply than to assemble.
Eigen::MatrixXcd materialize(const LinearMap& A, Eigen::Index n);

}  // namespace weldfcs

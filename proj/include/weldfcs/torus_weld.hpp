#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weldfcs/linsolve.hpp"
#include "weldfcs/profile.hpp"

namespace weldfcs {

using cplx = std::complex<double>;

struct TorusNumerics {
  int N = 64;          // Y1 carries the modes -N..N
  int M = 0;           // assembly grid; 0 picks a power of two from N and max f'
  int Kin = 0;         // inner truncation of the F^{-1} F products; 0 means N
  double tail_tol = 1e-10;
  double solve_tol = 1e-10;
  std::string solver = "auto";  // auto | dense | gmres
  int dense_max = 1024;         // auto uses LU up to this many unknowns
};

// Substitution-operator matrices on the Fourier basis e_n ~ exp(-i p_n x).
//   F[k][n]    = (1/M) sum_j exp(i p_k f_j) f'_j exp(-i p_n x_j),  |k| <= Kin, |n| <= N
//   Finv[m][k] = (1/M) sum_j exp(i p_m x_j) exp(-i p_k f_j),       |m| <= N,   |k| <= Kin
struct TorusKernels {
  double L = 1.0;
  int N = 0, Kin = 0, M = 0;
  cplx tau, q;
  Eigen::VectorXd x, f, f1, f2, f3;
  Eigen::MatrixXcd F, Finv;
  Eigen::VectorXcd u_hat;  // modes -N..N of u = f - x
  double tail = 0.0;

  // K = K11 + K12 + K21 applied to columns of mode vectors (-N..N).
  Eigen::MatrixXcd apply_K(const Eigen::MatrixXcd& Y) const;
  Eigen::MatrixXcd apply_K11(const Eigen::MatrixXcd& Y) const;
  Eigen::MatrixXcd apply_K12(const Eigen::MatrixXcd& Y) const;
  Eigen::MatrixXcd apply_K21(const Eigen::MatrixXcd& Y) const;
  Eigen::MatrixXcd K11() const;
  Eigen::MatrixXcd K12() const;
  Eigen::MatrixXcd K21() const;
  double p(int n) const { return 2.0 * M_PI * n / L; }
};

// Throws QOnUnitCircle and TruncationTooCoarse.
TorusKernels assemble_K(const CircleDiffeo& f, cplx tau, const TorusNumerics& num);

struct TorusDiagnostics {
  SolveReport solve;
  double tail = 0.0;
  double cy1 = 0.0, cy2 = 0.0;  // boundary relations, relative to ||Y12||
  double intcond = 0.0;         // integral of Y12 against the holomorphic form
  double b_defect = 0.0;        // b-period of the form minus tau_hat
};

struct TorusWeldSolution {
  double L = 1.0;
  int N = 0, M = 0;
  cplx tau, tau_hat;
  Eigen::VectorXcd Y;  // modes -N..N of Y1, Y1(x) = sum_n Y_n exp(-i p_n x); Y_0 = 0
  Eigen::VectorXd x, f, f1, f2, f3;
  Eigen::VectorXcd Y1, X1, X2, Xp, SX;
  TorusDiagnostics diag;

  double dx() const { return L / M; }
  // Y1 derivative of the given order at arbitrary points.
  cplx eval_Y1(double x, int order) const;
};

TorusWeldSolution solve_Y1(const TorusKernels& K, const TorusNumerics& num);
TorusWeldSolution solve_Y1(const CircleDiffeo& f, cplx tau, const TorusNumerics& num);

// Relative defect of int X'^2 = int X'^2/f' and absolute defect of
// int SX = int (SX - Sf)/f'.
struct IdentityDefects {
  double quadratic = 0.0;
  double schwarzian = 0.0;
};
IdentityDefects identity_defects(const TorusWeldSolution& sol);

// Boundary-relation residuals on a freshly assembled grid twice as fine.
void residual_diagnostics(const CircleDiffeo& f, TorusWeldSolution& sol, const TorusNumerics& num);

// tau_hat(s) by integrating d tau_hat/ds = L^-2 int (zeta - a) X'^2 along s,
// re-solving the welding at Gauss nodes. The callback returns the solution at
// flow time s together with zeta sampled on the same grid.
struct TorusNode {
  TorusWeldSolution sol;
  Eigen::VectorXd zeta;
};
struct TauPath {
  std::vector<double> s;
  std::vector<cplx> tau_hat;
};
TauPath effective_tau_ode(const std::function<TorusNode(double)>& solve_at, cplx tau0, double s_end, double a,
                          int panels = 1, int order = 16);

}  // namespace weldfcs

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weldfcs/analysis.hpp"
#include "weldfcs/linsolve.hpp"
#include "weldfcs/profile.hpp"

namespace weldfcs {

using cplx = std::complex<double>;

// Zero entries mean "pick from the problem".
struct CylinderNumerics {
  double P_max = 0.0;      // momentum cutoff; default 80 / kink_scale
  double panel = 0.0;      // Gauss-Legendre panel width in p; default min(1, 8/(R + 2 gamma))
  int gl_order = 16;       // nodes per panel (8, 16, 20 or 30)
  double dx = 0.0;         // real-space quadrature step for the kernels
  double pad = 0.0;        // output window beyond the support of g - id; default 12 gamma
  double out_dx = 0.0;     // output grid spacing; default gamma/16
  double kink_scale = 0.0; // length scale resolved by P_max (set by callers that know the profile)
  double solve_tol = 1e-10;
  std::string solver = "auto";  // auto | dense | gmres
  int dense_max = 800;          // auto uses LU up to this many unknowns
};

// Nystrom data for (I + Sigma W) Z = Z12 in the frame centred on the support.
// Index order: the n negative momenta (ascending) then the n positive ones.
struct CylinderSystem {
  double gamma = 1.0;
  double center = 0.0;       // frame origin (physical coordinate)
  double lo = 0.0, hi = 0.0; // support of g - id, physical
  int n = 0;                 // nodes per half-line
  Eigen::VectorXd p, wk;     // nodes and weights / 2 pi
  Eigen::VectorXd eq;        // exp(-gamma |p|)
  Eigen::VectorXd xq;        // kernel quadrature grid (centred frame)
  Eigen::MatrixXcd Ep, Bi, Af, Ex2;
  Eigen::VectorXcd Z12;

  int size() const { return 2 * n; }
  // Gi(p,q) = int e^{ipx}(e^{-iqg} - e^{-iqx}) dx and
  // Gf(p,q) = int (e^{ipg} g' - e^{ipx}) e^{-iqx} dx applied to vectors.
  Eigen::MatrixXcd apply_Gi(const Eigen::MatrixXcd& u) const { return Ep * (Bi * u); }
  Eigen::MatrixXcd apply_Gf(const Eigen::MatrixXcd& u) const { return Af * (Ex2 * u); }
  // (I + Sigma W) z
  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const;
  Eigen::MatrixXcd dense() const;
};

// Throws WindowTooSmall when the configured pad is below 5 gamma.
CylinderSystem assemble_sigma(const LineDiffeo& g, double gamma, const CylinderNumerics& num);

struct CylinderDiagnostics {
  SolveReport solve;
  double tail = 0.0;        // max |Z| over the top eighth of |p|, relative
  double decay_left = 0.0;  // fitted exponential rates of |X' - 1|
  double decay_right = 0.0;
  double min_abs_Xp = 0.0;
  double P_max = 0.0, panel = 0.0, dx = 0.0, pad = 0.0;
  int nodes = 0, Mx = 0;
};

struct CylinderWeldSolution {
  double gamma = 1.0;
  double center = 0.0;
  double lo = 0.0, hi = 0.0;
  Eigen::VectorXd p, wk;
  Eigen::VectorXcd Z, Y1ph;  // Y1ph is the transform of Y1'
  LineDiffeo g;
  Eigen::VectorXd x;          // output grid
  Eigen::VectorXcd Xp, SX;
  CylinderDiagnostics diag;

  // (X', X'', X''') at an arbitrary physical point.
  std::array<cplx, 3> eval(double x) const;
  cplx eval_Xp(double x) const { return eval(x)[0]; }
  cplx eval_SX(double x) const;
};

// Throws NearSingular when the LU condition estimate exceeds 1e12 and
// NotConverged when the iterative solve misses solve_tol.
CylinderWeldSolution solve_cylinder(const LineDiffeo& g, double gamma, const CylinderNumerics& num);

// Sup-norm defects of the two boundary relations in real space, with
// principal values by singularity subtraction on Gauss panels.
struct RealspaceDefects {
  double lower = 0.0, upper = 0.0;
};
RealspaceDefects realspace_crosscheck(const CylinderWeldSolution& sol, double panel_width = 0.0);

// Reasonable numerics for a kink flow: P_max and window set from the profile.
CylinderNumerics cylinder_defaults(const Volume& inf, const CylinderNumerics& base = {});

}  // namespace weldfcs

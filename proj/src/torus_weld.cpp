#include "weldfcs/torus_weld.hpp"

#include <algorithm>
#include <cmath>

#include "weldfcs/analysis.hpp"
#include "weldfcs/errors.hpp"
#include "weldfcs/fft.hpp"

namespace weldfcs {

namespace {

int next_pow2(double v) {
  int m = 1;
  while (m < v) m *= 2;
  return m;
}

int wrap(int n, int M) { return ((n % M) + M) % M; }

// Column embedding of the 2N unknowns (n != 0) into the modes -N..N.
Eigen::MatrixXcd embed(const Eigen::MatrixXcd& Z, int N) {
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(2 * N + 1, Z.cols());
  Y.topRows(N) = Z.topRows(N);
  Y.bottomRows(N) = Z.bottomRows(N);
  return Y;
}

Eigen::MatrixXcd restrict_rows(const Eigen::MatrixXcd& Y, int N) {
  Eigen::MatrixXcd Z(2 * N, Y.cols());
  Z.topRows(N) = Y.topRows(N);
  Z.bottomRows(N) = Y.bottomRows(N);
  return Z;
}

}  // namespace

Eigen::MatrixXcd TorusKernels::apply_K11(const Eigen::MatrixXcd& Y) const {
  const Eigen::MatrixXcd W = F * Y;
  Eigen::MatrixXcd out(2 * N + 1, Y.cols());
  // E_{0+} F^{-1} E_- F  -  E_- F^{-1} E_{0+} F, the cancellation-free form.
  out.bottomRows(N + 1) = Finv.block(N, 0, N + 1, Kin) * W.topRows(Kin);
  out.topRows(N) = -Finv.block(0, Kin, N, Kin + 1) * W.bottomRows(Kin + 1);
  return out;
}

Eigen::MatrixXcd TorusKernels::apply_K12(const Eigen::MatrixXcd& Y) const {
  Eigen::MatrixXcd QY = Y.bottomRows(N + 1);
  cplx qn = 1.0;
  for (int n = 0; n <= N; ++n, qn *= q) QY.row(n) *= qn;
  return Finv.block(0, Kin, 2 * N + 1, N + 1) * QY;
}

Eigen::MatrixXcd TorusKernels::apply_K21(const Eigen::MatrixXcd& Y) const {
  const Eigen::MatrixXcd W = F * Y;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * N + 1, Y.cols());
  cplx qn = q;
  for (int m = -1; m >= -N; --m, qn *= q) out.row(m + N) = qn * W.row(m + Kin);
  return out;
}

Eigen::MatrixXcd TorusKernels::apply_K(const Eigen::MatrixXcd& Y) const {
  const Eigen::MatrixXcd W = F * Y;
  Eigen::MatrixXcd out(2 * N + 1, Y.cols());
  out.bottomRows(N + 1) = Finv.block(N, 0, N + 1, Kin) * W.topRows(Kin);
  out.topRows(N) = -Finv.block(0, Kin, N, Kin + 1) * W.bottomRows(Kin + 1);
  cplx qn = q;
  for (int m = -1; m >= -N; --m, qn *= q) out.row(m + N) += qn * W.row(m + Kin);
  return out + apply_K12(Y);
}

Eigen::MatrixXcd TorusKernels::K11() const { return apply_K11(Eigen::MatrixXcd::Identity(2 * N + 1, 2 * N + 1)); }
Eigen::MatrixXcd TorusKernels::K12() const { return apply_K12(Eigen::MatrixXcd::Identity(2 * N + 1, 2 * N + 1)); }
Eigen::MatrixXcd TorusKernels::K21() const { return apply_K21(Eigen::MatrixXcd::Identity(2 * N + 1, 2 * N + 1)); }

TorusKernels assemble_K(const CircleDiffeo& f, cplx tau, const TorusNumerics& num) {
  if (num.N < 1) throw ConfigError("N", "must be at least 1");
  TorusKernels K;
  K.L = f.L;
  K.N = num.N;
  K.Kin = num.Kin > 0 ? num.Kin : num.N;
  if (K.Kin < K.N) throw ConfigError("Kin", "inner truncation must be at least N");
  K.tau = tau;
  K.q = std::exp(cplx(0.0, 2.0 * M_PI) * tau);
  if (std::abs(K.q) >= 1.0 - 1e-12) throw Error(ErrorCode::QOnUnitCircle, "|q| must be < 1");

  auto sample = [&](int M) {
    K.M = M;
    K.x.resize(M), K.f.resize(M), K.f1.resize(M), K.f2.resize(M), K.f3.resize(M);
    for (int j = 0; j < M; ++j) {
      K.x[j] = K.L * j / M;
      const Jet jt = f.map(K.x[j]);
      K.f[j] = jt.v, K.f1[j] = jt.d1, K.f2[j] = jt.d2, K.f3[j] = jt.d3;
    }
  };
  if (num.M > 0) {
    if (num.M < 4 * num.N) throw ConfigError("M", "assembly grid must satisfy M >= 4N");
    sample(num.M);
  } else {
    sample(next_pow2(4.0 * K.N));
    const double fmax = K.f1.cwiseAbs().maxCoeff();
    const int need = next_pow2(std::max(4.0 * K.N, 1.25 * (K.Kin * fmax + K.N) + 64.0));
    if (need > K.M) sample(need);
  }
  if (K.f1.minCoeff() <= 0.0) throw Error(ErrorCode::NotConverged, "f' is not positive on the grid");

  const int M = K.M, N = K.N, Kin = K.Kin;
  const double L = K.L;
  K.F.resize(2 * Kin + 1, 2 * N + 1);
  K.Finv.resize(2 * N + 1, 2 * Kin + 1);
  Eigen::VectorXcd a(M), b(M);
  for (int k = -Kin; k <= Kin; ++k) {
    const double pk = 2.0 * M_PI * k / L;
    for (int j = 0; j < M; ++j) a[j] = std::polar(K.f1[j], pk * K.f[j]);
    dft(a.data(), b.data(), M, -1);
    for (int n = -N; n <= N; ++n) K.F(k + Kin, n + N) = b[wrap(n, M)] / static_cast<double>(M);
    for (int j = 0; j < M; ++j) a[j] = std::polar(1.0, -pk * K.f[j]);
    dft(a.data(), b.data(), M, +1);
    for (int m = -N; m <= N; ++m) K.Finv(m + N, k + Kin) = b[wrap(m, M)] / static_cast<double>(M);
  }
  for (int j = 0; j < M; ++j) a[j] = K.f[j] - K.x[j];
  dft(a.data(), b.data(), M, +1);
  K.u_hat.resize(2 * N + 1);
  for (int n = -N; n <= N; ++n) K.u_hat[n + N] = b[wrap(n, M)] / static_cast<double>(M);

  double top = 0.0, all = 0.0;
  for (int n = -N; n <= N; ++n) {
    if (n == 0) continue;
    const double v = std::abs(K.u_hat[n + N]);
    all = std::max(all, v);
    if (8 * std::abs(n) >= 7 * N) top = std::max(top, v);
  }
  // A constant f - x (rigid rotation) leaves only round-off in the modes.
  K.tail = all > 1e-13 * L ? top / all : 0.0;
  if (K.tail > num.tail_tol)
    throw Error(ErrorCode::TruncationTooCoarse,
                "spectral tail " + std::to_string(K.tail) + " of f - x exceeds tail_tol at N=" + std::to_string(N));
  return K;
}

cplx TorusWeldSolution::eval_Y1(double xv, int order) const {
  cplx acc = 0.0;
  for (int n = -N; n <= N; ++n) {
    if (n == 0) continue;
    const double p = 2.0 * M_PI * n / L;
    acc += Y[n + N] * std::pow(cplx(0.0, -p), order) * std::polar(1.0, -p * xv);
  }
  return acc;
}

TorusWeldSolution solve_Y1(const TorusKernels& K, const TorusNumerics& num) {
  const int N = K.N, M = K.M;
  const double L = K.L;
  Eigen::VectorXcd D(2 * N);
  {
    cplx qn = K.q;
    for (int n = 1; n <= N; ++n, qn *= K.q) {
      D[N + n - 1] = 1.0 - qn;
      D[N - n] = 1.0 - qn;
    }
  }
  // Unknown Z = (1 - q^{|n|}) Y_n, so the operator is the identity plus a
  // compact perturbation in the spirit of the Sigma recast.
  const LinearMap op = [&](const Eigen::VectorXcd& Z) -> Eigen::VectorXcd {
    const Eigen::MatrixXcd Y = embed(Z.cwiseQuotient(D), N);
    return restrict_rows(Y - K.apply_K(Y), N);
  };
  Eigen::VectorXcd uh0 = K.u_hat;
  uh0[N] = 0.0;
  Eigen::VectorXcd rhs_full = -K.apply_K12(uh0);
  rhs_full.head(N) += uh0.head(N);
  const Eigen::VectorXcd rhs = restrict_rows(rhs_full, N);

  TorusWeldSolution sol;
  const bool dense = num.solver == "dense" || (num.solver == "auto" && 2 * N <= num.dense_max);
  Eigen::VectorXcd Z;
  if (rhs.norm() == 0.0) {
    Z = Eigen::VectorXcd::Zero(2 * N);
    sol.diag.solve.dense = dense;
  } else if (dense) {
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(2 * N + 1, 2 * N);
    for (int i = 0; i < N; ++i) P(i, i) = 1.0 / D[i];
    for (int i = N; i < 2 * N; ++i) P(i + 1, i) = 1.0 / D[i];
    const Eigen::MatrixXcd A = restrict_rows(P - K.apply_K(P), N);
    Z = dense_solve(A, rhs, sol.diag.solve);
    if (sol.diag.solve.rcond < 1e-14)
      throw Error(ErrorCode::SingularSystem, "condition estimate above 1e14");
  } else {
    Z = gmres_solve(op, 2 * N, rhs, 1e-2 * num.solve_tol, sol.diag.solve);
  }
  if (sol.diag.solve.residual > num.solve_tol)
    throw Error(ErrorCode::SingularSystem,
                "linear solve residual " + std::to_string(sol.diag.solve.residual) + " above tolerance");

  sol.L = L, sol.N = N, sol.M = M, sol.tau = K.tau;
  sol.Y = embed(Z.cwiseQuotient(D), N);
  sol.x = K.x, sol.f = K.f, sol.f1 = K.f1, sol.f2 = K.f2, sol.f3 = K.f3;
  sol.diag.tail = K.tail;

  std::vector<Eigen::VectorXcd> dY(4, Eigen::VectorXcd(M));
  Eigen::VectorXcd hat(M);
  for (int order = 0; order <= 3; ++order) {
    hat.setZero();
    for (int n = -N; n <= N; ++n)
      hat[wrap(n, M)] = sol.Y[n + N] * std::pow(cplx(0.0, -2.0 * M_PI * n / L), order);
    dft(hat.data(), dY[order].data(), M, -1);
  }
  cplx acc = 0.0;
  for (int j = 0; j < M; ++j) acc += (K.f[j] - K.x[j]) * (K.f1[j] - dY[1][j]);
  sol.tau_hat = K.tau - acc / (L * M);

  sol.Y1 = dY[0];
  sol.X1.resize(M), sol.X2.resize(M), sol.Xp.resize(M), sol.SX.resize(M);
  for (int j = 0; j < M; ++j) {
    sol.X1[j] = K.f[j] - dY[0][j] - L * K.tau;
    sol.X2[j] = sol.X1[j] + L * sol.tau_hat;
    const cplx d1 = K.f1[j] - dY[1][j], d2 = K.f2[j] - dY[2][j], d3 = K.f3[j] - dY[3][j];
    sol.Xp[j] = d1;
    sol.SX[j] = schwarzian(d1, d2, d3);
  }
  return sol;
}

TorusWeldSolution solve_Y1(const CircleDiffeo& f, cplx tau, const TorusNumerics& num) {
  return solve_Y1(assemble_K(f, tau, num), num);
}

IdentityDefects identity_defects(const TorusWeldSolution& sol) {
  cplx q1 = 0.0, q2 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < sol.M; ++j) {
    const cplx x2 = sol.Xp[j] * sol.Xp[j];
    q1 += x2;
    q2 += x2 / sol.f1[j];
    const double Sf = schwarzian(sol.f1[j], sol.f2[j], sol.f3[j]);
    s1 += sol.SX[j];
    s2 += (sol.SX[j] - Sf) / sol.f1[j];
  }
  const double dx = sol.dx();
  return {std::abs(q1 - q2) / std::abs(q1), std::abs(s1 - s2) * dx};
}

void residual_diagnostics(const CircleDiffeo& f, TorusWeldSolution& sol, const TorusNumerics& num) {
  TorusNumerics fine = num;
  fine.M = 2 * sol.M;
  fine.Kin = 2 * (num.Kin > 0 ? num.Kin : num.N);
  fine.tail_tol = 1e300;
  const TorusKernels K = assemble_K(f, sol.tau, fine);
  const int N = sol.N;
  const double L = sol.L;
  // Y2 = Y1 - Y12 with Y12 = f - x + L (tau_hat - tau).
  Eigen::VectorXcd Y2 = sol.Y - K.u_hat;
  Y2[N] = -(K.u_hat[N] + L * (sol.tau_hat - sol.tau));
  const Eigen::VectorXcd Y12 = sol.Y - Y2;
  const double scale = Y12.norm() > 0.0 ? Y12.norm() : 1.0;

  Eigen::VectorXcd r1 = -K.apply_K11(sol.Y) - K.apply_K12(Y2);
  r1.tail(N + 1) += sol.Y.tail(N + 1);
  Eigen::VectorXcd r2 = -K.apply_K21(sol.Y);
  r2.head(N) += Y2.head(N);
  sol.diag.cy1 = r1.norm() / scale;
  sol.diag.cy2 = r2.norm() / scale;

  cplx ic = 0.0;
  for (int j = 0; j < sol.M; ++j) ic += (sol.f[j] - sol.x[j] + L * (sol.tau_hat - sol.tau)) * sol.Xp[j];
  sol.diag.intcond = std::abs(ic / static_cast<double>(sol.M)) / L;
  const cplx y12_0 = Y12.sum();
  sol.diag.b_defect = std::abs(sol.tau - sol.f[0] / L + y12_0 / L - sol.tau_hat);
}

TauPath effective_tau_ode(const std::function<TorusNode(double)>& solve_at, cplx tau0, double s_end, double a,
                          int panels, int order) {
  TauPath path;
  path.s.push_back(0.0);
  path.tau_hat.push_back(tau0);
  const double h = s_end / panels;
  const Quadrature q = gauss_panels(0.0, h, 1, order);
  cplx tau = tau0;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      const TorusNode node = solve_at(p * h + q.x[i]);
      const auto& sol = node.sol;
      cplx acc = 0.0;
      for (int j = 0; j < sol.M; ++j) acc += (node.zeta[j] - a) * sol.Xp[j] * sol.Xp[j];
      tau += q.w[i] * acc * sol.dx() / (sol.L * sol.L);
    }
    path.s.push_back((p + 1) * h);
    path.tau_hat.push_back(tau);
  }
  return path;
}

}  // namespace weldfcs

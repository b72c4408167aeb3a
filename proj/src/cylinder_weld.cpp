#include "weldfcs/cylinder_weld.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "weldfcs/errors.hpp"

namespace weldfcs {

namespace {

const cplx I(0.0, 1.0);

// exp(i a) - 1 without cancellation for small a.
cplx expi_m1(double a) {
  const double s = std::sin(0.5 * a), c = std::cos(0.5 * a);
  return cplx(-2.0 * s * s, 2.0 * s * c);
}

// exp(i p (x0 + j h)) for j = 0..m-1 by recurrence, re-anchored every 32 steps.
void phase_row(double p, double x0, double h, int m, cplx* out) {
  const cplx r = std::polar(1.0, p * h);
  for (int j = 0; j < m; ++j) out[j] = (j % 32 == 0) ? std::polar(1.0, p * (x0 + j * h)) : out[j - 1] * r;
}

}  // namespace

CylinderNumerics cylinder_defaults(const Volume& inf, const CylinderNumerics& base) {
  CylinderNumerics num = base;
  if (num.kink_scale <= 0.0) {
    const auto& p = inf.profile();
    num.kink_scale = p.half_width * inf.beta0() / std::max(p.beta_left, p.beta_right);
  }
  return num;
}

Eigen::VectorXcd CylinderSystem::apply(const Eigen::VectorXcd& z) const {
  const Eigen::VectorXcd v = wk.cwiseProduct(z);
  Eigen::VectorXcd ab(2 * n);
  for (int i = 0; i < n; ++i) {
    ab[i] = v[i] / (1.0 - eq[i]);
    ab[n + i] = v[n + i] / (1.0 - eq[n + i]);
  }
  const Eigen::VectorXcd G = apply_Gf(ab);
  Eigen::MatrixXcd U(2 * n, 2);
  for (int i = 0; i < n; ++i) {
    const cplx a = ab[n + i], b = ab[i];
    U(i, 0) = wk[i] * G[i] + b;
    U(n + i, 0) = eq[n + i] * a;
    U(i, 1) = 0.0;
    U(n + i, 1) = a + wk[n + i] * G[n + i] - eq[n + i] * a;
  }
  const Eigen::MatrixXcd GU = apply_Gi(U);
  Eigen::VectorXcd out = z;
  for (int i = 0; i < n; ++i) {
    out[n + i] -= GU(n + i, 0);
    out[i] += GU(i, 1) - eq[i] * G[i];
  }
  return out;
}

Eigen::MatrixXcd CylinderSystem::dense() const {
  Eigen::MatrixXcd A(2 * n, 2 * n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    e[k] = 1.0;
    A.col(k) = apply(e);
    e[k] = 0.0;
  }
  return A;
}

CylinderSystem assemble_sigma(const LineDiffeo& g, double gamma, const CylinderNumerics& num) {
  if (!(gamma > 0.0)) throw ConfigError("v", "circumference gamma must be positive");
  const double pad = num.pad > 0.0 ? num.pad : 12.0 * gamma;
  if (pad < 5.0 * gamma)
    throw Error(ErrorCode::WindowTooSmall, "window pad " + std::to_string(pad) + " is below 5 gamma");
  CylinderSystem S;
  S.gamma = gamma;
  S.lo = g.lo;
  S.hi = std::max(g.hi, g.lo);
  S.center = 0.5 * (S.lo + S.hi);
  const double R = 0.5 * (S.hi - S.lo);

  const double scale = num.kink_scale > 0.0 ? num.kink_scale : (R > 0.0 ? R : gamma);
  const double P = num.P_max > 0.0 ? num.P_max : 80.0 / scale;
  const double panel0 = num.panel > 0.0 ? num.panel : std::min(1.0, 8.0 / (R + 2.0 * gamma));
  const int panels = std::max(1, static_cast<int>(std::ceil(P / panel0 - 1e-9)));
  const Quadrature q = gauss_panels(0.0, P, panels, num.gl_order);
  const int n = static_cast<int>(q.x.size());
  S.n = n;
  S.p.resize(2 * n);
  S.wk.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    S.p[n - 1 - i] = -q.x[i];
    S.p[n + i] = q.x[i];
    S.wk[n - 1 - i] = S.wk[n + i] = q.w[i] / (2.0 * M_PI);
  }
  S.eq = (-gamma * S.p.cwiseAbs()).array().exp();

  // Kernel quadrature: g - id vanishes identically outside [lo, hi], so the
  // trapezoid rule on that interval is spectrally accurate.
  double gpmax = 1.0;
  if (R > 0.0)
    for (int j = 0; j <= 512; ++j) gpmax = std::max(gpmax, g(S.lo + (S.hi - S.lo) * j / 512.0).d1);
  // Phases p x - q g(x) reach P (1 + max g') and g - id carries content up to P.
  double dx = num.dx > 0.0 ? num.dx : 2.0 * M_PI / (1.25 * P * (2.0 + gpmax));
  const int Mx = R > 0.0 ? std::max(8, static_cast<int>(std::ceil((S.hi - S.lo) / dx))) : 1;
  dx = R > 0.0 ? (S.hi - S.lo) / Mx : 0.0;
  S.xq.resize(Mx + 1);
  Eigen::VectorXd u(Mx + 1), gp(Mx + 1);
  for (int j = 0; j <= Mx; ++j) {
    const double xp = S.lo + j * dx;
    const Jet gj = g(xp);
    S.xq[j] = xp - S.center;
    u[j] = gj.v - xp;
    gp[j] = gj.d1;
  }
  S.Ep.resize(2 * n, Mx + 1);
  S.Af.resize(2 * n, Mx + 1);
  S.Bi.resize(Mx + 1, 2 * n);
  S.Ex2.resize(Mx + 1, 2 * n);
  std::vector<cplx> row(Mx + 1);
  for (int k = 0; k < 2 * n; ++k) {
    const double pk = S.p[k];
    phase_row(pk, S.xq[0], dx, Mx + 1, row.data());
    for (int j = 0; j <= Mx; ++j) {
      const cplx e = row[j];
      S.Ep(k, j) = e * dx;
      S.Ex2(j, k) = std::conj(e);
      S.Bi(j, k) = std::conj(e) * expi_m1(-pk * u[j]);
      S.Af(k, j) = e * (expi_m1(pk * u[j]) * gp[j] + (gp[j] - 1.0)) * dx;
    }
  }

  const Eigen::VectorXcd Yh = S.Ep * u.cast<cplx>();
  Eigen::VectorXcd src = Eigen::VectorXcd::Zero(2 * n);
  for (int i = n; i < 2 * n; ++i) src[i] = S.eq[i] * Yh[i] * S.wk[i];
  const Eigen::VectorXcd corr = S.apply_Gi(src);
  S.Z12.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    S.Z12[n + i] = -S.eq[n + i] * Yh[n + i] - corr[n + i];
    S.Z12[i] = Yh[i] - corr[i];
  }
  return S;
}

std::array<cplx, 3> CylinderWeldSolution::eval(double xv) const {
  cplx y1 = 0.0, y2 = 0.0, y3 = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const cplx e = wk[k] * Y1ph[k] * std::polar(1.0, -p[k] * (xv - center));
    const cplx ip(0.0, -p[k]);
    y1 += e;
    y2 += ip * e;
    y3 += ip * ip * e;
  }
  const Jet gj = g(xv);
  return {gj.d1 - y1, gj.d2 - y2, gj.d3 - y3};
}

cplx CylinderWeldSolution::eval_SX(double xv) const {
  const auto d = eval(xv);
  return schwarzian(d[0], d[1], d[2]);
}

namespace {

// Least-squares slope of log|X' - 1| against distance from the support. Far
// out the momentum cutoff leaves a slowly decaying ripple; points within a
// factor 100 of it are dropped.
double decay_rate(const std::vector<double>& d, const std::vector<double>& a) {
  if (a.size() < 8) return 0.0;
  const double dmax = *std::max_element(d.begin(), d.end());
  double noise = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0.5 * dmax) noise = std::max(noise, a[i]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (a[i] <= 100.0 * noise || a[i] <= 0.0) continue;
    const double y = std::log(a[i]);
    sx += d[i], sy += y, sxx += d[i] * d[i], sxy += d[i] * y;
    ++m;
  }
  if (m < 4) return 0.0;
  const double den = m * sxx - sx * sx;
  return den > 0.0 ? -(m * sxy - sx * sy) / den : 0.0;
}

}  // namespace

CylinderWeldSolution solve_cylinder(const LineDiffeo& g, double gamma, const CylinderNumerics& num) {
  const CylinderSystem S = assemble_sigma(g, gamma, num);
  const int n2 = S.size();
  CylinderWeldSolution sol;
  sol.gamma = gamma;
  sol.center = S.center;
  sol.lo = S.lo;
  sol.hi = S.hi;
  sol.p = S.p;
  sol.wk = S.wk;
  sol.g = g;
  auto& d = sol.diag;
  d.P_max = S.p.maxCoeff();
  d.nodes = n2;
  d.Mx = static_cast<int>(S.xq.size());
  d.dx = S.xq.size() > 1 ? S.xq[1] - S.xq[0] : 0.0;
  d.pad = num.pad > 0.0 ? num.pad : 12.0 * gamma;

  const bool dense = num.solver == "dense" || (num.solver == "auto" && n2 <= num.dense_max);
  if (S.Z12.norm() == 0.0) {
    sol.Z = Eigen::VectorXcd::Zero(n2);
    d.solve.dense = dense;
  } else if (dense) {
    sol.Z = dense_solve(S.dense(), S.Z12, d.solve);
    if (d.solve.rcond >= 0.0 && d.solve.rcond < 1e-12)
      throw Error(ErrorCode::NearSingular, "condition estimate above 1e12");
  } else {
    const LinearMap op = [&S](const Eigen::VectorXcd& z) { return S.apply(z); };
    sol.Z = gmres_solve(op, n2, S.Z12, 1e-2 * num.solve_tol, d.solve);
  }
  if (d.solve.residual > num.solve_tol)
    throw Error(ErrorCode::NotConverged,
                "Nystrom residual " + std::to_string(d.solve.residual) + " above tolerance");

  sol.Y1ph.resize(n2);
  for (int k = 0; k < n2; ++k) sol.Y1ph[k] = -I * S.p[k] * sol.Z[k] / -std::expm1(-gamma * std::abs(S.p[k]));

  double zmax = 0.0, ztop = 0.0;
  for (int k = 0; k < n2; ++k) {
    const double a = std::abs(sol.Z[k]);
    zmax = std::max(zmax, a);
    if (8.0 * std::abs(S.p[k]) >= 7.0 * d.P_max) ztop = std::max(ztop, a);
  }
  d.tail = zmax > 0.0 ? ztop / zmax : 0.0;

  // Output grid on the support padded by the window.
  const double h0 = num.out_dx > 0.0 ? num.out_dx : gamma / 16.0;
  const double a = S.lo - d.pad, b = S.hi + d.pad;
  const int Mo = static_cast<int>(std::ceil((b - a) / h0));
  const double h = (b - a) / Mo;
  sol.x.resize(Mo + 1);
  for (int j = 0; j <= Mo; ++j) sol.x[j] = a + j * h;
  Eigen::MatrixXcd E(Mo + 1, n2);
  {
    std::vector<cplx> row(Mo + 1);
    for (int k = 0; k < n2; ++k) {
      phase_row(-S.p[k], a - S.center, h, Mo + 1, row.data());
      for (int j = 0; j <= Mo; ++j) E(j, k) = S.wk[k] * row[j];
    }
  }
  Eigen::MatrixXcd coef(n2, 3);
  for (int k = 0; k < n2; ++k) {
    const cplx ip(0.0, -S.p[k]);
    coef(k, 0) = sol.Y1ph[k];
    coef(k, 1) = ip * sol.Y1ph[k];
    coef(k, 2) = ip * ip * sol.Y1ph[k];
  }
  const Eigen::MatrixXcd Yd = E * coef;
  sol.Xp.resize(Mo + 1);
  sol.SX.resize(Mo + 1);
  std::vector<double> dl, al, dr, ar;
  d.min_abs_Xp = 1e300;
  for (int j = 0; j <= Mo; ++j) {
    const Jet gj = g(sol.x[j]);
    const cplx d1 = gj.d1 - Yd(j, 0), d2 = gj.d2 - Yd(j, 1), d3 = gj.d3 - Yd(j, 2);
    sol.Xp[j] = d1;
    sol.SX[j] = schwarzian(d1, d2, d3);
    d.min_abs_Xp = std::min(d.min_abs_Xp, std::abs(d1));
    const double xj = sol.x[j];
    if (xj > S.hi + 0.25 * gamma) dr.push_back(xj - S.hi), ar.push_back(std::abs(d1 - 1.0));
    if (xj < S.lo - 0.25 * gamma) dl.push_back(S.lo - xj), al.push_back(std::abs(d1 - 1.0));
  }
  if (d.min_abs_Xp == 0.0) throw Error(ErrorCode::NearSingular, "X' vanishes on the output grid");
  d.decay_left = decay_rate(dl, al);
  d.decay_right = decay_rate(dr, ar);
  return sol;
}

RealspaceDefects realspace_crosscheck(const CylinderWeldSolution& sol, double panel_width) {
  const double gamma = sol.gamma;
  const double pw = panel_width > 0.0 ? panel_width : gamma / 4.0;
  const double A = sol.x[0], B = sol.x[sol.x.size() - 1];
  const int panels = static_cast<int>(std::ceil((B - A) / pw));
  const Quadrature q = gauss_panels(A, B, panels, 16);
  const int Q = static_cast<int>(q.x.size());
  std::vector<double> gv(Q), g1(Q);
  std::vector<cplx> psi1(Q), psi2(Q), dpsi1(Q), dpsi2(Q);
  for (int i = 0; i < Q; ++i) {
    const Jet gj = sol.g(q.x[i]);
    const auto X = sol.eval(q.x[i]);
    gv[i] = gj.v;
    g1[i] = gj.d1;
    psi1[i] = X[0] / gj.d1 - 1.0;
    psi2[i] = X[0] - 1.0;
    dpsi1[i] = (X[1] * gj.d1 - X[0] * gj.d2) / (gj.d1 * gj.d1);
    dpsi2[i] = X[1];
  }
  const double gA = sol.g(A).v, gB = sol.g(B).v;
  const cplx c = 1.0 / (2.0 * M_PI * I);
  RealspaceDefects out;
  for (int k = 0; k < Q; ++k) {
    const double x = q.x[k], gx = gv[k];
    cplx I1 = psi1[k] * std::log((gB - gx) / (gx - gA));
    cplx I2 = 0.0, J1 = 0.0;
    cplx J2 = psi2[k] * std::log((B - x) / (x - A));
    for (int i = 0; i < Q; ++i) {
      const double w = q.w[i];
      if (i == k) {
        I1 += w * dpsi1[k];
        J2 += w * dpsi2[k];
      } else {
        I1 += w * (psi1[i] - psi1[k]) * g1[i] / (gv[i] - gx);
        J2 += w * (psi2[i] - psi2[k]) / (q.x[i] - x);
      }
      I2 += w * psi2[i] / (q.x[i] - gx + I * gamma);
      J1 += w * psi1[i] * g1[i] / (gv[i] - I * gamma - x);
    }
    out.lower = std::max(out.lower, std::abs(0.5 * psi1[k] - c * (I1 - I2)));
    out.upper = std::max(out.upper, std::abs(0.5 * psi2[k] - c * (J1 - J2)));
  }
  return out;
}

}  // namespace weldfcs

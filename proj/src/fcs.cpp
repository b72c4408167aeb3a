#include "weldfcs/fcs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "weldfcs/analysis.hpp"
#include "weldfcs/errors.hpp"
#include "weldfcs/parallel.hpp"

namespace weldfcs {

namespace {

const cplx I(0.0, 1.0);

// e^{ia} - 1 without cancellation for small a
cplx expi_m1(double a) {
  const double h = std::sin(0.5 * a);
  return cplx(-2.0 * h * h, std::sin(a));
}

double kink_scale(const Volume& v) {
  const auto& p = v.profile();
  return p.half_width * v.beta0() / std::max(p.beta_left, p.beta_right);
}

std::string num_key(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Gauss-Kronrod 7/15 nodes on [0, s] split into panels.
struct SRule {
  std::vector<double> x, wk, wg;
};
SRule s_rule(double s, int panels) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G7 = boost::math::quadrature::gauss<double, 7>;
  const auto& a = GK::abscissa();
  const auto& w = GK::weights();
  const auto& gw = G7::weights();
  std::vector<double> t, tk, tg;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double g = (i % 2 == 0) ? gw[i / 2] : 0.0;
    if (i == 0) {
      t.push_back(0.0), tk.push_back(w[0]), tg.push_back(g);
    } else {
      t.push_back(-a[i]), tk.push_back(w[i]), tg.push_back(g);
      t.push_back(a[i]), tk.push_back(w[i]), tg.push_back(g);
    }
  }
  SRule r;
  const double h = s / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < t.size(); ++i) {
      r.x.push_back(h * (p + 0.5 * (t[i] + 1.0)));
      r.wk.push_back(0.5 * h * tk[i]);
      r.wg.push_back(0.5 * h * tg[i]);
    }
  return r;
}

Quadrature xi_nodes(const Volume& inf, Mover m, double t) {
  const auto [lo, hi] = xi_support_mover(inf, m, t);
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.25 * kink_scale(inf)))));
  return gauss_panels(lo, hi, panels, 20);
}

std::string cyl_key(const Volume& inf, Mover m, double s, double t, const CylinderNumerics& c) {
  return "cyl|" + inf.profile().key() + "|v=" + num_key(inf.v()) + "|" + (m == Mover::plus ? "+" : "-") +
         "|s=" + num_key(s) + "|t=" + num_key(t) + "|P=" + num_key(c.P_max) + "|pw=" + num_key(c.panel) +
         "|gl=" + std::to_string(c.gl_order) + "|dx=" + num_key(c.dx) + "|pad=" + num_key(c.pad) +
         "|ks=" + num_key(c.kink_scale);
}

std::string tor_key(const Volume& box, double s, double t, const TorusNumerics& n) {
  return "tor|" + box.profile().key() + "|v=" + num_key(box.v()) + "|L=" + num_key(box.L()) + "|s=" + num_key(s) +
         "|t=" + num_key(t) + "|N=" + std::to_string(n.N) + "|M=" + std::to_string(n.M) +
         "|K=" + std::to_string(n.Kin);
}

cplx cached(const NodeCache* cache, const std::string& key, const std::function<cplx()>& compute) {
  if (cache && cache->get)
    if (auto v = cache->get(key)) return *v;
  const cplx v = compute();
  if (cache && cache->put) cache->put(key, v);
  return v;
}

}  // namespace

cplx cylinder_action(const Volume& inf, Mover m, double s, double t, const FcsNumerics& num) {
  if (t == 0.0) return 0.0;
  const CylinderNumerics cnum = cylinder_defaults(inf, num.cylinder);
  return cached(num.cache, cyl_key(inf, m, s, t, cnum), [&]() -> cplx {
    const double gamma = inf.gamma();
    const double k = 2.0 * M_PI * M_PI / (gamma * gamma);
    const Quadrature q = xi_nodes(inf, m, t);
    if (s == 0.0) {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * xi_mover(inf, m, q.x[i], t);
      return -k * acc;
    }
    const auto sol = solve_cylinder(LineDiffeo::from_flow(inf, m, s, t, num.flow), gamma, cnum);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      const auto X = sol.eval(q.x[i]);
      acc += q.w[i] * xi_mover(inf, m, q.x[i], t) * (schwarzian(X[0], X[1], X[2]) - k * X[0] * X[0]);
    }
    return acc;
  });
}

PsiResult psi_infinite_s(const Volume& inf, double c, double t, double s, const FcsNumerics& num) {
  if (inf.finite()) throw ConfigError("L", "infinite-volume FCS needs an infinite volume");
  PsiResult r;
  r.t = t;
  r.s = s;
  r.lambda = s * inf.profile().delta_beta();
  if (s == 0.0 || t == 0.0) return r;
  const SRule rule = s_rule(s, std::max(1, num.s_panels));
  const int ns = static_cast<int>(rule.x.size());
  std::vector<cplx> A(2 * ns);
  parallel_for(2 * ns, num.threads, [&](int i) {
    const Mover m = i < ns ? Mover::plus : Mover::minus;
    A[i] = cylinder_action(inf, m, rule.x[i % ns], t, num);
  });
  const cplx pre = -I * c / (24.0 * M_PI);
  for (int mi = 0; mi < 2; ++mi) {
    MoverPsi& mp = mi == 0 ? r.plus : r.minus;
    cplx K = 0.0, G = 0.0;
    for (int i = 0; i < ns; ++i) {
      K += rule.wk[i] * A[mi * ns + i];
      G += rule.wg[i] * A[mi * ns + i];
    }
    mp.action = K;
    mp.counterterm = counterterm_integral(inf, mi == 0 ? Mover::plus : Mover::minus, t);
    mp.lnpsi = pre * (K + s * inf.v() * mp.counterterm);
    mp.s_error = std::abs(pre) * std::abs(K - G);
  }
  r.lnpsi = r.plus.lnpsi + r.minus.lnpsi;
  return r;
}

PsiResult psi_infinite(const Volume& inf, double c, double t, double lambda, const FcsNumerics& num) {
  const double db = inf.profile().delta_beta();
  if (db == 0.0)
    throw Error(ErrorCode::DeltaBetaZero, "equal temperatures: parameterize by the flow time s instead of lambda");
  PsiResult r = psi_infinite_s(inf, c, t, lambda / db, num);
  r.lambda = lambda;
  return r;
}

FinitePsiResult psi_finite_s(const Volume& box, const Theory& th, double t, double s, const FcsNumerics& num) {
  if (!box.finite()) throw ConfigError("L", "finite-volume FCS needs a box size");
  if (!th.has_character())
    throw ConfigError("theory.model", "finite volume needs a theory with a character");
  FinitePsiResult r;
  r.t = t, r.s = s, r.L = box.L();
  r.lambda = s * box.profile().delta_beta();
  r.tau0 = r.tau_hat = tau_sL(box, 0.0);
  if (s == 0.0) return r;

  auto xi_SX = [&](const TorusWeldSolution& sol) {
    cplx acc = 0.0;
    for (int j = 0; j < sol.M; ++j) acc += box.xi(sol.x[j], t) * sol.SX[j];
    return acc * sol.dx();
  };
  const SRule rule = s_rule(s, std::max(1, num.s_panels));
  const int ns = static_cast<int>(rule.x.size());
  std::vector<cplx> B(ns);
  std::vector<cplx> tau_end(1);
  parallel_for(ns + 1, num.threads, [&](int i) {
    if (i == ns) {
      tau_end[0] = solve_Y1(CircleDiffeo::from_flow(box, s, t, num.flow), tau_sL(box, s), num.torus).tau_hat;
      return;
    }
    if (t == 0.0) {
      B[i] = 0.0;
      return;
    }
    B[i] = cached(num.cache, tor_key(box, rule.x[i], t, num.torus), [&] {
      return xi_SX(solve_Y1(CircleDiffeo::from_flow(box, rule.x[i], t, num.flow), tau_sL(box, rule.x[i]), num.torus));
    });
  });
  cplx K = 0.0, G = 0.0;
  for (int i = 0; i < ns; ++i) K += rule.wk[i] * B[i], G += rule.wg[i] * B[i];
  const cplx pre = -I * th.c / (24.0 * M_PI);
  r.action = K;
  r.s_error = std::abs(pre) * std::abs(K - G);
  r.tau_hat = tau_end[0];
  r.log_char_ratio = log_character(th, r.tau_hat) - log_character(th, r.tau0);
  r.C_t = counterterm_C(box, t, th.c);
  r.C_0 = 0.0;
  r.lnpsi = pre * K + r.log_char_ratio - I * s * (r.C_t - r.C_0);
  return r;
}

FinitePsiResult psi_finite(const Volume& box, const Theory& th, double t, double lambda, const FcsNumerics& num) {
  const double db = box.profile().delta_beta();
  if (db == 0.0)
    throw Error(ErrorCode::DeltaBetaZero, "equal temperatures: parameterize by the flow time s instead of lambda");
  FinitePsiResult r = psi_finite_s(box, th, t, lambda / db, num);
  r.lambda = lambda;
  return r;
}

Cumulants pipeline_cumulants(const Volume& inf, double c, double t, double h, const FcsNumerics& num) {
  // Lagrange weights at 0 for nodes lambda^2 = h^2, 4h^2, 9h^2.
  const double w[3] = {1.5, -0.6, 0.1};
  Cumulants out;
  for (int k = 1; k <= 3; ++k) {
    const double lam = k * h;
    const cplx f = psi_infinite(inf, c, t, lam, num).lnpsi;
    out.mean += w[k - 1] * f.imag() / lam;
    out.variance += w[k - 1] * (-2.0 * f.real() / (lam * lam));
  }
  return out;
}

cplx xi_hat(const Volume& inf, Mover m, double t, double p) {
  const Quadrature q = xi_nodes(inf, m, t);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * xi_mover(inf, m, q.x[i], t) * std::polar(1.0, p * q.x[i]);
  return acc;
}

namespace {

// xi_hat on a symmetric momentum rule, in the frame centred on the support.
struct XiSpectrum {
  double center = 0.0;
  Quadrature p;
  std::vector<cplx> hat;
};
XiSpectrum xi_spectrum(const Volume& inf, Mover m, double t) {
  XiSpectrum out;
  const Quadrature q = xi_nodes(inf, m, t);
  const auto [lo, hi] = xi_support_mover(inf, m, t);
  out.center = 0.5 * (lo + hi);
  const double R = 0.5 * (hi - lo);
  const double P = 120.0 / kink_scale(inf);
  const double pw = std::min(1.0, 4.0 / std::max(R, 1e-3));
  out.p = gauss_panels(-P, P, static_cast<int>(std::ceil(2.0 * P / pw)), 20);
  std::vector<double> xi(q.x.size());
  for (std::size_t i = 0; i < q.x.size(); ++i) xi[i] = q.w[i] * xi_mover(inf, m, q.x[i], t);
  out.hat.resize(out.p.x.size());
  for (std::size_t k = 0; k < out.p.x.size(); ++k) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) acc += xi[i] * std::polar(1.0, out.p.x[k] * (q.x[i] - out.center));
    out.hat[k] = acc;
  }
  return out;
}

// p / (1 - e^{-gamma p}), finite at p = 0
double bose_factor(double gamma, double p) {
  if (p == 0.0) return 1.0 / gamma;
  return p / -std::expm1(-gamma * p);
}

}  // namespace

std::vector<cplx> linear_response_Xp(const Volume& inf, Mover m, double t, const std::vector<double>& xs) {
  const XiSpectrum sp = xi_spectrum(inf, m, t);
  const double gamma = inf.gamma();
  std::vector<cplx> out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < sp.p.x.size(); ++k) {
      const double p = sp.p.x[k];
      acc += sp.p.w[k] * bose_factor(gamma, p) * sp.hat[k] * std::polar(1.0, -p * (xs[j] - sp.center));
    }
    out[j] = I * acc / (2.0 * M_PI);
  }
  return out;
}

ClosedMoments moments_closed_form(const Volume& inf, double c, double t) {
  ClosedMoments out;
  const double db = inf.profile().delta_beta();
  if (db == 0.0) throw Error(ErrorCode::DeltaBetaZero, "moments are normalized by delta_beta");
  if (t == 0.0) return out;
  const double gamma = inf.gamma();
  double var = 0.0;
  for (Mover m : {Mover::plus, Mover::minus}) {
    const Quadrature q = xi_nodes(inf, m, t);
    double xi_int = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) xi_int += q.w[i] * xi_mover(inf, m, q.x[i], t);
    (m == Mover::plus ? out.xi_integral_plus : out.xi_integral_minus) = xi_int;
    out.counterterm += counterterm_integral(inf, m, t);
    const XiSpectrum sp = xi_spectrum(inf, m, t);
    for (std::size_t k = 0; k < sp.p.x.size(); ++k) {
      const double p = sp.p.x[k];
      var += sp.p.w[k] * bose_factor(gamma, p) * (p * p + 4.0 * M_PI * M_PI / (gamma * gamma)) * std::norm(sp.hat[k]);
    }
  }
  out.mean = M_PI * c / (12.0 * gamma * gamma * db) * (out.xi_integral_plus + out.xi_integral_minus) -
             c * inf.v() / (24.0 * M_PI * db) * out.counterterm;
  out.variance = c / (48.0 * M_PI * M_PI * db * db) * var;
  return out;
}

double residue_integral_quadrature(double gamma, double p) {
  // On Im y = gamma/2, sinh(pi y/gamma) = i cosh(pi x/gamma).
  const double X = 12.0 * gamma;
  const Quadrature q = gauss_panels(-X, X, static_cast<int>(std::ceil(2.0 * X / (gamma / 8.0))), 30);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const double ch = std::cosh(M_PI * q.x[i] / gamma);
    acc += q.w[i] * std::polar(1.0, -p * q.x[i]) / (ch * ch * ch * ch);
  }
  return (acc * std::exp(0.5 * gamma * p)).real();
}

double residue_integral_closed(double gamma, double p) {
  const double g4 = gamma * gamma * gamma * gamma;
  return g4 / (3.0 * M_PI * M_PI * M_PI) * bose_factor(gamma, p) * (p * p + 4.0 * M_PI * M_PI / (gamma * gamma));
}

Xi ldf(double bl, double br, double c, cplx lambda) {
  const cplx a = bl - I * lambda, b = br + I * lambda;
  if (std::abs(a) < 1e-14 || std::abs(b) < 1e-14) throw Error(ErrorCode::PoleHit, "lambda sits on a pole of Xi");
  const double k = M_PI * c / 12.0;
  return {k * (1.0 / a - 1.0 / bl), k * (1.0 / b - 1.0 / br)};
}

cplx levitov_lesovik(double bl, double br, double lambda) {
  auto integrand = [=](double e) {
    // n_L (1 - n_R) and n_R (1 - n_L) written to avoid overflow
    auto occ = [](double b1, double b2, double x) {
      const double a1 = b1 * x, a2 = -b2 * x;
      const double l1 = a1 > 0 ? a1 + std::log1p(std::exp(-a1)) : std::log1p(std::exp(a1));
      const double l2 = a2 > 0 ? a2 + std::log1p(std::exp(-a2)) : std::log1p(std::exp(a2));
      return std::exp(-l1 - l2);
    };
    const double up = occ(bl, br, e), down = occ(br, bl, e);
    return std::log(1.0 + up * expi_m1(lambda * e) + down * expi_m1(-lambda * e));
  };
  boost::math::quadrature::sinh_sinh<double> ss;
  const double re = ss.integrate([&](double e) { return integrand(e).real(); });
  const double im = ss.integrate([&](double e) { return integrand(e).imag(); });
  return cplx(re, im) / (2.0 * M_PI);
}

double scgf(double bl, double br, double c, double nu) {
  return M_PI * c / 12.0 * (nu / (bl * (bl - nu)) - nu / (br * (br + nu)));
}

double mean_drift(double bl, double br, double c) { return M_PI * c / 12.0 * (1.0 / (bl * bl) - 1.0 / (br * br)); }

double rate_function(double bl, double br, double c, double sigma) {
  if (!(c > 0.0)) throw ConfigError("theory.c", "rate function needs c > 0");
  const double k = M_PI * c / 12.0;
  auto dLam = [&](double nu) { return k * (1.0 / ((bl - nu) * (bl - nu)) - 1.0 / ((br + nu) * (br + nu))) - sigma; };
  // Lambda' runs from -inf to +inf across (-beta_R, beta_L).
  double el = 0.25 * (bl + br), er = el;
  for (int i = 0; i < 400 && dLam(-br + er) >= 0.0; ++i) er *= 0.5;
  for (int i = 0; i < 400 && dLam(bl - el) <= 0.0; ++i) el *= 0.5;
  double lo = -br + er, hi = bl - el;
  double nu;
  if (dLam(lo) == 0.0) {
    nu = lo;
  } else if (dLam(hi) == 0.0) {
    nu = hi;
  } else {
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(dLam, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
    nu = 0.5 * (r.first + r.second);
  }
  return nu * sigma - scgf(bl, br, c, nu);
}

double levy_rate(double bl, double br, double c, double x, double y) {
  const double d = y - x;
  const double k = M_PI * c / 12.0;
  if (d > 0.0) return k * std::exp(-bl * d);
  if (d < 0.0) return k * std::exp(br * d);
  return k;  // theta(0) = 1/2 from each branch
}

cplx levy_khintchine(double bl, double br, double c, double lambda) {
  boost::math::quadrature::exp_sinh<double> es;
  auto half = [&](double beta, double sgn) {
    const double re = es.integrate([&](double q) { return (std::cos(sgn * lambda * q) - 1.0) * std::exp(-beta * q); });
    const double im = es.integrate([&](double q) { return std::sin(sgn * lambda * q) * std::exp(-beta * q); });
    return cplx(re, im);
  };
  return M_PI * c / 12.0 * (half(bl, 1.0) + half(br, -1.0));
}

std::vector<LongtimePoint> longtime_approach(const Volume& inf, double c, const std::vector<double>& ts, double lambda,
                                             const FcsNumerics& num) {
  const auto& p = inf.profile();
  const Xi xi = ldf(p.beta_left, p.beta_right, c, lambda);
  std::vector<LongtimePoint> out;
  for (double t : ts) {
    LongtimePoint pt;
    pt.t = t;
    if (lambda != 0.0 && t != 0.0) {
      const PsiResult r = psi_infinite(inf, c, t, lambda, num);
      pt.per_t_plus = r.plus.lnpsi / t;
      pt.per_t_minus = r.minus.lnpsi / t;
      pt.defect_plus = std::abs(pt.per_t_plus - xi.plus);
      pt.defect_minus = std::abs(pt.per_t_minus - xi.minus);
    }
    out.push_back(pt);
  }
  return out;
}

double recentered_Xp_defect(const Volume& box, const Volume& inf, double s, double t, const FcsNumerics& num) {
  const auto sol = solve_Y1(CircleDiffeo::from_flow(box, s, t, num.flow), tau_sL(box, s), num.torus);
  const auto g = LineDiffeo::from_flow(inf, Mover::plus, s, t, num.flow);
  const auto cyl = solve_cylinder(g, inf.gamma(), cylinder_defaults(inf, num.cylinder));
  const double edge = inf.profile().lo();
  const double O = box.h(edge) - inf.h(edge);
  const double gamma = inf.gamma();
  const double a = g.lo - 2.0 * gamma, b = g.hi + 2.0 * gamma;
  double worst = 0.0;
  const int n = 400;
  for (int j = 0; j <= n; ++j) {
    const double y = a + (b - a) * j / n;
    const Jet f = flow(box, y + O, s, t, num.flow);
    const cplx XL = f.d1 - sol.eval_Y1(y + O, 1);
    worst = std::max(worst, std::abs(XL - cyl.eval_Xp(y)));
  }
  return worst;
}

}  // namespace weldfcs

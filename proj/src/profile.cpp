#include "weldfcs/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "weldfcs/errors.hpp"

namespace weldfcs {

Jet compose(const Jet& F, const Jet& u) {
  return {F.v, F.d1 * u.d1, F.d2 * u.d1 * u.d1 + F.d1 * u.d2,
          F.d3 * u.d1 * u.d1 * u.d1 + 3.0 * F.d2 * u.d1 * u.d2 + F.d1 * u.d3};
}

Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
          a.d3 * b.v + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.v * b.d3};
}

Jet reciprocal(const Jet& g) {
  const double r = 1.0 / g.v;
  return {r, -g.d1 * r * r, (2.0 * g.d1 * g.d1 * r - g.d2) * r * r,
          (-6.0 * g.d1 * g.d1 * g.d1 * r * r + 6.0 * g.d1 * g.d2 * r - g.d3) * r * r};
}

KinkShape parse_shape(const std::string& name) {
  if (name == "smooth_step") return KinkShape::smooth_step;
  if (name == "soft_step") return KinkShape::soft_step;
  throw ConfigError("shape", "unknown kink shape '" + name + "' (expected smooth_step or soft_step)");
}

std::string shape_name(KinkShape shape) {
  return shape == KinkShape::smooth_step ? "smooth_step" : "soft_step";
}

namespace {

double sharpness(KinkShape s) { return s == KinkShape::smooth_step ? 2.0 : 1.0; }

// Beyond this |phi| the step is 0 or 1 to far below double resolution.
constexpr double kPhiCut = 700.0;

double step_value(double u, double k) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double phi = k / u - k / (1.0 - u);
  if (phi > kPhiCut) return 0.0;
  if (phi < -kPhiCut) return 1.0;
  if (phi > 0.0) {
    const double e = std::exp(-phi);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(phi));
}

std::array<double, 4> step_jet(double u0, double k) {
  if (u0 <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  if (u0 >= 1.0) return {1.0, 0.0, 0.0, 0.0};
  const double phi0 = k / u0 - k / (1.0 - u0);
  if (phi0 > kPhiCut) return {0.0, 0.0, 0.0, 0.0};
  if (phi0 < -kPhiCut) return {1.0, 0.0, 0.0, 0.0};
  using namespace boost::math::differentiation;
  const auto u = make_fvar<double, 3>(u0);
  const auto phi = k / u - k / (1.0 - u);
  auto S = phi0 > 0.0 ? exp(-phi) / (1.0 + exp(-phi)) : 1.0 / (1.0 + exp(phi));
  return {S.derivative(0), S.derivative(1), S.derivative(2), S.derivative(3)};
}

}  // namespace

void TemperatureProfile::validate() const {
  if (!(beta_left > 0.0) || !std::isfinite(beta_left)) throw ConfigError("beta_left", "must be positive");
  if (!(beta_right > 0.0) || !std::isfinite(beta_right)) throw ConfigError("beta_right", "must be positive");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("half_width", "must be positive");
  if (!std::isfinite(center)) throw ConfigError("center", "must be finite");
}

Jet TemperatureProfile::beta(double x) const {
  const double w = 2.0 * half_width;
  const auto s = step_jet((x - lo()) / w, sharpness(shape));
  const double db = delta_beta();
  return {beta_left + db * s[0], db * s[1] / w, db * s[2] / (w * w), db * s[3] / (w * w * w)};
}

std::string TemperatureProfile::key() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g|%.17g|%.17g|%.17g|%s", beta_left, beta_right, center,
                half_width, shape_name(shape).c_str());
  return buf;
}

// ---------------------------------------------------------------------------

namespace {
constexpr int kPanels = 64;
using Gauss20 = boost::math::quadrature::gauss<double, 20>;

double plain_beta(const TemperatureProfile& p, double x) {
  return p.beta_left + p.delta_beta() * step_value((x - p.lo()) / (2.0 * p.half_width), sharpness(p.shape));
}
}  // namespace

Volume::Volume(const TemperatureProfile& p, double v, double L) : p_(p), v_(v), L_(L) {
  p_.validate();
  if (!std::isfinite(v) || v == 0.0) throw ConfigError("v", "velocity must be finite and nonzero");
  edges_.resize(kPanels + 1);
  cum_.assign(kPanels + 1, 0.0);
  for (int i = 0; i <= kPanels; ++i) edges_[i] = p_.lo() + 2.0 * p_.half_width * i / kPanels;
  auto inv = [this](double x) { return 1.0 / plain_beta(p_, x); };
  for (int i = 0; i < kPanels; ++i) cum_[i + 1] = cum_[i] + Gauss20::integrate(inv, edges_[i], edges_[i + 1]);
  K0_ = K(0.0);
  if (L > 0.0) {
    if (L / 4.0 < std::abs(p_.center) + p_.half_width)
      throw Error(ErrorCode::BoxTooSmall, "kink support exceeds [-L/4, L/4]");
    J_box_lo_ = J(-L / 4.0);
    beta0_ = L / (2.0 * (J(L / 4.0) - J_box_lo_));
  } else {
    beta0_ = p_.beta0();
  }
}

Volume Volume::infinite(const TemperatureProfile& p, double v) { return Volume(p, v, 0.0); }

Volume Volume::box(const TemperatureProfile& p, double v, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L", "box size must be positive");
  return Volume(p, v, L);
}

double Volume::K(double x) const {
  const double lo = p_.lo(), hi = p_.hi();
  if (x <= lo) return (x - lo) / p_.beta_left;
  if (x >= hi) return cum_.back() + (x - hi) / p_.beta_right;
  const int i = std::min(kPanels - 1, static_cast<int>((x - lo) / (hi - lo) * kPanels));
  auto inv = [this](double z) { return 1.0 / plain_beta(p_, z); };
  return cum_[i] + Gauss20::integrate(inv, edges_[i], x);
}

double Volume::J_inv(double j) const {
  const double lo = p_.lo(), hi = p_.hi();
  const double Jlo = -K0_, Jhi = cum_.back() - K0_;
  if (j <= Jlo) return lo + p_.beta_left * (j - Jlo);
  if (j >= Jhi) return hi + p_.beta_right * (j - Jhi);
  const double k = j - Jlo;  // K-value
  const int i = static_cast<int>(std::upper_bound(cum_.begin(), cum_.end(), k) - cum_.begin()) - 1;
  const int ip = std::clamp(i, 0, kPanels - 1);
  const double a = edges_[ip], b = edges_[ip + 1];
  const double guess = a + (b - a) * std::clamp((k - cum_[ip]) / (cum_[ip + 1] - cum_[ip]), 0.0, 1.0);
  auto fn = [&](double x) {
    return std::make_pair(J(x) - j, 1.0 / plain_beta(p_, x));
  };
  std::uintmax_t iters = 60;
  return boost::math::tools::newton_raphson_iterate(fn, guess, a, b, 50, iters);
}

namespace {
struct Reduced {
  double xm;
  long k;
  bool refl;
};
Reduced reduce(double x, double L) {
  const long k = static_cast<long>(std::floor((x + 0.75 * L) / L));
  const double xr = x - k * L;
  if (xr < -0.25 * L) return {-xr - 0.5 * L, k, true};
  return {xr, k, false};
}
}  // namespace

Jet Volume::beta(double x) const {
  if (!finite()) return p_.beta(x);
  const Reduced r = reduce(x, L_);
  Jet b = p_.beta(r.xm);
  if (r.refl) {
    b.d1 = -b.d1;
    b.d3 = -b.d3;
  }
  return b;
}

double Volume::h_box_core(double x) const { return beta0_ * (J(x) - J_box_lo_) - 0.25 * L_; }

double Volume::h(double x) const {
  if (!finite()) return beta0_ * J(x);
  const Reduced r = reduce(x, L_);
  const double c = h_box_core(r.xm);
  return (r.refl ? -c - 0.5 * L_ : c) + r.k * L_;
}

Jet Volume::h_jet(double x) const {
  const Jet b = beta(x);
  const double ib = 1.0 / b.v;
  return {h(x), beta0_ * ib, -beta0_ * b.d1 * ib * ib,
          beta0_ * (2.0 * b.d1 * b.d1 * ib * ib * ib - b.d2 * ib * ib)};
}

double Volume::h_inv(double y) const {
  if (!finite()) return J_inv(y / beta0_);
  const Reduced r = reduce(y, L_);
  const double xm = J_inv((r.xm + 0.25 * L_) / beta0_ + J_box_lo_);
  return (r.refl ? -xm - 0.5 * L_ : xm) + r.k * L_;
}

Jet Volume::h_inv_jet(double y) const {
  const double x = h_inv(y);
  const Jet hj = h_jet(x);
  const double i1 = 1.0 / hj.d1;
  return {x, i1, -hj.d2 * i1 * i1 * i1, (3.0 * hj.d2 * hj.d2 - hj.d1 * hj.d3) * std::pow(i1, 5)};
}

double Volume::Sh(double x) const {
  const Jet b = beta(x);
  const double r = b.d1 / b.v;
  return 0.5 * r * r - b.d2 / b.v;
}

double Volume::zeta(double y, double t) const {
  const double x = h_inv(y);
  const double bx = finite() ? beta(x).v : plain_beta(p_, x);
  const double bt = finite() ? beta(x + v_ * t).v : plain_beta(p_, x + v_ * t);
  return gamma() * bt / bx;
}

std::vector<std::pair<double, double>> Volume::kinks_between(double lo, double hi) const {
  std::vector<std::pair<double, double>> out;
  auto add = [&](double a, double b) {
    if (b > lo && a < hi) out.emplace_back(a, b);
  };
  if (!finite()) {
    add(p_.lo(), p_.hi());
    return out;
  }
  const long k0 = static_cast<long>(std::floor(lo / L_)) - 2;
  const long k1 = static_cast<long>(std::floor(hi / L_)) + 2;
  for (long k = k0; k <= k1; ++k) {
    add(p_.lo() + k * L_, p_.hi() + k * L_);
    add(-p_.hi() - 0.5 * L_ + k * L_, -p_.lo() - 0.5 * L_ + k * L_);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, double> Volume::xi_support(double t) const {
  const double vt = v_ * t;
  return {h(p_.lo() - std::max(vt, 0.0)), h(p_.hi() - std::min(vt, 0.0))};
}

double xi_mover(const Volume& vol, Mover m, double y, double t) {
  return m == Mover::plus ? vol.xi(y, t) : vol.xi(-y, -t);
}

std::pair<double, double> xi_support_mover(const Volume& vol, Mover m, double t) {
  if (m == Mover::plus) return vol.xi_support(t);
  const auto s = vol.xi_support(-t);
  return {-s.second, -s.first};
}

// ---------------------------------------------------------------------------

Jet flow(const Volume& vol, double y, double s, double t, const FlowOptions& opt) {
  if (s == 0.0) return identity_jet(y);
  const Jet xin = vol.h_inv_jet(y);
  const double v = vol.v();
  const double T = std::abs(s);
  const double sgn = s > 0.0 ? 1.0 : -1.0;
  const auto& p = vol.profile();
  const double bmax = std::max(p.beta_left, p.beta_right);

  // z = x + vt moves with velocity -v*beta*sgn; if the swept range never
  // touches a kink the flow is a plain translation.
  const double z0 = xin.v + v * t;
  const double reach = std::abs(v) * bmax * T * (1.0 + 1e-12) + 1e-12;
  const double dir = -sgn * (v > 0.0 ? 1.0 : -1.0);
  const double zlo = dir > 0.0 ? z0 : z0 - reach;
  const double zhi = dir > 0.0 ? z0 + reach : z0;
  Jet phi;
  if (vol.kinks_between(zlo, zhi).empty()) {
    phi = {xin.v - v * vol.beta(z0).v * s, 1.0, 0.0, 0.0};
  } else {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 4>;
    auto rhs = [&](const State& x, State& dx, double) {
      const Jet b = vol.beta(x[0] + v * t);
      const double c = -v * sgn;
      const double V1 = c * b.d1, V2 = c * b.d2, V3 = c * b.d3;
      dx[0] = c * b.v;
      dx[1] = V1 * x[1];
      dx[2] = V2 * x[1] * x[1] + V1 * x[2];
      dx[3] = V3 * x[1] * x[1] * x[1] + 3.0 * V2 * x[1] * x[2] + V1 * x[3];
    };
    State st{xin.v, 1.0, 0.0, 0.0};
    const double dt0 = std::min(T, 0.05 * p.half_width / (std::abs(v) * bmax));
    try {
      auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(opt.abs_tol, opt.rel_tol);
      const std::size_t steps = ode::integrate_adaptive(stepper, rhs, st, 0.0, T, dt0);
      if (static_cast<long>(steps) > opt.max_steps)
        throw Error(ErrorCode::StepSizeUnderflow, "flow needed too many steps");
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::StepSizeUnderflow, e.what());
    }
    if (!std::isfinite(st[0]) || !std::isfinite(st[3]))
      throw Error(ErrorCode::StepSizeUnderflow, "non-finite flow state");
    phi = {st[0], st[1], st[2], st[3]};
  }
  const Jet x1 = compose(phi, xin);
  return compose(vol.h_jet(x1.v), x1);
}

Jet g_mover(const Volume& vol, Mover m, double y, double s, double t, const FlowOptions& opt) {
  if (m == Mover::plus) {
    Jet f = flow(vol, y, s, t, opt);
    f.v += vol.gamma() * s;
    return f;
  }
  const Jet G = g_mover(vol, Mover::plus, -y, -s, -t, opt);
  return {-G.v, G.d1, -G.d2, G.d3};
}

std::pair<double, double> g_support(const Volume& vol, Mover m, double s, double t) {
  if (m == Mover::minus) {
    const auto sp = g_support(vol, Mover::plus, -s, -t);
    return {-sp.second, -sp.first};
  }
  const auto xs = vol.xi_support(t);
  const double g = vol.gamma();
  return {xs.first - g * std::max(-s, 0.0), xs.second + g * std::max(s, 0.0)};
}

CircleDiffeo CircleDiffeo::identity(double L) { return {L, [](double x) { return identity_jet(x); }}; }

CircleDiffeo CircleDiffeo::translation(double L, double b) {
  return {L, [b](double x) { return Jet{x - b, 1.0, 0.0, 0.0}; }};
}

CircleDiffeo CircleDiffeo::from_flow(const Volume& box, double s, double t, const FlowOptions& opt) {
  return {box.L(), [box, s, t, opt](double x) { return flow(box, x, s, t, opt); }};
}

LineDiffeo LineDiffeo::identity() { return {0.0, 0.0, [](double y) { return identity_jet(y); }}; }

LineDiffeo LineDiffeo::from_flow(const Volume& inf, Mover m, double s, double t, const FlowOptions& opt) {
  const auto sup = g_support(inf, m, s, t);
  return {sup.first, sup.second, [inf, m, s, t, opt](double y) { return g_mover(inf, m, y, s, t, opt); }};
}

}  // namespace weldfcs

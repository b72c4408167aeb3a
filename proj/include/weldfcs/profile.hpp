#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace weldfcs {

// Value and first three derivatives of a scalar function at a point.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

// Derivatives of F(u(y)), given F and its derivatives evaluated at u(y).
Jet compose(const Jet& outer, const Jet& inner);
Jet operator*(const Jet& a, const Jet& b);
Jet reciprocal(const Jet& a);
inline Jet identity_jet(double y) { return {y, 1.0, 0.0, 0.0}; }

// Derivative of the kink is a compactly supported C-infinity bump, so both
// shapes are exactly constant outside [a-delta, a+delta].
// smooth_step: S(u) = psi(u)/(psi(u)+psi(1-u)), psi(u) = exp(-2/u)
// soft_step:   same with exp(-1/u); wider spectrum, kept for comparison runs
enum class KinkShape { smooth_step, soft_step };

KinkShape parse_shape(const std::string& name);
std::string shape_name(KinkShape shape);

struct TemperatureProfile {
  double beta_left = 2.0;
  double beta_right = 1.0;
  double center = 0.0;
  double half_width = 1.0;
  KinkShape shape = KinkShape::smooth_step;

  void validate() const;
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
  double delta_beta() const { return beta_right - beta_left; }
  double beta0() const { return 2.0 / (1.0 / beta_left + 1.0 / beta_right); }
  Jet beta(double x) const;
  double beta_value(double x) const { return beta(x).v; }
  // Stable text key used by the solution cache.
  std::string key() const;
};

enum class Mover { plus, minus };

// beta, the reparameterizing map h and the fields zeta/xi, either on the
// real line or on a circle of length L (periodized by reflection).
class Volume {
 public:
  static Volume infinite(const TemperatureProfile& p, double v);
  static Volume box(const TemperatureProfile& p, double v, double L);

  bool finite() const { return L_ > 0.0; }
  double L() const { return L_; }
  double v() const { return v_; }
  const TemperatureProfile& profile() const { return p_; }
  double beta0() const { return beta0_; }
  double gamma() const { return v_ * beta0_; }

  Jet beta(double x) const;
  double h(double x) const;
  Jet h_jet(double x) const;
  double h_inv(double y) const;
  Jet h_inv_jet(double y) const;
  // Schwarzian of h expressed through beta: (beta'/beta)^2/2 - beta''/beta.
  double Sh(double x) const;

  double zeta(double y, double t) const;
  double xi(double y, double t) const { return zeta(y, t) - gamma(); }

  // x-intervals (within [lo, hi]) on which beta is not locally constant.
  std::vector<std::pair<double, double>> kinks_between(double lo, double hi) const;

  // Infinite volume only: y-interval carrying xi_t of the + mover.
  std::pair<double, double> xi_support(double t) const;

 private:
  Volume(const TemperatureProfile& p, double v, double L);
  double K(double x) const;      // integral of 1/beta from the left kink edge
  double J(double x) const { return K(x) - K0_; }  // integral of 1/beta from 0
  double J_inv(double j) const;  // inverse of J
  double h_box_core(double x) const;  // h_L on [-L/4, L/4]

  TemperatureProfile p_;
  double v_ = 1.0;
  double L_ = 0.0;
  double beta0_ = 1.0;
  double K0_ = 0.0;
  double J_box_lo_ = 0.0;  // J(-L/4)
  std::vector<double> edges_, cum_;  // panel edges over the kink and J at them
};

// Mover-resolved infinite-volume field: xi^-_t(y) = xi^+_{-t}(-y).
double xi_mover(const Volume& vol, Mover m, double y, double t);
std::pair<double, double> xi_support_mover(const Volume& vol, Mover m, double t);

struct FlowOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  long max_steps = 200000;
};

// f_s(y) for the flow of -zeta_t (df/ds = -zeta(f), f_0 = id), with three
// y-derivatives. Integrated in x = h^{-1}(y) where the field is -v*beta(x+vt).
Jet flow(const Volume& vol, double y, double s, double t, const FlowOptions& opt = {});

// Infinite-volume mover flows shifted by gamma*s, g^{+-}_{s,t}. The minus mover
// uses g^-_{s,t}(y) = -g^+_{-s,-t}(-y).
Jet g_mover(const Volume& vol, Mover m, double y, double s, double t, const FlowOptions& opt = {});
// Interval outside of which g_{s,t} is the identity.
std::pair<double, double> g_support(const Volume& vol, Mover m, double s, double t);

// Lifted circle diffeomorphism f(x+L) = f(x)+L, defined by a jet callback on one period.
struct CircleDiffeo {
  double L = 1.0;
  std::function<Jet(double)> map;
  static CircleDiffeo identity(double L);
  static CircleDiffeo translation(double L, double b);
  static CircleDiffeo from_flow(const Volume& box, double s, double t, const FlowOptions& opt = {});
};

// Line diffeomorphism equal to the identity outside [lo, hi].
struct LineDiffeo {
  double lo = 0.0, hi = 0.0;
  std::function<Jet(double)> map;
  Jet operator()(double y) const { return (y <= lo || y >= hi) ? identity_jet(y) : map(y); }
  static LineDiffeo identity();
  static LineDiffeo from_flow(const Volume& inf, Mover m, double s, double t, const FlowOptions& opt = {});
};

}  // namespace weldfcs

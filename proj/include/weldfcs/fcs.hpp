#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "weldfcs/characters.hpp"
#include "weldfcs/cylinder_weld.hpp"
#include "weldfcs/profile.hpp"
#include "weldfcs/torus_weld.hpp"

namespace weldfcs {

using cplx = std::complex<double>;

// Optional memo for per-node action integrals, keyed by a stable text key.
struct NodeCache {
  std::function<std::optional<cplx>(const std::string&)> get;
  std::function<void(const std::string&, cplx)> put;
};

struct FcsNumerics {
  CylinderNumerics cylinder;
  TorusNumerics torus;
  FlowOptions flow;
  int s_panels = 1;  // Gauss-Kronrod 7/15 panels along the flow parameter
  int threads = 1;
  const NodeCache* cache = nullptr;
};

// int xi (SX - (2 pi^2/gamma^2) X'^2) dy for the mover flow g_{s,t}.
cplx cylinder_action(const Volume& inf, Mover m, double s, double t, const FcsNumerics& num);

// One mover's share of ln Psi and its ingredients.
struct MoverPsi {
  cplx lnpsi = 0.0;
  cplx action = 0.0;        // int_0^s ds' int xi (SX - k X'^2)
  double counterterm = 0.0; // int (beta(x +- vt) - beta(x)) Sh dx
  double s_error = 0.0;     // |Kronrod - Gauss| on the s integral
};

struct PsiResult {
  double t = 0.0, lambda = 0.0, s = 0.0;
  cplx lnpsi = 0.0;
  MoverPsi plus, minus;
};

// Infinite volume, parameterized by the flow time s = lambda / delta_beta.
PsiResult psi_infinite_s(const Volume& inf, double c, double t, double s, const FcsNumerics& num);
// Throws DeltaBetaZero for equal temperatures.
PsiResult psi_infinite(const Volume& inf, double c, double t, double lambda, const FcsNumerics& num);

struct FinitePsiResult {
  double t = 0.0, lambda = 0.0, s = 0.0, L = 0.0;
  cplx lnpsi = 0.0;
  cplx action = 0.0;       // int ds int xi SX dx
  cplx log_char_ratio = 0.0;
  cplx tau0 = 0.0, tau_hat = 0.0;
  double C_t = 0.0, C_0 = 0.0;
  double s_error = 0.0;
};

// Finite volume. The theory must have a character.
FinitePsiResult psi_finite_s(const Volume& box, const Theory& th, double t, double s, const FcsNumerics& num);
FinitePsiResult psi_finite(const Volume& box, const Theory& th, double t, double lambda, const FcsNumerics& num);

// tau_{s,L} = (i - s) gamma_L / L
inline cplx tau_sL(const Volume& box, double s) { return cplx(-s, 1.0) * box.gamma() / box.L(); }

// Mean and variance of the energy transfer from ln Psi at lambda = h, 2h, 3h
// with extrapolation in lambda^2.
struct Cumulants {
  double mean = 0.0, variance = 0.0;
};
Cumulants pipeline_cumulants(const Volume& inf, double c, double t, double h, const FcsNumerics& num);

struct ClosedMoments {
  double mean = 0.0, variance = 0.0;
  double xi_integral_plus = 0.0, xi_integral_minus = 0.0;
  double counterterm = 0.0;  // sum over movers
};
ClosedMoments moments_closed_form(const Volume& inf, double c, double t);

// Fourier transform int e^{ipy} xi(y) dy of a mover field.
cplx xi_hat(const Volume& inf, Mover m, double t, double p);

// d/ds X'(x) at s = 0 for the mover flow:
// (i/2 pi) int p e^{-ipx} xi_hat(p) / (1 - e^{-gamma p}) dp
std::vector<cplx> linear_response_Xp(const Volume& inf, Mover m, double t, const std::vector<double>& xs);

// int e^{-ipy} / sinh^4(pi (y + i0)/gamma) dy along Im y = gamma/2 and its closed form.
double residue_integral_quadrature(double gamma, double p);
double residue_integral_closed(double gamma, double p);

// Long-time cumulant generating function.
struct Xi {
  cplx plus, minus;
  cplx total() const { return plus + minus; }
};
Xi ldf(double beta_left, double beta_right, double c, cplx lambda);
// Free-fermion (c = 1) Levitov-Lesovik integral over energies.
cplx levitov_lesovik(double beta_left, double beta_right, double lambda);

// Lambda(nu) = Xi(-i nu), real on (-beta_R, beta_L).
double scgf(double beta_left, double beta_right, double c, double nu);
double rate_function(double beta_left, double beta_right, double c, double sigma);
double mean_drift(double beta_left, double beta_right, double c);

// w(x, y) with theta(0) = 1/2.
double levy_rate(double beta_left, double beta_right, double c, double x, double y);
// int (e^{i lambda q} - 1) w(0, q) dq by quadrature on both half-lines.
cplx levy_khintchine(double beta_left, double beta_right, double c, double lambda);

struct LongtimePoint {
  double t = 0.0;
  cplx per_t_plus, per_t_minus;
  double defect_plus = 0.0, defect_minus = 0.0;
};
std::vector<LongtimePoint> longtime_approach(const Volume& inf, double c, const std::vector<double>& ts,
                                             double lambda, const FcsNumerics& num);

// Thermodynamic-limit comparison of the torus welding near the kink with the
// cylinder welding of the + mover: sup |X'_L(y + O) - X'(y)| on the support
// of g - id padded by 2 gamma, with O = h_L(a - delta) - h(a - delta).
double recentered_Xp_defect(const Volume& box, const Volume& inf, double s, double t, const FcsNumerics& num);

}  // namespace weldfcs

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "weldfcs/profile.hpp"

namespace weldfcs {

using cplx = std::complex<double>;

// Samples on a uniform grid. Periodic grids cover [x0, x0+L) with M points;
// line grids include both endpoints.
struct SampledField {
  double x0 = 0.0;
  double dx = 1.0;
  bool periodic = true;
  Eigen::VectorXcd values;
  int size() const { return static_cast<int>(values.size()); }
  double x(int j) const { return x0 + j * dx; }
};

// d^order/dx^order of a periodic sample set, exact on resolved Fourier modes.
Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& u, double L, int order);
// Largest |coefficient| over the top eighth of the spectrum relative to the largest overall.
double spectral_tail(const Eigen::VectorXcd& u);

// Eighth-order finite differences with one-sided closure near the ends.
Eigen::VectorXcd fd_derivative(const Eigen::VectorXcd& u, double dx, int order);

template <class T>
T schwarzian(const T& d1, const T& d2, const T& d3) {
  const T r = d2 / d1;
  return d3 / d1 - 1.5 * r * r;
}

// Sf of a sampled map. Periodic fields hold f(x) - x (the lift minus the
// identity) so they are genuinely periodic; line fields hold f itself.
// Throws DerivativeUnresolved when the periodic spectrum is not resolved.
SampledField schwarzian(const SampledField& f, double tail_tol = 1e-8);

// int xi (SX - (2 pi^2/gamma^2) X'^2) over the quadrature nodes.
cplx action_integrand(const Eigen::VectorXd& xi, const Eigen::VectorXcd& Xp, const Eigen::VectorXcd& SX,
                      const Eigen::VectorXd& weights, double gamma);
// Throws SupportClipped if xi is not negligible at both ends of a line window.
void check_support(const Eigen::VectorXd& xi, double tol = 1e-14);

// int (beta(x + sign*v t) - beta(x)) Sh(x) dx over one period (or the line).
double counterterm_integral(const Volume& vol, Mover m, double t);
// C_t - C_0: (c v / 24 pi) int (beta(x+vt) - beta(x)) Sh(x) dx over a box period,
// which on the line becomes the sum over both movers.
double counterterm_C(const Volume& vol, double t, double c);

// Composite Gauss-Legendre rule on [a, b]; panels of 16 nodes.
struct Quadrature {
  std::vector<double> x, w;
};
Quadrature gauss_panels(double a, double b, int panels, int order = 16);

}  // namespace weldfcs

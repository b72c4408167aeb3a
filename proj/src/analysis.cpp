#include "weldfcs/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "weldfcs/errors.hpp"
#include "weldfcs/fft.hpp"

namespace weldfcs {

Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& u, double L, int order) {
  const int M = static_cast<int>(u.size());
  Eigen::VectorXcd hat(M), out(M);
  dft(u.data(), hat.data(), M, -1);
  for (int k = 0; k < M; ++k) {
    int n = k <= M / 2 ? k : k - M;
    // The Nyquist mode has no well-defined odd derivative.
    if (M % 2 == 0 && k == M / 2 && order % 2 == 1) n = 0;
    const cplx ik(0.0, 2.0 * M_PI * n / L);
    hat[k] *= std::pow(ik, order) / static_cast<double>(M);
  }
  dft(hat.data(), out.data(), M, +1);
  return out;
}

double spectral_tail(const Eigen::VectorXcd& u) {
  const int M = static_cast<int>(u.size());
  Eigen::VectorXcd hat(M);
  dft(u.data(), hat.data(), M, -1);
  double top = 0.0, all = 0.0;
  for (int k = 0; k < M; ++k) {
    const int n = std::abs(k <= M / 2 ? k : k - M);
    const double a = std::abs(hat[k]);
    all = std::max(all, a);
    if (8 * n >= 7 * (M / 2)) top = std::max(top, a);
  }
  return all > 0.0 ? top / all : 0.0;
}

namespace {
// Fornberg's recursion for finite-difference weights at z on nodes x.
std::vector<std::vector<double>> fornberg(double z, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}
}  // namespace

Eigen::VectorXcd fd_derivative(const Eigen::VectorXcd& u, double dx, int order) {
  const int n = static_cast<int>(u.size());
  const int width = std::min(11, n);
  const int half = width / 2;
  Eigen::VectorXcd out(n);
  std::vector<double> nodes(width);
  for (int i = 0; i < n; ++i) {
    const int start = std::clamp(i - half, 0, n - width);
    for (int k = 0; k < width; ++k) nodes[k] = static_cast<double>(start + k - i);
    const auto c = fornberg(0.0, nodes, order);
    cplx acc = 0.0;
    for (int k = 0; k < width; ++k) acc += c[order][k] * u[start + k];
    out[i] = acc / std::pow(dx, order);
  }
  return out;
}

SampledField schwarzian(const SampledField& f, double tail_tol) {
  SampledField out = f;
  Eigen::VectorXcd d1, d2, d3;
  if (f.periodic) {
    if (spectral_tail(f.values) > tail_tol)
      throw Error(ErrorCode::DerivativeUnresolved, "spectral tail above tolerance");
    const double L = f.dx * f.size();
    d1 = spectral_derivative(f.values, L, 1).array() + 1.0;
    d2 = spectral_derivative(f.values, L, 2);
    d3 = spectral_derivative(f.values, L, 3);
  } else {
    d1 = fd_derivative(f.values, f.dx, 1);
    d2 = fd_derivative(f.values, f.dx, 2);
    d3 = fd_derivative(f.values, f.dx, 3);
  }
  for (int j = 0; j < f.size(); ++j) out.values[j] = schwarzian(d1[j], d2[j], d3[j]);
  return out;
}

cplx action_integrand(const Eigen::VectorXd& xi, const Eigen::VectorXcd& Xp, const Eigen::VectorXcd& SX,
                      const Eigen::VectorXd& weights, double gamma) {
  const double k = 2.0 * M_PI * M_PI / (gamma * gamma);
  cplx acc = 0.0;
  for (Eigen::Index j = 0; j < xi.size(); ++j) acc += weights[j] * xi[j] * (SX[j] - k * Xp[j] * Xp[j]);
  return acc;
}

void check_support(const Eigen::VectorXd& xi, double tol) {
  if (xi.size() == 0) return;
  const double scale = std::max(1.0, xi.cwiseAbs().maxCoeff());
  if (std::abs(xi[0]) > tol * scale || std::abs(xi[xi.size() - 1]) > tol * scale)
    throw Error(ErrorCode::SupportClipped, "xi does not vanish at the window edge");
}

Quadrature gauss_panels(double a, double b, int panels, int order) {
  Quadrature q;
  auto fill = [&](const auto& absc, const auto& wts, int n) {
    std::vector<double> t, w;
    for (std::size_t i = 0; i < absc.size(); ++i) {
      if (absc[i] == 0.0) {
        t.push_back(0.0);
        w.push_back(wts[i]);
      } else {
        t.push_back(absc[i]);
        w.push_back(wts[i]);
        t.push_back(-absc[i]);
        w.push_back(wts[i]);
      }
    }
    std::vector<std::size_t> idx(t.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return t[i] < t[j]; });
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * h;
      for (std::size_t i : idx) {
        q.x.push_back(lo + 0.5 * h * (t[i] + 1.0));
        q.w.push_back(0.5 * h * w[i]);
      }
    }
    (void)n;
  };
  using namespace boost::math::quadrature;
  switch (order) {
    case 8: fill(gauss<double, 8>::abscissa(), gauss<double, 8>::weights(), 8); break;
    case 20: fill(gauss<double, 20>::abscissa(), gauss<double, 20>::weights(), 20); break;
    case 30: fill(gauss<double, 30>::abscissa(), gauss<double, 30>::weights(), 30); break;
    default: fill(gauss<double, 16>::abscissa(), gauss<double, 16>::weights(), 16); break;
  }
  return q;
}

double counterterm_integral(const Volume& vol, Mover m, double t) {
  if (t == 0.0) return 0.0;
  const double shift = (m == Mover::plus ? 1.0 : -1.0) * vol.v() * t;
  const auto& p = vol.profile();
  // Sh vanishes away from the kinks; one period holds the kink and its mirror.
  std::vector<std::pair<double, double>> pieces;
  if (vol.finite()) {
    const double L = vol.L();
    pieces = vol.kinks_between(-0.75 * L, 0.25 * L);
  } else {
    pieces = {{p.lo(), p.hi()}};
  }
  double acc = 0.0;
  for (const auto& [a, b] : pieces) {
    const Quadrature q = gauss_panels(a, b, 48, 20);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      const double x = q.x[i];
      acc += q.w[i] * (vol.beta(x + shift).v - vol.beta(x).v) * vol.Sh(x);
    }
  }
  return acc;
}

double counterterm_C(const Volume& vol, double t, double c) {
  const double k = c * vol.v() / (24.0 * M_PI);
  // A period of the box already carries the mirrored kink.
  if (vol.finite()) return k * counterterm_integral(vol, Mover::plus, t);
  return k * (counterterm_integral(vol, Mover::plus, t) + counterterm_integral(vol, Mover::minus, t));
}

}  // namespace weldfcs

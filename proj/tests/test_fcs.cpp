#include <cmath>
#include <map>
#include <mutex>

#include "doctest.h"
#include "weldfcs/errors.hpp"
#include "weldfcs/fcs.hpp"

using namespace weldfcs;

namespace {
const TemperatureProfile kink{};  // beta 2 -> 1 over [-1, 1]

// Coarse numerics keep the unit suite quick; acceptance runs the defaults.
FcsNumerics quick() {
  FcsNumerics n;
  n.cylinder.P_max = 30.0;
  return n;
}
}  // namespace

TEST_CASE("Xi: fluctuation symmetry, poles and derivatives") {
  const double bl = 2.0, br = 1.0, db = br - bl;
  for (int k = 0; k < 20; ++k) {
    const cplx lam(-1.5 + 0.15 * k, 0.6 * std::sin(1.3 * k));
    const cplx a = ldf(bl, br, 1.0, lam).total(), b = ldf(bl, br, 1.0, -lam + cplx(0.0, db)).total();
    CHECK(std::abs(a - b) < 1e-12);
  }
  CHECK(ldf(bl, br, 1.0, 0.0).total() == cplx(0.0));
  CHECK_THROWS_AS(ldf(bl, br, 1.0, cplx(0.0, -bl)), Error);
  // Lambda'(0) is the drift of the mean
  const double h = 1e-5;
  CHECK((scgf(bl, br, 1.0, h) - scgf(bl, br, 1.0, -h)) / (2 * h) == doctest::Approx(mean_drift(bl, br, 1.0)).epsilon(1e-9));
  CHECK(mean_drift(1.0, 1.0, 1.0) == 0.0);
}

TEST_CASE("rate function") {
  for (double s = -5.0; s <= 5.0; s += 0.25)
    CHECK(std::abs(rate_function(2.0, 1.0, 1.0, -s) - rate_function(2.0, 1.0, 1.0, s) + s) < 1e-10);
  for (double s = 0.5; s <= 3.0; s += 0.5)
    CHECK(rate_function(1.0, 1.0, 0.7, s) == doctest::Approx(rate_function(1.0, 1.0, 0.7, -s)).epsilon(1e-12));
  CHECK(std::abs(rate_function(2.0, 1.0, 1.0, mean_drift(2.0, 1.0, 1.0))) < 1e-12);
  CHECK(rate_function(2.0, 1.0, 1.0, 1.0) > 0.0);
}

TEST_CASE("Levitov-Lesovik and Levy-Khintchine quadratures") {
  CHECK(std::abs(levitov_lesovik(1.0, 2.0, 0.3) - cplx(-0.0244968966, 0.0528519883)) < 1e-10);
  for (double lam : {-0.8, 0.3, 1.7}) {
    CHECK(std::abs(levitov_lesovik(1.0, 2.0, lam) - ldf(1.0, 2.0, 1.0, lam).total()) < 1e-8);
    CHECK(std::abs(levy_khintchine(2.0, 1.0, 0.7, lam) - ldf(2.0, 1.0, 0.7, lam).total()) < 1e-8);
  }
  CHECK(levy_rate(2.0, 1.0, 1.0, 0.3, 0.3) == doctest::Approx(M_PI / 12.0));
  CHECK(levy_rate(2.0, 1.0, 0.0, 0.0, 1.0) == 0.0);
  CHECK(levy_rate(2.0, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(M_PI / 12.0 * std::exp(-2.0)));
}

TEST_CASE("residue integral") {
  for (auto [g, p] : {std::pair{1.0, 0.5}, {1.0, -2.0}, {0.5, 3.0}, {2.0, 0.0}, {1.5, -0.7}})
    CHECK(std::abs(residue_integral_quadrature(g, p) / residue_integral_closed(g, p) - 1.0) < 1e-10);
  CHECK(residue_integral_closed(1.0, 0.0) == doctest::Approx(4.0 / (3.0 * M_PI)));
}

TEST_CASE("closed-form moments") {
  const Volume inf = Volume::infinite(kink, 1.0);
  const auto m0 = moments_closed_form(inf, 1.0, 0.0);
  CHECK(m0.mean == 0.0);
  CHECK(m0.variance == 0.0);
  // for vt >= 2 delta the mean grows at the stationary drift and the variance at -Xi''(0)
  const auto a = moments_closed_form(inf, 1.0, 4.0), b = moments_closed_form(inf, 1.0, 8.0);
  CHECK((b.mean - a.mean) / 4.0 == doctest::Approx(mean_drift(2.0, 1.0, 1.0)).epsilon(1e-8));
  CHECK((b.variance - a.variance) / 4.0 == doctest::Approx(M_PI / 12.0 * (2.0 / 8.0 + 2.0)).epsilon(1e-6));
  const auto c = moments_closed_form(inf, 0.7, 4.0);
  CHECK(c.mean == doctest::Approx(0.7 * a.mean).epsilon(1e-14));
  CHECK_THROWS_AS(moments_closed_form(Volume::infinite({1.0, 1.0}, 1.0), 1.0, 1.0), Error);
}

TEST_CASE("linear response of the cylinder welding") {
  const Volume inf = Volume::infinite(kink, 1.0);
  const double t = 2.0, h = 1e-4;
  std::vector<double> xs;
  for (double x = -6.0; x <= 4.0; x += 0.5) xs.push_back(x);
  const auto lr = linear_response_Xp(inf, Mover::plus, t, xs);
  const auto cn = cylinder_defaults(inf);
  const auto a = solve_cylinder(LineDiffeo::from_flow(inf, Mover::plus, h, t), inf.gamma(), cn);
  const auto b = solve_cylinder(LineDiffeo::from_flow(inf, Mover::plus, -h, t), inf.gamma(), cn);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) d = std::max(d, std::abs((a.eval_Xp(xs[i]) - b.eval_Xp(xs[i])) / (2 * h) - lr[i]));
  CHECK(d < 1e-6);
}

TEST_CASE("infinite-volume Psi: symmetries and scaling") {
  const Volume inf = Volume::infinite(kink, 1.0);
  auto num = quick();
  num.cylinder.P_max = 60.0;  // the conjugation check needs about 1e-11 per node
  CHECK(psi_infinite(inf, 1.0, 2.0, 0.0, num).lnpsi == cplx(0.0));
  CHECK(psi_infinite(inf, 1.0, 0.0, 0.4, num).lnpsi == cplx(0.0));
  const auto p = psi_infinite(inf, 1.0, 2.0, 0.3, num);
  const auto m = psi_infinite(inf, 1.0, 2.0, -0.3, num);
  CHECK(std::abs(m.lnpsi - std::conj(p.lnpsi)) < 1e-9);
  CHECK(p.lnpsi.real() < 0.0);
  const auto q = psi_infinite(inf, 0.7, 2.0, 0.3, num);
  CHECK(std::abs(q.lnpsi - 0.7 * p.lnpsi) < 1e-14);
  CHECK(p.plus.s_error < 1e-8);
  CHECK_THROWS_AS(psi_infinite(Volume::infinite({1.5, 1.5}, 1.0), 1.0, 1.0, 0.2, num), Error);
  // equal temperatures: xi vanishes and the flow-time entry point gives Psi = 1
  CHECK(std::abs(psi_infinite_s(Volume::infinite({1.5, 1.5}, 1.0), 1.0, 1.0, 0.2, num).lnpsi) < 1e-15);
}

TEST_CASE("node cache returns what a cold run computes") {
  const Volume inf = Volume::infinite(kink, 1.0);
  std::map<std::string, cplx> store;
  std::mutex mu;
  int hits = 0;
  NodeCache cache{[&](const std::string& k) -> std::optional<cplx> {
                    std::lock_guard lk(mu);
                    auto it = store.find(k);
                    if (it == store.end()) return std::nullopt;
                    ++hits;
                    return it->second;
                  },
                  [&](const std::string& k, cplx v) {
                    std::lock_guard lk(mu);
                    store[k] = v;
                  }};
  auto num = quick();
  const cplx cold = psi_infinite(inf, 1.0, 1.0, 0.2, num).lnpsi;
  num.cache = &cache;
  const cplx first = psi_infinite(inf, 1.0, 1.0, 0.2, num).lnpsi;
  const cplx warm = psi_infinite(inf, 1.0, 1.0, 0.2, num).lnpsi;
  CHECK(hits == 30);
  CHECK(cold == first);
  CHECK(cold == warm);
  num.threads = 2;
  num.cache = nullptr;
  CHECK(psi_infinite(inf, 1.0, 1.0, 0.2, num).lnpsi == cold);
}

TEST_CASE("finite volume Psi") {
  const Volume box = Volume::box(kink, 1.0, 20.0);
  auto num = quick();
  num.torus.N = 96;
  num.torus.tail_tol = 1e-4;
  const Theory th;
  CHECK(psi_finite(box, th, 1.0, 0.0, num).lnpsi == cplx(0.0));
  const auto r = psi_finite_s(box, th, 1.0, -0.2, num);
  CHECK(r.tau0 == tau_sL(box, 0.0));
  // the torus modulus moves at O(L^-2)
  CHECK(std::abs(r.tau_hat - r.tau0) < 2e-3);
  const auto inf = psi_infinite_s(Volume::infinite(kink, 1.0), 1.0, 1.0, -0.2, num);
  CHECK(std::abs(r.lnpsi - inf.lnpsi) < 1e-6);
  CHECK_THROWS_AS(psi_finite(box, {Model::central_charge_only, 0.7, 1.0}, 1.0, 0.2, num), ConfigError);
  CHECK_THROWS_AS(psi_finite(Volume::infinite(kink, 1.0), th, 1.0, 0.2, num), ConfigError);
}

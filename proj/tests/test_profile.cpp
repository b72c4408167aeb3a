#include <cmath>

#include "doctest.h"
#include "weldfcs/errors.hpp"
#include "weldfcs/profile.hpp"

using namespace weldfcs;

namespace {
TemperatureProfile kink() {
  TemperatureProfile p;
  p.beta_left = 2.0;
  p.beta_right = 1.0;
  p.center = 0.3;
  p.half_width = 1.0;
  return p;
}
}  // namespace

TEST_CASE("beta is constant outside the kink and interpolates inside") {
  const auto p = kink();
  CHECK(p.beta_value(p.lo() - 1e-9) == 2.0);
  CHECK(p.beta_value(p.hi() + 1e-9) == 1.0);
  CHECK(p.beta_value(p.center) == doctest::Approx(1.5).epsilon(1e-14));
  for (double x = p.lo(); x <= p.hi(); x += 0.01) {
    CHECK(p.beta_value(x) <= 2.0);
    CHECK(p.beta_value(x) >= 1.0);
  }
}

TEST_CASE("beta derivatives agree with finite differences") {
  const auto p = kink();
  for (double x : {-0.4, 0.1, 0.3, 0.77, 1.1}) {
    const double e = 1e-4;
    const Jet b = p.beta(x);
    const Jet bp = p.beta(x + e), bm = p.beta(x - e);
    CHECK(b.d1 == doctest::Approx((bp.v - bm.v) / (2 * e)).epsilon(1e-6));
    CHECK(b.d2 == doctest::Approx((bp.d1 - bm.d1) / (2 * e)).epsilon(1e-6));
    CHECK(b.d3 == doctest::Approx((bp.d2 - bm.d2) / (2 * e)).epsilon(1e-5));
  }
}

TEST_CASE("unknown shapes and bad parameters name the config key") {
  try {
    parse_shape("tanh");
    FAIL("expected a throw");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "shape");
  }
  auto p = kink();
  p.half_width = -1.0;
  try {
    p.validate();
    FAIL("expected a throw");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "half_width");
  }
}

TEST_CASE("h fixes the origin and has slope beta0/beta") {
  const auto vol = Volume::infinite(kink(), 1.0);
  CHECK(vol.h(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(vol.beta0() == doctest::Approx(4.0 / 3.0));
  for (double x : {-5.0, -0.5, 0.3, 1.0, 4.0}) {
    const Jet hj = vol.h_jet(x);
    CHECK(hj.d1 == doctest::Approx(vol.beta0() / vol.beta(x).v).epsilon(1e-13));
    CHECK(vol.h_inv(vol.h(x)) == doctest::Approx(x).epsilon(1e-13));
    const double e = 1e-5;
    CHECK(hj.d1 == doctest::Approx((vol.h(x + e) - vol.h(x - e)) / (2 * e)).epsilon(1e-8));
  }
  // Far from the kink h is affine with slope beta0/beta_{L,R}.
  CHECK(vol.h(-10.0) - vol.h(-11.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(vol.h(11.0) - vol.h(10.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("the box map is a lifted circle map fixing the quarter points") {
  const double L = 10.0;
  const auto box = Volume::box(kink(), 1.0, L);
  CHECK(box.h(-0.25 * L) == doctest::Approx(-0.25 * L).epsilon(1e-14));
  CHECK(box.h(0.25 * L) == doctest::Approx(0.25 * L).epsilon(1e-14));
  for (double x : {-7.3, -2.6, -0.1, 0.4, 2.4, 3.3}) {
    CHECK(box.h(x + L) == doctest::Approx(box.h(x) + L).epsilon(1e-13));
    CHECK(box.h_inv(box.h(x)) == doctest::Approx(x).epsilon(1e-12));
    CHECK(box.h_jet(x).d1 == doctest::Approx(box.beta0() / box.beta(x).v).epsilon(1e-13));
    CHECK(box.beta(x + L).v == doctest::Approx(box.beta(x).v));
    // reflection symmetry about -L/4
    CHECK(box.beta(-0.5 * L - x).v == doctest::Approx(box.beta(x).v));
  }
  // the average of beta0/beta over one period is 1
  double acc = 0.0;
  const int n = 20000;
  for (int j = 0; j < n; ++j) acc += box.h_jet(-0.75 * L + L * (j + 0.5) / n).d1;
  CHECK(acc / n == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("a box that cannot hold the kink is rejected") {
  CHECK_THROWS_AS(Volume::box(kink(), 1.0, 4.0), Error);
  try {
    Volume::box(kink(), 1.0, 4.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoxTooSmall);
  }
}

TEST_CASE("flow is a one-parameter group with consistent derivatives") {
  const auto vol = Volume::infinite(kink(), 1.0);
  const double t = 0.7;
  for (double y : {-2.0, -0.4, 0.0, 0.9, 2.5}) {
    const Jet a = flow(vol, y, 0.6, t);
    const Jet b = flow(vol, flow(vol, y, 0.25, t).v, 0.35, t);
    CHECK(a.v == doctest::Approx(b.v).epsilon(1e-11));
    const Jet back = flow(vol, a.v, -0.6, t);
    CHECK(back.v == doctest::Approx(y).epsilon(1e-11));
    const double e = 1e-5;
    const Jet ap = flow(vol, y + e, 0.6, t), am = flow(vol, y - e, 0.6, t);
    CHECK(a.d1 == doctest::Approx((ap.v - am.v) / (2 * e)).epsilon(1e-7));
    CHECK(a.d2 == doctest::Approx((ap.d1 - am.d1) / (2 * e)).epsilon(1e-6));
    CHECK(a.d3 == doctest::Approx((ap.d2 - am.d2) / (2 * e)).epsilon(1e-5));
  }
}

TEST_CASE("flow velocity is minus zeta") {
  const auto vol = Volume::infinite(kink(), 1.3);
  const double t = -0.4, e = 1e-5;
  for (double y : {-1.5, 0.2, 1.1}) {
    const double v = (flow(vol, y, e, t).v - flow(vol, y, -e, t).v) / (2 * e);
    CHECK(v == doctest::Approx(-vol.zeta(y, t)).epsilon(1e-8));
  }
}

TEST_CASE("g is the identity outside its support interval") {
  const auto vol = Volume::infinite(kink(), 1.0);
  for (auto m : {Mover::plus, Mover::minus}) {
    for (double s : {-0.4, 0.3}) {
      const auto [lo, hi] = g_support(vol, m, s, 0.8);
      CHECK(g_mover(vol, m, lo - 0.01, s, 0.8).v == doctest::Approx(lo - 0.01).epsilon(1e-12));
      CHECK(g_mover(vol, m, hi + 0.01, s, 0.8).v == doctest::Approx(hi + 0.01).epsilon(1e-12));
      CHECK(std::abs(g_mover(vol, m, 0.5 * (lo + hi), s, 0.8).v - 0.5 * (lo + hi)) > 1e-6);
    }
  }
}

TEST_CASE("xi vanishes at t = 0 and outside its support") {
  const auto vol = Volume::infinite(kink(), 1.0);
  for (double y = -3.0; y < 3.0; y += 0.1) CHECK(std::abs(vol.xi(y, 0.0)) < 1e-14);
  const auto [lo, hi] = vol.xi_support(1.5);
  CHECK(vol.xi(lo - 1e-3, 1.5) == doctest::Approx(0.0));
  CHECK(vol.xi(hi + 1e-3, 1.5) == doctest::Approx(0.0));
}

TEST_CASE("box map approaches a shifted line map as L grows") {
  const auto inf = Volume::infinite(kink(), 1.0);
  auto defect = [&](double L) {
    const auto box = Volume::box(kink(), 1.0, L);
    const double shift = box.h(0.0) - inf.h(0.0);
    double worst = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.05) worst = std::max(worst, std::abs(box.h(x) - shift - inf.h(x)));
    return worst;
  };
  const double d1 = defect(60.0), d2 = defect(120.0);
  CHECK(d1 < 0.1);
  CHECK(d2 / d1 == doctest::Approx(0.5).epsilon(0.1));
}

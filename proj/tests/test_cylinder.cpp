#include <cmath>

#include "doctest.h"
#include "weldfcs/cylinder_weld.hpp"
#include "weldfcs/errors.hpp"

using namespace weldfcs;

namespace {
// g(x) = x + eps*(S((x+R)/R) - S(x/R)) with the k=2 smooth step, support [-R, R].
LineDiffeo bump_map(double eps, double R = 2.0) {
  TemperatureProfile a, b;
  a.beta_left = b.beta_left = 1.0;
  a.beta_right = b.beta_right = 2.0;
  a.center = -0.5 * R;
  b.center = 0.5 * R;
  a.half_width = b.half_width = 0.5 * R;
  return {-R, R, [=](double x) {
            const Jet ja = a.beta(x), jb = b.beta(x);
            return Jet{x + eps * (ja.v - jb.v), 1.0 + eps * (ja.d1 - jb.d1), eps * (ja.d2 - jb.d2),
                       eps * (ja.d3 - jb.d3)};
          }};
}
}  // namespace

TEST_CASE("identity on the line welds trivially") {
  CylinderNumerics num;
  num.P_max = 20.0;
  const auto sol = solve_cylinder(LineDiffeo::identity(), 1.0, num);
  CHECK(sol.Z.cwiseAbs().maxCoeff() == 0.0);
  CHECK((sol.Xp.array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK(sol.SX.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bump welding agrees with the dense prototype") {
  CylinderNumerics num;
  num.P_max = 60.0;
  num.panel = 1.0;
  const auto sol = solve_cylinder(bump_map(0.3), 1.0, num);
  // dense numpy Nystrom solve with a 3000-point kernel grid
  const double xs[] = {-3.0, -1.0, 0.0, 0.5, 1.5, 3.0};
  const cplx ref[] = {{1.000000125008379, 1.912885015008074e-06}, {1.251503830580836, -1.874676719898740e-01},
                      {0.91993511142167, -2.772538504334047e-01}, {0.910189812385386, -3.169165651072110e-01},
                      {0.990969913626227, 4.403064315057543e-02}, {1.000000379308163, 2.705139480149634e-06}};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(sol.eval_Xp(xs[i]) - ref[i]) < 1e-9);
  CHECK(sol.diag.tail < 1e-8);
  // exponential approach to 1 at the rate 2 pi / gamma
  CHECK(sol.diag.decay_right == doctest::Approx(2.0 * M_PI).epsilon(0.1));
  CHECK(sol.diag.decay_left == doctest::Approx(2.0 * M_PI).epsilon(0.1));
}

TEST_CASE("dense and iterative solves agree") {
  CylinderNumerics a;
  a.P_max = 30.0;
  a.solver = "dense";
  CylinderNumerics b = a;
  b.solver = "gmres";
  const auto g = bump_map(0.2);
  const auto sa = solve_cylinder(g, 1.3, a);
  const auto sb = solve_cylinder(g, 1.3, b);
  CHECK(sa.diag.solve.rcond > 1e-6);
  CHECK((sa.Z - sb.Z).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("real-space boundary relations hold") {
  CylinderNumerics num;
  double prev = 1.0;
  for (double P : {40.0, 60.0, 90.0}) {
    num.P_max = P;
    const auto sol = solve_cylinder(bump_map(0.3), 1.0, num);
    const auto d = realspace_crosscheck(sol);
    CHECK(d.lower < prev);
    CHECK(d.upper < d.lower);
    prev = d.lower;
  }
  CHECK(prev < 1e-7);
}

TEST_CASE("reflected problem gives the conjugate reflected solution") {
  const auto g = bump_map(0.3);
  LineDiffeo gr{-g.hi, -g.lo, [g](double y) {
                  const Jet j = g(-y);
                  return Jet{-j.v, j.d1, -j.d2, j.d3};
                }};
  // make it asymmetric first
  LineDiffeo ga{g.lo, g.hi, [g](double y) {
                  Jet j = g(y);
                  const double r = 0.1 * (j.v - y);
                  return Jet{j.v + r * (j.v - y) * 0.0 + 0.1 * (j.v - y) * (j.v - y), j.d1 + 0.2 * (j.v - y) * (j.d1 - 1.0),
                             j.d2 + 0.2 * ((j.d1 - 1.0) * (j.d1 - 1.0) + (j.v - y) * j.d2),
                             j.d3 + 0.2 * (3.0 * (j.d1 - 1.0) * j.d2 + (j.v - y) * j.d3)};
                }};
  LineDiffeo gar{-ga.hi, -ga.lo, [ga](double y) {
                   const Jet j = ga(-y);
                   return Jet{-j.v, j.d1, -j.d2, j.d3};
                 }};
  (void)gr;
  CylinderNumerics num;
  num.P_max = 50.0;
  const auto s1 = solve_cylinder(ga, 1.0, num);
  const auto s2 = solve_cylinder(gar, 1.0, num);
  for (double x : {-2.5, -1.0, -0.2, 0.7, 1.9}) CHECK(std::abs(s2.eval_Xp(-x) - std::conj(s1.eval_Xp(x))) < 1e-10);
}

TEST_CASE("a narrow window is refused") {
  CylinderNumerics num;
  num.pad = 2.0;
  try {
    assemble_sigma(bump_map(0.1), 1.0, num);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooSmall);
  }
}

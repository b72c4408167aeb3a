#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>

#include "weldfcs/cli.hpp"
#include "weldfcs/errors.hpp"

namespace weldfcs::cli {

namespace {

struct Check {
  std::string name;
  double tol;
  std::function<double()> defect;  // pass iff defect <= tol
};

// Defect 0 when fn throws the expected code, 1 otherwise.
double expect_error(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code ? 0.0 : 1.0;
  }
  return 1.0;
}

// Defect 0 when parsing throws a ConfigError whose key mentions `key`.
double expect_config_key(const json& j, const std::string& key) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.key().find(key) != std::string::npos ? 0.0 : 1.0;
  }
  return 1.0;
}

double log_distance(cplx a, cplx b) {
  cplx d = a - b;
  d.imag(std::remainder(d.imag(), 2.0 * M_PI));
  return std::abs(d);
}

CircleDiffeo sine_map(double L, double eps) {
  const double k = 2.0 * M_PI / L;
  return {L, [=](double x) {
            return Jet{x + eps * std::sin(k * x), 1.0 + eps * k * std::cos(k * x), -eps * k * k * std::sin(k * x),
                       -eps * k * k * k * std::cos(k * x)};
          }};
}

std::vector<Check> build_checks() {
  const TemperatureProfile kink{};
  const Volume inf = Volume::infinite(kink, 1.0);
  const Volume box = Volume::box(kink, 1.0, 10.0);
  const double gamma = inf.gamma();
  const Theory boson{Model::free_boson_radius, 1.0, 1.0};
  const Theory fermion{Model::free_fermion_c1, 1.0, 1.0};
  std::vector<Check> c;

  // profile and flows
  c.push_back({"profile/beta0", 1e-15, [=] { return std::abs(inf.beta0() - 4.0 / 3.0); }});
  c.push_back({"profile/h_prime_beta", 1e-12, [=] {
                 double d = 0;
                 for (double x = -2.0; x <= 2.0; x += 0.1) d = std::max(d, std::abs(inf.h_jet(x).d1 * inf.beta(x).v - inf.beta0()));
                 return d;
               }});
  c.push_back({"profile/h_inverse", 1e-12, [=] {
                 double d = 0;
                 for (double y = -3.0; y <= 3.0; y += 0.25) d = std::max(d, std::abs(inf.h(inf.h_inv(y)) - y));
                 return d;
               }});
  c.push_back({"profile/box_quarter_points", 1e-12,
               [=] { return std::abs(box.h(2.5) - 2.5) + std::abs(box.h(-2.5) + 2.5); }});
  c.push_back({"flow/identity_at_s0", 0.0, [=] { return std::abs(flow(inf, 0.7, 0.0, 1.0).v - 0.7); }});
  c.push_back({"flow/constant_field", 1e-12, [=] {
                 const Volume flat = Volume::infinite({1.5, 1.5}, 1.0);
                 return std::abs(flow(flat, 0.3, 0.4, 1.0).v - (0.3 - flat.gamma() * 0.4));
               }});
  c.push_back({"flow/group_law", 1e-9, [=] {
                 double d = 0;
                 for (double y = -2.0; y <= 2.0; y += 0.5)
                   d = std::max(d, std::abs(flow(inf, flow(inf, y, 0.15, 1.0).v, 0.15, 1.0).v - flow(inf, y, 0.3, 1.0).v));
                 return d;
               }});
  c.push_back({"flow/box_reflection", 1e-9, [=] {
                 double d = 0;
                 for (double y = -2.0; y <= 2.0; y += 0.5)
                   d = std::max(d, std::abs(flow(box, -y - 5.0, 0.2, 1.0).v + flow(box, y, -0.2, -1.0).v + 5.0));
                 return d;
               }});
  c.push_back({"xi/zero_at_t0", 0.0, [=] {
                 double d = 0;
                 for (double y = -2.0; y <= 2.0; y += 0.5) d = std::max(d, std::abs(xi_mover(inf, Mover::plus, y, 0.0)));
                 return d;
               }});
  c.push_back({"xi/plateau_value", 1e-12, [=] {
                 // vt = 4 delta: plateau on [A - (beta0/beta_L) 2 delta, A]
                 const double A = inf.h(-1.0);
                 return std::abs(xi_mover(inf, Mover::plus, A - 0.5, 4.0) - gamma * kink.delta_beta() / kink.beta_left);
               }});

  // torus welding
  c.push_back({"torus/identity", 1e-14, [] {
                 TorusNumerics n;
                 n.N = 16;
                 return std::abs(solve_Y1(CircleDiffeo::identity(10.0), cplx(0, 0.1), n).tau_hat - cplx(0, 0.1));
               }});
  c.push_back({"torus/translation", 1e-12, [] {
                 TorusNumerics n;
                 n.N = 16;
                 return std::abs(solve_Y1(CircleDiffeo::translation(10.0, 0.5), cplx(0, 0.1), n).tau_hat -
                                 cplx(0.05, 0.1));
               }});
  auto sine = std::make_shared<TorusWeldSolution>();
  auto solve_sine = [sine] {
    if (sine->N == 0) {
      TorusNumerics n;
      n.N = 32;
      n.tail_tol = 1.0;
      const auto f = sine_map(10.0, 0.2 / (2.0 * M_PI));
      *sine = solve_Y1(f, cplx(0, 0.15), n);
      residual_diagnostics(f, *sine, n);
    }
    return *sine;
  };
  c.push_back({"torus/sine_modulus", 1e-13,
               [=] { return std::abs(solve_sine().tau_hat - cplx(0.0, 0.15003623477368647)); }});
  c.push_back({"torus/identity_quadratic", 1e-12, [=] { return identity_defects(solve_sine()).quadratic; }});
  c.push_back({"torus/identity_schwarzian", 1e-11, [=] { return identity_defects(solve_sine()).schwarzian; }});
  c.push_back({"torus/residual_cy1", 1e-11, [=] { return solve_sine().diag.cy1; }});
  c.push_back({"torus/residual_cy2", 1e-11, [=] { return solve_sine().diag.cy2; }});
  c.push_back({"torus/b_period", 1e-12, [=] { return solve_sine().diag.b_defect; }});
  c.push_back({"torus/gmres_vs_dense", 1e-9, [] {
                 TorusNumerics a;
                 a.N = 24;
                 a.tail_tol = 1.0;
                 a.solver = "dense";
                 TorusNumerics b = a;
                 b.solver = "gmres";
                 const auto f = sine_map(10.0, 0.2);
                 return std::abs(solve_Y1(f, cplx(0, 0.2), a).tau_hat - solve_Y1(f, cplx(0, 0.2), b).tau_hat);
               }});
  c.push_back({"torus/kink_flow_identities", 1e-7, [=] {
                 TorusNumerics n;
                 n.N = 128;
                 n.tail_tol = 1e-6;
                 const auto sol = solve_Y1(CircleDiffeo::from_flow(box, 0.25, 1.0), tau_sL(box, 0.25), n);
                 const auto d = identity_defects(sol);
                 return std::max(d.quadratic, d.schwarzian);
               }});
  c.push_back({"torus/error_q_on_circle", 0.0, [] {
                 return expect_error(ErrorCode::QOnUnitCircle,
                                     [] { solve_Y1(CircleDiffeo::identity(10.0), cplx(0.3, 0.0), TorusNumerics{}); });
               }});

  // cylinder welding
  c.push_back({"cylinder/identity", 0.0, [] {
                 CylinderNumerics n;
                 n.P_max = 20.0;
                 return (solve_cylinder(LineDiffeo::identity(), 1.0, n).Xp.array() - 1.0).abs().maxCoeff();
               }});
  auto kinksol = std::make_shared<CylinderWeldSolution>();
  auto solve_kink = [=] {
    if (kinksol->p.size() == 0)
      *kinksol = solve_cylinder(LineDiffeo::from_flow(inf, Mover::plus, 0.3, 4.0), gamma, cylinder_defaults(inf));
    return *kinksol;
  };
  c.push_back({"cylinder/kink_reference", 1e-9, [=] {
                 // converged value at P_max = 150
                 return std::abs(solve_kink().eval_Xp(0.0) - cplx(0.864263245538, -0.178074490929));
               }});
  c.push_back({"cylinder/tail", 1e-8, [=] { return solve_kink().diag.tail; }});
  c.push_back({"cylinder/decay_rate", 0.1, [=] {
                 const auto& d = solve_kink().diag;
                 const double k = 2.0 * M_PI / gamma;
                 return std::max(std::abs(d.decay_left / k - 1.0), std::abs(d.decay_right / k - 1.0));
               }});
  c.push_back({"cylinder/realspace_relations", 1e-8, [=] {
                 const auto d = realspace_crosscheck(solve_kink());
                 return std::max(d.lower, d.upper);
               }});
  c.push_back({"cylinder/error_window", 0.0, [=] {
                 CylinderNumerics n;
                 n.pad = 2.0 * gamma;
                 return expect_error(ErrorCode::WindowTooSmall,
                                     [&] { solve_cylinder(LineDiffeo::from_flow(inf, Mover::plus, 0.3, 1.0), gamma, n); });
               }});
  c.push_back({"cylinder/linear_response", 1e-6, [=] {
                 const std::vector<double> xs{-4.0, -2.0, -1.0, 0.0, 1.0, 2.0};
                 const auto lr = linear_response_Xp(inf, Mover::plus, 2.0, xs);
                 const auto cn = cylinder_defaults(inf);
                 const double h = 1e-4;
                 const auto a = solve_cylinder(LineDiffeo::from_flow(inf, Mover::plus, h, 2.0), gamma, cn);
                 const auto b = solve_cylinder(LineDiffeo::from_flow(inf, Mover::plus, -h, 2.0), gamma, cn);
                 double d = 0;
                 for (std::size_t i = 0; i < xs.size(); ++i)
                   d = std::max(d, std::abs((a.eval_Xp(xs[i]) - b.eval_Xp(xs[i])) / (2 * h) - lr[i]));
                 return d;
               }});

  // analysis
  c.push_back({"analysis/schwarzian_mobius", 1e-13, [] {
                 // (2x + 1)/(x + 3): Sf = 0
                 double d = 0;
                 for (double x = 0.0; x < 2.0; x += 0.25) {
                   const double u = x + 3.0;
                   d = std::max(d, std::abs(schwarzian(5.0 / (u * u), -10.0 / (u * u * u), 30.0 / (u * u * u * u))));
                 }
                 return d;
               }});
  c.push_back({"analysis/spectral_derivative", 1e-12, [] {
                 const int M = 64;
                 const double L = 7.0;
                 Eigen::VectorXcd u(M);
                 for (int j = 0; j < M; ++j) u[j] = std::sin(2.0 * M_PI * 3.0 * j / M);
                 const Eigen::VectorXcd du = spectral_derivative(u, L, 1);
                 double d = 0;
                 for (int j = 0; j < M; ++j)
                   d = std::max(d, std::abs(du[j] - 2.0 * M_PI * 3.0 / L * std::cos(2.0 * M_PI * 3.0 * j / M)));
                 return d;
               }});
  c.push_back({"analysis/counterterm_t0", 0.0, [=] { return std::abs(counterterm_C(inf, 0.0, 1.0)); }});

  // characters
  c.push_back({"characters/reference_value", 1e-12, [=] {
                 return log_distance(log_character(boson, {0.0, 0.05}), {4.8894141657030612074, 0.0});
               }});
  c.push_back({"characters/boson_sqrt2_is_fermion", 1e-12, [=] {
                 std::mt19937 gen(12);
                 std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.05, 1.5);
                 const Theory b2{Model::free_boson_radius, 1.0, std::sqrt(2.0)};
                 double d = 0;
                 for (int i = 0; i < 12; ++i) {
                   const cplx tau(re(gen), im(gen));
                   d = std::max(d, std::abs(character(b2, tau) / character(fermion, tau) - 1.0));
                 }
                 return d;
               }});
  c.push_back({"characters/modular_vs_direct", 1e-13, [=] {
                 return log_distance(log_character(boson, {0.1, 0.9}), log_character_direct(boson, {0.1, 0.9}));
               }});
  c.push_back({"characters/small_tau_asymptotics", 1e-3, [=] {
                 double lo = 1e300, hi = -1e300;
                 for (double e : {0.1, 0.05, 0.02}) {
                   const double r = log_character(boson, {0.0, e}).real() - 2.0 * M_PI / (24.0 * e);
                   lo = std::min(lo, r), hi = std::max(hi, r);
                 }
                 return hi - lo;
               }});
  c.push_back({"characters/cardy_ratio", 2e-6, [=] {
                 const cplx t0(0.0, 0.05), t1 = t0 + 1e-4 * cplx(1.0, 1.0);
                 const auto r = small_tau_ratio(boson, t1, t0);
                 return std::abs(std::exp(r.log_exact - cplx(0.0, M_PI / 12.0) * (1.0 / t1 - 1.0 / t0)) - 1.0);
               }});

  // closed forms and large deviations
  c.push_back({"fcs/residue_integral", 1e-10, [] {
                 double d = 0;
                 for (auto [g, p] : {std::pair{1.0, 0.5}, {1.0, -2.0}, {0.5, 3.0}, {2.0, 0.0}, {1.5, -0.7}})
                   d = std::max(d, std::abs(residue_integral_quadrature(g, p) / residue_integral_closed(g, p) - 1.0));
                 return d;
               }});
  c.push_back({"ldf/fluctuation_symmetry", 1e-12, [] {
                 double d = 0;
                 for (int k = 0; k < 20; ++k) {
                   const cplx l(-1.5 + 0.15 * k, 0.5 * std::cos(0.7 * k));
                   d = std::max(d, std::abs(ldf(2, 1, 1, l).total() - ldf(2, 1, 1, -l + cplx(0, -1.0)).total()));
                 }
                 return d;
               }});
  c.push_back({"ldf/gallavotti_cohen", 1e-10, [] {
                 double d = 0;
                 for (double s = -5.0; s <= 5.0; s += 0.5)
                   d = std::max(d, std::abs(rate_function(2, 1, 1, -s) - rate_function(2, 1, 1, s) + s));
                 return d;
               }});
  c.push_back({"ldf/rate_zero_at_drift", 1e-12, [] { return std::abs(rate_function(2, 1, 1, mean_drift(2, 1, 1))); }});
  c.push_back({"ldf/levitov_lesovik", 1e-8,
               [] { return std::abs(levitov_lesovik(1, 2, 0.3) - ldf(1, 2, 1, 0.3).total()); }});
  c.push_back({"ldf/levy_khintchine", 1e-8,
               [] { return std::abs(levy_khintchine(2, 1, 1, 0.4) - ldf(2, 1, 1, 0.4).total()); }});
  c.push_back({"ldf/jump_rate_diagonal", 1e-15, [] { return std::abs(levy_rate(2, 1, 1, 0.5, 0.5) - M_PI / 12.0); }});
  c.push_back({"moments/mean_slope_is_drift", 1e-8, [=] {
                 const auto a = moments_closed_form(inf, 1.0, 4.0), b = moments_closed_form(inf, 1.0, 8.0);
                 return std::abs((b.mean - a.mean) / 4.0 / mean_drift(2, 1, 1) - 1.0);
               }});
  c.push_back({"moments/variance_slope", 1e-6, [=] {
                 const auto a = moments_closed_form(inf, 1.0, 4.0), b = moments_closed_form(inf, 1.0, 8.0);
                 return std::abs((b.variance - a.variance) / 4.0 / (M_PI / 12.0 * (2.0 / 8.0 + 2.0)) - 1.0);
               }});

  // generating function
  FcsNumerics quick;
  quick.cylinder.P_max = 30.0;
  c.push_back({"psi/zero_at_lambda0", 0.0, [=] { return std::abs(psi_infinite(inf, 1.0, 1.0, 0.0, quick).lnpsi); }});
  auto pair = std::make_shared<std::pair<PsiResult, PsiResult>>();
  auto psi_pm = [=] {
    if (pair->first.t == 0.0) {
      FcsNumerics n = quick;
      n.cylinder.P_max = 60.0;
      *pair = {psi_infinite(inf, 1.0, 1.0, 0.3, n), psi_infinite(inf, 1.0, 1.0, -0.3, n)};
    }
    return *pair;
  };
  c.push_back({"psi/conjugation", 1e-9, [=] {
                 const auto [p, m] = psi_pm();
                 return std::abs(m.lnpsi - std::conj(p.lnpsi));
               }});
  c.push_back({"psi/central_charge_power", 1e-14, [=] {
                 FcsNumerics n = quick;
                 n.cylinder.P_max = 60.0;
                 return std::abs(psi_infinite(inf, 0.7, 1.0, 0.3, n).lnpsi - 0.7 * psi_pm().first.lnpsi);
               }});
  c.push_back({"psi/error_delta_beta_zero", 0.0, [=] {
                 return expect_error(ErrorCode::DeltaBetaZero,
                                     [&] { psi_infinite(Volume::infinite({1.5, 1.5}, 1.0), 1.0, 1.0, 0.2, quick); });
               }});
  c.push_back({"psi/cache_matches_cold", 0.0, [=] {
                 std::map<std::string, cplx> store;
                 std::mutex mu;
                 NodeCache cache{[&](const std::string& k) -> std::optional<cplx> {
                                   std::lock_guard lk(mu);
                                   auto it = store.find(k);
                                   return it == store.end() ? std::nullopt : std::optional<cplx>(it->second);
                                 },
                                 [&](const std::string& k, cplx v) {
                                   std::lock_guard lk(mu);
                                   store[k] = v;
                                 }};
                 FcsNumerics n = quick;
                 const cplx cold = psi_infinite(inf, 1.0, 0.5, 0.2, n).lnpsi;
                 n.cache = &cache;
                 psi_infinite(inf, 1.0, 0.5, 0.2, n);
                 return std::abs(psi_infinite(inf, 1.0, 0.5, 0.2, n).lnpsi - cold);
               }});
  c.push_back({"psi/finite_volume_limit", 1e-6, [=] {
                 FcsNumerics n = quick;
                 n.torus.N = 96;
                 n.torus.tail_tol = 1e-4;
                 const Volume b20 = Volume::box(kink, 1.0, 20.0);
                 return std::abs(psi_finite_s(b20, boson, 1.0, -0.2, n).lnpsi -
                                 psi_infinite_s(inf, 1.0, 1.0, -0.2, n).lnpsi);
               }});

  // configuration
  c.push_back({"config/half_width_over_quarter_box", 0.0, [] {
                 return expect_config_key({{"schema_version", "1"}, {"profile", {{"half_width", 3.0}, {"L", 10.0}}}},
                                          "half_width");
               }});
  c.push_back({"config/unknown_key", 0.0, [] {
                 return expect_config_key({{"schema_version", "1"}, {"numerics", {{"NN", 3}}}}, "numerics.NN");
               }});
  c.push_back({"config/missing_schema", 0.0, [] { return expect_config_key(json::object(), "schema_version"); }});
  c.push_back({"config/free_theory_needs_c1", 0.0, [] {
                 return expect_config_key({{"schema_version", "1"}, {"theory", {{"model", "free_fermion_c1"}, {"c", 0.5}}}},
                                          "theory.c");
               }});
  return c;
}

}  // namespace

CommandOutput cmd_selftest(const RunOptions&) {
  CommandOutput out;
  json checks = json::array();
  int passed = 0, total = 0;
  for (const auto& chk : build_checks()) {
    double d;
    std::string status, note;
    try {
      d = chk.defect();
      status = (d <= chk.tol) ? "pass" : "fail";
    } catch (const std::exception& e) {
      d = std::nan("");
      status = "error";
      note = e.what();
    }
    ++total;
    if (status == "pass") ++passed;
    json entry = {{"name", chk.name}, {"status", status}, {"tolerance", chk.tol}};
    entry["defect"] = std::isnan(d) ? json(nullptr) : json(d);
    if (!note.empty()) entry["message"] = note;
    checks.push_back(entry);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-5s %-40s defect %-10.3e tol %.1e%s%s\n", status == "pass" ? "ok" : "FAIL",
                  chk.name.c_str(), std::isnan(d) ? -1.0 : d, chk.tol, note.empty() ? "" : "  ", note.c_str());
    out.summary += buf;
  }
  out.ok = passed == total;
  out.result = {{"checks", checks}, {"passed", passed}, {"total", total}};
  out.summary += std::to_string(passed) + "/" + std::to_string(total) + " checks passed\n";
  return out;
}

}  // namespace weldfcs::cli

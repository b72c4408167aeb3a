#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <memory>
#include <set>
#include <sstream>

#include "weldfcs/cli.hpp"
#include "weldfcs/errors.hpp"
#include "weldfcs/parallel.hpp"

namespace weldfcs::cli {

namespace {

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

// Experiment block reader; unknown keys are errors like elsewhere.
class Experiment {
 public:
  Experiment(const json& j, std::set<std::string> allowed) : j_(j) {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key())) throw ConfigError("experiment." + it.key(), "unknown key for this command");
  }
  double num(const std::string& k, double def) const {
    if (!j_.contains(k)) return def;
    if (!j_.at(k).is_number()) throw ConfigError("experiment." + k, "expected a number");
    return j_.at(k).get<double>();
  }
  // Accepts a number or a non-empty list of numbers.
  std::vector<double> list(const std::string& k, std::vector<double> def) const {
    if (!j_.contains(k)) return def;
    const json& v = j_.at(k);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) throw ConfigError("experiment." + k, "expected a number or a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("experiment." + k, "expected a number or a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::string str(const std::string& k, const std::string& def, std::set<std::string> choices) const {
    if (!j_.contains(k)) return def;
    if (!j_.at(k).is_string() || !choices.count(j_.at(k).get<std::string>())) {
      std::string all;
      for (const auto& c : choices) all += (all.empty() ? "" : ", ") + c;
      throw ConfigError("experiment." + k, "expected one of " + all);
    }
    return j_.at(k).get<std::string>();
  }
  bool flag(const std::string& k, bool def) const {
    if (!j_.contains(k)) return def;
    if (!j_.at(k).is_boolean()) throw ConfigError("experiment." + k, "expected true or false");
    return j_.at(k).get<bool>();
  }

 private:
  const json& j_;
};

Volume infinite_volume(const RunConfig& cfg) { return Volume::infinite(cfg.profile, cfg.v); }

Volume box_volume(const RunConfig& cfg, double L) {
  if (!(L > 0.0)) throw ConfigError("profile.L", "this command needs a finite box size");
  if (cfg.profile.half_width > 0.25 * L) throw ConfigError("profile.half_width", "kink half width exceeds L/4");
  return Volume::box(cfg.profile, cfg.v, L);
}

struct CacheHolder {
  std::unique_ptr<FileCache> file;
  const NodeCache* get() const { return file ? &file->node_cache() : nullptr; }
};

FcsNumerics numerics_for(const RunConfig& cfg, const RunOptions& opt, const CacheHolder& cache) {
  FcsNumerics n = cfg.numerics;
  n.threads = std::max(1, opt.threads);
  n.cache = cache.get();
  return n;
}

CacheHolder open_cache(const RunOptions& opt) {
  CacheHolder h;
  if (!opt.cache_dir.empty()) h.file = std::make_unique<FileCache>(opt.cache_dir);
  return h;
}

Mover parse_mover(const Experiment& e) {
  return e.str("mover", "plus", {"plus", "minus"}) == "plus" ? Mover::plus : Mover::minus;
}

// Least-squares slope of log(err) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(err[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string line(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string line(const char* format, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, format);
  std::vsnprintf(buf, sizeof buf, format, ap);
  va_end(ap);
  return std::string(buf) + "\n";
}

}  // namespace

CommandOutput cmd_weld_torus(const RunConfig& cfg, const RunOptions&) {
  const Experiment e(cfg.experiment, {"s", "t"});
  const double s = e.num("s", 0.25), t = e.num("t", 1.0);
  const Volume box = box_volume(cfg, cfg.L);
  const auto f = CircleDiffeo::from_flow(box, s, t, cfg.numerics.flow);
  const cplx tau = tau_sL(box, s);
  auto sol = solve_Y1(f, tau, cfg.numerics.torus);
  residual_diagnostics(f, sol, cfg.numerics.torus);
  const auto l1 = identity_defects(sol);

  CommandOutput out;
  const auto& d = sol.diag;
  out.result = {{"s", s},
                {"t", t},
                {"L", box.L()},
                {"N", sol.N},
                {"M", sol.M},
                {"tau", cjson(sol.tau)},
                {"tau_hat", cjson(sol.tau_hat)},
                {"diagnostics",
                 {{"tail", d.tail},
                  {"cy1", d.cy1},
                  {"cy2", d.cy2},
                  {"intcond", d.intcond},
                  {"b_defect", d.b_defect},
                  {"identity_quadratic", l1.quadratic},
                  {"identity_schwarzian", l1.schwarzian},
                  {"solve_residual", d.solve.residual},
                  {"solve_iterations", d.solve.iterations},
                  {"dense", d.solve.dense}}}};
  CsvTable grid{"weld_torus", {"x", "f", "re_Xp", "im_Xp", "re_SX", "im_SX"}, {}};
  for (int j = 0; j < sol.M; ++j)
    grid.rows.push_back({fmt(sol.x[j]), fmt(sol.f[j]), fmt(sol.Xp[j].real()), fmt(sol.Xp[j].imag()),
                         fmt(sol.SX[j].real()), fmt(sol.SX[j].imag())});
  out.tables.push_back(std::move(grid));
  out.summary = line("torus weld L=%g s=%g t=%g N=%d M=%d", box.L(), s, t, sol.N, sol.M) +
                line("  tau_hat = %.15g %+.15gi", sol.tau_hat.real(), sol.tau_hat.imag()) +
                line("  identity defects %.3e %.3e, residuals cy1 %.3e cy2 %.3e, tail %.3e", l1.quadratic,
                     l1.schwarzian, d.cy1, d.cy2, d.tail);
  return out;
}

CommandOutput cmd_weld_cylinder(const RunConfig& cfg, const RunOptions&) {
  const Experiment e(cfg.experiment, {"s", "t", "mover", "crosscheck"});
  const double s = e.num("s", 0.3), t = e.num("t", 4.0);
  const Mover m = parse_mover(e);
  const Volume inf = infinite_volume(cfg);
  const auto g = LineDiffeo::from_flow(inf, m, s, t, cfg.numerics.flow);
  const auto sol = solve_cylinder(g, inf.gamma(), cylinder_defaults(inf, cfg.numerics.cylinder));
  const auto& d = sol.diag;

  CommandOutput out;
  out.result = {{"s", s},
                {"t", t},
                {"mover", m == Mover::plus ? "plus" : "minus"},
                {"gamma", sol.gamma},
                {"support", {sol.lo, sol.hi}},
                {"diagnostics",
                 {{"tail", d.tail},
                  {"decay_left", d.decay_left},
                  {"decay_right", d.decay_right},
                  {"min_abs_Xp", d.min_abs_Xp},
                  {"P_max", d.P_max},
                  {"panel", d.panel},
                  {"dx", d.dx},
                  {"pad", d.pad},
                  {"nodes", d.nodes},
                  {"Mx", d.Mx},
                  {"solve_residual", d.solve.residual},
                  {"solve_iterations", d.solve.iterations},
                  {"rcond", d.solve.rcond},
                  {"dense", d.solve.dense}}}};
  out.summary = line("cylinder weld s=%g t=%g %s mover, gamma=%g", s, t, m == Mover::plus ? "plus" : "minus",
                     sol.gamma) +
                line("  P_max=%g nodes=%d tail %.3e decay %.4g / %.4g (2pi/gamma = %.4g)", d.P_max, d.nodes, d.tail,
                     d.decay_left, d.decay_right, 2 * M_PI / sol.gamma);
  if (e.flag("crosscheck", true)) {
    const auto rs = realspace_crosscheck(sol);
    out.result["diagnostics"]["realspace_lower"] = rs.lower;
    out.result["diagnostics"]["realspace_upper"] = rs.upper;
    out.summary += line("  real-space relations: %.3e %.3e", rs.lower, rs.upper);
  }
  CsvTable grid{"weld_cylinder", {"x", "re_Xp", "im_Xp", "re_SX", "im_SX"}, {}};
  for (Eigen::Index j = 0; j < sol.x.size(); ++j)
    grid.rows.push_back({fmt(sol.x[j]), fmt(sol.Xp[j].real()), fmt(sol.Xp[j].imag()), fmt(sol.SX[j].real()),
                         fmt(sol.SX[j].imag())});
  out.tables.push_back(std::move(grid));
  return out;
}

CommandOutput cmd_fcs(const RunConfig& cfg, const RunOptions& opt) {
  const Experiment e(cfg.experiment, {"t", "lambda", "by_s", "volume"});
  const auto ts = e.list("t", {2.0});
  const auto lams = e.list("lambda", {0.2});
  const bool by_s = e.flag("by_s", false);
  const std::string vol = e.str("volume", cfg.L > 0.0 ? "both" : "infinite", {"infinite", "finite", "both"});
  const bool do_inf = vol != "finite", do_fin = vol != "infinite";
  if (do_fin && !(cfg.L > 0.0)) throw ConfigError("profile.L", "finite-volume FCS needs a box size");
  if (do_fin && !cfg.theory.has_character())
    throw ConfigError("theory.model", "finite-volume FCS needs a theory with a character");
  const double db = cfg.profile.delta_beta();
  if (!by_s && db == 0.0)
    throw ConfigError("experiment.by_s", "equal temperatures: set by_s and give flow times in `lambda`");

  const CacheHolder cache = open_cache(opt);
  FcsNumerics num = numerics_for(cfg, opt, cache);
  struct Node {
    double t, lam;
  };
  std::vector<Node> nodes;
  for (double t : ts)
    for (double l : lams) nodes.push_back({t, l});
  // Fan out over grid nodes when there are enough of them, otherwise inside each node.
  const int outer = static_cast<int>(nodes.size()) >= num.threads ? num.threads : 1;
  FcsNumerics inner = num;
  inner.threads = outer > 1 ? 1 : num.threads;

  const Volume inf = infinite_volume(cfg);
  std::vector<PsiResult> ri(do_inf ? nodes.size() : 0);
  std::vector<FinitePsiResult> rf(do_fin ? nodes.size() : 0);
  std::unique_ptr<Volume> box;
  if (do_fin) box = std::make_unique<Volume>(box_volume(cfg, cfg.L));
  parallel_for(static_cast<int>(nodes.size()), outer, [&](int i) {
    const auto [t, l] = nodes[i];
    if (do_inf) ri[i] = by_s ? psi_infinite_s(inf, cfg.theory.c, t, l, inner) : psi_infinite(inf, cfg.theory.c, t, l, inner);
    if (do_fin) rf[i] = by_s ? psi_finite_s(*box, cfg.theory, t, l, inner) : psi_finite(*box, cfg.theory, t, l, inner);
  });

  CommandOutput out;
  out.result = {{"parameter", by_s ? "s" : "lambda"}, {"infinite", json::array()}, {"finite", json::array()}};
  CsvTable ti{"fcs",
              {"t", "lambda", "re_lnpsi", "im_lnpsi", "re_lnpsi_plus", "im_lnpsi_plus", "re_lnpsi_minus",
               "im_lnpsi_minus"},
              {}};
  CsvTable tf{"fcs_finite",
              {"t", "lambda", "L", "re_lnpsi", "im_lnpsi", "re_log_char_ratio", "im_log_char_ratio", "re_tau_hat",
               "im_tau_hat"},
              {}};
  out.summary = line("FCS, c=%g, %s", cfg.theory.c, by_s ? "flow-time grid" : "lambda grid");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (do_inf) {
      const auto& r = ri[i];
      out.result["infinite"].push_back({{"t", r.t},
                                        {"lambda", r.lambda},
                                        {"s", r.s},
                                        {"lnpsi", cjson(r.lnpsi)},
                                        {"plus",
                                         {{"lnpsi", cjson(r.plus.lnpsi)},
                                          {"action", cjson(r.plus.action)},
                                          {"counterterm", r.plus.counterterm},
                                          {"s_error", r.plus.s_error}}},
                                        {"minus",
                                         {{"lnpsi", cjson(r.minus.lnpsi)},
                                          {"action", cjson(r.minus.action)},
                                          {"counterterm", r.minus.counterterm},
                                          {"s_error", r.minus.s_error}}}});
      ti.rows.push_back({fmt(r.t), fmt(r.lambda), fmt(r.lnpsi.real()), fmt(r.lnpsi.imag()), fmt(r.plus.lnpsi.real()),
                         fmt(r.plus.lnpsi.imag()), fmt(r.minus.lnpsi.real()), fmt(r.minus.lnpsi.imag())});
      out.summary += line("  t=%-8g lambda=%-8g ln Psi = %.12g %+.12gi", r.t, r.lambda, r.lnpsi.real(), r.lnpsi.imag());
    }
    if (do_fin) {
      const auto& r = rf[i];
      out.result["finite"].push_back({{"t", r.t},
                                      {"lambda", r.lambda},
                                      {"s", r.s},
                                      {"L", r.L},
                                      {"lnpsi", cjson(r.lnpsi)},
                                      {"action", cjson(r.action)},
                                      {"log_char_ratio", cjson(r.log_char_ratio)},
                                      {"tau0", cjson(r.tau0)},
                                      {"tau_hat", cjson(r.tau_hat)},
                                      {"C_t", r.C_t},
                                      {"C_0", r.C_0},
                                      {"s_error", r.s_error}});
      tf.rows.push_back({fmt(r.t), fmt(r.lambda), fmt(r.L), fmt(r.lnpsi.real()), fmt(r.lnpsi.imag()),
                         fmt(r.log_char_ratio.real()), fmt(r.log_char_ratio.imag()), fmt(r.tau_hat.real()),
                         fmt(r.tau_hat.imag())});
      out.summary += line("  t=%-8g lambda=%-8g L=%-6g ln Psi_L = %.12g %+.12gi", r.t, r.lambda, r.L,
                          r.lnpsi.real(), r.lnpsi.imag());
    }
  }
  if (do_inf) out.tables.push_back(std::move(ti));
  if (do_fin) out.tables.push_back(std::move(tf));
  return out;
}

CommandOutput cmd_moments(const RunConfig& cfg, const RunOptions& opt) {
  const Experiment e(cfg.experiment, {"t", "step"});
  const auto ts = e.list("t", {4.0});
  const double h = e.num("step", cfg.cumulant_step);
  if (!(h > 0.0)) throw ConfigError("experiment.step", "must be positive");
  if (cfg.profile.delta_beta() == 0.0) throw ConfigError("profile.beta_right", "moments need beta_left != beta_right");
  const Volume inf = infinite_volume(cfg);
  const CacheHolder cache = open_cache(opt);
  const FcsNumerics num = numerics_for(cfg, opt, cache);

  CommandOutput out;
  out.result = {{"step", h}, {"rows", json::array()}};
  CsvTable tab{"moments",
               {"t", "mean_closed", "mean_pipeline", "mean_rel_defect", "variance_closed", "variance_pipeline",
                "variance_rel_defect"},
               {}};
  out.summary = line("moments, c=%g, lambda step %g", cfg.theory.c, h);
  for (double t : ts) {
    const auto cm = moments_closed_form(inf, cfg.theory.c, t);
    const auto pc = pipeline_cumulants(inf, cfg.theory.c, t, h, num);
    const double dm = cm.mean != 0.0 ? std::abs(pc.mean / cm.mean - 1.0) : std::abs(pc.mean);
    const double dv = cm.variance != 0.0 ? std::abs(pc.variance / cm.variance - 1.0) : std::abs(pc.variance);
    out.result["rows"].push_back({{"t", t},
                                  {"mean_closed", cm.mean},
                                  {"mean_pipeline", pc.mean},
                                  {"mean_rel_defect", dm},
                                  {"variance_closed", cm.variance},
                                  {"variance_pipeline", pc.variance},
                                  {"variance_rel_defect", dv}});
    tab.rows.push_back({fmt(t), fmt(cm.mean), fmt(pc.mean), fmt(dm), fmt(cm.variance), fmt(pc.variance), fmt(dv)});
    out.summary += line("  t=%-6g mean %.10g vs %.10g (%.2e)  variance %.10g vs %.10g (%.2e)", t, cm.mean, pc.mean,
                        dm, cm.variance, pc.variance, dv);
  }
  out.tables.push_back(std::move(tab));
  return out;
}

CommandOutput cmd_ldf(const RunConfig& cfg, const RunOptions&) {
  const Experiment e(cfg.experiment, {"lambda", "sigma", "imag_shift"});
  std::vector<double> lams = e.list("lambda", {});
  if (lams.empty())
    for (int k = -10; k <= 10; ++k) lams.push_back(0.1 * k);
  std::vector<double> sigmas = e.list("sigma", {});
  if (sigmas.empty())
    for (int k = -10; k <= 10; ++k) sigmas.push_back(0.5 * k);
  const double shift = e.num("imag_shift", 0.3);
  const double bl = cfg.profile.beta_left, br = cfg.profile.beta_right, c = cfg.theory.c, db = br - bl;

  CommandOutput out;
  CsvTable tx{"ldf_xi",
              {"lambda", "re_xi_plus", "im_xi_plus", "re_xi_minus", "im_xi_minus", "fluctuation_defect",
               "levitov_lesovik_defect", "levy_khintchine_defect"},
              {}};
  CsvTable tr{"ldf_rate", {"sigma", "rate", "gallavotti_cohen_defect"}, {}};
  double worst_fr = 0, worst_gc = 0, worst_ll = 0, worst_lk = 0;
  out.result = {{"xi", json::array()}, {"rate", json::array()}, {"mean_drift", mean_drift(bl, br, c)}};
  for (double l : lams) {
    const Xi x = ldf(bl, br, c, l);
    const cplx lc(l, shift);
    const double fr = std::abs(ldf(bl, br, c, lc).total() - ldf(bl, br, c, -lc + cplx(0.0, db)).total());
    // free-fermion check, independent of the configured theory
    const double dl = std::abs(levitov_lesovik(bl, br, l) - ldf(bl, br, 1.0, l).total());
    const double dk = std::abs(levy_khintchine(bl, br, c, l) - x.total());
    worst_fr = std::max(worst_fr, fr), worst_ll = std::max(worst_ll, dl), worst_lk = std::max(worst_lk, dk);
    out.result["xi"].push_back({{"lambda", l},
                                {"plus", cjson(x.plus)},
                                {"minus", cjson(x.minus)},
                                {"fluctuation_defect", fr},
                                {"levitov_lesovik_defect", dl},
                                {"levy_khintchine_defect", dk}});
    tx.rows.push_back({fmt(l), fmt(x.plus.real()), fmt(x.plus.imag()), fmt(x.minus.real()), fmt(x.minus.imag()),
                       fmt(fr), fmt(dl), fmt(dk)});
  }
  for (double s : sigmas) {
    const double I = rate_function(bl, br, c, s);
    const double gc = rate_function(bl, br, c, -s) - I - s * db;
    worst_gc = std::max(worst_gc, std::abs(gc));
    out.result["rate"].push_back({{"sigma", s}, {"rate", I}, {"gallavotti_cohen_defect", gc}});
    tr.rows.push_back({fmt(s), fmt(I), fmt(gc)});
  }
  out.result["worst"] = {{"fluctuation", worst_fr},
                         {"gallavotti_cohen", worst_gc},
                         {"levitov_lesovik", worst_ll},
                         {"levy_khintchine", worst_lk}};
  out.tables.push_back(std::move(tx));
  out.tables.push_back(std::move(tr));
  out.summary = line("large deviations, beta_L=%g beta_R=%g c=%g, drift %.12g", bl, br, c, mean_drift(bl, br, c)) +
                line("  fluctuation relation %.2e, Gallavotti-Cohen %.2e", worst_fr, worst_gc) +
                line("  Levitov-Lesovik (c=1) %.2e, Levy-Khintchine %.2e", worst_ll, worst_lk);
  return out;
}

CommandOutput cmd_converge(const RunConfig& cfg, const RunOptions& opt) {
  const Experiment e(cfg.experiment,
                     {"s", "t", "L", "torus_p_max", "torus_tail_tol", "P", "x", "psi"});
  const double s = e.num("s", -0.3), t = e.num("t", 2.0 * cfg.profile.half_width / cfg.v);
  const auto Ls = e.list("L", {40.0 * cfg.profile.half_width, 80.0 * cfg.profile.half_width,
                               160.0 * cfg.profile.half_width});
  const double pt = e.num("torus_p_max", 30.0 / cfg.profile.half_width);
  const double ttol = e.num("torus_tail_tol", 1e-4);
  const auto Ps = e.list("P", {});
  const bool with_psi = e.flag("psi", cfg.theory.has_character());
  const Volume inf = infinite_volume(cfg);
  const CacheHolder cache = open_cache(opt);
  const FcsNumerics base = numerics_for(cfg, opt, cache);

  CommandOutput out;
  out.summary = line("convergence study, s=%g t=%g", s, t);
  CsvTable tl{"converge_L", {"L", "N", "recentered_Xp_defect", "lnpsi_defect"}, {}};
  std::vector<double> xs, ds, dpsi;
  cplx psi_inf = 0.0;
  if (with_psi) psi_inf = psi_infinite_s(inf, cfg.theory.c, t, s, base).lnpsi;
  out.result["L_sweep"] = json::array();
  for (double L : Ls) {
    const Volume box = box_volume(cfg, L);
    FcsNumerics num = base;
    num.torus.N = static_cast<int>(std::ceil(pt * L / (2.0 * M_PI)));
    num.torus.tail_tol = ttol;
    if (num.torus.solver == "auto") num.torus.solver = "gmres";
    const double d = recentered_Xp_defect(box, inf, s, t, num);
    double dp = 0.0;
    if (with_psi) dp = std::abs(psi_finite_s(box, cfg.theory, t, s, num).lnpsi - psi_inf);
    xs.push_back(L), ds.push_back(d), dpsi.push_back(dp);
    out.result["L_sweep"].push_back({{"L", L}, {"N", num.torus.N}, {"recentered_Xp_defect", d}, {"lnpsi_defect", dp}});
    tl.rows.push_back({fmt(L), std::to_string(num.torus.N), fmt(d), with_psi ? fmt(dp) : ""});
    out.summary += line("  L=%-6g N=%-5d X' defect %.4e  ln Psi defect %.4e", L, num.torus.N, d, dp);
  }
  if (xs.size() >= 2) {
    const double slope = loglog_slope(xs, ds);
    out.result["recentered_slope"] = slope;
    out.summary += line("  log-log slope of the X' defect: %.4f", slope);
  }
  out.tables.push_back(std::move(tl));

  if (!Ps.empty()) {
    // Cylinder momentum cutoff sweep against the finest cutoff.
    const auto probes = e.list("x", {-2.0, 0.0, 2.0});
    const auto g = LineDiffeo::from_flow(inf, Mover::plus, s, t, cfg.numerics.flow);
    std::vector<std::vector<cplx>> vals;
    for (double P : Ps) {
      CylinderNumerics cn = cylinder_defaults(inf, cfg.numerics.cylinder);
      cn.P_max = P;
      const auto sol = solve_cylinder(g, inf.gamma(), cn);
      std::vector<cplx> v;
      for (double x : probes) v.push_back(sol.eval_Xp(x));
      vals.push_back(v);
    }
    CsvTable tp{"converge_P", {"P_max", "Xp_change_vs_finest"}, {}};
    out.result["P_sweep"] = json::array();
    for (std::size_t k = 0; k + 1 < Ps.size(); ++k) {
      double d = 0.0;
      for (std::size_t j = 0; j < probes.size(); ++j) d = std::max(d, std::abs(vals[k][j] - vals.back()[j]));
      out.result["P_sweep"].push_back({{"P_max", Ps[k]}, {"Xp_change_vs_finest", d}});
      tp.rows.push_back({fmt(Ps[k]), fmt(d)});
      out.summary += line("  P_max=%-6g |X' - X'_finest| = %.3e", Ps[k], d);
    }
    out.tables.push_back(std::move(tp));
  }
  return out;
}

}  // namespace weldfcs::cli

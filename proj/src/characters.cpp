#include "weldfcs/characters.hpp"

#include <cmath>

#include "weldfcs/errors.hpp"

namespace weldfcs {

namespace {

const cplx I(0.0, 1.0);
constexpr double kTermTol = 1e-17;

void require_upper(cplx tau) {
  if (!(tau.imag() > 0.0)) throw ConfigError("tau", "modular parameter must have Im tau > 0");
}

// sum_{k in Z} exp(i pi t k^2)
cplx log_theta3(cplx t, int cap) {
  const cplx a = I * M_PI * t;
  cplx sum = 1.0;
  for (int k = 1;; ++k) {
    if (k > cap) throw Error(ErrorCode::NotConverged, "theta series hit the term cap");
    const cplx term = 2.0 * std::exp(a * static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < kTermTol * std::abs(sum)) break;
  }
  return std::log(sum);
}

// ln eta(t) = 2 pi i t/24 + sum_n ln(1 - q^n)
cplx log_eta(cplx t, int cap) {
  const cplx q = std::exp(2.0 * M_PI * I * t);
  cplx acc = 2.0 * M_PI * I * t / 24.0;
  cplx qn = q;
  for (int n = 1;; ++n) {
    if (n > cap) throw Error(ErrorCode::NotConverged, "eta product hit the term cap");
    acc += std::log(1.0 - qn);
    if (std::abs(qn) < kTermTol) break;
    qn *= q;
  }
  return acc;
}

// Neveu-Schwarz fermion trace, directly as the CAR Fock-space product.
cplx log_fermion_product(cplx t, int cap) {
  const cplx q = std::exp(2.0 * M_PI * I * t);
  const cplx qh = std::exp(M_PI * I * t);
  cplx acc = -2.0 * M_PI * I * t / 24.0;
  cplx qn = qh;  // q^{n-1/2}
  for (int n = 1;; ++n) {
    if (n > cap) throw Error(ErrorCode::NotConverged, "fermion product hit the term cap");
    acc += 2.0 * std::log(1.0 + qn);
    if (std::abs(qn) < kTermTol) break;
    qn *= q;
  }
  return acc;
}

cplx log_boson_direct(double r, cplx t, int cap) { return log_theta3(2.0 * t / (r * r), cap) - log_eta(t, cap); }

}  // namespace

Model parse_model(const std::string& name) {
  if (name == "free_fermion_c1") return Model::free_fermion_c1;
  if (name == "free_boson_radius") return Model::free_boson_radius;
  if (name == "central_charge_only") return Model::central_charge_only;
  throw ConfigError("theory.model", "unknown model '" + name + "'");
}

std::string model_name(Model m) {
  switch (m) {
    case Model::free_fermion_c1: return "free_fermion_c1";
    case Model::free_boson_radius: return "free_boson_radius";
    default: return "central_charge_only";
  }
}

void Theory::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("theory.c", "central charge must be positive");
  if (model != Model::central_charge_only && c != 1.0)
    throw ConfigError("theory.c", "free boson and fermion have c = 1");
  if (model == Model::free_boson_radius && !(radius > 0.0)) throw ConfigError("theory.radius", "must be positive");
}

cplx log_character_direct(const Theory& th, cplx tau, int cap) {
  require_upper(tau);
  switch (th.model) {
    case Model::free_fermion_c1: return log_fermion_product(tau, cap);
    case Model::free_boson_radius: return log_boson_direct(th.radius, tau, cap);
    default: throw ConfigError("theory.model", "central_charge_only has no character");
  }
}

cplx log_character(const Theory& th, cplx tau, int cap) {
  require_upper(tau);
  if (th.model == Model::central_charge_only)
    throw ConfigError("theory.model", "central_charge_only has no character");
  const cplx ts = -1.0 / tau;
  if (tau.imag() >= ts.imag()) return log_character_direct(th, tau, cap);
  if (th.model == Model::free_fermion_c1) return log_fermion_product(ts, cap);
  // chi(tau) = (r/sqrt2) theta3(-r^2/(2 tau)) / eta(-1/tau)
  const double r = th.radius;
  return std::log(r / std::sqrt(2.0)) + log_theta3(-r * r / (2.0 * tau), cap) - log_eta(ts, cap);
}

SmallTauRatio small_tau_ratio(const Theory& th, cplx tau_hat, cplx tau0) {
  require_upper(tau_hat);
  require_upper(tau0);
  SmallTauRatio out;
  out.log_surrogate = -I * M_PI * th.c / 12.0 * (tau_hat - tau0) / (tau0 * tau0);
  if (!th.has_character()) return out;
  try {
    out.log_exact = log_character(th, tau_hat) - log_character(th, tau0);
    out.exact_available = true;
    out.rel_diff = std::abs(std::exp(out.log_exact - out.log_surrogate) - 1.0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotConverged) throw;
  }
  return out;
}

}  // namespace weldfcs

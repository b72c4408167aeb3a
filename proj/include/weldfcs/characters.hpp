#pragma once

#include <complex>
#include <string>

namespace weldfcs {

using cplx = std::complex<double>;

enum class Model { free_fermion_c1, free_boson_radius, central_charge_only };

Model parse_model(const std::string& name);
std::string model_name(Model m);

struct Theory {
  Model model = Model::free_boson_radius;
  double c = 1.0;
  double radius = 1.0;  // compactification radius, free boson only

  void validate() const;
  bool has_character() const { return model != Model::central_charge_only; }
};

// ln chi(tau) on the branch continuous from the vacuum term. The boson
// trace is q^{-1/24} sum_k q^{k^2/r^2} prod (1 - q^n)^{-1}; the fermion trace is
// the Neveu-Schwarz Fock space q^{-1/24} prod (1 + q^{n-1/2})^2. For small
// Im tau both are evaluated after the S transformation tau -> -1/tau.
// Throws NotConverged if a series needs more than term_cap terms and
// ConfigError for theories without a character.
cplx log_character(const Theory& th, cplx tau, int term_cap = 200000);
inline cplx character(const Theory& th, cplx tau, int term_cap = 200000) {
  return std::exp(log_character(th, tau, term_cap));
}

// Direct q-series only (no modular transformation); used as an independent
// reference where Im tau is large enough.
cplx log_character_direct(const Theory& th, cplx tau, int term_cap = 200000);

struct SmallTauRatio {
  cplx log_exact = 0.0;      // ln chi(tau_hat) - ln chi(tau0)
  cplx log_surrogate = 0.0;  // -i pi c/12 (tau_hat - tau0)/tau0^2
  bool exact_available = false;
  double rel_diff = 0.0;     // |exp(exact - surrogate) - 1|
};
SmallTauRatio small_tau_ratio(const Theory& th, cplx tau_hat, cplx tau0);

}  // namespace weldfcs

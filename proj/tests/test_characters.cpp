#include <cmath>
#include <random>

#include "doctest.h"
#include "weldfcs/characters.hpp"
#include "weldfcs/errors.hpp"

using namespace weldfcs;

namespace {
Theory boson(double r) { return {Model::free_boson_radius, 1.0, r}; }
Theory fermion() { return {Model::free_fermion_c1, 1.0, 1.0}; }

// equal up to the branch of the logarithm
double log_distance(cplx a, cplx b) {
  cplx d = a - b;
  d.imag(std::remainder(d.imag(), 2.0 * M_PI));
  return std::abs(d);
}
}  // namespace

TEST_CASE("characters against 40-digit references") {
  // mpmath: theta/eta and the NS product evaluated directly in the q-series
  CHECK(log_distance(log_character(boson(1.0), {0.1, 0.8}), {0.225357410172819113, -0.0146292193548437904}) < 1e-13);
  CHECK(log_distance(log_character(boson(1.0), {-0.3, 0.5}), {0.0918539215673263302, -0.0451150865701844794}) < 1e-13);
  CHECK(log_distance(log_character(boson(1.0), {0.0, 0.05}), {4.8894141657030612074, 0.0}) < 1e-12);
  CHECK(log_distance(log_character(boson(1.7), {0.02, 0.06}), {4.1110454777694393342, 1.3089969389957472917}) < 1e-12);
  CHECK(log_distance(log_character(fermion(), {0.02, 0.06}), {3.926990816987241648, 1.3089969389957472917}) < 1e-12);
  CHECK(log_distance(log_character(fermion(), {0.0, 1.2}), {0.359768543926984848, 0.0}) < 1e-13);
}

TEST_CASE("boson at radius sqrt 2 is the Dirac fermion") {
  std::mt19937 gen(20261018);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.05, 1.5);
  for (int i = 0; i < 12; ++i) {
    const cplx tau(re(gen), im(gen));
    const cplx a = character(boson(std::sqrt(2.0)), tau), b = character(fermion(), tau);
    CHECK(std::abs(a / b - 1.0) < 1e-12);
  }
}

TEST_CASE("direct series and modular route agree where both converge") {
  for (cplx tau : {cplx(0.1, 0.9), cplx(-0.4, 1.1), cplx(0.3, 0.95)}) {
    for (const Theory& th : {boson(1.0), boson(0.6), fermion()})
      CHECK(log_distance(log_character(th, tau), log_character_direct(th, tau)) < 1e-13);
  }
}

TEST_CASE("small tau asymptotics") {
  std::vector<double> rem;
  for (double eps : {0.1, 0.05, 0.02}) rem.push_back(log_character(boson(1.0), {0.0, eps}).real() - 2.0 * M_PI / (24.0 * eps));
  CHECK(std::abs(rem[0] - rem[2]) < 1e-3);
  CHECK(std::abs(rem[1] - rem[2]) < 1e-3);
  // constant is ln(r / sqrt 2)
  CHECK(rem[2] == doctest::Approx(std::log(1.0 / std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("character ratio near tau = 0") {
  const cplx tau0(0.0, 0.05), tau = tau0 + 1e-4 * cplx(1.0, 1.0);
  const auto r = small_tau_ratio(boson(1.0), tau, tau0);
  REQUIRE(r.exact_available);
  // the exact Cardy form 1/tau - 1/tau0 tracks the ratio closely ...
  const cplx cardy = cplx(0.0, M_PI / 12.0) * (1.0 / tau - 1.0 / tau0);
  CHECK(std::abs(std::exp(r.log_exact - cardy) - 1.0) < 2e-6);
  // ... while its linearization in tau - tau0 carries an O(|dtau|/|tau0|) error
  CHECK(r.rel_diff < 1e-4);
  CHECK(r.rel_diff > 1e-6);
  CHECK_FALSE(small_tau_ratio({Model::central_charge_only, 0.7, 1.0}, tau, tau0).exact_available);
}

TEST_CASE("theory validation") {
  CHECK_THROWS_AS(parse_model("ising"), ConfigError);
  CHECK(parse_model(model_name(Model::free_fermion_c1)) == Model::free_fermion_c1);
  Theory bad{Model::free_boson_radius, 0.5, 1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  Theory gen{Model::central_charge_only, 0.7, 1.0};
  CHECK_NOTHROW(gen.validate());
  CHECK_THROWS_AS(log_character(gen, {0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(log_character(boson(1.0), {0.1, -0.2}), Error);
}

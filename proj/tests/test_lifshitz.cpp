/*
 * Copyright 2026 The casimir-workbench developers
 *
 *      Licensed under the Apache License, Version 2.0 (the "License")
 *
 * You may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *              http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include <cmath>
#include <numeric>

#include "constants.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "generators.hpp"
#include "lifshitz.hpp"

using namespace casimir;

namespace {

const DrudeParams au_drude{9.0, 0.035};
const NinhamParsegianParams quartz{1.93, 1.359, 0.1378, 13.38};

PermittivityModel au() { return PermittivityModel::drude(au_drude); }

PermittivityModel ito_like() {
  return PermittivityModel::sum(
      {PermittivityModel::drude({1.5, 0.128}), PermittivityModel::oscillator({25.0, 1.6, 4.8}),
       PermittivityModel::oscillator({158.8, 6.0, 8.6})});
}

LayerStack film_stack(PermittivityModel film) {
  return {au(), std::move(film), 74.6, PermittivityModel::ninham_parsegian(quartz)};
}

LayerStack halfspaces(PermittivityModel a, PermittivityModel b) {
  return {std::move(a), b, 1000.0, b};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("Matsubara frequencies") {
  CHECK(matsubara_frequency(275.0, 0) == 0.0);
  const double xi1 = 2.0 * M_PI * 8.6173333e-5 * 275.0;
  CHECK(matsubara_frequency(275.0, 1) == doctest::Approx(xi1).epsilon(1e-14));
  CHECK(matsubara_frequency(275.0, 1) == doctest::Approx(0.148897).epsilon(1e-6));
  CHECK(matsubara_frequency(275.0, 10) == doctest::Approx(10.0 * xi1).epsilon(1e-14));
  CHECK(matsubara_frequency(275.0, 10) == doctest::Approx(1.48897).epsilon(1e-6));
  CHECK_THROWS_AS(matsubara_frequency(275.0, -1), ValidationError);
}

TEST_CASE("semispace Fresnel limits") {
  const auto ideal = fresnel_semispace(1e14, 0.5, 0.01);
  CHECK(ideal.tm == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ideal.te == doctest::Approx(-1.0).epsilon(1e-6));
  const auto inf = fresnel_semispace(std::numeric_limits<double>::infinity(), 0.5, 0.01);
  CHECK(inf.tm == 1.0);
  CHECK(inf.te == -1.0);
  const auto vac = fresnel_semispace(1.0, 0.5, 0.01);
  CHECK(vac.tm == 0.0);
  CHECK(vac.te == 0.0);
}

TEST_CASE("semispace Fresnel against the direct formula") {
  gen::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double eps = rng.log_uniform(1.0, 1e4);
    const double xi = rng.log_uniform(1e-3, 10.0);
    const double kp = rng.log_uniform(1e-4, 1.0);
    const double c = xi / constants::hbar_c_ev_nm;
    const double q = std::sqrt(kp * kp + c * c);
    const double k = std::sqrt(kp * kp + eps * c * c);
    const auto r = fresnel_semispace(eps, xi, kp);
    CHECK(r.tm == doctest::Approx((eps * q - k) / (eps * q + k)).epsilon(1e-10));
    CHECK(r.te == doctest::Approx((q - k) / (q + k)).epsilon(1e-8));
    CHECK(std::abs(r.tm) <= 1.0);
    CHECK(std::abs(r.te) <= 1.0);
  }
}

TEST_CASE("static Fresnel branches") {
  const auto dielectric = fresnel_semispace(StaticLimit{StaticKind::Finite, 4.289}, 0.01);
  CHECK(dielectric.tm == doctest::Approx(3.289 / 5.289).epsilon(1e-12));
  CHECK(dielectric.te == 0.0);
  const auto drude = fresnel_semispace(StaticLimit{StaticKind::Drude, 81.0 / 0.035}, 0.01);
  CHECK(drude.tm == 1.0);
  CHECK(drude.te == 0.0);
  const double kp = 0.01;
  const auto plasma = fresnel_semispace(StaticLimit{StaticKind::Plasma, 81.0}, kp);
  const double k = std::sqrt(kp * kp + 81.0 / (constants::hbar_c_ev_nm * constants::hbar_c_ev_nm));
  CHECK(plasma.tm == 1.0);
  CHECK(plasma.te == doctest::Approx((kp - k) / (kp + k)).epsilon(1e-12));
  CHECK(plasma.te < 0.0);
  const auto perfect = fresnel_semispace(StaticLimit{StaticKind::Perfect, 0.0}, kp);
  CHECK(perfect.tm == 1.0);
  CHECK(perfect.te == -1.0);
}

TEST_CASE("layered reflection limits") {
  const auto film = PermittivityModel::oscillator({25.0, 1.6, 4.8});
  const auto sub = PermittivityModel::ninham_parsegian(quartz);
  for (double xi : {0.15, 1.0, 5.0}) {
    for (double kp : {1e-3, 1e-2, 0.1}) {
      const auto thick = layered_reflection({au(), film, 1e6, sub}, xi, kp);
      const auto semi_film = fresnel_semispace(film.eps_imaginary_axis(xi), xi, kp);
      CHECK(thick.tm == doctest::Approx(semi_film.tm).epsilon(1e-12));
      CHECK(thick.te == doctest::Approx(semi_film.te).epsilon(1e-12));

      const auto thin = layered_reflection({au(), film, 1e-4, sub}, xi, kp);
      const auto semi_sub = fresnel_semispace(sub.eps_imaginary_axis(xi), xi, kp);
      CHECK(thin.tm == doctest::Approx(semi_sub.tm).epsilon(1e-4));
      CHECK(thin.te == doctest::Approx(semi_sub.te).epsilon(1e-4));
      const auto thinner = layered_reflection({au(), film, 1e-9, sub}, xi, kp);
      CHECK(thinner.tm == doctest::Approx(semi_sub.tm).epsilon(1e-9));
      CHECK(thinner.te == doctest::Approx(semi_sub.te).epsilon(1e-9));

      for (double d : {1.0, 74.6, 500.0}) {
        const auto same = layered_reflection({au(), sub, d, sub}, xi, kp);
        const auto semi = fresnel_semispace(sub.eps_imaginary_axis(xi), xi, kp);
        CHECK(same.tm == doctest::Approx(semi.tm).epsilon(1e-12));
        CHECK(same.te == doctest::Approx(semi.te).epsilon(1e-12));
        const auto r = layered_reflection({au(), film, d, sub}, xi, kp);
        CHECK(std::abs(r.tm) <= 1.0);
        CHECK(std::abs(r.te) <= 1.0);
      }
    }
  }
}

TEST_CASE("layered reflection at xi = 0 uses static classifications") {
  const auto ito = ito_like();
  const auto sub = PermittivityModel::ninham_parsegian(quartz);
  const auto r = layered_reflection({au(), ito, 74.6, sub}, 0.0, 0.01);
  CHECK(r.tm == 1.0);
  CHECK(r.te == doctest::Approx(0.0).epsilon(1e-15));
  const auto stripped = PermittivityModel::sum(
      {PermittivityModel::oscillator({25.0, 1.6, 4.8}), PermittivityModel::oscillator({158.8, 6.0, 8.6})});
  const double e = stripped.eps_imaginary_axis(0.0);
  const auto rd = layered_reflection({au(), stripped, 74.6, sub}, 0.0, 0.01);
  CHECK(rd.te == 0.0);
  CHECK(rd.tm > 0.0);
  CHECK(rd.tm < 1.0);
  const auto thick = layered_reflection({au(), stripped, 1e6, sub}, 0.0, 0.01);
  CHECK(thick.tm == doctest::Approx((e - 1.0) / (e + 1.0)).epsilon(1e-12));
}

TEST_CASE("ideal-metal force at T = 1 K") {
  ThermalConfig cfg;
  cfg.temperature_k = 1.0;
  cfg.l_max_cap = 200000;
  const LayerStack stack = halfspaces(PermittivityModel::ideal_metal(), PermittivityModel::ideal_metal());
  const double r = 101.2e3;
  const double a = 80.0;
  const double oracle =
      std::pow(M_PI, 3) * 197.3269804 * r / (360.0 * a * a * a) * 160.2176634;
  CHECK(oracle == doctest::Approx(538.2).epsilon(1e-3));
  const double f = casimir_force_pfa(stack, {}, cfg, a);
  CHECK(f < 0.0);
  CHECK(std::abs(f) == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("Au-Au Drude force at 80 nm") {
  const double f = casimir_force_pfa(halfspaces(au(), au()), {}, {}, 80.0);
  CHECK(f < 0.0);
  CHECK(std::abs(f) == doctest::Approx(269.0).epsilon(0.10));
}

TEST_CASE("force decays with an effective power between 2 and 4") {
  const std::vector<LayerStack> stacks{halfspaces(au(), au()), film_stack(ito_like()),
                                       film_stack(PermittivityModel::oscillator({25.0, 1.6, 4.8}))};
  for (const auto& stack : stacks) {
    ForceSolver solver(stack, {}, {});
    for (double a : {60.0, 90.0, 150.0}) {
      const double ratio = solver.force(2.0 * a) / solver.force(a);
      CHECK(ratio > 1.0 / 16.0);
      CHECK(ratio < 1.0 / 4.0);
    }
  }
}

TEST_CASE("force curve on 60..300 nm") {
  ForceSolver solver(film_stack(ito_like()), {}, {});
  std::vector<double> grid;
  for (int a = 60; a <= 300; ++a) grid.push_back(a);
  const auto curve = force_curve(solver, grid);
  REQUIRE(curve.size() == 241);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(std::abs(curve.force_pn[i]) < std::abs(curve.force_pn[i - 1]));
  }
  CHECK(force_curve(solver, {}).size() == 0);
  CHECK_THROWS_AS(force_curve(solver, {100.0, 90.0}), ValidationError);
}

TEST_CASE("carriers increase the force at every separation") {
  ForceSolver with(film_stack(ito_like()), {}, {});
  ForceSolver without(film_stack(strip_free_carriers(ito_like()).model), {}, {});
  for (double a = 60.0; a <= 300.0; a += 20.0) {
    CHECK(std::abs(with.force(a)) > std::abs(without.force(a)));
  }
}

TEST_CASE("property: each Matsubara term is non-positive") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const auto film = PermittivityModel::sum(
        {PermittivityModel::drude(gen::drude(rng)), PermittivityModel::oscillator(gen::oscillator(rng))});
    ForceSolver solver(film_stack(film), {}, {});
    const double a = rng.uniform(30.0, 500.0);
    for (int l = 0; l < 40; l += 3) CHECK(solver.matsubara_term(l, a) <= 0.0);
  }
}

TEST_CASE("property: doubling the Matsubara cutoff changes nothing") {
  ThermalConfig cfg;
  ForceSolver solver(film_stack(ito_like()), {}, cfg);
  for (double a : {60.0, 150.0}) {
    const auto result = solver.evaluate(a);
    double extended = 0.0;
    for (int l = 0; l < 2 * result.matsubara_terms; ++l) extended += solver.matsubara_term(l, a);
    CHECK(std::abs(extended - result.force_pn) <
          cfg.matsubara_rel_tol * std::abs(result.force_pn));
  }
}

TEST_CASE("property: a vacuum film reproduces two halfspaces") {
  gen::Rng rng(8);
  const auto sphere = au();
  const auto other = PermittivityModel::drude({7.0, 0.05});
  const double reference = casimir_force_pfa(halfspaces(sphere, other), {}, {}, 100.0);
  for (int i = 0; i < 3; ++i) {
    const double d = rng.log_uniform(1.0, 1000.0);
    const LayerStack gap{sphere, PermittivityModel(), d, other};
    const double shifted = casimir_force_pfa(halfspaces(sphere, other), {}, {}, 100.0 + d);
    CHECK(casimir_force_pfa(gap, {}, {}, 100.0) == doctest::Approx(shifted).epsilon(1e-5));
  }
  CHECK(casimir_force_pfa({sphere, other, 30.0, other}, {}, {}, 100.0) ==
        doctest::Approx(reference).epsilon(1e-9));
}

TEST_CASE("property: raising a layer's permittivity raises the force") {
  double previous = 0.0;
  for (double g : {0.0, 5.0, 20.0}) {
    std::vector<PermittivityModel> parts{ito_like()};
    if (g > 0.0) parts.push_back(PermittivityModel::oscillator({g, 2.0, 6.0}));
    const double f = std::abs(casimir_force_pfa(film_stack(PermittivityModel::sum(parts)), {}, {}, 100.0));
    CHECK(f > previous);
    previous = f;
  }
}

TEST_CASE("property: summation order does not matter") {
  ForceSolver solver(film_stack(ito_like()), {}, {});
  const double a = 80.0;
  const int n = solver.evaluate(a).matsubara_terms;
  std::vector<double> terms;
  for (int l = 0; l < n; ++l) terms.push_back(solver.matsubara_term(l, a));
  const double forward = std::accumulate(terms.begin(), terms.end(), 0.0);
  const double backward = std::accumulate(terms.rbegin(), terms.rend(), 0.0);
  CHECK(std::abs(forward - backward) <= 1e-8 * std::abs(forward));
}

TEST_CASE("truncation error carries the partial sum") {
  ThermalConfig cfg;
  cfg.l_max_cap = 5;
  try {
    casimir_force_pfa(halfspaces(au(), au()), {}, cfg, 80.0);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.terms() == 5);
    CHECK(e.partial_sum_pn() < 0.0);
    CHECK(e.tail_estimate_pn() < 0.0);
  }
}

TEST_CASE("domain and configuration checks") {
  ForceSolver solver(halfspaces(au(), au()), {}, {});
  CHECK_THROWS_AS(solver.force(5.0), DomainError);
  CHECK_THROWS_AS(solver.force(2500.0), DomainError);
  CHECK_THROWS_AS(solver.force(1500.0), DomainError);
  ForceSolver small(halfspaces(au(), au()), {5.0}, {});
  CHECK_THROWS_AS(small.force(60.0), DomainError);
  ThermalConfig bad;
  bad.temperature_k = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.matsubara_rel_tol = 1e-2;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(LayerStack({au(), au(), 0.0, au()}).validate(), ValidationError);
}

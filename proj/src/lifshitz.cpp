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

#include "lifshitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "constants.hpp"
#include "errors.hpp"

namespace casimir {

namespace {

// e^-42 < 1e-18: the y integral is cut there.
constexpr double y_window = 42.0;
constexpr int consecutive_small_terms = 3;
constexpr double infinity = std::numeric_limits<double>::infinity();

struct Medium {
  double eps;
  double kappa;
  bool perfect;
};

Medium medium_at(double eps, double q, double c2) {
  if (std::isinf(eps)) return {eps, infinity, true};
  return {eps, std::sqrt(q * q + (eps - 1.0) * c2), false};
}

Reflection interface(const Medium& a, const Medium& b, double c2) {
  if (b.perfect) return a.perfect ? Reflection{0.0, 0.0} : Reflection{1.0, -1.0};
  if (a.perfect) return {-1.0, 1.0};
  const double tm = (b.eps * a.kappa - a.eps * b.kappa) / (b.eps * a.kappa + a.eps * b.kappa);
  const double sum = a.kappa + b.kappa;
  return {tm, (a.eps - b.eps) * c2 / (sum * sum)};
}

double static_kappa(const StaticLimit& limit, double q) {
  if (limit.kind == StaticKind::Plasma) {
    const double k = limit.coefficient / (constants::hbar_c_ev_nm * constants::hbar_c_ev_nm);
    return std::sqrt(q * q + k);
  }
  return q;
}

Reflection static_interface(const StaticLimit& a, double ka, const StaticLimit& b, double kb) {
  if (a.kind == StaticKind::Perfect && b.kind == StaticKind::Perfect) return {0.0, 0.0};
  const int ra = static_rank(a.kind);
  const int rb = static_rank(b.kind);
  double tm;
  if (rb > ra) {
    tm = 1.0;
  } else if (ra > rb) {
    tm = -1.0;
  } else {
    const double rho = b.coefficient / a.coefficient;
    tm = (rho * ka - kb) / (rho * ka + kb);
  }
  double te;
  if (b.kind == StaticKind::Perfect) {
    te = -1.0;
  } else if (a.kind == StaticKind::Perfect) {
    te = 1.0;
  } else {
    te = (ka - kb) / (ka + kb);
  }
  return {tm, te};
}

constexpr StaticLimit vacuum_static{StaticKind::Finite, 1.0};

double airy(double r01, double r12, double e) { return (r01 + r12 * e) / (1.0 + r01 * r12 * e); }

Reflection combine(const Reflection& r01, const Reflection& r12, double e) {
  return {airy(r01.tm, r12.tm, e), airy(r01.te, r12.te, e)};
}

Reflection plate_dynamic(double eps_film, double eps_sub, double d, double q, double c2) {
  const Medium vac{1.0, q, false};
  const Medium film = medium_at(eps_film, q, c2);
  if (film.perfect) return {1.0, -1.0};
  const Medium sub = medium_at(eps_sub, q, c2);
  return combine(interface(vac, film, c2), interface(film, sub, c2),
                 std::exp(-2.0 * film.kappa * d));
}

Reflection plate_static(const StaticLimit& film, const StaticLimit& sub, double d, double q) {
  if (film.kind == StaticKind::Perfect) return {1.0, -1.0};
  const double kf = static_kappa(film, q);
  const double ks = static_kappa(sub, q);
  return combine(static_interface(vacuum_static, q, film, kf),
                 static_interface(film, kf, sub, ks), std::exp(-2.0 * kf * d));
}

double c_squared(double xi_ev) {
  const double k = xi_ev / constants::hbar_c_ev_nm;
  return k * k;
}

} // namespace

void LayerStack::validate() const {
  if (!(film_thickness_nm > 0.0)) {
    throw ValidationError(
        fmt::format("film thickness must be positive (got {} nm)", film_thickness_nm));
  }
}

void ThermalConfig::validate() const {
  if (!(temperature_k > 0.0) || !std::isfinite(temperature_k)) {
    throw ValidationError(fmt::format("temperature must be positive (got {} K)", temperature_k));
  }
  auto check_tol = [](double tol, const char* name) {
    if (!(tol > 0.0 && tol <= 1e-3)) {
      throw ValidationError(fmt::format("{} must lie in (0, 1e-3] (got {})", name, tol));
    }
  };
  check_tol(matsubara_rel_tol, "matsubara_rel_tol");
  check_tol(kperp_rel_tol, "kperp_rel_tol");
  if (l_max_cap < 1) {
    throw ValidationError(fmt::format("l_max_cap must be >= 1 (got {})", l_max_cap));
  }
}

void SphereGeometry::validate() const {
  if (!(radius_um > 0.0) || !std::isfinite(radius_um)) {
    throw ValidationError(fmt::format("sphere radius must be positive (got {} um)", radius_um));
  }
}

double SphereGeometry::radius_nm() const { return radius_um * constants::nm_per_um; }

double matsubara_frequency(double temperature_k, int l) {
  if (l < 0) throw ValidationError("Matsubara index must be >= 0");
  return 2.0 * constants::pi * constants::boltzmann_ev_per_k * temperature_k * l;
}

Reflection fresnel_semispace(double eps, double xi_ev, double k_perp) {
  if (!(xi_ev >= 0.0) || !(k_perp > 0.0)) {
    throw ValidationError("fresnel_semispace requires xi >= 0 and k_perp > 0");
  }
  const double c2 = c_squared(xi_ev);
  const double q = std::sqrt(k_perp * k_perp + c2);
  return interface({1.0, q, false}, medium_at(eps, q, c2), c2);
}

Reflection fresnel_semispace(const StaticLimit& limit, double k_perp) {
  if (!(k_perp > 0.0)) throw ValidationError("fresnel_semispace requires k_perp > 0");
  return static_interface(vacuum_static, k_perp, limit, static_kappa(limit, k_perp));
}

Reflection layered_reflection(const LayerStack& stack, double xi_ev, double k_perp) {
  stack.validate();
  if (!(xi_ev >= 0.0) || !(k_perp > 0.0)) {
    throw ValidationError("layered_reflection requires xi >= 0 and k_perp > 0");
  }
  if (xi_ev == 0.0) {
    return plate_static(stack.film.static_limit(), stack.substrate.static_limit(),
                        stack.film_thickness_nm, k_perp);
  }
  const double c2 = c_squared(xi_ev);
  const double q = std::sqrt(k_perp * k_perp + c2);
  return plate_dynamic(stack.film.eps_imaginary_axis(xi_ev),
                       stack.substrate.eps_imaginary_axis(xi_ev), stack.film_thickness_nm, q,
                       c2);
}

ForceSolver::ForceSolver(LayerStack stack, SphereGeometry geometry, ThermalConfig config)
    : stack_(std::move(stack)), geometry_(geometry), config_(config) {
  stack_.validate();
  geometry_.validate();
  config_.validate();
  static_ = {stack_.sphere.static_limit(), stack_.film.static_limit(),
             stack_.substrate.static_limit()};
  xi1_ev_ = matsubara_frequency(config_.temperature_k, 1);
  eps_cache_.push_back({0.0, 0.0, 0.0});
}

void ForceSolver::check_separation(double a_nm) const {
  if (!(a_nm >= min_separation_nm && a_nm <= max_separation_nm)) {
    throw DomainError(fmt::format("separation {} nm outside [{}, {}] nm", a_nm,
                                  min_separation_nm, max_separation_nm));
  }
  if (!(geometry_.radius_nm() / a_nm > min_radius_over_separation)) {
    throw DomainError(fmt::format(
        "proximity force approximation needs R/a > {} (R = {} um, a = {} nm)",
        min_radius_over_separation, geometry_.radius_um, a_nm));
  }
}

const std::array<double, 3>& ForceSolver::eps_at(int l) const {
  while (static_cast<int>(eps_cache_.size()) <= l) {
    const double xi = xi1_ev_ * static_cast<double>(eps_cache_.size());
    eps_cache_.push_back({stack_.sphere.eps_imaginary_axis(xi), stack_.film.eps_imaginary_axis(xi),
                          stack_.substrate.eps_imaginary_axis(xi)});
  }
  return eps_cache_[static_cast<std::size_t>(l)];
}

Reflection ForceSolver::sphere_reflection(int l, double q) const {
  if (l == 0) {
    return static_interface(vacuum_static, q, static_[0], static_kappa(static_[0], q));
  }
  const double c2 = c_squared(xi1_ev_ * l);
  return interface({1.0, q, false}, medium_at(eps_at(l)[0], q, c2), c2);
}

Reflection ForceSolver::plate_reflection(int l, double q) const {
  if (l == 0) return plate_static(static_[1], static_[2], stack_.film_thickness_nm, q);
  const auto& eps = eps_at(l);
  return plate_dynamic(eps[1], eps[2], stack_.film_thickness_nm, q, c_squared(xi1_ev_ * l));
}

double ForceSolver::matsubara_term(int l, double a_nm) const {
  if (l < 0) throw ValidationError("Matsubara index must be >= 0");
  check_separation(a_nm);
  const double y0 = 2.0 * a_nm * xi1_ev_ * l / constants::hbar_c_ev_nm;
  if (l > 0) eps_at(l);
  auto integrand = [&](double y) {
    const double q = y / (2.0 * a_nm);
    const Reflection rs = sphere_reflection(l, q);
    const Reflection rp = plate_reflection(l, q);
    const double e = std::exp(-y);
    return y * (std::log1p(-rs.tm * rp.tm * e) + std::log1p(-rs.te * rp.te * e));
  };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, y0, y0 + y_window, 15, config_.kperp_rel_tol);
  const double weight = l == 0 ? 0.5 : 1.0;
  const double prefactor = constants::boltzmann_ev_per_k * config_.temperature_k *
                           geometry_.radius_nm() / (4.0 * a_nm * a_nm);
  return weight * prefactor * integral * constants::ev_per_nm_in_pn;
}

PfaResult ForceSolver::evaluate(double a_nm) const {
  check_separation(a_nm);
  double sum = 0.0;
  double previous = 0.0;
  double before_previous = 0.0;
  int small = 0;
  for (int l = 0; l < config_.l_max_cap; ++l) {
    const double term = matsubara_term(l, a_nm);
    sum += term;
    if (l > 0 && std::abs(term) <= config_.matsubara_rel_tol * std::abs(sum)) {
      ++small;
    } else {
      small = 0;
    }
    if (small >= consecutive_small_terms) {
      double tail = 0.0;
      if (previous != 0.0) {
        const double ratio = term / previous;
        if (ratio > 0.0 && ratio < 1.0) tail = term * ratio / (1.0 - ratio);
      }
      return {sum + tail, l + 1, tail};
    }
    before_previous = previous;
    previous = term;
  }
  double tail = std::abs(previous) * config_.l_max_cap;
  if (before_previous != 0.0) {
    const double ratio = previous / before_previous;
    if (ratio > 0.0 && ratio < 1.0) tail = std::abs(previous) * ratio / (1.0 - ratio);
  }
  throw TruncationError(
      fmt::format("Matsubara sum not converged after {} terms at a = {} nm "
                  "(partial sum {:.6g} pN, last term {:.3g} pN)",
                  config_.l_max_cap, a_nm, sum, previous),
      sum, std::copysign(tail, sum), config_.l_max_cap);
}

double casimir_force_pfa(const LayerStack& stack, const SphereGeometry& geometry,
                         const ThermalConfig& config, double a_nm) {
  return ForceSolver(stack, geometry, config).force(a_nm);
}

ForceCurve force_curve(const ForceSolver& solver, const std::vector<double>& separations_nm) {
  if (!std::is_sorted(separations_nm.begin(), separations_nm.end())) {
    throw ValidationError("separations must be sorted ascending");
  }
  ForceCurve curve;
  curve.separation_nm = separations_nm;
  curve.force_pn.reserve(separations_nm.size());
  for (double a : separations_nm) curve.force_pn.push_back(solver.force(a));
  return curve;
}

ForceCurve force_curve(const LayerStack& stack, const SphereGeometry& geometry,
                       const ThermalConfig& config, const std::vector<double>& separations_nm) {
  return force_curve(ForceSolver(stack, geometry, config), separations_nm);
}

} // namespace casimir

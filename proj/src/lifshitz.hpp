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

#pragma once

#include <array>
#include <vector>

#include "spectra.hpp"

namespace casimir {

// Au sphere | vacuum gap | film of thickness d | substrate halfspace.
struct LayerStack {
  PermittivityModel sphere;
  PermittivityModel film;
  double film_thickness_nm = 0.0;
  PermittivityModel substrate;
  void validate() const;
};

struct ThermalConfig {
  double temperature_k = 275.0;
  double matsubara_rel_tol = 1e-6;
  double kperp_rel_tol = 1e-6;
  int l_max_cap = 5000;
  void validate() const;
};

struct SphereGeometry {
  double radius_um = 101.2;
  void validate() const;
  double radius_nm() const;
};

struct Reflection {
  double tm = 0.0;
  double te = 0.0;
};

// xi_l = 2 pi k_B T l in eV.
double matsubara_frequency(double temperature_k, int l);

// Vacuum onto a halfspace of permittivity eps at xi > 0. k_perp in 1/nm.
// eps = +inf gives the ideal-metal coefficients.
Reflection fresnel_semispace(double eps, double xi_ev, double k_perp);
// The xi = 0 branch, dispatched on the model's static classification.
Reflection fresnel_semispace(const StaticLimit& limit, double k_perp);

// Plate coefficients: vacuum | film(d) | substrate.
Reflection layered_reflection(const LayerStack& stack, double xi_ev, double k_perp);

struct PfaResult {
  double force_pn = 0.0;  // negative = attraction
  int matsubara_terms = 0;
  double tail_estimate_pn = 0.0;
};

// Sphere-plate force in the proximity force approximation. Caches eps(i xi_l)
// for the three materials, so reuse one solver for a whole curve. A solver is
// not safe for concurrent use.
class ForceSolver {
 public:
  static constexpr double min_separation_nm = 10.0;
  static constexpr double max_separation_nm = 2000.0;
  static constexpr double min_radius_over_separation = 100.0;

  ForceSolver(LayerStack stack, SphereGeometry geometry, ThermalConfig config);

  const LayerStack& stack() const { return stack_; }
  const SphereGeometry& geometry() const { return geometry_; }
  const ThermalConfig& config() const { return config_; }

  PfaResult evaluate(double a_nm) const;
  double force(double a_nm) const { return evaluate(a_nm).force_pn; }

  // Contribution of Matsubara index l (primed weight included), pN.
  double matsubara_term(int l, double a_nm) const;

 private:
  void check_separation(double a_nm) const;
  const std::array<double, 3>& eps_at(int l) const;
  Reflection sphere_reflection(int l, double q) const;
  Reflection plate_reflection(int l, double q) const;

  LayerStack stack_;
  SphereGeometry geometry_;
  ThermalConfig config_;
  std::array<StaticLimit, 3> static_;
  double xi1_ev_;
  mutable std::vector<std::array<double, 3>> eps_cache_;
};

double casimir_force_pfa(const LayerStack& stack, const SphereGeometry& geometry,
                         const ThermalConfig& config, double a_nm);

struct ForceCurve {
  std::vector<double> separation_nm;
  std::vector<double> force_pn;
  std::size_t size() const { return separation_nm.size(); }
};

// Separations must be sorted ascending.
ForceCurve force_curve(const ForceSolver& solver, const std::vector<double>& separations_nm);
ForceCurve force_curve(const LayerStack& stack, const SphereGeometry& geometry,
                       const ThermalConfig& config, const std::vector<double>& separations_nm);

} // namespace casimir

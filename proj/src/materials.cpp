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

#include "materials.hpp"

#include <cmath>

#include <fmt/format.h>

#include "errors.hpp"

namespace casimir::materials {

const char* to_string(Sample s) { return s == Sample::Untreated ? "untreated" : "uv"; }

const char* to_string(Extrapolation e) { return e == Extrapolation::Upper ? "upper" : "lower"; }

const char* to_string(Carriers c) {
  switch (c) {
    case Carriers::Drude: return "drude";
    case Carriers::Plasma: return "plasma";
    case Carriers::Excluded: return "excluded";
  }
  return "?";
}

Sample parse_sample(const std::string& text) {
  if (text == "untreated") return Sample::Untreated;
  if (text == "uv" || text == "uv-treated" || text == "uv_treated") return Sample::UvTreated;
  throw ValidationError(fmt::format("unknown sample '{}' (expected untreated or uv)", text));
}

Carriers parse_carriers(const std::string& text) {
  if (text == "drude" || text == "included") return Carriers::Drude;
  if (text == "plasma") return Carriers::Plasma;
  if (text == "excluded" || text == "stripped" || text == "none") return Carriers::Excluded;
  throw ValidationError(
      fmt::format("unknown carrier treatment '{}' (expected drude, plasma or excluded)", text));
}

DrudeParams ito_drude(Sample s) {
  return s == Sample::Untreated ? DrudeParams{1.5, 0.128} : DrudeParams{1.5, 0.132};
}

OscillatorParams ito_tail(Sample s, Extrapolation e) {
  if (s == Sample::Untreated) {
    return e == Extrapolation::Upper ? OscillatorParams{240.54, 8.5, 9.0}
                                     : OscillatorParams{111.52, 4.0, 8.0};
  }
  return e == Extrapolation::Upper ? OscillatorParams{280.28, 9.2, 9.8}
                                   : OscillatorParams{128.28, 4.5, 8.8};
}

std::vector<OscillatorParams> ito_core_oscillators(Sample s) {
  // The broad 8.6 eV band is sized so the table meets both tails at 8.27 eV.
  if (s == Sample::Untreated) {
    return {{25.0, 1.6, 4.8}, {0.6, 0.6, 3.0}, {158.8, 6.0, 8.6}};
  }
  return {{25.0, 1.6, 4.8}, {156.1, 6.0, 8.6}};
}

std::vector<SpectrumPoint> ito_core_points_table(Sample s) {
  const auto oscillators = ito_core_oscillators(s);
  std::vector<SpectrumPoint> points;
  const double ratio = ito_core_omega_max_ev / ito_core_omega_min_ev;
  for (int i = 0; i < ito_core_points; ++i) {
    const double w = (i == ito_core_points - 1)
                         ? ito_core_omega_max_ev
                         : ito_core_omega_min_ev *
                               std::pow(ratio, static_cast<double>(i) / (ito_core_points - 1));
    double v = 0.0;
    for (const auto& o : oscillators) v += casimir::im_eps(o, w);
    points.push_back({w, v});
  }
  return points;
}

TabulatedSpectrum ito_core(Sample s, Extrapolation e) {
  return TabulatedSpectrum(ito_core_points_table(s), std::nullopt, ito_tail(s, e));
}

PermittivityModel gold(Carriers c) {
  switch (c) {
    case Carriers::Drude: return PermittivityModel::drude(gold_drude);
    case Carriers::Plasma: return PermittivityModel::plasma(gold_plasma);
    case Carriers::Excluded: break;
  }
  throw ValidationError("gold without free carriers is not a supported material");
}

PermittivityModel quartz() { return PermittivityModel::ninham_parsegian(quartz_params); }

PermittivityModel ito(Sample s, Extrapolation e, Carriers c) {
  auto core = PermittivityModel::tabulated(ito_core(s, e));
  switch (c) {
    case Carriers::Drude: return PermittivityModel::sum({PermittivityModel::drude(ito_drude(s)), core});
    case Carriers::Plasma:
      return PermittivityModel::sum({PermittivityModel::plasma(ito_longitudinal_plasma), core});
    case Carriers::Excluded: return core;
  }
  return core;
}

LayerStack ito_stack(Sample s, Extrapolation e, Carriers c) {
  const Carriers sphere = c == Carriers::Plasma ? Carriers::Plasma : Carriers::Drude;
  return {gold(sphere), ito(s, e, c), film_thickness_nm, quartz()};
}

RoughnessDistribution ito_roughness() {
  return synthetic_distribution(ito_roughness_bins, ito_zero_level_nm, ito_rms_nm);
}

RoughnessDistribution gold_roughness() {
  return synthetic_distribution(gold_roughness_bins, gold_zero_level_nm, gold_rms_nm);
}

} // namespace casimir::materials

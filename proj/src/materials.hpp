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

#include <string>
#include <vector>

#include "lifshitz.hpp"
#include "roughness.hpp"
#include "spectra.hpp"

// Built-in materials and sample parameters. The ITO core spectra are
// synthetic stand-ins for the unpublished ellipsometry tables.
namespace casimir::materials {

enum class Sample { Untreated, UvTreated };
enum class Extrapolation { Upper, Lower };
enum class Carriers { Drude, Plasma, Excluded };

const char* to_string(Sample s);
const char* to_string(Extrapolation e);
const char* to_string(Carriers c);
Sample parse_sample(const std::string& text);
Carriers parse_carriers(const std::string& text);

inline constexpr double sphere_radius_um = 101.2;
inline constexpr double film_thickness_nm = 74.6;
inline constexpr double temperature_k = 275.0;

inline constexpr DrudeParams gold_drude{9.0, 0.035};
inline constexpr PlasmaParams gold_plasma{9.0};
inline constexpr NinhamParsegianParams quartz_params{1.93, 1.359, 0.1378, 13.38};
inline constexpr PlasmaParams ito_longitudinal_plasma{1.3};

DrudeParams ito_drude(Sample s);
OscillatorParams ito_tail(Sample s, Extrapolation e);

inline constexpr double ito_core_omega_min_ev = 0.04;
inline constexpr double ito_core_omega_max_ev = 8.27;
inline constexpr int ito_core_points = 300;

// Oscillators whose sum forms the synthetic core (interband) Im eps.
std::vector<OscillatorParams> ito_core_oscillators(Sample s);
std::vector<SpectrumPoint> ito_core_points_table(Sample s);
TabulatedSpectrum ito_core(Sample s, Extrapolation e);

PermittivityModel gold(Carriers c = Carriers::Drude);
PermittivityModel quartz();
PermittivityModel ito(Sample s, Extrapolation e, Carriers c);

LayerStack ito_stack(Sample s, Extrapolation e, Carriers c);

inline constexpr int ito_roughness_bins = 18;
inline constexpr double ito_zero_level_nm = 9.54;
inline constexpr double ito_rms_nm = 2.28;
inline constexpr int gold_roughness_bins = 25;
inline constexpr double gold_zero_level_nm = 11.51;
inline constexpr double gold_rms_nm = 3.17;

RoughnessDistribution ito_roughness();
RoughnessDistribution gold_roughness();

} // namespace casimir::materials

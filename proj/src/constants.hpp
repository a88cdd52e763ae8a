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

// Unit system used throughout: energies and frequencies in eV, lengths in nm,
// forces in pN, temperature in K, voltages in V unless a name says otherwise.

namespace casimir::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double hbar_c_ev_nm = 197.3269804;
inline constexpr double boltzmann_ev_per_k = 8.6173333e-5;

// 1 eV/nm expressed in pN.
inline constexpr double ev_per_nm_in_pn = 160.2176634;

// Vacuum permittivity. N/V^2 is the SI unit of F/m, so in pN/V^2 it is
// 8.8541878128e-12 * 1e12.
inline constexpr double epsilon0_pn_per_v2 = 8.8541878128;

inline constexpr double nm_per_um = 1000.0;

} // namespace casimir::constants

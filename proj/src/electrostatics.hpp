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

namespace casimir {

enum class KernelKind { Exact, Polynomial };

// c_-1 ... c_6 of the polynomial sphere-plate kernel.
inline constexpr std::array<double, 8> x_kernel_coefficients{
    0.5, -1.18260, 22.2375, -571.366, 9592.45, -90200.5, 383084.0, -300357.0};
inline constexpr double x_kernel_poly_max_ratio = 0.02;

// X(a) in pN/V^2 (negative): F_el = X(a) (V - V0)^2.
double x_kernel_exact(double a_nm, double radius_um);
// Same, also reporting how many series terms were summed.
double x_kernel_exact(double a_nm, double radius_um, int& terms_used);
// Requires a/R < 0.02.
double x_kernel_poly(double a_nm, double radius_um);
// dX/da of the polynomial form, pN/(V^2 nm).
double x_kernel_poly_derivative(double a_nm, double radius_um);
double x_kernel(KernelKind kind, double a_nm, double radius_um);

// Voltages in mV, force in pN.
double electrostatic_force(double a_nm, double radius_um, double v_mv, double v0_mv,
                           KernelKind kind = KernelKind::Exact);

} // namespace casimir

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

#include "electrostatics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "constants.hpp"
#include "errors.hpp"

namespace casimir {

namespace {

constexpr double series_rel_tol = 1e-10;
constexpr int series_max_terms = 10'000'000;
// Beyond this n*alpha the hyperbolic functions are replaced by exponentials.
constexpr double asymptotic_threshold = 30.0;

void check_inputs(double a_nm, double radius_um) {
  if (!(a_nm > 0.0) || !std::isfinite(a_nm)) {
    throw ValidationError(fmt::format("separation must be positive (got {} nm)", a_nm));
  }
  if (!(radius_um > 0.0) || !std::isfinite(radius_um)) {
    throw ValidationError(fmt::format("sphere radius must be positive (got {} um)", radius_um));
  }
}

} // namespace

double x_kernel_exact(double a_nm, double radius_um, int& terms_used) {
  check_inputs(a_nm, radius_um);
  const double x = a_nm / (radius_um * constants::nm_per_um);
  const double alpha = std::log1p(x + std::sqrt(x * (x + 2.0)));
  const double coth_alpha = 1.0 / std::tanh(alpha);
  const double decay = std::exp(-alpha);
  double sum = 0.0;
  for (int n = 2; n <= series_max_terms; ++n) {
    const double na = n * alpha;
    double term;
    if (na < asymptotic_threshold) {
      term = (coth_alpha - n / std::tanh(na)) / std::sinh(na);
    } else {
      term = 2.0 * (coth_alpha - n) * std::exp(-na);
    }
    sum += term;
    // Terms fall off roughly geometrically with ratio e^-alpha.
    const double tail = std::abs(term) * decay / (1.0 - decay);
    if (tail <= series_rel_tol * std::abs(sum)) {
      terms_used = n;
      return 2.0 * constants::pi * constants::epsilon0_pn_per_v2 * sum;
    }
  }
  throw NumericalError(fmt::format("electrostatic series did not converge at a = {} nm", a_nm));
}

double x_kernel_exact(double a_nm, double radius_um) {
  int terms = 0;
  return x_kernel_exact(a_nm, radius_um, terms);
}

double x_kernel_poly(double a_nm, double radius_um) {
  check_inputs(a_nm, radius_um);
  const double x = a_nm / (radius_um * constants::nm_per_um);
  if (!(x < x_kernel_poly_max_ratio)) {
    throw DomainError(fmt::format(
        "polynomial kernel valid for a/R < {} (got a/R = {:.4g})", x_kernel_poly_max_ratio, x));
  }
  double sum = 0.0;
  for (int i = 7; i >= 0; --i) sum = sum * x + x_kernel_coefficients[static_cast<std::size_t>(i)];
  return -2.0 * constants::pi * constants::epsilon0_pn_per_v2 * sum / x;
}

double x_kernel_poly_derivative(double a_nm, double radius_um) {
  check_inputs(a_nm, radius_um);
  const double r_nm = radius_um * constants::nm_per_um;
  const double x = a_nm / r_nm;
  if (!(x < x_kernel_poly_max_ratio)) {
    throw DomainError(fmt::format(
        "polynomial kernel valid for a/R < {} (got a/R = {:.4g})", x_kernel_poly_max_ratio, x));
  }
  double sum = 0.0;
  for (int i = 7; i >= 0; --i) {
    const int power = i - 1;
    sum += power * x_kernel_coefficients[static_cast<std::size_t>(i)] * std::pow(x, power - 1);
  }
  return -2.0 * constants::pi * constants::epsilon0_pn_per_v2 * sum / r_nm;
}

double x_kernel(KernelKind kind, double a_nm, double radius_um) {
  return kind == KernelKind::Exact ? x_kernel_exact(a_nm, radius_um)
                                   : x_kernel_poly(a_nm, radius_um);
}

double electrostatic_force(double a_nm, double radius_um, double v_mv, double v0_mv,
                           KernelKind kind) {
  const double u = (v_mv - v0_mv) * 1e-3;
  if (u == 0.0) {
    check_inputs(a_nm, radius_um);
    return 0.0;
  }
  return x_kernel(kind, a_nm, radius_um) * u * u;
}

} // namespace casimir

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

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "constants.hpp"
#include "errors.hpp"
#include "spectra.hpp"
#include "table_io.hpp"

namespace casimir {

namespace {

// A boundary value below this fraction of the table maximum is treated as
// zero when the matching tail is absent.
constexpr double boundary_negligible_fraction = 1e-2;

constexpr int romberg_max_level = 20;

double relative_mismatch(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Int_0^b dw / ((w^2 + g^2)(w^2 + x^2)) for g, x > 0.
double lorentzian_product_integral(double b, double g, double x) {
  auto f = [b](double s) { return std::atan(b / s) / s; };
  if (std::abs(x - g) < 1e-4 * g) {
    const double m = 0.5 * (x + g);
    const double df = -std::atan(b / m) / (m * m) - b / (m * (m * m + b * b));
    return -df / (2.0 * m);
  }
  return (f(g) - f(x)) / (x * x - g * g);
}

} // namespace

TabulatedSpectrum::TabulatedSpectrum(std::vector<SpectrumPoint> points,
                                     std::optional<DrudeParams> low_tail,
                                     std::optional<OscillatorParams> high_tail,
                                     double mismatch_tolerance)
    : points_(std::move(points)),
      low_tail_(low_tail),
      high_tail_(high_tail),
      mismatch_tolerance_(mismatch_tolerance) {
  if (points_.size() < 2) {
    throw ValidationError("a tabulated spectrum needs at least two points");
  }
  if (!(mismatch_tolerance_ > 0.0)) {
    throw ValidationError("tail mismatch tolerance must be positive");
  }
  log_omega_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.omega_ev > 0.0) || !std::isfinite(p.omega_ev)) {
      throw ValidationError(fmt::format("spectrum point {}: omega must be positive", i));
    }
    if (!(p.im_eps >= 0.0) || !std::isfinite(p.im_eps)) {
      throw ValidationError(fmt::format("spectrum point {}: Im eps must be >= 0", i));
    }
    if (i > 0 && !(p.omega_ev > points_[i - 1].omega_ev)) {
      throw ValidationError(
          fmt::format("spectrum point {}: omega must be strictly increasing", i));
    }
    log_omega_.push_back(std::log(p.omega_ev));
    max_im_eps_ = std::max(max_im_eps_, p.im_eps);
  }
  if (low_tail_) {
    low_tail_->validate();
    const double tail = casimir::im_eps(*low_tail_, omega_min());
    if (relative_mismatch(tail, points_.front().im_eps) > mismatch_tolerance_) {
      throw ValidationError(fmt::format(
          "low-frequency Drude tail gives Im eps={:.6g} at {:g} eV but the table has {:.6g}",
          tail, omega_min(), points_.front().im_eps));
    }
  }
  if (high_tail_) {
    high_tail_->validate();
    const double tail = casimir::im_eps(*high_tail_, omega_max());
    if (relative_mismatch(tail, points_.back().im_eps) > mismatch_tolerance_) {
      throw ValidationError(fmt::format(
          "high-frequency oscillator tail gives Im eps={:.6g} at {:g} eV but the table has "
          "{:.6g}",
          tail, omega_max(), points_.back().im_eps));
    }
  }
}

bool TabulatedSpectrum::negligible(double value) const {
  return value <= boundary_negligible_fraction * max_im_eps_;
}

double TabulatedSpectrum::table_value(double omega_ev) const {
  const double u = std::log(omega_ev);
  auto it = std::upper_bound(log_omega_.begin(), log_omega_.end(), u);
  if (it == log_omega_.begin()) return points_.front().im_eps;
  if (it == log_omega_.end()) return points_.back().im_eps;
  const std::size_t hi = static_cast<std::size_t>(it - log_omega_.begin());
  const std::size_t lo = hi - 1;
  const double w = (u - log_omega_[lo]) / (log_omega_[hi] - log_omega_[lo]);
  return points_[lo].im_eps + w * (points_[hi].im_eps - points_[lo].im_eps);
}

double TabulatedSpectrum::im_eps(double omega_ev) const {
  if (!(omega_ev > 0.0)) {
    throw ValidationError("Im eps requires omega > 0");
  }
  if (omega_ev < omega_min()) {
    if (low_tail_) return casimir::im_eps(*low_tail_, omega_ev);
    return points_.front().im_eps * omega_ev / omega_min();
  }
  if (omega_ev > omega_max()) {
    if (high_tail_) return casimir::im_eps(*high_tail_, omega_ev);
    if (negligible(points_.back().im_eps)) return 0.0;
    throw IncompleteSpectrumError(fmt::format(
        "no high-frequency tail and Im eps={:g} at the table end", points_.back().im_eps));
  }
  return table_value(omega_ev);
}

double TabulatedSpectrum::low_tail_integral(double xi_ev) const {
  const double b = omega_min();
  if (low_tail_) {
    const double wp2 = low_tail_->plasma_frequency_ev * low_tail_->plasma_frequency_ev;
    const double g = low_tail_->relaxation_ev;
    if (xi_ev == 0.0) {
      throw DivergentStaticPermittivity(
          "divergent static permittivity (tabulated spectrum with Drude tail)");
    }
    if (g == 0.0) return 0.5 * constants::pi * wp2 / (xi_ev * xi_ev);
    return wp2 * g * lorentzian_product_integral(b, g, xi_ev);
  }
  const double v0 = points_.front().im_eps;
  if (!negligible(v0)) {
    throw IncompleteSpectrumError(fmt::format(
        "no low-frequency tail but Im eps={:g} at {:g} eV is not negligible", v0, b));
  }
  const double c = v0 / b;
  if (xi_ev == 0.0) return c * b;
  return c * (b - xi_ev * std::atan(b / xi_ev));
}

double TabulatedSpectrum::high_tail_integral(double xi_ev) const {
  const double b = omega_max();
  if (!high_tail_) {
    if (negligible(points_.back().im_eps)) return 0.0;
    throw IncompleteSpectrumError(fmt::format(
        "no high-frequency tail and Im eps={:g} at {:g} eV is not negligible",
        points_.back().im_eps, b));
  }
  const OscillatorParams tail = *high_tail_;
  // w = b/t maps [b, inf) onto (0, 1]; the integrand vanishes like t^2.
  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double w = b / t;
    return w * casimir::im_eps(tail, w) / (w * w + xi_ev * xi_ev) * b / (t * t);
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0,
                                                                      15, 1e-12);
}

// Trapezoid on log-spaced nodes with Richardson (Romberg) refinement.
double TabulatedSpectrum::table_integral(double xi_ev) const {
  const double u0 = log_omega_.front();
  const double u1 = log_omega_.back();
  const double xi2 = xi_ev * xi_ev;
  auto f = [&](double u) {
    const double w = std::exp(u);
    const double w2 = w * w;
    return w2 * table_value(w) / (w2 + xi2);
  };

  const int min_level =
      std::max(5, static_cast<int>(std::ceil(std::log2(static_cast<double>(points_.size())))));
  std::vector<double> prev_row{0.5 * (u1 - u0) * (f(u0) + f(u1))};
  double trapezoid = prev_row[0];
  for (int level = 1; level <= romberg_max_level; ++level) {
    const std::size_t intervals = std::size_t{1} << level;
    const double h = (u1 - u0) / static_cast<double>(intervals);
    double midsum = 0.0;
    for (std::size_t i = 1; i < intervals; i += 2) {
      midsum += f(u0 + h * static_cast<double>(i));
    }
    trapezoid = 0.5 * trapezoid + h * midsum;
    std::vector<double> row{trapezoid};
    row.reserve(static_cast<std::size_t>(level) + 1);
    double factor = 4.0;
    for (int j = 1; j <= level; ++j) {
      row.push_back(row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (factor - 1.0));
      factor *= 4.0;
    }
    if (level >= min_level) {
      const double diff = std::abs(row.back() - prev_row.back());
      if (diff <= kk_relative_tolerance * std::abs(row.back()) || row.back() == 0.0) {
        return row.back();
      }
    }
    prev_row = std::move(row);
  }
  throw NumericalError(fmt::format(
      "Kramers-Kronig quadrature did not converge at xi={:g} eV", xi_ev));
}

double TabulatedSpectrum::kramers_kronig(double xi_ev) const {
  if (!(xi_ev >= 0.0)) {
    throw ValidationError("Kramers-Kronig evaluation requires xi >= 0");
  }
  const double integral =
      low_tail_integral(xi_ev) + table_integral(xi_ev) + high_tail_integral(xi_ev);
  return 1.0 + 2.0 / constants::pi * integral;
}

TabulatedSpectrum TabulatedSpectrum::without_carriers() const {
  if (!low_tail_) return *this;
  std::vector<SpectrumPoint> stripped;
  stripped.reserve(points_.size());
  for (const auto& p : points_) {
    stripped.push_back({p.omega_ev, std::max(0.0, p.im_eps - casimir::im_eps(*low_tail_, p.omega_ev))});
  }
  return TabulatedSpectrum(std::move(stripped), std::nullopt, high_tail_, mismatch_tolerance_);
}

std::vector<SpectrumPoint> read_spectrum(std::istream& in) {
  std::vector<SpectrumPoint> points;
  for (const auto& row : read_table(in, 2, "spectrum")) points.push_back({row[0], row[1]});
  return points;
}

std::vector<SpectrumPoint> load_spectrum_file(const std::string& path) {
  std::vector<SpectrumPoint> points;
  for (const auto& row : load_table_file(path, 2, "spectrum")) points.push_back({row[0], row[1]});
  return points;
}

void write_spectrum(std::ostream& out, const std::vector<SpectrumPoint>& points,
                    const std::string& comment) {
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  out << "# omega_eV, im_eps\n";
  for (const auto& p : points) {
    out << fmt::format("{:.10g}, {:.10g}\n", p.omega_ev, p.im_eps);
  }
}

} // namespace casimir

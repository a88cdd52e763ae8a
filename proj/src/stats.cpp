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

#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "electrostatics.hpp"
#include "errors.hpp"
#include "paper_data.hpp"

namespace casimir {

namespace {

double hypot_all(double first, const std::vector<double>& rest) {
  double s = first * first;
  for (double x : rest) s += x * x;
  return std::sqrt(s);
}

void check_nonnegative(double x, const char* what) {
  if (!(std::isfinite(x) && x >= 0.0)) {
    throw ValidationError(fmt::format("{} must be finite and non-negative, got {}", what, x));
  }
}

struct Moments {
  double mean = 0.0;
  double sum_squares = 0.0;
};

// Shifted by the first sample so identical samples give exactly zero spread.
Moments moments(const std::vector<double>& x) {
  const double shift = x.front();
  double sum = 0.0;
  for (double v : x) sum += v - shift;
  const double d_mean = sum / static_cast<double>(x.size());
  Moments m;
  m.mean = shift + d_mean;
  for (double v : x) m.sum_squares += (v - shift - d_mean) * (v - shift - d_mean);
  return m;
}

void check_confidence(double c) {
  if (!(c > 0.0 && c < 1.0)) throw ValidationError("confidence must lie in (0, 1)");
}

} // namespace

double student_coefficient(int samples, double confidence, StudentCoefficient kind) {
  if (samples < 2) throw ValidationError("variance is undefined for fewer than 2 samples");
  check_confidence(confidence);
  const boost::math::students_t dist(static_cast<double>(samples - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - confidence) / 2.0));
  return kind == StudentCoefficient::Rounded ? std::round(t * 10.0) / 10.0 : t;
}

RandomError random_error(const std::vector<double>& samples_pn, double confidence,
                         StudentCoefficient kind) {
  const auto n = samples_pn.size();
  if (n < 2) throw ValidationError("variance is undefined for fewer than 2 samples");
  for (double x : samples_pn) {
    if (!std::isfinite(x)) throw ValidationError("force samples must be finite");
  }
  RandomError out;
  out.samples = static_cast<int>(n);
  const auto m = moments(samples_pn);
  out.mean_pn = m.mean;
  out.sigma_mean_pn = std::sqrt(m.sum_squares / static_cast<double>(n - 1) / static_cast<double>(n));
  out.coefficient = student_coefficient(out.samples, confidence, kind);
  out.delta_pn = out.coefficient * out.sigma_mean_pn;
  return out;
}

double random_error_from_sigma(double sigma_mean_pn, int samples, double confidence,
                               StudentCoefficient kind) {
  check_nonnegative(sigma_mean_pn, "sigma");
  return student_coefficient(samples, confidence, kind) * sigma_mean_pn;
}

CombinedError combine_errors(double random_pn, const std::vector<double>& systematic_pn) {
  check_nonnegative(random_pn, "random error");
  for (double s : systematic_pn) check_nonnegative(s, "systematic error");
  CombinedError out;
  out.systematic_pn = hypot_all(0.0, systematic_pn);
  out.total_pn = std::hypot(random_pn, out.systematic_pn);
  return out;
}

double SystematicFloor::operator()(double a_nm) const {
  if (!(std::isfinite(a_nm) && a_nm > 0.0)) throw ValidationError("separation must be positive");
  return constant_pn + short_range_pn * std::pow(reference_nm / a_nm, exponent);
}

void SystematicFloor::validate() const {
  check_nonnegative(constant_pn, "floor constant");
  check_nonnegative(short_range_pn, "floor short-range amplitude");
  if (!std::isfinite(exponent)) throw ValidationError("floor exponent must be finite");
  if (!(reference_nm > 0.0)) throw ValidationError("floor reference separation must be positive");
}

double electric_systematic(double a_nm, double radius_um, double delta_a_nm,
                           const std::vector<double>& voltages_mv, double v0_mv) {
  check_nonnegative(delta_a_nm, "separation error");
  if (voltages_mv.empty()) throw ValidationError("no applied voltages");
  const double slope = std::abs(x_kernel_poly_derivative(a_nm, radius_um));
  double sum = 0.0;
  for (double v : voltages_mv) {
    const double u = (v - v0_mv) * 1e-3;
    sum += slope * u * u * delta_a_nm;
  }
  return sum / static_cast<double>(voltages_mv.size());
}

std::vector<double> applied_voltages(double lo_mv, double hi_mv, int n) {
  if (n < 2 || !(hi_mv > lo_mv)) throw ValidationError("need n >= 2 voltages with hi > lo");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo_mv + (hi_mv - lo_mv) * i / (n - 1));
  return out;
}

void ErrorBudget::validate() const {
  const auto n = separation_nm.size();
  if (random_pn.size() != n || systematic_total_pn.size() != n ||
      systematic_electric_pn.size() != n || systematic_pn.size() != n || total_pn.size() != n) {
    throw ValidationError("error budget columns differ in length");
  }
  check_confidence(confidence);
}

ErrorBudget error_budget(const std::vector<double>& separations_nm, const BudgetInputs& inputs,
                         const SystematicFloor& floor) {
  floor.validate();
  check_nonnegative(inputs.random_pn, "random error");
  ErrorBudget b;
  for (double a : separations_nm) {
    const double st = floor(a);
    const double el = electric_systematic(a, inputs.radius_um, inputs.delta_a_nm,
                                          inputs.voltages_mv, inputs.v0_mv);
    const auto c = combine_errors(inputs.random_pn, {st, el});
    b.separation_nm.push_back(a);
    b.random_pn.push_back(inputs.random_pn);
    b.systematic_total_pn.push_back(st);
    b.systematic_electric_pn.push_back(el);
    b.systematic_pn.push_back(c.systematic_pn);
    b.total_pn.push_back(c.total_pn);
  }
  return b;
}

FloorFit fit_systematic_floor(const std::vector<double>& separations_nm,
                              const std::vector<double>& total_pn, const BudgetInputs& inputs) {
  const auto n = separations_nm.size();
  if (n < 3 || total_pn.size() != n) {
    throw ValidationError("floor fit needs at least 3 matching (a, total) rows");
  }
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double el = electric_systematic(separations_nm[i], inputs.radius_um, inputs.delta_a_nm,
                                          inputs.voltages_mv, inputs.v0_mv);
    const double s2 = total_pn[i] * total_pn[i] - inputs.random_pn * inputs.random_pn - el * el;
    if (!(s2 > 0.0)) {
      throw FitError(fmt::format("total {} pN at {} nm leaves no room for a floor", total_pn[i],
                                 separations_nm[i]));
    }
    target[i] = std::sqrt(s2);
  }
  const double ref = *std::min_element(separations_nm.begin(), separations_nm.end());

  // A and B by non-negative linear least squares for fixed p.
  auto linear = [&](double p) {
    SystematicFloor f;
    f.reference_nm = ref;
    f.exponent = p;
    double s1 = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = std::pow(ref / separations_nm[i], p);
      s1 += 1.0;
      sx += x;
      sxx += x * x;
      sy += target[i];
      sxy += x * target[i];
    }
    const double det = s1 * sxx - sx * sx;
    f.constant_pn = (sxx * sy - sx * sxy) / det;
    f.short_range_pn = (s1 * sxy - sx * sy) / det;
    if (f.constant_pn < 0.0) {
      f.constant_pn = 0.0;
      f.short_range_pn = sxy / sxx;
    } else if (f.short_range_pn < 0.0) {
      f.short_range_pn = 0.0;
      f.constant_pn = sy / s1;
    }
    return f;
  };
  auto deviations = [&](const SystematicFloor& f) {
    const auto b = error_budget(separations_nm, inputs, f);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = b.total_pn[i] - total_pn[i];
    return d;
  };
  auto cost = [&](double p) {
    double c = 0.0;
    for (double d : deviations(linear(p))) c += d * d;
    return c;
  };
  const auto best = boost::math::tools::brent_find_minima(cost, 0.1, 8.0, 40);
  FloorFit out;
  out.floor = linear(best.first);
  for (double d : deviations(out.floor)) {
    out.max_deviation_pn = std::max(out.max_deviation_pn, std::abs(d));
  }
  return out;
}

BudgetInputs paper_budget_inputs(materials::Sample s) {
  const auto& paper = load_paper_table();
  const auto& ps = paper.sample(s);
  BudgetInputs in;
  in.random_pn = ps.random_error_pn;
  in.radius_um = paper.radius_um;
  in.delta_a_nm = ps.delta_a_nm;
  in.v0_mv = ps.calibration.v0_mv;
  in.voltages_mv = applied_voltages(ps.voltage_lo_mv, ps.voltage_hi_mv);
  return in;
}

FloorFit paper_systematic_floor(materials::Sample s) {
  const auto& paper = load_paper_table();
  return fit_systematic_floor(paper.separations_nm(), paper.total_error_pn(s),
                              paper_budget_inputs(s));
}

std::vector<RelativeErrorRow> relative_error_report(const std::vector<double>& separations_nm,
                                                    const std::vector<double>& force_pn,
                                                    const ErrorBudget& budget) {
  budget.validate();
  if (separations_nm.size() != force_pn.size() || separations_nm != budget.separation_nm) {
    throw ValidationError("force curve and error budget are on different grids");
  }
  std::vector<RelativeErrorRow> rows;
  for (std::size_t i = 0; i < force_pn.size(); ++i) {
    RelativeErrorRow r;
    r.separation_nm = separations_nm[i];
    r.force_pn = force_pn[i];
    r.total_pn = budget.total_pn[i];
    if (force_pn[i] == 0.0) {
      r.relative = std::numeric_limits<double>::quiet_NaN();
      r.note = "zero force";
    } else {
      r.relative = budget.total_pn[i] / std::abs(force_pn[i]);
    }
    rows.push_back(r);
  }
  return rows;
}

void write_error_report(std::ostream& out, const std::vector<double>& force_pn,
                        const ErrorBudget& budget) {
  const auto rows = relative_error_report(budget.separation_nm, force_pn, budget);
  fmt::print(out, "# a_nm, F_pN, dr_pN, ds_pN, dtot_pN, rel_pct\n");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    fmt::print(out, "{}, {}, {:.4f}, {:.4f}, {:.4f}, ", r.separation_nm, r.force_pn,
               budget.random_pn[i], budget.systematic_pn[i], r.total_pn);
    if (r.note.empty()) {
      fmt::print(out, "{:.4f}\n", 100.0 * r.relative);
    } else {
      fmt::print(out, "nan # {}\n", r.note);
    }
  }
}

double ForceHistogram::gauss_fraction(std::size_t bin) const {
  if (bin >= bins.size()) throw ValidationError("histogram bin out of range");
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean_pn) / (sigma_pn * std::sqrt(2.0))); };
  return cdf(bins[bin].hi_pn) - cdf(bins[bin].lo_pn);
}

ForceHistogram histogram_and_gauss(const std::vector<double>& samples_pn, double bin_width_pn) {
  if (samples_pn.size() < 30) {
    throw ValidationError(fmt::format("histogram needs at least 30 samples, got {}",
                                      samples_pn.size()));
  }
  if (!(std::isfinite(bin_width_pn) && bin_width_pn > 0.0)) {
    throw ValidationError("bin width must be positive");
  }
  for (double x : samples_pn) {
    if (!std::isfinite(x)) throw ValidationError("force samples must be finite");
  }
  const auto n = static_cast<double>(samples_pn.size());
  ForceHistogram h;
  h.samples = static_cast<int>(samples_pn.size());
  const auto m = moments(samples_pn);
  h.mean_pn = m.mean;
  h.sigma_pn = std::sqrt(m.sum_squares / n);
  if (!(h.sigma_pn > 1e-12 * std::max(1.0, std::abs(h.mean_pn)))) {
    throw FitError("samples are degenerate; no Gaussian width");
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples_pn.begin(), samples_pn.end());
  const double start = bin_width_pn * std::floor(*lo_it / bin_width_pn);
  const auto count = static_cast<std::size_t>(std::floor((*hi_it - start) / bin_width_pn)) + 1;
  std::vector<int> hits(count, 0);
  for (double x : samples_pn) {
    auto k = static_cast<std::size_t>(std::floor((x - start) / bin_width_pn));
    ++hits[std::min(k, count - 1)];
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double lo = start + bin_width_pn * static_cast<double>(k);
    h.bins.push_back({lo, lo + bin_width_pn, hits[k] / n});
  }
  return h;
}

bool gaussians_separated(const ForceHistogram& a, const ForceHistogram& b, double n_sigma) {
  const double gap = std::abs(a.mean_pn - b.mean_pn);
  return gap > n_sigma * (a.sigma_pn + b.sigma_pn);
}

} // namespace casimir

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

#include <iosfwd>
#include <string>
#include <vector>

#include "materials.hpp"

namespace casimir {

enum class StudentCoefficient { Rounded, Exact };

struct RandomError {
  int samples = 0;
  double mean_pn = 0.0;
  double sigma_mean_pn = 0.0;
  double coefficient = 0.0;
  double delta_pn = 0.0;
};

// Two-sided Student coefficient for n samples. Rounded keeps one decimal,
// which gives the customary 2 for n = 100 at 95%.
double student_coefficient(int samples, double confidence = 0.95,
                           StudentCoefficient kind = StudentCoefficient::Rounded);

RandomError random_error(const std::vector<double>& samples_pn, double confidence = 0.95,
                         StudentCoefficient kind = StudentCoefficient::Rounded);
double random_error_from_sigma(double sigma_mean_pn, int samples = 100, double confidence = 0.95,
                               StudentCoefficient kind = StudentCoefficient::Rounded);

struct CombinedError {
  double systematic_pn = 0.0;
  double total_pn = 0.0;
};

CombinedError combine_errors(double random_pn, const std::vector<double>& systematic_pn);

// Delta^s F_tot(a) = A + B (a_ref / a)^p.
struct SystematicFloor {
  double constant_pn = 0.0;
  double short_range_pn = 0.0;
  double exponent = 1.0;
  double reference_nm = 60.0;
  double operator()(double a_nm) const;
  void validate() const;
};

// Mean over the applied voltages of |dF_el/da| * delta_a, pN.
double electric_systematic(double a_nm, double radius_um, double delta_a_nm,
                           const std::vector<double>& voltages_mv, double v0_mv);

// n equally spaced voltages from lo to hi.
std::vector<double> applied_voltages(double lo_mv, double hi_mv, int n = 10);

struct ErrorBudget {
  std::vector<double> separation_nm;
  std::vector<double> random_pn;
  std::vector<double> systematic_total_pn;
  std::vector<double> systematic_electric_pn;
  std::vector<double> systematic_pn;
  std::vector<double> total_pn;
  double confidence = 0.95;
  std::size_t size() const { return separation_nm.size(); }
  void validate() const;
};

struct BudgetInputs {
  double random_pn = 0.0;
  double radius_um = materials::sphere_radius_um;
  double delta_a_nm = 0.0;
  double v0_mv = 0.0;
  std::vector<double> voltages_mv;
};

ErrorBudget error_budget(const std::vector<double>& separations_nm, const BudgetInputs& inputs,
                         const SystematicFloor& floor);

struct FloorFit {
  SystematicFloor floor;
  double max_deviation_pn = 0.0;
};

// Fit the floor so that the combined totals reproduce target totals.
FloorFit fit_systematic_floor(const std::vector<double>& separations_nm,
                              const std::vector<double>& total_pn, const BudgetInputs& inputs);

BudgetInputs paper_budget_inputs(materials::Sample s);
// Floor fitted to the published totals of one sample.
FloorFit paper_systematic_floor(materials::Sample s);

struct RelativeErrorRow {
  double separation_nm = 0.0;
  double force_pn = 0.0;
  double total_pn = 0.0;
  double relative = 0.0;  // fraction; NaN when excluded
  std::string note;
};

std::vector<RelativeErrorRow> relative_error_report(const std::vector<double>& separations_nm,
                                                    const std::vector<double>& force_pn,
                                                    const ErrorBudget& budget);

// a_nm, F_pN, dr_pN, ds_pN, dtot_pN, rel_pct
void write_error_report(std::ostream& out, const std::vector<double>& force_pn,
                        const ErrorBudget& budget);

struct HistogramBin {
  double lo_pn = 0.0;
  double hi_pn = 0.0;
  double fraction = 0.0;
};

struct ForceHistogram {
  std::vector<HistogramBin> bins;
  double mean_pn = 0.0;
  double sigma_pn = 0.0;
  int samples = 0;
  double gauss_fraction(std::size_t bin) const;
};

ForceHistogram histogram_and_gauss(const std::vector<double>& samples_pn, double bin_width_pn);

// True when the n-sigma intervals of two fitted Gaussians are disjoint.
bool gaussians_separated(const ForceHistogram& a, const ForceHistogram& b, double n_sigma = 3.0);

} // namespace casimir

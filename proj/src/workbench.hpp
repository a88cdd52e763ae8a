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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "calibration.hpp"
#include "lifshitz.hpp"
#include "materials.hpp"
#include "roughness.hpp"
#include "stats.hpp"

namespace casimir {

struct CalibrationSettings {
  CalibrationTruth truth;
  double noise_v = default_sensor_noise_v;
  std::uint64_t seed = 1;
  int rounds = 10;
  std::vector<double> offsets_mv{10.0, 25.0, 40.0, 55.0, 70.0};
};

// Published untreated force (first set) as a signed curve.
TabulatedForce paper_casimir_curve(materials::Sample s = materials::Sample::Untreated);
// Symmetric voltages about V0, the published force curve, then sensor noise.
DeflectionDataset synthetic_dataset(const CalibrationSettings& settings);

// INI file with sections [geometry], [thermal], [layer.sphere], [layer.film],
// [layer.substrate], [roughness] and [calibration]. Layer sections carry a
// `type` of drude, plasma, oscillator, ninham_parsegian, tabulated, sum,
// ideal_metal or builtin; a sum lists other section names in `parts`.
struct WorkbenchConfig {
  LayerStack stack;
  SphereGeometry geometry;
  ThermalConfig thermal;
  RoughnessDistribution plate_roughness = RoughnessDistribution::flat();
  RoughnessDistribution sphere_roughness = RoughnessDistribution::flat();
  CalibrationSettings calibration;
};

// Relative paths in the file resolve against base_dir.
WorkbenchConfig parse_config(std::istream& in, const std::string& base_dir = ".");
WorkbenchConfig load_config(const std::string& path);
// The built-in ITO sample, with its roughness.
WorkbenchConfig default_config(materials::Sample s, materials::Extrapolation e,
                               materials::Carriers c);

// Force tables `a_nm, F_pN`.
void write_force_curve(std::ostream& out, const ForceCurve& curve, const std::string& comment = {});
ForceCurve read_force_curve(std::istream& in);

ForceCurve rough_force_curve(const LayerStack& stack, const SphereGeometry& geometry,
                             const ThermalConfig& thermal, const RoughnessDistribution& plate,
                             const RoughnessDistribution& sphere,
                             const std::vector<double>& separations_nm);

struct TheoryBand {
  std::vector<double> separation_nm;
  std::vector<double> lo_pn;
  std::vector<double> hi_pn;
  std::size_t size() const { return separation_nm.size(); }
  void validate() const;
  // Linear in a between grid points.
  std::pair<double, double> at(double a_nm) const;
};

TheoryBand band_from_curves(const ForceCurve& a, const ForceCurve& b);
TheoryBand theory_band(const LayerStack& stack_lo, const LayerStack& stack_hi,
                       const SphereGeometry& geometry, const ThermalConfig& thermal,
                       const RoughnessDistribution& plate, const RoughnessDistribution& sphere,
                       const std::vector<double>& separations_nm);

struct ComparisonRow {
  double separation_nm = 0.0;
  double theory_lo_pn = 0.0;
  double theory_hi_pn = 0.0;
  double force_pn = 0.0;
  double error_pn = 0.0;
  bool overlap = false;
};

struct ComparisonReport {
  std::string label;
  std::vector<ComparisonRow> rows;
  double overlap_fraction() const;
};

// Experiment [F - dF, F + dF] against the band interpolated to each a.
ComparisonReport compare(const TheoryBand& band, const std::vector<double>& separations_nm,
                         const std::vector<double>& force_pn, const std::vector<double>& error_pn,
                         std::string label = {});

void write_comparison(std::ostream& out, const ComparisonReport& report);

// 1 - F_uv / F_untreated for the first measurement set.
double uv_reduction(double a_nm);

struct TableInconsistency {
  double separation_nm;
  materials::Sample sample;
  double difference_pn;
  double total_error_pn;
};

// Rows where the two measurement sets differ by at least the total error.
std::vector<TableInconsistency> table_inconsistencies();

struct ReproduceOptions {
  materials::Sample sample = materials::Sample::Untreated;
  std::uint64_t seed = 1;
  double grid_step_nm = 1.0;
  int repetitions = 100;
  double histogram_bin_pn = 2.0;
  ThermalConfig thermal;
};

struct TreatmentResult {
  materials::Carriers carriers = materials::Carriers::Drude;
  TheoryBand band;
  ComparisonReport comparison;
};

// Band from the lower and upper extrapolations of the built-in sample,
// compared with the first measurement set and the fitted error budget.
TreatmentResult table_comparison(materials::Sample s, materials::Carriers c, double grid_step_nm,
                                 const ThermalConfig& thermal = {});

struct ReproduceReport {
  ReproduceOptions options;
  std::vector<double> separation_nm;
  std::vector<double> force_pn;  // first measurement set, signed
  ErrorBudget budget;
  FloorFit floor;
  std::vector<TreatmentResult> treatments;
  RandomError resampled_random;  // at the smallest separation
  ForceHistogram histogram;
  std::vector<double> uv_reduction;
};

// Theory bands for carriers included and excluded, the error budget, the
// comparison with the published table and a seeded resampling of the
// repeated measurements at the smallest separation.
ReproduceReport reproduce(const ReproduceOptions& options);

void write_reproduce_text(std::ostream& out, const ReproduceReport& report);
void write_reproduce_json(std::ostream& out, const ReproduceReport& report);

} // namespace casimir

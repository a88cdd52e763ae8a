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
#include <string>
#include <vector>

#include "electrostatics.hpp"
#include "roughness.hpp"

namespace casimir {

struct CalibrationTruth {
  double v0_mv = -196.8;
  double m_nm_per_v = 104.4;
  double z0_nm = 29.5;
  double ktilde_nn_per_v = 1.45;
  double drift_nm_per_s = 0.0;
  double acq_interval_s = 1e-3;

  // k = ktilde / m, in N/m.
  double spring_constant_n_per_m() const { return ktilde_nn_per_v / m_nm_per_v; }
  void validate() const;
};

struct SweepSpec {
  std::vector<double> voltages_mv;
  int rounds = 10;
  double sweep_period_s = 25.0;
  double approach_speed_nm_per_s = 200.0;
  double max_separation_nm = 2000.0;
  // How far past touching the piezo keeps pushing, nm.
  double contact_depth_nm = 30.0;
  double radius_um = 101.2;
  void validate(const CalibrationTruth& truth) const;
};

// V0 + offset and V0 - offset for each offset, ascending.
std::vector<double> symmetric_voltages(double v0_mv, const std::vector<double>& offsets_mv);

struct Sweep {
  double voltage_mv = 0.0;
  int round = 0;
  std::vector<double> t_s;
  std::vector<double> z_piezo_nm;
  std::vector<double> s_def_v;
  std::size_t size() const { return t_s.size(); }
};

struct DeflectionDataset {
  std::vector<Sweep> sweeps;
  std::vector<double> applied_voltages() const;  // distinct, ascending
  std::size_t samples() const;
  void validate() const;
};

// Noise-free approach curves. Each round re-zeroes the clock and the piezo.
DeflectionDataset synthesize_dataset(const CalibrationTruth& truth, const SmoothForce& casimir,
                                     const SweepSpec& spec);
DeflectionDataset add_sensor_noise(DeflectionDataset dataset, double sigma_v, std::uint64_t seed);

// Gives an extracted-force standard error of about 0.55 pN from 100 sweeps.
inline constexpr double default_sensor_noise_v = 5.05e-3;

// Rows `voltage_mV, t_s, z_piezo_nm, S_def_V`; a new sweep starts when the
// voltage changes or z_piezo stops decreasing, a new round when t resets.
DeflectionDataset read_dataset(std::istream& in);
DeflectionDataset load_dataset_file(const std::string& path);
void write_dataset(std::ostream& out, const DeflectionDataset& dataset);

struct ContactPoint {
  double z_nm = 0.0;
  double t_s = 0.0;
  std::size_t first_contact = 0;  // index of the first in-contact sample
};

// The jump to contact is the first drop of S_def by more than jump_v. With
// interpolate set, the contact point is placed between the bracketing samples.
ContactPoint find_contact(const Sweep& sweep, double jump_v, bool interpolate);

struct DriftEstimate {
  double rate_nm_per_s = 0.0;
  double sigma_nm_per_s = 0.0;
  int pairs = 0;
};

// Sweeps of one round with |V - V0| equal within tol_mv jump at the same
// true separation, so their contact points differ only by drift.
DriftEstimate estimate_drift(const DeflectionDataset& dataset,
                             const std::vector<ContactPoint>& contacts, double v0_mv,
                             double tol_mv);

struct Estimate {
  double value = 0.0;
  double uncertainty = 0.0;  // 95% confidence
};

// Slope of the in-contact line z' + m S = const, pooled over all sweeps, with
// z' = z + rate t.
Estimate fit_deflection_coefficient(const DeflectionDataset& dataset,
                                    const std::vector<ContactPoint>& contacts,
                                    double drift_nm_per_s);

// Deflection of every sweep at common separations, NaN where a sweep has no
// free-approach data.
struct GridSignals {
  std::vector<double> separation_nm;
  std::vector<double> voltage_mv;        // per sweep
  std::vector<std::vector<double>> s_v;  // [separation][sweep]
};

GridSignals grid_signals(const DeflectionDataset& dataset, const std::vector<ContactPoint>& contacts,
                         double m_nm_per_v, double drift_nm_per_s, double z0_nm,
                         const std::vector<double>& separations_nm);

struct ParabolaFit {
  double v0_mv = 0.0;
  double v0_sigma_mv = 0.0;
  double beta_per_v = 0.0;  // curvature in V/V^2
  double beta_sigma = 0.0;
  double offset_v = 0.0;    // S at the vertex
  int points = 0;
  int voltages = 0;
};

ParabolaFit fit_parabola(const std::vector<double>& voltages_mv, const std::vector<double>& s_v);
// Skips NaN entries.
ParabolaFit fit_parabola_at_separation(const GridSignals& grid, std::size_t index);

struct SeparationFit {
  double separation_nm = 0.0;
  ParabolaFit parabola;
};

struct ContactFit {
  double a_end_nm = 0.0;
  Estimate z0_nm;
  Estimate ktilde_nn_per_v;
  double chi2_reduced = 0.0;
  int points = 0;
};

// beta(a) = X(a + z0 - assumed_z0) / ktilde over a in [a_start, a_end], where
// a = separation + z0 - assumed_z0 is re-evaluated as z0 moves.
ContactFit fit_contact_and_constant(const std::vector<SeparationFit>& table, double a_end_nm,
                                    double assumed_z0_nm = 0.0, double a_start_nm = 60.0,
                                    double radius_um = 101.2);

std::vector<double> default_a_end_values();

struct TrendTest {
  double slope_mv_per_nm = 0.0;
  double slope_sigma = 0.0;
  double significance = 0.0;  // |slope| / sigma
  bool monotone = false;      // four bin means strictly ordered
  double within_2sigma = 0.0;  // fraction of points within 2 sigma of the mean
};

TrendTest v0_trend(const std::vector<SeparationFit>& table, double a_lo_nm, double a_hi_nm);

struct CalibrationOptions {
  bool correct_drift = true;
  bool interpolate_contact = true;
  double jump_threshold_v = 0.05;
  double pair_tolerance_mv = 5.0;
  double a_start_nm = 60.0;
  double a_max_nm = 1000.0;
  double v0_window_nm = 300.0;
  std::vector<double> a_end_values = default_a_end_values();
  double radius_um = 101.2;
};

struct CalibrationResult {
  Estimate v0_mv;
  Estimate m_nm_per_v;
  Estimate z0_nm;
  Estimate ktilde_nn_per_v;
  DriftEstimate drift;
  bool corrected = true;
  std::vector<SeparationFit> per_separation;  // on the integer-a grid
  std::vector<ContactFit> stability;           // one per a_end
  TrendTest trend;
  std::vector<ContactPoint> contacts;
  void validate() const;
};

CalibrationResult calibrate(const DeflectionDataset& dataset, const CalibrationOptions& options = {});

// Drift applied to z_piezo and contact points from the result's pipeline.
DeflectionDataset correct_systematics(const DeflectionDataset& dataset,
                                      const CalibrationOptions& options = {});

struct ExtractedForce {
  std::vector<double> separation_nm;
  std::vector<std::vector<double>> values_pn;  // one per available sweep
  std::vector<double> mean_pn;
  std::vector<double> sigma_mean_pn;
  std::size_t size() const { return separation_nm.size(); }
};

// F = ktilde S - X(a) (V - V0)^2 for every sweep at every grid separation.
ExtractedForce extract_casimir(const GridSignals& grid, const CalibrationResult& calib,
                               double radius_um = 101.2);
ExtractedForce extract_casimir(const DeflectionDataset& dataset, const CalibrationResult& calib,
                               const std::vector<double>& separations_nm,
                               const CalibrationOptions& options = {});

void write_calibration_report(std::ostream& out, const CalibrationResult& result);

// Force through the (a, F) nodes, linear in log|F| vs log a; outside the nodes
// the end power laws continue with exponents clamped to [2, 4].
class TabulatedForce {
 public:
  TabulatedForce(std::vector<double> separation_nm, std::vector<double> force_pn);
  double operator()(double a_nm) const;

 private:
  std::vector<double> log_a_;
  std::vector<double> log_f_;
  double sign_ = -1.0;
  double low_exponent_ = 0.0;
  double high_exponent_ = 0.0;
};

} // namespace casimir

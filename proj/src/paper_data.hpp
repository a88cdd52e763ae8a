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
#include <vector>

#include "materials.hpp"

namespace casimir {

// One row of the published force table, magnitudes in pN.
struct PaperRow {
  double a_nm;
  double untreated_set1;
  double untreated_set2;
  double untreated_total_error;
  double uv_set1;
  double uv_set2;
  double uv_total_error;
};

struct PaperCalibration {
  double v0_mv, v0_err;
  double m_nm_per_v, m_err;
  double z0_nm, z0_err;
  double ktilde_nn_per_v, ktilde_err;
};

struct PaperSample {
  PaperCalibration calibration;  // first measurement set, 95% errors
  double delta_a_nm;             // separation error used for the electric-force systematic
  double voltage_lo_mv;
  double voltage_hi_mv;
  double sigma_mean_pn;    // variance of the mean force
  double random_error_pn;  // 95%
};

inline constexpr std::size_t paper_table_rows = 15;

struct PaperDataset {
  std::array<PaperRow, paper_table_rows> rows;
  PaperSample untreated;
  PaperSample uv_treated;
  double radius_um = materials::sphere_radius_um;
  double film_thickness_nm = materials::film_thickness_nm;
  double temperature_k = materials::temperature_k;
  double histogram_sigma_pn = 4.6;
  double au_force_80nm_pn = 269.0;

  const PaperSample& sample(materials::Sample s) const;
  std::vector<double> separations_nm() const;
  // set is 1 or 2; magnitudes.
  std::vector<double> force_pn(materials::Sample s, int set) const;
  std::vector<double> total_error_pn(materials::Sample s) const;
};

const PaperDataset& load_paper_table();

} // namespace casimir

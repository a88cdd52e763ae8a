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

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "casimir.h"
#include "doctest.h"

namespace {

const std::string config_dir = CASIMIR_CONFIG_DIR;

std::string take(char* s) {
  std::string out = s ? s : "";
  csm_string_free(s);
  return out;
}

struct Config {
  csm_config* p = nullptr;
  ~Config() { csm_config_free(p); }
};

} // namespace

TEST_CASE("status codes and last error") {
  csm_config* cfg = nullptr;
  CHECK(csm_config_load("/nonexistent.cfg", &cfg) == CSM_ERR_VALIDATION);
  CHECK(cfg == nullptr);
  CHECK(std::string(csm_last_error()).find("nonexistent") != std::string::npos);
  CHECK(csm_config_load(nullptr, &cfg) == CSM_ERR_VALIDATION);
  double x = 0.0;
  CHECK(csm_electrostatic_kernel(100.0, 101.2, CSM_KERNEL_EXACT, &x) == CSM_OK);
  CHECK(std::string(csm_last_error()).empty());
  CHECK(csm_electrostatic_kernel(5000.0, 101.2, CSM_KERNEL_POLYNOMIAL, &x) == CSM_ERR_VALIDATION);
  CHECK(csm_electrostatic_kernel(100.0, 101.2, static_cast<csm_kernel>(7), &x) == CSM_ERR_VALIDATION);
  CHECK(std::string(csm_version()) == "0.1.0");
  csm_config_free(nullptr);
  csm_string_free(nullptr);
}

TEST_CASE("config, materials and force") {
  Config cfg;
  REQUIRE(csm_config_load((config_dir + "/ito_untreated_upper.cfg").c_str(), &cfg.p) == CSM_OK);
  csm_material* film = nullptr;
  REQUIRE(csm_config_material(cfg.p, CSM_LAYER_FILM, &film) == CSM_OK);
  CHECK(csm_material_has_carriers(film) == 1);
  double eps = 0.0;
  CHECK(csm_material_eps(film, 1.0, &eps) == CSM_OK);
  CHECK(eps > 1.0);
  double im = 0.0;
  CHECK(csm_material_im_eps(film, 4.8, &im) == CSM_OK);
  CHECK(im > 0.0);
  CHECK(csm_material_eps(film, -1.0, &eps) == CSM_ERR_VALIDATION);
  char* table = nullptr;
  REQUIRE(csm_permittivity_table(film, 0.01, 10.0, 5, &table) == CSM_OK);
  CHECK(take(table).find("xi_eV, eps") != std::string::npos);
  csm_material_free(film);

  csm_solver* solver = nullptr;
  REQUIRE(csm_solver_create(cfg.p, &solver) == CSM_OK);
  double f = 0.0, fr = 0.0;
  int terms = 0;
  CHECK(csm_solver_force(solver, 100.0, &f, &terms) == CSM_OK);
  CHECK(f < 0.0);
  CHECK(terms > 1);
  CHECK(csm_solver_rough_force(solver, 100.0, &fr) == CSM_OK);
  CHECK(fr < f);
  CHECK(csm_solver_force(solver, 5.0, &f, nullptr) == CSM_ERR_VALIDATION);
  csm_solver_free(solver);

  REQUIRE(csm_config_strip_film_carriers(cfg.p) == CSM_OK);
  REQUIRE(csm_solver_create(cfg.p, &solver) == CSM_OK);
  double stripped = 0.0;
  CHECK(csm_solver_force(solver, 100.0, &stripped, nullptr) == CSM_OK);
  CHECK(std::abs(stripped) < std::abs(f));
  csm_solver_free(solver);

  char* curve = nullptr;
  REQUIRE(csm_force_table(cfg.p, 60.0, 80.0, 10.0, 0, &curve) == CSM_OK);
  const auto text = take(curve);
  CHECK(text.find("a_nm, F_pN") != std::string::npos);
  CHECK(text.find("\n80, ") != std::string::npos);
  CHECK(csm_force_table(cfg.p, 80.0, 60.0, 10.0, 0, &curve) == CSM_ERR_VALIDATION);
  CHECK(csm_config_set_temperature(cfg.p, -1.0) == CSM_ERR_VALIDATION);
}

TEST_CASE("builtin config and roughness") {
  Config cfg;
  REQUIRE(csm_config_builtin(CSM_SAMPLE_UNTREATED, CSM_EXTRAPOLATION_UPPER, CSM_CARRIERS_DRUDE,
                             &cfg.p) == CSM_OK);
  double h0 = 0.0, rms = 0.0;
  CHECK(csm_roughness_levels(cfg.p, CSM_ROUGHNESS_PLATE, &h0, &rms) == CSM_OK);
  CHECK(h0 == doctest::Approx(9.54));
  CHECK(rms == doctest::Approx(2.28));
  CHECK(csm_roughness_levels(cfg.p, CSM_ROUGHNESS_SPHERE, &h0, &rms) == CSM_OK);
  CHECK(h0 == doctest::Approx(11.51));
  char* table = nullptr;
  REQUIRE(csm_roughness_table(cfg.p, 60.0, 90.0, 30.0, &table) == CSM_OK);
  const auto text = take(table);
  CHECK(text.find("correction_pct") != std::string::npos);
  REQUIRE(csm_config_set_flat(cfg.p) == CSM_OK);
  CHECK(csm_roughness_levels(cfg.p, CSM_ROUGHNESS_PLATE, &h0, &rms) == CSM_OK);
  CHECK(rms == 0.0);
  CHECK(csm_config_builtin(static_cast<csm_sample>(5), CSM_EXTRAPOLATION_UPPER, CSM_CARRIERS_DRUDE,
                           &cfg.p) == CSM_ERR_VALIDATION);
}

TEST_CASE("calibration round trip through the C API") {
  csm_calibration_settings s;
  csm_calibration_settings_default(&s);
  CHECK(s.truth.v0_mv == -196.8);
  s.truth.drift_nm_per_s = 0.05;
  s.seed = 9;
  csm_dataset* ds = nullptr;
  REQUIRE(csm_dataset_synthesize(&s, &ds) == CSM_OK);
  CHECK(csm_dataset_sweeps(ds) == 100);

  csm_calibration_options opt;
  csm_calibration_options_default(&opt);
  CHECK(opt.correct_drift == 1);
  csm_calibration* cal = nullptr;
  REQUIRE(csm_calibrate(ds, &opt, &cal) == CSM_OK);
  csm_calibration_summary sum;
  REQUIRE(csm_calibration_summary_get(cal, &sum) == CSM_OK);
  CHECK(std::abs(sum.v0_mv + 196.8) < 1.5);
  CHECK(std::abs(sum.m_nm_per_v - 104.4) < 0.5);
  CHECK(std::abs(sum.z0_nm - 29.5) < 0.4);
  CHECK(std::abs(sum.ktilde_nn_per_v - 1.45) < 0.02);
  CHECK(sum.drift_nm_per_s == doctest::Approx(0.05).epsilon(0.1));
  char* report = nullptr;
  REQUIRE(csm_calibration_report(cal, &report) == CSM_OK);
  CHECK(take(report).find("z0_nm = ") != std::string::npos);
  char* ex = nullptr;
  REQUIRE(csm_calibration_extract(cal, ds, 80.0, 100.0, 10.0, &ex) == CSM_OK);
  CHECK(take(ex).find("\n80, -14") != std::string::npos);
  csm_calibration_free(cal);

  const std::string path = "capi_dataset.csv";
  REQUIRE(csm_dataset_save(ds, path.c_str()) == CSM_OK);
  csm_dataset* back = nullptr;
  REQUIRE(csm_dataset_load(path.c_str(), &back) == CSM_OK);
  CHECK(csm_dataset_sweeps(back) == 100);
  csm_dataset_free(back);
  std::remove(path.c_str());

  opt.correct_drift = 0;
  opt.interpolate_contact = 0;
  REQUIRE(csm_calibrate(ds, &opt, &cal) == CSM_OK);
  REQUIRE(csm_calibration_summary_get(cal, &sum) == CSM_OK);
  CHECK(sum.v0_trend_significance > 3.0);
  CHECK(sum.v0_trend_monotone == 1);
  csm_calibration_free(cal);
  csm_dataset_free(ds);

  s.truth.m_nm_per_v = -1.0;
  CHECK(csm_dataset_synthesize(&s, &ds) == CSM_ERR_VALIDATION);
  CHECK(csm_dataset_load("/nonexistent.csv", &ds) == CSM_ERR_VALIDATION);
}

TEST_CASE("errors and published data") {
  double d = 0.0;
  std::vector<double> same(100, -303.8);
  CHECK(csm_random_error(same.data(), same.size(), 0, &d) == CSM_OK);
  CHECK(d == 0.0);
  CHECK(csm_random_error(same.data(), 1, 0, &d) == CSM_ERR_VALIDATION);
  double sys = 0.0, tot = 0.0;
  const double parts[] = {2.245};
  CHECK(csm_combine_errors(1.1, parts, 1, &sys, &tot) == CSM_OK);
  CHECK(tot == doctest::Approx(2.5).epsilon(1e-4));
  CHECK(csm_combine_errors(1.1, nullptr, 0, &sys, &tot) == CSM_OK);
  CHECK(tot == 1.1);
  char* report = nullptr;
  REQUIRE(csm_error_report(CSM_SAMPLE_UNTREATED, &report) == CSM_OK);
  CHECK(take(report).find("a_nm, F_pN, dr_pN, ds_pN, dtot_pN, rel_pct") != std::string::npos);

  double f = 0.0;
  CHECK(csm_paper_force(CSM_SAMPLE_UNTREATED, 1, 60.0, &f) == CSM_OK);
  CHECK(f == 303.8);
  CHECK(csm_paper_force(CSM_SAMPLE_UV, 2, 300.0, &f) == CSM_OK);
  CHECK(f == 2.4);
  CHECK(csm_paper_force(CSM_SAMPLE_UV, 2, 301.0, &f) == CSM_ERR_VALIDATION);
  double r = 0.0;
  CHECK(csm_uv_reduction(100.0, &r) == CSM_OK);
  CHECK(r == doctest::Approx(0.3199).epsilon(1e-3));
  int ok = 0;
  CHECK(csm_table_consistent(&ok) == CSM_OK);
  CHECK(ok == 1);
}

TEST_CASE("compare and reproduce") {
  double frac = -1.0;
  char* text = nullptr;
  REQUIRE(csm_compare(CSM_SAMPLE_UV, CSM_CARRIERS_DRUDE, 10.0, &frac, &text) == CSM_OK);
  CHECK(frac < 0.2);
  CHECK(take(text).find("overlap_fraction") != std::string::npos);
  REQUIRE(csm_reproduce(CSM_SAMPLE_UNTREATED, 3, 10.0, 1, &text) == CSM_OK);
  const auto json = take(text);
  CHECK(json.front() == '{');
  CHECK(json.find("\"treatments\"") != std::string::npos);
  CHECK(csm_reproduce(CSM_SAMPLE_UNTREATED, 3, 0.0, 0, &text) == CSM_ERR_VALIDATION);
}

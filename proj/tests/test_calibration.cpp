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
#include <map>
#include <numeric>
#include <sstream>

#include "calibration.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "generators.hpp"
#include "paper_data.hpp"

using namespace casimir;

namespace {

const std::vector<double> offsets{10.0, 25.0, 40.0, 55.0, 70.0};

TabulatedForce paper_curve() {
  const auto& t = load_paper_table();
  auto f = t.force_pn(materials::Sample::Untreated, 1);
  for (auto& x : f) x = -x;
  return TabulatedForce(t.separations_nm(), f);
}

CalibrationTruth truth_with_drift(double drift) {
  CalibrationTruth t;
  t.drift_nm_per_s = drift;
  return t;
}

SweepSpec spec_for(const CalibrationTruth& t, int rounds = 10) {
  SweepSpec s;
  s.voltages_mv = symmetric_voltages(t.v0_mv, offsets);
  s.rounds = rounds;
  return s;
}

const DeflectionDataset& clean_dataset(double drift) {
  static std::map<double, DeflectionDataset> cache;
  auto it = cache.find(drift);
  if (it == cache.end()) {
    const auto t = truth_with_drift(drift);
    it = cache.emplace(drift, synthesize_dataset(t, paper_curve(), spec_for(t))).first;
  }
  return it->second;
}

const CalibrationResult& noisy_result(bool corrected) {
  static std::map<bool, CalibrationResult> cache;
  auto it = cache.find(corrected);
  if (it == cache.end()) {
    const auto ds = add_sensor_noise(clean_dataset(0.05), default_sensor_noise_v, 2024);
    CalibrationOptions opt;
    opt.correct_drift = corrected;
    opt.interpolate_contact = corrected;
    it = cache.emplace(corrected, calibrate(ds, opt)).first;
  }
  return it->second;
}

CalibrationOptions uncorrected_options() {
  CalibrationOptions opt;
  opt.correct_drift = false;
  opt.interpolate_contact = false;
  return opt;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("truth and sweep validation") {
  CalibrationTruth t;
  CHECK_NOTHROW(t.validate());
  CHECK(t.spring_constant_n_per_m() == doctest::Approx(0.013889).epsilon(1e-4));
  auto bad = t;
  bad.m_nm_per_v = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = t;
  bad.z0_nm = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = t;
  bad.acq_interval_s = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  auto s = spec_for(t);
  CHECK_NOTHROW(s.validate(t));
  s.sweep_period_s = 5.0;
  CHECK_THROWS_AS(s.validate(t), ValidationError);
  s = spec_for(t);
  s.voltages_mv.clear();
  CHECK_THROWS_AS(s.validate(t), ValidationError);
}

TEST_CASE("symmetric voltages") {
  const auto v = symmetric_voltages(-196.8, offsets);
  REQUIRE(v.size() == 10);
  CHECK(std::is_sorted(v.begin(), v.end()));
  CHECK(v.front() == doctest::Approx(-266.8));
  CHECK(v.back() == doctest::Approx(-126.8));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(v[i] + v[9 - i] == doctest::Approx(2.0 * -196.8));
  }
  CHECK_THROWS_AS(symmetric_voltages(0.0, {-5.0}), ValidationError);
}

TEST_CASE("tabulated force") {
  const auto f = paper_curve();
  CHECK(f(60.0) == doctest::Approx(-303.8).epsilon(1e-12));
  CHECK(f(200.0) == doctest::Approx(-11.9).epsilon(1e-12));
  const double mid = f(65.0);
  CHECK(mid == doctest::Approx(-303.8 * std::pow(65.0 / 60.0, std::log(204.4 / 303.8) /
                                                                  std::log(70.0 / 60.0)))
                   .epsilon(1e-12));
  const double tail = std::log(4.6 / 4.0) / std::log(300.0 / 280.0);
  CHECK(f(600.0) == doctest::Approx(-4.0 * std::pow(0.5, tail)).epsilon(1e-12));
  const TabulatedForce flat({100.0, 200.0}, {-2.0, -1.9});
  CHECK(flat(400.0) == doctest::Approx(-1.9 * 0.25).epsilon(1e-12));
  const TabulatedForce steep({100.0, 200.0}, {-100.0, -1.0});
  CHECK(steep(50.0) == doctest::Approx(-100.0 * 16.0).epsilon(1e-12));
  CHECK(f(30.0) < f(60.0));
  CHECK_THROWS_AS(TabulatedForce({1.0}, {-1.0}), ValidationError);
  CHECK_THROWS_AS(TabulatedForce({1.0, 2.0}, {-1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(TabulatedForce({2.0, 1.0}, {-1.0, -2.0}), ValidationError);
}

TEST_CASE("synthetic sweeps") {
  const auto& ds = clean_dataset(0.05);
  CHECK(ds.sweeps.size() == 100);
  CHECK(ds.applied_voltages().size() == 10);
  CHECK_NOTHROW(ds.validate());
  for (const auto& s : ds.sweeps) {
    CHECK(s.t_s.front() == doctest::Approx(25.0 * static_cast<double>(&s - &ds.sweeps[0] -
                                                                       10 * s.round)));
    // Starts near 2 um and runs into contact.
    CHECK(s.z_piezo_nm.front() + 29.5 <= 2000.0 + 1e-9);
    CHECK(s.z_piezo_nm.front() + 29.5 > 1980.0);
    CHECK(s.s_def_v.front() < 0.0);
    CHECK(s.s_def_v.back() > 0.0);
  }
}

TEST_CASE("free branch obeys the force balance") {
  const CalibrationTruth t;
  auto spec = spec_for(t, 1);
  const auto cas = paper_curve();
  const auto ds = synthesize_dataset(t, cas, spec);
  const double k = t.ktilde_nn_per_v * 1000.0 / t.m_nm_per_v;
  for (const auto& s : ds.sweeps) {
    const auto c = find_contact(s, 0.05, true);
    const double u = (s.voltage_mv - t.v0_mv) * 1e-3;
    for (std::size_t j = 0; j < c.first_contact; j += 97) {
      const double a = t.z0_nm + s.z_piezo_nm[j] + t.m_nm_per_v * s.s_def_v[j];
      const double force = cas(a) + x_kernel_poly(a, 101.2) * u * u;
      CHECK(s.s_def_v[j] * t.ktilde_nn_per_v * 1000.0 == doctest::Approx(force).epsilon(1e-9));
      CHECK(a - force / k == doctest::Approx(t.z0_nm + s.z_piezo_nm[j]).epsilon(1e-10));
    }
    for (std::size_t j = c.first_contact; j < s.size(); ++j) {
      CHECK(s.z_piezo_nm[j] + t.m_nm_per_v * s.s_def_v[j] == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("dataset file round trip") {
  const CalibrationTruth t = truth_with_drift(0.05);
  auto spec = spec_for(t, 2);
  spec.max_separation_nm = 400.0;
  const auto ds = add_sensor_noise(synthesize_dataset(t, paper_curve(), spec), 5e-3, 1);
  std::stringstream ss;
  write_dataset(ss, ds);
  const auto back = read_dataset(ss);
  REQUIRE(back.sweeps.size() == ds.sweeps.size());
  for (std::size_t i = 0; i < ds.sweeps.size(); ++i) {
    CHECK(back.sweeps[i].voltage_mv == ds.sweeps[i].voltage_mv);
    CHECK(back.sweeps[i].round == ds.sweeps[i].round);
    CHECK(back.sweeps[i].t_s == ds.sweeps[i].t_s);
    CHECK(back.sweeps[i].z_piezo_nm == ds.sweeps[i].z_piezo_nm);
    CHECK(back.sweeps[i].s_def_v == ds.sweeps[i].s_def_v);
  }
}

TEST_CASE("dataset reader rejects bad input") {
  std::stringstream few("voltage_mV, t_s, z_piezo_nm, S_def_V\n1, 0, 10, 0\n1, 1, 9, 0\n");
  CHECK_THROWS_AS(read_dataset(few), ValidationError);
  std::stringstream cols("1, 0, 10\n");
  CHECK_THROWS_AS(read_dataset(cols), ValidationError);
  CHECK_THROWS_AS(load_dataset_file("/nonexistent/x.csv"), ValidationError);

  DeflectionDataset ds = clean_dataset(0.0);
  ds.sweeps[3].z_piezo_nm[10] = ds.sweeps[3].z_piezo_nm[9] + 1.0;
  CHECK_THROWS_AS(ds.validate(), ValidationError);
  ds = clean_dataset(0.0);
  ds.sweeps[3].t_s.pop_back();
  CHECK_THROWS_AS(ds.validate(), ValidationError);
}

TEST_CASE("sensor noise") {
  const auto& clean = clean_dataset(0.0);
  const auto a = add_sensor_noise(clean, 5e-3, 9);
  const auto b = add_sensor_noise(clean, 5e-3, 9);
  CHECK(a.sweeps[7].s_def_v == b.sweeps[7].s_def_v);
  double sum = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < clean.sweeps.size(); i += 9) {
    for (std::size_t j = 0; j < clean.sweeps[i].size(); ++j) {
      const double d = a.sweeps[i].s_def_v[j] - clean.sweeps[i].s_def_v[j];
      sum += d;
      sum2 += d * d;
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  CHECK(std::abs(mean) < 1e-4);
  CHECK(std::sqrt(sum2 / static_cast<double>(n)) == doctest::Approx(5e-3).epsilon(0.02));
  CHECK(add_sensor_noise(clean, 0.0, 1).sweeps[0].s_def_v == clean.sweeps[0].s_def_v);
  CHECK_THROWS_AS(add_sensor_noise(clean, -1.0, 1), ValidationError);
}

TEST_CASE("contact detection") {
  Sweep s;
  s.voltage_mv = 0.0;
  for (int j = 0; j < 10; ++j) {
    s.t_s.push_back(j * 1e-3);
    s.z_piezo_nm.push_back(10.0 - 0.2 * j);
    s.s_def_v.push_back(j < 6 ? -0.01 * j : -0.5);
  }
  const auto c = find_contact(s, 0.05, true);
  CHECK(c.first_contact == 6);
  CHECK(c.z_nm == doctest::Approx(8.9));
  CHECK(c.t_s == doctest::Approx(5.5e-3));
  const auto raw = find_contact(s, 0.05, false);
  CHECK(raw.z_nm == doctest::Approx(8.8));
  s.s_def_v.assign(10, 0.0);
  CHECK_THROWS_AS(find_contact(s, 0.05, true), ValidationError);
}

TEST_CASE("drift estimation") {
  for (double drift : {0.0, 0.05, -0.03}) {
    const auto& ds = clean_dataset(drift);
    std::vector<ContactPoint> cs;
    for (const auto& s : ds.sweeps) cs.push_back(find_contact(s, 0.05, true));
    const auto d = estimate_drift(ds, cs, -196.8, 5.0);
    CAPTURE(drift);
    CHECK(d.pairs == 50);
    CHECK(std::abs(d.rate_nm_per_s - drift) <= 0.1 * std::abs(drift) + 1e-4);
  }
  // Noise does not move the jump by a whole sample.
  const auto noisy = add_sensor_noise(clean_dataset(0.05), default_sensor_noise_v, 3);
  std::vector<ContactPoint> cs;
  for (const auto& s : noisy.sweeps) cs.push_back(find_contact(s, 0.05, true));
  CHECK(estimate_drift(noisy, cs, -196.8, 5.0).rate_nm_per_s ==
        doctest::Approx(0.05).epsilon(0.1));
  CHECK_THROWS_AS(estimate_drift(noisy, cs, 0.0, 5.0), DriftEstimationError);
  cs.pop_back();
  CHECK_THROWS_AS(estimate_drift(noisy, cs, -196.8, 5.0), ValidationError);
}

TEST_CASE("zero drift gives a negligible correction") {
  const auto ds = add_sensor_noise(clean_dataset(0.0), default_sensor_noise_v, 11);
  const auto fixed = correct_systematics(ds);
  double worst = 0.0;
  for (std::size_t i = 0; i < ds.sweeps.size(); ++i) {
    for (std::size_t j = 0; j < ds.sweeps[i].size(); j += 50) {
      worst = std::max(worst, std::abs(fixed.sweeps[i].z_piezo_nm[j] - ds.sweeps[i].z_piezo_nm[j]));
    }
  }
  CHECK(worst < 0.05);
}

TEST_CASE("parabola fit") {
  std::vector<double> v;
  std::vector<double> s;
  for (double x : symmetric_voltages(-196.8, offsets)) {
    v.push_back(x);
    const double u = (x + 196.8) * 1e-3;
    s.push_back(-0.2 - 21.3 * u * u);
  }
  const auto p = fit_parabola(v, s);
  CHECK(p.v0_mv == doctest::Approx(-196.8).epsilon(1e-12));
  CHECK(p.beta_per_v == doctest::Approx(-21.3).epsilon(1e-10));
  CHECK(p.offset_v == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(p.v0_sigma_mv < 1e-9);
  CHECK(p.voltages == 10);

  gen::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const double v0 = rng.uniform(-300.0, 300.0);
    const double beta = -rng.log_uniform(0.5, 50.0);
    const double c = rng.uniform(-0.5, 0.5);
    std::vector<double> vv;
    std::vector<double> ss;
    for (int i = 0; i < 7; ++i) {
      const double x = v0 + rng.uniform(-100.0, 100.0);
      vv.push_back(x);
      ss.push_back(c + beta * std::pow((x - v0) * 1e-3, 2));
    }
    const auto q = fit_parabola(vv, ss);
    CHECK(q.v0_mv == doctest::Approx(v0).epsilon(1e-7));
    CHECK(q.beta_per_v == doctest::Approx(beta).epsilon(1e-7));
  }

  CHECK_THROWS_AS(fit_parabola({1.0, 1.0, 2.0, 2.0}, {0.0, 0.0, 1.0, 1.0}), FitError);
  CHECK_THROWS_AS(fit_parabola({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), FitError);
  CHECK_THROWS_AS(fit_parabola({1.0, 2.0}, {1.0}), ValidationError);
}

TEST_CASE("vertex error falls as one over root repeats") {
  const auto volts = symmetric_voltages(-196.8, offsets);
  auto spread = [&](int repeats) {
    gen::Rng rng(static_cast<std::uint64_t>(100 + repeats));
    std::vector<double> vertices;
    for (int trial = 0; trial < 400; ++trial) {
      std::vector<double> v;
      std::vector<double> s;
      for (int r = 0; r < repeats; ++r) {
        for (double x : volts) {
          const double u = (x + 196.8) * 1e-3;
          v.push_back(x);
          s.push_back(-0.1 - 20.0 * u * u + rng.normal(0.0, 4e-3));
        }
      }
      vertices.push_back(fit_parabola(v, s).v0_mv);
    }
    const double mean = std::accumulate(vertices.begin(), vertices.end(), 0.0) / 400.0;
    double var = 0.0;
    for (double x : vertices) var += (x - mean) * (x - mean);
    return std::sqrt(var / 399.0);
  };
  const double one = spread(1);
  const double ten = spread(10);
  CHECK(one / ten == doctest::Approx(std::sqrt(10.0)).epsilon(0.15));
}

TEST_CASE("contact fit recovers exact curvature data") {
  std::vector<SeparationFit> table;
  const double z0 = 29.5;
  const double kt = 1.45;
  for (double s = 25.0; s <= 1000.0; s += 1.0) {
    SeparationFit row;
    row.separation_nm = s;
    row.parabola.beta_per_v = x_kernel_poly(s + z0, 101.2) / (kt * 1000.0);
    table.push_back(row);
  }
  for (double a_end : default_a_end_values()) {
    const auto f = fit_contact_and_constant(table, a_end);
    CAPTURE(a_end);
    CHECK(f.z0_nm.value == doctest::Approx(z0).epsilon(1e-6));
    CHECK(f.ktilde_nn_per_v.value == doctest::Approx(kt).epsilon(1e-6));
    CHECK(f.points == static_cast<int>(std::floor(a_end - z0) - std::ceil(60.0 - z0) + 1));
  }
  CHECK_THROWS_AS(fit_contact_and_constant({table.begin(), table.begin() + 2}, 1000.0), FitError);
}

TEST_CASE("a_end schedule") {
  const auto a = default_a_end_values();
  CHECK(a.front() == 1000.0);
  CHECK(a.back() == 150.0);
  CHECK(std::count(a.begin(), a.end(), 400.0) == 1);
  CHECK(std::is_sorted(a.rbegin(), a.rend()));
  CHECK(a[1] - a[0] == -100.0);
  CHECK(a[a.size() - 1] - a[a.size() - 2] == -25.0);
}

TEST_CASE("noise-free drift-free recovery") {
  const auto& ds = clean_dataset(0.0);
  const auto c = calibrate(ds);
  const auto u = calibrate(ds, uncorrected_options());
  const CalibrationTruth t;
  CHECK(rel(c.v0_mv.value, t.v0_mv) < 1e-3);
  CHECK(rel(c.m_nm_per_v.value, t.m_nm_per_v) < 1e-3);
  CHECK(rel(c.z0_nm.value, t.z0_nm) < 1e-3);
  CHECK(rel(c.ktilde_nn_per_v.value, t.ktilde_nn_per_v) < 1e-3);
  CHECK(c.v0_mv.value == doctest::Approx(u.v0_mv.value).epsilon(1e-9));
  CHECK(c.m_nm_per_v.value == doctest::Approx(u.m_nm_per_v.value).epsilon(1e-9));
  CHECK(c.z0_nm.value == doctest::Approx(u.z0_nm.value).epsilon(1e-9));
  CHECK(c.ktilde_nn_per_v.value == doctest::Approx(u.ktilde_nn_per_v.value).epsilon(1e-9));
  for (const auto& f : c.stability) {
    CHECK(rel(f.z0_nm.value, t.z0_nm) < 1e-3);
    CHECK(rel(f.ktilde_nn_per_v.value, t.ktilde_nn_per_v) < 1e-3);
  }
}

TEST_CASE("zero drift: corrected and uncorrected pipelines agree within noise") {
  const auto ds = add_sensor_noise(clean_dataset(0.0), default_sensor_noise_v, 5);
  const auto c = calibrate(ds);
  const auto u = calibrate(ds, uncorrected_options());
  CHECK(std::abs(c.v0_mv.value - u.v0_mv.value) < 0.25 * c.v0_mv.uncertainty + 0.01);
  CHECK(std::abs(c.m_nm_per_v.value - u.m_nm_per_v.value) < 0.25 * c.m_nm_per_v.uncertainty);
  CHECK(std::abs(c.z0_nm.value - u.z0_nm.value) < 0.25 * c.z0_nm.uncertainty);
  CHECK(std::abs(c.ktilde_nn_per_v.value - u.ktilde_nn_per_v.value) <
        0.25 * c.ktilde_nn_per_v.uncertainty);
  CHECK(u.trend.significance < 3.0);
}

TEST_CASE("drifted data: corrected recovery, uncorrected anomalies") {
  const auto& c = noisy_result(true);
  const auto& u = noisy_result(false);
  CHECK(std::abs(c.v0_mv.value + 196.8) <= 1.5);
  CHECK(std::abs(c.m_nm_per_v.value - 104.4) <= 0.5);
  CHECK(std::abs(c.z0_nm.value - 29.5) <= 0.4);
  CHECK(std::abs(c.ktilde_nn_per_v.value - 1.45) <= 0.02);
  CHECK(c.v0_mv.uncertainty > 0.0);
  CHECK(c.m_nm_per_v.uncertainty > 0.0);
  CHECK(c.z0_nm.uncertainty > 0.0);
  CHECK(c.ktilde_nn_per_v.uncertainty > 0.0);
  CHECK(c.drift.rate_nm_per_s == doctest::Approx(0.05).epsilon(0.1));

  CHECK(c.trend.significance < 3.0);
  CHECK(c.trend.within_2sigma > 0.9);
  CHECK(u.trend.monotone);
  CHECK(u.trend.significance > 3.0);
  CHECK(u.trend.within_2sigma < 0.5);

  // z0 against a_end: flat after correction, sloped before.
  auto span = [](const CalibrationResult& r) {
    double lo = 1e9, hi = -1e9;
    for (const auto& f : r.stability) {
      lo = std::min(lo, f.z0_nm.value);
      hi = std::max(hi, f.z0_nm.value);
    }
    return hi - lo;
  };
  CHECK(span(c) < 0.5);
  CHECK(span(u) > 2.0);
  CHECK(u.stability.back().z0_nm.value > u.stability.front().z0_nm.value);
  CHECK(std::abs(u.m_nm_per_v.value - 104.4) > 0.5);
}

TEST_CASE("vertex near 75 nm before and after correction") {
  auto at = [](const CalibrationResult& r, double a) {
    for (const auto& row : r.per_separation) {
      if (row.separation_nm == a) return row.parabola;
    }
    FAIL("no fit at ", a);
    return ParabolaFit{};
  };
  const auto c = at(noisy_result(true), 75.0);
  const auto u = at(noisy_result(false), 75.0);
  CHECK(std::abs(c.v0_mv + 196.8) < 3.0 * c.v0_sigma_mv + 0.05);
  CHECK(u.v0_mv > c.v0_mv + 1.0);
}

TEST_CASE("vertex invariance on the corrected grid") {
  for (const auto& row : noisy_result(true).per_separation) {
    const auto& p = row.parabola;
    const auto volts = symmetric_voltages(p.v0_mv, {1.0, 5.0, 20.0});
    for (double v : volts) {
      const double u = (v - p.v0_mv) * 1e-3;
      CHECK(std::abs(p.beta_per_v * u * u) > 0.0);
    }
    CHECK(p.beta_per_v < 0.0);
  }
}

TEST_CASE("extraction reproduces the input curve") {
  const auto ds = add_sensor_noise(clean_dataset(0.05), default_sensor_noise_v, 2024);
  const auto& calib = noisy_result(true);
  std::vector<double> grid;
  for (double a = 60.0; a <= 300.0; a += 1.0) grid.push_back(a);
  const auto ex = extract_casimir(ds, calib, grid);
  const auto cas = paper_curve();
  REQUIRE(ex.size() > 230);
  std::vector<double> sigmas = ex.sigma_mean_pn;
  std::sort(sigmas.begin(), sigmas.end());
  CHECK(sigmas[sigmas.size() / 2] == doctest::Approx(0.55).epsilon(0.15));
  for (std::size_t k = 0; k < ex.size(); ++k) {
    const double a = ex.separation_nm[k];
    if (a < 70.0) continue;
    CHECK(ex.values_pn[k].size() == 100);
    // Calibration error in z0 moves the curve by F'(a) dz0.
    const double slope = std::abs(cas(a + 0.5) - cas(a - 0.5));
    CAPTURE(a);
    CHECK(std::abs(ex.mean_pn[k] - cas(a)) < 4.0 * ex.sigma_mean_pn[k] + 0.4 * slope);
  }
  const auto at80 = std::find(ex.separation_nm.begin(), ex.separation_nm.end(), 80.0);
  REQUIRE(at80 != ex.separation_nm.end());
  CHECK(ex.mean_pn[static_cast<std::size_t>(at80 - ex.separation_nm.begin())] ==
        doctest::Approx(-144.0).epsilon(0.015));
}

TEST_CASE("extraction at the vertex and linearity") {
  CalibrationResult calib;
  calib.v0_mv = {-196.8, 1.0};
  calib.m_nm_per_v = {104.4, 0.5};
  calib.z0_nm = {29.5, 0.4};
  calib.ktilde_nn_per_v = {1.45, 0.02};
  GridSignals g;
  g.separation_nm = {80.0, 150.0};
  g.voltage_mv = {-196.8, -150.0, -250.0};
  g.s_v = {{-0.1, -0.12, -0.13}, {-0.02, -0.03, -0.035}};
  const auto ex = extract_casimir(g, calib);
  CHECK(ex.values_pn[0][0] == doctest::Approx(1450.0 * -0.1).epsilon(1e-14));
  CHECK(ex.values_pn[1][0] == doctest::Approx(1450.0 * -0.02).epsilon(1e-14));

  gen::Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const double c = rng.uniform(-3.0, 3.0);
    auto scaled = g;
    for (auto& row : scaled.s_v) {
      for (auto& s : row) s *= c;
    }
    const auto ey = extract_casimir(scaled, calib);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < 3; ++i) {
        const double u = (g.voltage_mv[i] - calib.v0_mv.value) * 1e-3;
        const double fel = x_kernel_poly(g.separation_nm[k], 101.2) * u * u;
        CHECK(ey.values_pn[k][i] + fel ==
              doctest::Approx(c * (ex.values_pn[k][i] + fel)).epsilon(1e-12).scale(1.0));
      }
    }
  }

  CalibrationResult empty;
  CHECK_THROWS_AS(extract_casimir(g, empty), ValidationError);
}

TEST_CASE("estimates are unbiased over noise seeds") {
  const auto& clean = clean_dataset(0.05);
  const int seeds = 12;
  double dv = 0.0, dm = 0.0, dz = 0.0, dk = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto r = calibrate(add_sensor_noise(clean, default_sensor_noise_v, 500 + s));
    dv += r.v0_mv.value + 196.8;
    dm += r.m_nm_per_v.value - 104.4;
    dz += r.z0_nm.value - 29.5;
    dk += r.ktilde_nn_per_v.value - 1.45;
  }
  CHECK(std::abs(dv / seeds) < 1.5 / 4.0);
  CHECK(std::abs(dm / seeds) < 0.5 / 4.0);
  CHECK(std::abs(dz / seeds) < 0.4 / 4.0);
  CHECK(std::abs(dk / seeds) < 0.02 / 4.0);
}

TEST_CASE("calibration report") {
  std::stringstream ss;
  write_calibration_report(ss, noisy_result(true));
  const auto text = ss.str();
  for (const char* key : {"V0_mV = ", "m_nm_per_V = ", "z0_nm = ", "ktilde_nN_per_V = ",
                          "drift_nm_per_s = ", "V0_trend_sigma = ", "# a_nm, V0_mV",
                          "# a_end_nm, z0_nm"}) {
    CHECK(text.find(key) != std::string::npos);
  }
}

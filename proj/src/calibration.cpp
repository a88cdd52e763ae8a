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

#include "calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "errors.hpp"
#include "table_io.hpp"

namespace casimir {

namespace {

constexpr double pn_per_nn = 1000.0;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
// Relative floor on curvature uncertainties, so exact data are not weighted
// by rounding noise.
constexpr double beta_sigma_floor = 1e-6;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

std::vector<double> integer_grid(double lo, double hi) {
  std::vector<double> grid;
  for (double a = std::ceil(lo); a <= hi + 1e-9; a += 1.0) grid.push_back(a);
  return grid;
}

// Bracketing gap above which the samples are treated as sparse.
constexpr double sparse_gap_nm = 0.5;
constexpr std::size_t sparse_stencil = 6;

// Linear between neighbours in the dense part of a sweep. Near contact, where
// consecutive samples are nanometres apart, a least-squares quadratic through
// the nearest few samples.
double interpolate_sorted(const std::vector<std::pair<double, double>>& pts, double x) {
  auto it = std::upper_bound(pts.begin(), pts.end(), std::make_pair(x, -1e300));
  std::size_t hi = static_cast<std::size_t>(it - pts.begin());
  hi = std::clamp<std::size_t>(hi, 1, pts.size() - 1);
  const std::size_t lo = hi - 1;
  const double gap = pts[hi].first - pts[lo].first;
  if (gap <= 0.0) return pts[lo].second;
  if (gap <= sparse_gap_nm || pts.size() < sparse_stencil) {
    return pts[lo].second + (x - pts[lo].first) / gap * (pts[hi].second - pts[lo].second);
  }
  std::size_t first = lo >= sparse_stencil / 2 - 1 ? lo - (sparse_stencil / 2 - 1) : 0;
  first = std::min(first, pts.size() - sparse_stencil);
  Eigen::Matrix<double, sparse_stencil, 3> a;
  Eigen::Matrix<double, sparse_stencil, 1> y;
  for (std::size_t i = 0; i < sparse_stencil; ++i) {
    const double d = pts[first + i].first - x;
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = d;
    a(static_cast<Eigen::Index>(i), 2) = d * d;
    y(static_cast<Eigen::Index>(i)) = pts[first + i].second;
  }
  return a.colPivHouseholderQr().solve(y)(0);
}

struct WeightedMean {
  double mean = 0.0;
  double sigma = 0.0;
  double chi2_reduced = 0.0;
  int points = 0;
};

WeightedMean weighted_v0(const std::vector<SeparationFit>& table, double lo, double hi) {
  std::vector<double> v;
  std::vector<double> s;
  for (const auto& row : table) {
    if (row.separation_nm < lo || row.separation_nm > hi) continue;
    v.push_back(row.parabola.v0_mv);
    s.push_back(row.parabola.v0_sigma_mv);
  }
  if (v.empty()) {
    throw FitError(fmt::format("no parabola fits between {} and {} nm", lo, hi));
  }
  const bool weighted = std::all_of(s.begin(), s.end(), [](double x) { return x > 0.0; });
  double sw = 0.0;
  double swv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = weighted ? 1.0 / (s[i] * s[i]) : 1.0;
    sw += w;
    swv += w * v[i];
  }
  WeightedMean out;
  out.points = static_cast<int>(v.size());
  out.mean = swv / sw;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = weighted ? 1.0 / (s[i] * s[i]) : 1.0;
    chi2 += w * (v[i] - out.mean) * (v[i] - out.mean);
  }
  out.chi2_reduced = v.size() > 1 ? chi2 / static_cast<double>(v.size() - 1) : 0.0;
  out.sigma = weighted ? std::sqrt(1.0 / sw) * std::max(1.0, std::sqrt(out.chi2_reduced))
                       : std::sqrt(out.chi2_reduced / sw);
  return out;
}

std::vector<SeparationFit> fit_grid(const GridSignals& grid) {
  std::vector<SeparationFit> table;
  for (std::size_t k = 0; k < grid.separation_nm.size(); ++k) {
    try {
      table.push_back({grid.separation_nm[k], fit_parabola_at_separation(grid, k)});
    } catch (const FitError&) {
      // Too few voltages left this close to contact.
    }
  }
  return table;
}

struct Preliminary {
  std::vector<ContactPoint> contacts;
  Estimate m_raw;
  double v0_rough_mv = 0.0;
  DriftEstimate drift;
};

Preliminary preliminary(const DeflectionDataset& dataset, const CalibrationOptions& options) {
  dataset.validate();
  Preliminary p;
  for (const auto& sweep : dataset.sweeps) {
    p.contacts.push_back(
        find_contact(sweep, options.jump_threshold_v, options.interpolate_contact));
  }
  p.m_raw = fit_deflection_coefficient(dataset, p.contacts, 0.0);
  // Far from contact the drift barely moves the vertex.
  std::vector<double> far;
  for (double s = options.v0_window_nm; s <= options.a_max_nm; s += 25.0) far.push_back(s);
  const auto grid = grid_signals(dataset, p.contacts, p.m_raw.value, 0.0, 0.0, far);
  p.v0_rough_mv = weighted_v0(fit_grid(grid), -1.0, 1e9).mean;
  if (options.correct_drift) {
    p.drift = estimate_drift(dataset, p.contacts, p.v0_rough_mv, options.pair_tolerance_mv);
  }
  return p;
}

} // namespace

void CalibrationTruth::validate() const {
  if (!std::isfinite(v0_mv)) throw ValidationError("V0 must be finite");
  if (!finite_positive(m_nm_per_v)) throw ValidationError("m must be positive");
  if (!finite_positive(z0_nm)) throw ValidationError("z0 must be positive");
  if (!finite_positive(ktilde_nn_per_v)) throw ValidationError("ktilde must be positive");
  if (!std::isfinite(drift_nm_per_s)) throw ValidationError("drift rate must be finite");
  if (!finite_positive(acq_interval_s)) {
    throw ValidationError("acquisition interval must be positive");
  }
}

void SweepSpec::validate(const CalibrationTruth& truth) const {
  if (voltages_mv.empty()) throw ValidationError("sweep spec has no voltages");
  if (rounds < 1) throw ValidationError("need at least one round");
  if (!finite_positive(sweep_period_s)) throw ValidationError("sweep period must be positive");
  if (!finite_positive(approach_speed_nm_per_s) ||
      approach_speed_nm_per_s <= std::abs(truth.drift_nm_per_s)) {
    throw ValidationError("approach speed must be positive and exceed the drift rate");
  }
  if (!(max_separation_nm > truth.z0_nm)) {
    throw ValidationError("maximum separation must exceed z0");
  }
  if (!finite_positive(contact_depth_nm)) throw ValidationError("contact depth must be positive");
  if (!finite_positive(radius_um)) throw ValidationError("sphere radius must be positive");
  const double duration = (max_separation_nm + contact_depth_nm) /
                          (approach_speed_nm_per_s - std::abs(truth.drift_nm_per_s));
  if (duration >= sweep_period_s) {
    throw ValidationError(fmt::format("a sweep takes {:.3g} s, longer than the {} s period",
                                      duration, sweep_period_s));
  }
}

std::vector<double> symmetric_voltages(double v0_mv, const std::vector<double>& offsets_mv) {
  std::vector<double> out;
  for (double u : offsets_mv) {
    if (!finite_positive(u)) throw ValidationError("voltage offsets must be positive");
    out.push_back(v0_mv - u);
    out.push_back(v0_mv + u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> DeflectionDataset::applied_voltages() const {
  std::vector<double> v;
  for (const auto& s : sweeps) v.push_back(s.voltage_mv);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t DeflectionDataset::samples() const {
  std::size_t n = 0;
  for (const auto& s : sweeps) n += s.size();
  return n;
}

void DeflectionDataset::validate() const {
  if (sweeps.empty()) throw ValidationError("dataset has no sweeps");
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    const auto& s = sweeps[i];
    if (s.z_piezo_nm.size() != s.size() || s.s_def_v.size() != s.size()) {
      throw ValidationError(fmt::format("sweep {} has ragged columns", i));
    }
    if (s.size() < 2) throw ValidationError(fmt::format("sweep {} has fewer than 2 samples", i));
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!std::isfinite(s.t_s[j]) || !std::isfinite(s.z_piezo_nm[j]) ||
          !std::isfinite(s.s_def_v[j])) {
        throw ValidationError(fmt::format("sweep {} sample {} is not finite", i, j));
      }
      if (j > 0 && !(s.z_piezo_nm[j] < s.z_piezo_nm[j - 1])) {
        throw ValidationError(fmt::format("z_piezo not decreasing in sweep {} at sample {}", i, j));
      }
      if (j > 0 && !(s.t_s[j] > s.t_s[j - 1])) {
        throw ValidationError(fmt::format("time not increasing in sweep {} at sample {}", i, j));
      }
    }
  }
  const auto v = applied_voltages();
  if (v.size() < 10) {
    throw ValidationError(
        fmt::format("dataset has {} distinct voltages, at least 10 are required", v.size()));
  }
}

DeflectionDataset synthesize_dataset(const CalibrationTruth& truth, const SmoothForce& casimir,
                                     const SweepSpec& spec) {
  truth.validate();
  spec.validate(truth);
  const double ktilde_pn = truth.ktilde_nn_per_v * pn_per_nn;
  const double k = ktilde_pn / truth.m_nm_per_v;
  const double dz = spec.approach_speed_nm_per_s * truth.acq_interval_s;

  std::vector<Sweep> round;
  for (std::size_t i = 0; i < spec.voltages_mv.size(); ++i) {
    const double v = spec.voltages_mv[i];
    const double u = (v - truth.v0_mv) * 1e-3;
    auto total = [&](double a) { return casimir(a) + x_kernel_poly(a, spec.radius_um) * u * u; };
    auto g = [&](double a) { return a - total(a) / k; };
    const auto [a_star, g_min] =
        boost::math::tools::brent_find_minima(g, 1.0, spec.max_separation_nm, 50);

    Sweep sweep;
    sweep.voltage_mv = v;
    const double t_start = static_cast<double>(i) * spec.sweep_period_s;
    // The piezo steps on a fixed lattice, so drift changes where the jump falls
    // between samples.
    const double z_start =
        dz * std::floor((spec.max_separation_nm - truth.z0_nm - truth.drift_nm_per_s * t_start) / dz);
    bool contact = false;
    double a_prev = spec.max_separation_nm;
    for (long j = 0;; ++j) {
      const double t = t_start + static_cast<double>(j) * truth.acq_interval_s;
      const double z = z_start - static_cast<double>(j) * dz;
      const double z_eff = z + truth.drift_nm_per_s * t;
      if (z_eff < -spec.contact_depth_nm) break;
      const double target = truth.z0_nm + z_eff;
      double s;
      if (!contact && target >= g_min) {
        const double hi = std::min(target, a_prev);
        auto f = [&](double a) { return g(a) - target; };
        double a;
        if (f(hi) <= 0.0) {
          a = hi;
        } else {
          std::uintmax_t iters = 100;
          const auto r = boost::math::tools::toms748_solve(
              f, a_star, hi, boost::math::tools::eps_tolerance<double>(48), iters);
          a = 0.5 * (r.first + r.second);
        }
        a_prev = a;
        s = total(a) / ktilde_pn;
      } else {
        contact = true;
        s = -z_eff / truth.m_nm_per_v;
      }
      sweep.t_s.push_back(t);
      sweep.z_piezo_nm.push_back(z);
      sweep.s_def_v.push_back(s);
    }
    round.push_back(std::move(sweep));
  }

  DeflectionDataset out;
  for (int r = 0; r < spec.rounds; ++r) {
    for (const auto& sweep : round) {
      out.sweeps.push_back(sweep);
      out.sweeps.back().round = r;
    }
  }
  return out;
}

DeflectionDataset add_sensor_noise(DeflectionDataset dataset, double sigma_v, std::uint64_t seed) {
  if (!(sigma_v >= 0.0) || !std::isfinite(sigma_v)) {
    throw ValidationError("sensor noise must be non-negative");
  }
  if (sigma_v == 0.0) return dataset;
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, sigma_v);
  for (auto& sweep : dataset.sweeps) {
    for (auto& s : sweep.s_def_v) s += normal(engine);
  }
  return dataset;
}

DeflectionDataset read_dataset(std::istream& in) {
  const auto rows = read_table(in, 4, "dataset");
  DeflectionDataset out;
  int round = 0;
  for (const auto& row : rows) {
    const bool fresh = out.sweeps.empty() || row[0] != out.sweeps.back().voltage_mv ||
                       !(row[2] < out.sweeps.back().z_piezo_nm.back());
    if (fresh) {
      if (!out.sweeps.empty() && row[1] < out.sweeps.back().t_s.back()) ++round;
      out.sweeps.emplace_back();
      out.sweeps.back().voltage_mv = row[0];
      out.sweeps.back().round = round;
    }
    auto& s = out.sweeps.back();
    s.t_s.push_back(row[1]);
    s.z_piezo_nm.push_back(row[2]);
    s.s_def_v.push_back(row[3]);
  }
  out.validate();
  return out;
}

DeflectionDataset load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open dataset file '{}'", path));
  return read_dataset(in);
}

void write_dataset(std::ostream& out, const DeflectionDataset& dataset) {
  out << "voltage_mV, t_s, z_piezo_nm, S_def_V\n";
  for (const auto& s : dataset.sweeps) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      fmt::print(out, "{}, {}, {}, {}\n", s.voltage_mv, s.t_s[j], s.z_piezo_nm[j], s.s_def_v[j]);
    }
  }
}

ContactPoint find_contact(const Sweep& sweep, double jump_v, bool interpolate) {
  if (!finite_positive(jump_v)) throw ValidationError("jump threshold must be positive");
  for (std::size_t j = 1; j < sweep.size(); ++j) {
    if (sweep.s_def_v[j] - sweep.s_def_v[j - 1] < -jump_v) {
      ContactPoint c;
      c.first_contact = j;
      if (interpolate) {
        c.z_nm = 0.5 * (sweep.z_piezo_nm[j - 1] + sweep.z_piezo_nm[j]);
        c.t_s = 0.5 * (sweep.t_s[j - 1] + sweep.t_s[j]);
      } else {
        c.z_nm = sweep.z_piezo_nm[j];
        c.t_s = sweep.t_s[j];
      }
      return c;
    }
  }
  throw ValidationError(
      fmt::format("no jump to contact found in the sweep at {} mV", sweep.voltage_mv));
}

DriftEstimate estimate_drift(const DeflectionDataset& dataset,
                             const std::vector<ContactPoint>& contacts, double v0_mv,
                             double tol_mv) {
  if (contacts.size() != dataset.sweeps.size()) {
    throw ValidationError("one contact point per sweep is required");
  }
  double sxy = 0.0;
  double sxx = 0.0;
  std::vector<std::pair<double, double>> pairs;
  const auto& sw = dataset.sweeps;
  for (std::size_t i = 0; i < sw.size(); ++i) {
    for (std::size_t j = i + 1; j < sw.size(); ++j) {
      if (sw[i].round != sw[j].round) continue;
      if (std::abs(sw[i].voltage_mv - sw[j].voltage_mv) <= tol_mv) continue;
      const double ui = std::abs(sw[i].voltage_mv - v0_mv);
      const double uj = std::abs(sw[j].voltage_mv - v0_mv);
      if (std::abs(ui - uj) > tol_mv) continue;
      const double dt = contacts[j].t_s - contacts[i].t_s;
      if (dt == 0.0) continue;
      const double dz = contacts[j].z_nm - contacts[i].z_nm;
      pairs.emplace_back(dt, dz);
      sxy += dt * dz;
      sxx += dt * dt;
    }
  }
  if (pairs.empty()) {
    throw DriftEstimationError(fmt::format(
        "no two sweeps share |V - V0| within {} mV (V0 = {:.2f} mV)", tol_mv, v0_mv));
  }
  DriftEstimate out;
  out.pairs = static_cast<int>(pairs.size());
  out.rate_nm_per_s = -sxy / sxx;
  if (pairs.size() > 1) {
    double rss = 0.0;
    for (const auto& [dt, dz] : pairs) {
      const double r = dz + out.rate_nm_per_s * dt;
      rss += r * r;
    }
    out.sigma_nm_per_s = std::sqrt(rss / static_cast<double>(pairs.size() - 1) / sxx);
  }
  return out;
}

Estimate fit_deflection_coefficient(const DeflectionDataset& dataset,
                                    const std::vector<ContactPoint>& contacts,
                                    double drift_nm_per_s) {
  if (contacts.size() != dataset.sweeps.size()) {
    throw ValidationError("one contact point per sweep is required");
  }
  double n = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& s = dataset.sweeps[i];
    for (std::size_t j = contacts[i].first_contact; j < s.size(); ++j) {
      n += 1.0;
      sx += s.z_piezo_nm[j] + drift_nm_per_s * s.t_s[j];
      sy += s.s_def_v[j];
    }
  }
  if (n < 3.0) throw FitError("fewer than 3 in-contact samples");
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& s = dataset.sweeps[i];
    for (std::size_t j = contacts[i].first_contact; j < s.size(); ++j) {
      const double x = s.z_piezo_nm[j] + drift_nm_per_s * s.t_s[j] - mx;
      sxx += x * x;
      sxy += x * (s.s_def_v[j] - my);
    }
  }
  if (!(sxx > 0.0)) throw FitError("in-contact samples span no piezo range");
  const double slope = sxy / sxx;
  if (!(slope < 0.0)) throw FitError("in-contact deflection does not fall with z_piezo");
  double rss = 0.0;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& s = dataset.sweeps[i];
    for (std::size_t j = contacts[i].first_contact; j < s.size(); ++j) {
      const double x = s.z_piezo_nm[j] + drift_nm_per_s * s.t_s[j] - mx;
      const double r = s.s_def_v[j] - my - slope * x;
      rss += r * r;
    }
  }
  const double slope_sigma = std::sqrt(rss / (n - 2.0) / sxx);
  return {-1.0 / slope, 2.0 * slope_sigma / (slope * slope)};
}

GridSignals grid_signals(const DeflectionDataset& dataset, const std::vector<ContactPoint>& contacts,
                         double m_nm_per_v, double drift_nm_per_s, double z0_nm,
                         const std::vector<double>& separations_nm) {
  if (contacts.size() != dataset.sweeps.size()) {
    throw ValidationError("one contact point per sweep is required");
  }
  GridSignals out;
  out.separation_nm = separations_nm;
  out.s_v.assign(separations_nm.size(), std::vector<double>(dataset.sweeps.size(), nan));
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < dataset.sweeps.size(); ++i) {
    const auto& s = dataset.sweeps[i];
    out.voltage_mv.push_back(s.voltage_mv);
    pts.clear();
    for (std::size_t j = 0; j < contacts[i].first_contact; ++j) {
      const double sep =
          z0_nm + s.z_piezo_nm[j] + drift_nm_per_s * s.t_s[j] + m_nm_per_v * s.s_def_v[j];
      pts.emplace_back(sep, s.s_def_v[j]);
    }
    if (pts.size() < 2) continue;
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 0; k < separations_nm.size(); ++k) {
      const double a = separations_nm[k];
      if (a < pts.front().first || a > pts.back().first) continue;
      out.s_v[k][i] = interpolate_sorted(pts, a);
    }
  }
  return out;
}

ParabolaFit fit_parabola(const std::vector<double>& voltages_mv, const std::vector<double>& s_v) {
  if (voltages_mv.size() != s_v.size()) throw ValidationError("voltage and signal sizes differ");
  auto distinct = voltages_mv;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) {
    throw FitError(fmt::format("parabola needs 3 distinct voltages, got {}", distinct.size()));
  }
  const auto n = static_cast<Eigen::Index>(s_v.size());
  const double vbar =
      std::accumulate(voltages_mv.begin(), voltages_mv.end(), 0.0) / static_cast<double>(n);
  Eigen::MatrixX3d a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (voltages_mv[static_cast<std::size_t>(i)] - vbar) * 1e-3;
    a(i, 0) = 1.0;
    a(i, 1) = u;
    a(i, 2) = u * u;
    y(i) = s_v[static_cast<std::size_t>(i)];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixX3d> qr(a);
  if (qr.rank() < 3) throw FitError("degenerate voltage set");
  const Eigen::Vector3d c = qr.solve(y);
  const double u_max = a.col(1).cwiseAbs().maxCoeff();
  const double y_max = y.cwiseAbs().maxCoeff();
  if (!c.allFinite() || std::abs(c(2)) * u_max * u_max <= 1e-12 * y_max) {
    throw FitError("parabola has no curvature");
  }
  const double rss = (a * c - y).squaredNorm();
  const double s2 = n > 3 ? rss / static_cast<double>(n - 3) : 0.0;
  const Eigen::Matrix3d cov = s2 * (a.transpose() * a).inverse();

  ParabolaFit out;
  out.points = static_cast<int>(n);
  out.voltages = static_cast<int>(distinct.size());
  const double vertex = -c(1) / (2.0 * c(2));
  out.v0_mv = vbar + 1e3 * vertex;
  out.beta_per_v = c(2);
  out.offset_v = c(0) - c(1) * c(1) / (4.0 * c(2));
  const Eigen::Vector2d grad(-1.0 / (2.0 * c(2)), c(1) / (2.0 * c(2) * c(2)));
  const double var_v = grad.dot(cov.bottomRightCorner<2, 2>() * grad);
  out.v0_sigma_mv = 1e3 * std::sqrt(std::max(0.0, var_v));
  out.beta_sigma = std::sqrt(std::max(0.0, cov(2, 2)));
  return out;
}

ParabolaFit fit_parabola_at_separation(const GridSignals& grid, std::size_t index) {
  if (index >= grid.s_v.size()) throw ValidationError("separation index out of range");
  std::vector<double> v;
  std::vector<double> s;
  for (std::size_t i = 0; i < grid.voltage_mv.size(); ++i) {
    if (std::isnan(grid.s_v[index][i])) continue;
    v.push_back(grid.voltage_mv[i]);
    s.push_back(grid.s_v[index][i]);
  }
  return fit_parabola(v, s);
}

ContactFit fit_contact_and_constant(const std::vector<SeparationFit>& table, double a_end_nm,
                                    double assumed_z0_nm, double a_start_nm, double radius_um) {
  const bool weighted = std::all_of(table.begin(), table.end(), [](const SeparationFit& r) {
    return r.parabola.beta_sigma > 0.0;
  });
  std::vector<double> w;
  for (const auto& r : table) {
    const double scale = std::abs(r.parabola.beta_per_v);
    const double s = weighted ? std::max(r.parabola.beta_sigma, beta_sigma_floor * scale) : scale;
    w.push_back(1.0 / (s * s));
  }
  auto select = [&](double z0) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double a = table[i].separation_nm + z0 - assumed_z0_nm;
      if (a >= a_start_nm && a <= a_end_nm) idx.push_back(i);
    }
    return idx;
  };
  // Best kappa = 1/ktilde for fixed z0 is linear least squares.
  auto solve = [&](double z0, const std::vector<std::size_t>& idx, double& kappa) {
    double sxy = 0.0, sxx = 0.0;
    for (auto i : idx) {
      const double x = x_kernel_poly(table[i].separation_nm + z0 - assumed_z0_nm, radius_um);
      sxy += w[i] * x * table[i].parabola.beta_per_v;
      sxx += w[i] * x * x;
    }
    kappa = sxy / sxx;
    double chi2 = 0.0;
    for (auto i : idx) {
      const double x = x_kernel_poly(table[i].separation_nm + z0 - assumed_z0_nm, radius_um);
      const double r = table[i].parabola.beta_per_v - kappa * x;
      chi2 += w[i] * r * r;
    }
    return chi2;
  };

  const double z_lo = 0.5;
  const double z_hi = 150.0;
  // Start from every point below a_end, then let the window follow z0.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].separation_nm <= a_end_nm) idx.push_back(i);
  }
  double z0 = assumed_z0_nm;
  for (int iter = 0; iter < 20; ++iter) {
    if (idx.size() < 3) break;
    auto fixed = [&](double z) {
      double kappa = 0.0;
      return solve(z, idx, kappa);
    };
    z0 = boost::math::tools::brent_find_minima(fixed, z_lo, z_hi, 50).first;
    auto next = select(z0);
    if (next == idx) break;
    idx = std::move(next);
  }
  if (idx.size() < 3) {
    throw FitError(fmt::format("fewer than 3 beta points in [{}, {}] nm", a_start_nm, a_end_nm));
  }
  double kappa = 0.0;
  const double chi2 = solve(z0, idx, kappa);
  const double n = static_cast<double>(idx.size());
  if (!(kappa > 0.0) || !std::isfinite(kappa) || z0 <= z_lo + 1e-6 || z0 >= z_hi - 1e-6) {
    std::string residuals;
    for (std::size_t k = 0; k < idx.size(); k += std::max<std::size_t>(1, idx.size() / 8)) {
      const auto i = idx[k];
      const double a = table[i].separation_nm + z0 - assumed_z0_nm;
      residuals += fmt::format(" a={:.0f}:{:.3g}", a,
                               table[i].parabola.beta_per_v - kappa * x_kernel_poly(a, radius_um));
    }
    throw FitError(fmt::format("contact fit for a_end = {} nm did not converge (z0 = {:.3g} nm, "
                               "1/ktilde = {:.3g}); residuals:{}",
                               a_end_nm, z0, kappa, residuals));
  }

  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  for (auto i : idx) {
    const double a = table[i].separation_nm + z0 - assumed_z0_nm;
    const Eigen::Vector2d j(kappa * x_kernel_poly_derivative(a, radius_um),
                            x_kernel_poly(a, radius_um));
    m += w[i] * j * j.transpose();
  }
  const double chi2_red = n > 2.0 ? chi2 / (n - 2.0) : 0.0;
  const Eigen::Matrix2d cov = m.inverse() * chi2_red;

  ContactFit out;
  out.a_end_nm = a_end_nm;
  out.points = static_cast<int>(idx.size());
  out.chi2_reduced = chi2_red;
  out.z0_nm = {z0, 2.0 * std::sqrt(std::max(0.0, cov(0, 0)))};
  const double kt = 1.0 / (kappa * pn_per_nn);
  out.ktilde_nn_per_v = {kt, 2.0 * std::sqrt(std::max(0.0, cov(1, 1))) / (kappa * kappa) / pn_per_nn};
  return out;
}

std::vector<double> default_a_end_values() {
  std::vector<double> out;
  for (double a = 1000.0; a >= 400.0; a -= 100.0) out.push_back(a);
  for (double a = 375.0; a >= 150.0; a -= 25.0) out.push_back(a);
  return out;
}

TrendTest v0_trend(const std::vector<SeparationFit>& table, double a_lo_nm, double a_hi_nm) {
  std::vector<double> a, v, s;
  for (const auto& r : table) {
    if (r.separation_nm < a_lo_nm || r.separation_nm > a_hi_nm) continue;
    a.push_back(r.separation_nm);
    v.push_back(r.parabola.v0_mv);
    s.push_back(r.parabola.v0_sigma_mv);
  }
  if (a.size() < 4) throw FitError("trend test needs at least 4 separations");
  const bool weighted = std::all_of(s.begin(), s.end(), [](double x) { return x > 0.0; });
  std::vector<double> w;
  for (double x : s) w.push_back(weighted ? 1.0 / (x * x) : 1.0);

  double sw = 0.0, sa = 0.0, sv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sw += w[i];
    sa += w[i] * a[i];
    sv += w[i] * v[i];
  }
  const double ma = sa / sw;
  const double mv = sv / sw;
  double saa = 0.0, sav = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += w[i] * (a[i] - ma) * (a[i] - ma);
    sav += w[i] * (a[i] - ma) * (v[i] - mv);
  }
  TrendTest out;
  out.slope_mv_per_nm = sav / saa;
  double chi2 = 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = v[i] - mv - out.slope_mv_per_nm * (a[i] - ma);
    chi2 += w[i] * r * r;
    if (std::abs(v[i] - mv) <= 2.0 * s[i]) ++inside;
  }
  const double chi2_red = chi2 / static_cast<double>(a.size() - 2);
  out.slope_sigma = weighted ? std::sqrt(1.0 / saa) * std::max(1.0, std::sqrt(chi2_red))
                             : std::sqrt(chi2_red / saa);
  out.significance = out.slope_sigma > 0.0 ? std::abs(out.slope_mv_per_nm) / out.slope_sigma
                     : out.slope_mv_per_nm == 0.0 ? 0.0
                                                  : std::numeric_limits<double>::infinity();
  out.within_2sigma = static_cast<double>(inside) / static_cast<double>(a.size());

  std::array<double, 4> means{};
  for (std::size_t b = 0; b < 4; ++b) {
    const std::size_t lo = b * a.size() / 4;
    const std::size_t hi = (b + 1) * a.size() / 4;
    double bw = 0.0, bv = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      bw += w[i];
      bv += w[i] * v[i];
    }
    means[b] = bv / bw;
  }
  const bool up = means[0] < means[1] && means[1] < means[2] && means[2] < means[3];
  const bool down = means[0] > means[1] && means[1] > means[2] && means[2] > means[3];
  out.monotone = up || down;
  return out;
}

void CalibrationResult::validate() const {
  if (!std::isfinite(v0_mv.value)) throw ValidationError("calibration result has no V0");
  if (!finite_positive(m_nm_per_v.value)) throw ValidationError("calibration result has no m");
  if (!finite_positive(z0_nm.value)) throw ValidationError("calibration result has no z0");
  if (!finite_positive(ktilde_nn_per_v.value)) {
    throw ValidationError("calibration result has no ktilde");
  }
}

CalibrationResult calibrate(const DeflectionDataset& dataset, const CalibrationOptions& options) {
  const auto pre = preliminary(dataset, options);
  CalibrationResult out;
  out.corrected = options.correct_drift;
  out.contacts = pre.contacts;
  out.drift = pre.drift;
  const double drift = pre.drift.rate_nm_per_s;
  out.m_nm_per_v = fit_deflection_coefficient(dataset, pre.contacts, drift);
  const double m = out.m_nm_per_v.value;

  // z0 is unknown here, so the parabolas are first fitted against z' + m S.
  const auto offset_grid =
      grid_signals(dataset, pre.contacts, m, drift, 0.0, integer_grid(1.0, options.a_max_nm));
  const auto offset_table = fit_grid(offset_grid);
  if (options.a_end_values.empty()) throw ValidationError("no a_end values given");
  for (double a_end : options.a_end_values) {
    out.stability.push_back(
        fit_contact_and_constant(offset_table, a_end, 0.0, options.a_start_nm, options.radius_um));
  }
  const auto widest = std::max_element(
      out.stability.begin(), out.stability.end(),
      [](const ContactFit& x, const ContactFit& y) { return x.a_end_nm < y.a_end_nm; });
  // Inverse-variance mean over the a_end table; the spread of the table is
  // added in quadrature to the widest fit's uncertainty.
  auto summarize = [&](auto field) {
    double sw = 0.0, swx = 0.0;
    for (const auto& f : out.stability) {
      const double u = field(f).uncertainty;
      const double w = u > 0.0 ? 1.0 / (u * u) : 1.0;
      sw += w;
      swx += w * field(f).value;
    }
    const double mean = swx / sw;
    double var = 0.0;
    for (const auto& f : out.stability) var += (field(f).value - mean) * (field(f).value - mean);
    const double sd =
        out.stability.size() > 1 ? std::sqrt(var / static_cast<double>(out.stability.size() - 1))
                                 : 0.0;
    return Estimate{mean, std::hypot(field(*widest).uncertainty, sd)};
  };
  out.z0_nm = summarize([](const ContactFit& f) { return f.z0_nm; });
  out.ktilde_nn_per_v = summarize([](const ContactFit& f) { return f.ktilde_nn_per_v; });

  const auto grid = grid_signals(dataset, pre.contacts, m, drift, out.z0_nm.value,
                                 integer_grid(options.a_start_nm, options.a_max_nm));
  out.per_separation = fit_grid(grid);
  const auto v0 = weighted_v0(out.per_separation, options.a_start_nm, options.v0_window_nm);
  out.v0_mv = {v0.mean, 2.0 * v0.sigma};
  out.trend = v0_trend(out.per_separation, options.a_start_nm, options.v0_window_nm);
  return out;
}

DeflectionDataset correct_systematics(const DeflectionDataset& dataset,
                                      const CalibrationOptions& options) {
  const auto pre = preliminary(dataset, options);
  DeflectionDataset out = dataset;
  for (auto& sweep : out.sweeps) {
    for (std::size_t j = 0; j < sweep.size(); ++j) {
      sweep.z_piezo_nm[j] += pre.drift.rate_nm_per_s * sweep.t_s[j];
    }
  }
  return out;
}

ExtractedForce extract_casimir(const GridSignals& grid, const CalibrationResult& calib,
                               double radius_um) {
  calib.validate();
  const double ktilde_pn = calib.ktilde_nn_per_v.value * pn_per_nn;
  ExtractedForce out;
  for (std::size_t k = 0; k < grid.separation_nm.size(); ++k) {
    const double a = grid.separation_nm[k];
    const double x = x_kernel_poly(a, radius_um);
    std::vector<double> values;
    for (std::size_t i = 0; i < grid.voltage_mv.size(); ++i) {
      const double s = grid.s_v[k][i];
      if (std::isnan(s)) continue;
      const double u = (grid.voltage_mv[i] - calib.v0_mv.value) * 1e-3;
      values.push_back(ktilde_pn * s - x * u * u);
    }
    if (values.empty()) continue;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double f : values) var += (f - mean) * (f - mean);
    out.separation_nm.push_back(a);
    out.mean_pn.push_back(mean);
    out.sigma_mean_pn.push_back(values.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0);
    out.values_pn.push_back(std::move(values));
  }
  return out;
}

ExtractedForce extract_casimir(const DeflectionDataset& dataset, const CalibrationResult& calib,
                               const std::vector<double>& separations_nm,
                               const CalibrationOptions& options) {
  calib.validate();
  auto contacts = calib.contacts;
  if (contacts.size() != dataset.sweeps.size()) {
    contacts.clear();
    for (const auto& s : dataset.sweeps) {
      contacts.push_back(find_contact(s, options.jump_threshold_v, options.interpolate_contact));
    }
  }
  const auto grid = grid_signals(dataset, contacts, calib.m_nm_per_v.value,
                                 calib.drift.rate_nm_per_s, calib.z0_nm.value, separations_nm);
  return extract_casimir(grid, calib, options.radius_um);
}

void write_calibration_report(std::ostream& out, const CalibrationResult& r) {
  fmt::print(out, "corrected = {}\n", r.corrected);
  fmt::print(out, "V0_mV = {:.2f} +- {:.2f}\n", r.v0_mv.value, r.v0_mv.uncertainty);
  fmt::print(out, "m_nm_per_V = {:.2f} +- {:.2f}\n", r.m_nm_per_v.value, r.m_nm_per_v.uncertainty);
  fmt::print(out, "z0_nm = {:.2f} +- {:.2f}\n", r.z0_nm.value, r.z0_nm.uncertainty);
  fmt::print(out, "ktilde_nN_per_V = {:.4f} +- {:.4f}\n", r.ktilde_nn_per_v.value,
             r.ktilde_nn_per_v.uncertainty);
  fmt::print(out, "drift_nm_per_s = {:.5f} +- {:.5f} ({} pairs)\n", r.drift.rate_nm_per_s,
             2.0 * r.drift.sigma_nm_per_s, r.drift.pairs);
  fmt::print(out, "V0_trend_slope_mV_per_nm = {:.5f} +- {:.5f}\n", r.trend.slope_mv_per_nm,
             r.trend.slope_sigma);
  fmt::print(out, "V0_trend_sigma = {:.2f}\n", r.trend.significance);
  fmt::print(out, "V0_trend_monotone = {}\n", r.trend.monotone);
  fmt::print(out, "V0_within_2sigma = {:.3f}\n", r.trend.within_2sigma);
  out << "\n# a_nm, V0_mV, dV0_mV, beta_per_V, dbeta_per_V, voltages\n";
  for (const auto& row : r.per_separation) {
    const auto& p = row.parabola;
    fmt::print(out, "{:.1f}, {:.3f}, {:.3f}, {:.6g}, {:.3g}, {}\n", row.separation_nm, p.v0_mv,
               p.v0_sigma_mv, p.beta_per_v, p.beta_sigma, p.voltages);
  }
  out << "\n# a_end_nm, z0_nm, dz0_nm, ktilde_nN_per_V, dktilde_nN_per_V, chi2_red\n";
  for (const auto& f : r.stability) {
    fmt::print(out, "{:.0f}, {:.3f}, {:.3f}, {:.5f}, {:.5f}, {:.3f}\n", f.a_end_nm, f.z0_nm.value,
               f.z0_nm.uncertainty, f.ktilde_nn_per_v.value, f.ktilde_nn_per_v.uncertainty,
               f.chi2_reduced);
  }
}

TabulatedForce::TabulatedForce(std::vector<double> separation_nm, std::vector<double> force_pn) {
  if (separation_nm.size() != force_pn.size() || separation_nm.size() < 2) {
    throw ValidationError("tabulated force needs at least two matching (a, F) rows");
  }
  sign_ = force_pn.front() < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < separation_nm.size(); ++i) {
    if (!finite_positive(separation_nm[i]) || !(sign_ * force_pn[i] > 0.0)) {
      throw ValidationError("tabulated force needs positive separations and one force sign");
    }
    if (i > 0 && !(separation_nm[i] > separation_nm[i - 1])) {
      throw ValidationError("tabulated force separations must increase");
    }
    log_a_.push_back(std::log(separation_nm[i]));
    log_f_.push_back(std::log(sign_ * force_pn[i]));
  }
  const std::size_t n = log_a_.size();
  auto exponent = [&](std::size_t i) {
    const double p = -(log_f_[i + 1] - log_f_[i]) / (log_a_[i + 1] - log_a_[i]);
    return std::clamp(p, 2.0, 4.0);
  };
  low_exponent_ = exponent(0);
  high_exponent_ = exponent(n - 2);
}

double TabulatedForce::operator()(double a_nm) const {
  if (!finite_positive(a_nm)) throw ValidationError("separation must be positive");
  const double la = std::log(a_nm);
  double lf;
  if (la <= log_a_.front()) {
    lf = log_f_.front() - low_exponent_ * (la - log_a_.front());
  } else if (la >= log_a_.back()) {
    lf = log_f_.back() - high_exponent_ * (la - log_a_.back());
  } else {
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(log_a_.begin(), log_a_.end(), la) - log_a_.begin());
    const std::size_t lo = hi - 1;
    const double w = (la - log_a_[lo]) / (log_a_[hi] - log_a_[lo]);
    lf = log_f_[lo] + w * (log_f_[hi] - log_f_[lo]);
  }
  return sign_ * std::exp(lf);
}

} // namespace casimir

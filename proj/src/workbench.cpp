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

#include "workbench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "paper_data.hpp"
#include "table_io.hpp"

namespace casimir {

namespace {

using boost::property_tree::ptree;
namespace fs = std::filesystem;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Section {
 public:
  Section(const ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

  std::string text(const std::string& key) const {
    const auto it = tree_.find(key);
    if (it == tree_.not_found()) {
      throw ValidationError(fmt::format("[{}] is missing '{}'", name_, key));
    }
    used_.insert(key);
    return trim(it->second.data());
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const {
    const auto s = text(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("[{}] {} = '{}' is not a number", name_, key, s));
    }
  }
  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v)) {
      throw ValidationError(fmt::format("[{}] {} must be an integer", name_, key));
    }
    return static_cast<long>(v);
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto s = text(key);
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ValidationError(fmt::format("[{}] {} = '{}' is not a boolean", name_, key, s));
  }

  void check_unused() const {
    for (const auto& kv : tree_) {
      if (!used_.count(kv.first)) {
        throw ValidationError(fmt::format("[{}] has unknown key '{}'", name_, kv.first));
      }
    }
  }

  const std::string& name() const { return name_; }

 private:
  const ptree& tree_;
  std::string name_;
  mutable std::set<std::string> used_;
};

class ConfigReader {
 public:
  ConfigReader(const ptree& root, fs::path base) : root_(root), base_(std::move(base)) {}

  std::optional<Section> section(const std::string& name) const {
    const auto it = root_.find(name);
    if (it == root_.not_found()) return std::nullopt;
    return Section(it->second, name);
  }

  Section require(const std::string& name) const {
    auto s = section(name);
    if (!s) throw ValidationError(fmt::format("config has no [{}] section", name));
    return *s;
  }

  std::string resolve(const std::string& path) const {
    const fs::path p(path);
    return (p.is_absolute() ? p : base_ / p).string();
  }

  PermittivityModel material(const std::string& name, int depth = 0) const {
    if (depth > 8) throw ValidationError(fmt::format("[{}] nests sums too deeply", name));
    const auto s = require(name);
    const auto type = s.text("type");
    PermittivityModel model;
    if (type == "drude") {
      model = PermittivityModel::drude({s.number("plasma_ev"), s.number("relaxation_ev")});
    } else if (type == "plasma") {
      model = PermittivityModel::plasma({s.number("plasma_ev")});
    } else if (type == "oscillator") {
      model = PermittivityModel::oscillator(
          {s.number("strength_ev2"), s.number("width_ev"), s.number("center_ev")});
    } else if (type == "ninham_parsegian") {
      model = PermittivityModel::ninham_parsegian(
          {s.number("c_ir"), s.number("c_uv"), s.number("omega_ir_ev"), s.number("omega_uv_ev")});
    } else if (type == "tabulated") {
      model = tabulated(s);
    } else if (type == "sum") {
      std::vector<PermittivityModel> parts;
      std::stringstream list(s.text("parts"));
      std::string part;
      while (std::getline(list, part, ',')) {
        part = trim(part);
        if (!part.empty()) parts.push_back(material(part, depth + 1));
      }
      if (parts.empty()) throw ValidationError(fmt::format("[{}] sum has no parts", name));
      model = PermittivityModel::sum(parts);
    } else if (type == "ideal_metal") {
      model = PermittivityModel::ideal_metal();
    } else if (type == "builtin") {
      model = builtin(s);
    } else {
      throw ValidationError(fmt::format("[{}] unknown material type '{}'", name, type));
    }
    if (s.flag("strip_carriers", false)) model = strip_free_carriers(model).model;
    s.check_unused();
    return model;
  }

  RoughnessDistribution roughness(const Section& s, const std::string& key) const {
    const auto v = s.text(key, "flat");
    if (v == "flat") return RoughnessDistribution::flat();
    if (v == "ito") return materials::ito_roughness();
    if (v == "gold") return materials::gold_roughness();
    return load_distribution_file(resolve(v));
  }

 private:
  PermittivityModel tabulated(const Section& s) const {
    std::optional<DrudeParams> low;
    if (s.has("low_plasma_ev") || s.has("low_relaxation_ev")) {
      low = DrudeParams{s.number("low_plasma_ev"), s.number("low_relaxation_ev")};
    }
    std::optional<OscillatorParams> high;
    if (s.has("high_strength_ev2") || s.has("high_width_ev") || s.has("high_center_ev")) {
      high = OscillatorParams{s.number("high_strength_ev2"), s.number("high_width_ev"),
                              s.number("high_center_ev")};
    }
    const double tol = s.number("mismatch_tolerance", TabulatedSpectrum::default_mismatch_tolerance);
    return PermittivityModel::tabulated(
        TabulatedSpectrum(load_spectrum_file(resolve(s.text("file"))), low, high, tol));
  }

  PermittivityModel builtin(const Section& s) const {
    using namespace materials;
    const auto name = s.text("name");
    const auto carriers = parse_carriers(s.text("carriers", "drude"));
    if (name == "gold") return gold(carriers);
    if (name == "quartz") return quartz();
    const auto sample = parse_sample(s.text("sample", "untreated"));
    const auto ext = s.text("extrapolation", "upper");
    Extrapolation e;
    if (ext == "upper") {
      e = Extrapolation::Upper;
    } else if (ext == "lower") {
      e = Extrapolation::Lower;
    } else {
      throw ValidationError(fmt::format("[{}] extrapolation must be upper or lower", s.name()));
    }
    if (name == "ito") return ito(sample, e, carriers);
    throw ValidationError(fmt::format("[{}] unknown builtin '{}'", s.name(), name));
  }

  const ptree& root_;
  fs::path base_;
};

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (at < x.front() || at > x.back()) {
    throw ValidationError(fmt::format("{} nm lies outside the theory grid [{}, {}] nm", at,
                                      x.front(), x.back()));
  }
  const auto hi = std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), at) - x.begin()), x.size() - 1);
  if (hi == 0) return y.front();
  const std::size_t lo = hi - 1;
  const double t = (at - x[lo]) / (x[hi] - x[lo]);
  return y[lo] + t * (y[hi] - y[lo]);
}

std::vector<double> theory_grid(double step) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor(240.0 / step + 1e-9));
  for (int i = 0; i <= n; ++i) grid.push_back(60.0 + step * i);
  if (grid.back() < 300.0) grid.push_back(300.0);
  return grid;
}

} // namespace

TabulatedForce paper_casimir_curve(materials::Sample s) {
  const auto& paper = load_paper_table();
  auto f = paper.force_pn(s, 1);
  for (auto& x : f) x = -x;
  return TabulatedForce(paper.separations_nm(), f);
}

DeflectionDataset synthetic_dataset(const CalibrationSettings& settings) {
  SweepSpec spec;
  spec.voltages_mv = symmetric_voltages(settings.truth.v0_mv, settings.offsets_mv);
  spec.rounds = settings.rounds;
  const auto clean = synthesize_dataset(settings.truth, paper_casimir_curve(), spec);
  return add_sensor_noise(clean, settings.noise_v, settings.seed);
}

WorkbenchConfig parse_config(std::istream& in, const std::string& base_dir) {
  ptree root;
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(fmt::format("config: {}", e.message()));
  }
  const ConfigReader r(root, base_dir);
  WorkbenchConfig cfg;

  if (auto g = r.section("geometry")) {
    cfg.geometry.radius_um = g->number("radius_um", cfg.geometry.radius_um);
    g->check_unused();
  }
  if (auto t = r.section("thermal")) {
    cfg.thermal.temperature_k = t->number("temperature_k", cfg.thermal.temperature_k);
    cfg.thermal.matsubara_rel_tol = t->number("matsubara_rel_tol", cfg.thermal.matsubara_rel_tol);
    cfg.thermal.kperp_rel_tol = t->number("kperp_rel_tol", cfg.thermal.kperp_rel_tol);
    cfg.thermal.l_max_cap = static_cast<int>(t->integer("l_max_cap", cfg.thermal.l_max_cap));
    t->check_unused();
  }

  cfg.stack.sphere = r.material("layer.sphere");
  {
    // thickness_nm lives next to the film's material keys.
    const auto film = r.require("layer.film");
    cfg.stack.film_thickness_nm = film.number("thickness_nm");
    ptree copy = root;
    copy.get_child(ptree::path_type("layer.film", '/')).erase("thickness_nm");
    cfg.stack.film = ConfigReader(copy, base_dir).material("layer.film");
  }
  cfg.stack.substrate = r.material("layer.substrate");

  if (auto s = r.section("roughness")) {
    cfg.plate_roughness = r.roughness(*s, "plate");
    cfg.sphere_roughness = r.roughness(*s, "sphere");
    s->check_unused();
  }
  if (auto c = r.section("calibration")) {
    auto& t = cfg.calibration.truth;
    t.v0_mv = c->number("v0_mv", t.v0_mv);
    t.m_nm_per_v = c->number("m_nm_per_v", t.m_nm_per_v);
    t.z0_nm = c->number("z0_nm", t.z0_nm);
    t.ktilde_nn_per_v = c->number("ktilde_nn_per_v", t.ktilde_nn_per_v);
    t.drift_nm_per_s = c->number("drift_nm_per_s", t.drift_nm_per_s);
    cfg.calibration.noise_v = c->number("noise_mv", cfg.calibration.noise_v * 1e3) * 1e-3;
    const long seed = c->integer("seed", static_cast<long>(cfg.calibration.seed));
    if (seed < 0) throw ValidationError("[calibration] seed must be non-negative");
    cfg.calibration.seed = static_cast<std::uint64_t>(seed);
    cfg.calibration.rounds = static_cast<int>(c->integer("rounds", cfg.calibration.rounds));
    c->check_unused();
    t.validate();
    if (cfg.calibration.noise_v < 0.0) throw ValidationError("[calibration] noise must be >= 0");
    if (cfg.calibration.rounds < 1) throw ValidationError("[calibration] rounds must be >= 1");
  }

  cfg.geometry.validate();
  cfg.thermal.validate();
  cfg.stack.validate();
  return cfg;
}

WorkbenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open config '{}'", path));
  return parse_config(in, fs::path(path).parent_path().string());
}

WorkbenchConfig default_config(materials::Sample s, materials::Extrapolation e,
                               materials::Carriers c) {
  WorkbenchConfig cfg;
  cfg.stack = materials::ito_stack(s, e, c);
  cfg.plate_roughness = materials::ito_roughness();
  cfg.sphere_roughness = materials::gold_roughness();
  return cfg;
}

void write_force_curve(std::ostream& out, const ForceCurve& curve, const std::string& comment) {
  if (!comment.empty()) fmt::print(out, "# {}\n", comment);
  fmt::print(out, "a_nm, F_pN\n");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    fmt::print(out, "{}, {}\n", curve.separation_nm[i], curve.force_pn[i]);
  }
}

ForceCurve read_force_curve(std::istream& in) {
  ForceCurve c;
  for (const auto& row : read_table(in, 2, "force curve")) {
    c.separation_nm.push_back(row[0]);
    c.force_pn.push_back(row[1]);
  }
  return c;
}

ForceCurve rough_force_curve(const LayerStack& stack, const SphereGeometry& geometry,
                             const ThermalConfig& thermal, const RoughnessDistribution& plate,
                             const RoughnessDistribution& sphere,
                             const std::vector<double>& separations_nm) {
  const ForceSolver solver(stack, geometry, thermal);
  const MemoizedForce memo([&](double a) { return solver.force(a); });
  ForceCurve out;
  for (double a : separations_nm) {
    out.separation_nm.push_back(a);
    out.force_pn.push_back(rough_force(memo, plate, sphere, a));
  }
  return out;
}

void TheoryBand::validate() const {
  if (separation_nm.empty()) throw ValidationError("theory band is empty");
  if (lo_pn.size() != separation_nm.size() || hi_pn.size() != separation_nm.size()) {
    throw ValidationError("theory band columns differ in length");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (i > 0 && !(separation_nm[i] > separation_nm[i - 1])) {
      throw ValidationError("theory band separations must increase");
    }
    if (!(lo_pn[i] <= hi_pn[i])) throw ValidationError("theory band has lo > hi");
  }
}

std::pair<double, double> TheoryBand::at(double a_nm) const {
  return {interpolate(separation_nm, lo_pn, a_nm), interpolate(separation_nm, hi_pn, a_nm)};
}

TheoryBand band_from_curves(const ForceCurve& a, const ForceCurve& b) {
  if (a.separation_nm != b.separation_nm) throw ValidationError("band curves are on different grids");
  TheoryBand band;
  band.separation_nm = a.separation_nm;
  for (std::size_t i = 0; i < a.size(); ++i) {
    band.lo_pn.push_back(std::min(a.force_pn[i], b.force_pn[i]));
    band.hi_pn.push_back(std::max(a.force_pn[i], b.force_pn[i]));
  }
  band.validate();
  return band;
}

TheoryBand theory_band(const LayerStack& stack_lo, const LayerStack& stack_hi,
                       const SphereGeometry& geometry, const ThermalConfig& thermal,
                       const RoughnessDistribution& plate, const RoughnessDistribution& sphere,
                       const std::vector<double>& separations_nm) {
  if (separations_nm.empty()) throw ValidationError("theory band needs separations");
  return band_from_curves(
      rough_force_curve(stack_lo, geometry, thermal, plate, sphere, separations_nm),
      rough_force_curve(stack_hi, geometry, thermal, plate, sphere, separations_nm));
}

double ComparisonReport::overlap_fraction() const {
  if (rows.empty()) return 0.0;
  const auto n = std::count_if(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.overlap; });
  return static_cast<double>(n) / static_cast<double>(rows.size());
}

ComparisonReport compare(const TheoryBand& band, const std::vector<double>& separations_nm,
                         const std::vector<double>& force_pn, const std::vector<double>& error_pn,
                         std::string label) {
  band.validate();
  if (separations_nm.empty()) throw ValidationError("no experimental points to compare");
  if (force_pn.size() != separations_nm.size() || error_pn.size() != separations_nm.size()) {
    throw ValidationError("experimental columns differ in length");
  }
  ComparisonReport report;
  report.label = std::move(label);
  for (std::size_t i = 0; i < separations_nm.size(); ++i) {
    if (!(error_pn[i] >= 0.0)) throw ValidationError("experimental errors must be non-negative");
    ComparisonRow r;
    r.separation_nm = separations_nm[i];
    std::tie(r.theory_lo_pn, r.theory_hi_pn) = band.at(r.separation_nm);
    r.force_pn = force_pn[i];
    r.error_pn = error_pn[i];
    r.overlap = r.force_pn - r.error_pn <= r.theory_hi_pn && r.force_pn + r.error_pn >= r.theory_lo_pn;
    report.rows.push_back(r);
  }
  return report;
}

void write_comparison(std::ostream& out, const ComparisonReport& report) {
  if (!report.label.empty()) fmt::print(out, "# {}\n", report.label);
  fmt::print(out, "# a_nm, F_lo_pN, F_hi_pN, F_exp_pN, dtot_pN, overlap\n");
  for (const auto& r : report.rows) {
    fmt::print(out, "{}, {:.4f}, {:.4f}, {}, {:.4f}, {}\n", r.separation_nm, r.theory_lo_pn,
               r.theory_hi_pn, r.force_pn, r.error_pn, r.overlap ? 1 : 0);
  }
  fmt::print(out, "# overlap_fraction = {:.4f}\n", report.overlap_fraction());
}

double uv_reduction(double a_nm) {
  const auto& t = load_paper_table();
  for (const auto& r : t.rows) {
    if (r.a_nm == a_nm) return 1.0 - r.uv_set1 / r.untreated_set1;
  }
  throw ValidationError(fmt::format("no table row at {} nm", a_nm));
}

std::vector<TableInconsistency> table_inconsistencies() {
  std::vector<TableInconsistency> out;
  for (const auto& r : load_paper_table().rows) {
    const double du = std::abs(r.untreated_set1 - r.untreated_set2);
    if (!(du < r.untreated_total_error)) {
      out.push_back({r.a_nm, materials::Sample::Untreated, du, r.untreated_total_error});
    }
    const double dv = std::abs(r.uv_set1 - r.uv_set2);
    if (!(dv < r.uv_total_error)) {
      out.push_back({r.a_nm, materials::Sample::UvTreated, dv, r.uv_total_error});
    }
  }
  return out;
}

TreatmentResult table_comparison(materials::Sample s, materials::Carriers c, double grid_step_nm,
                                 const ThermalConfig& thermal) {
  using namespace materials;
  const auto& paper = load_paper_table();
  const auto seps = paper.separations_nm();
  std::vector<double> force;
  for (double f : paper.force_pn(s, 1)) force.push_back(-f);
  const auto budget = error_budget(seps, paper_budget_inputs(s), paper_systematic_floor(s).floor);
  TreatmentResult t;
  t.carriers = c;
  t.band = theory_band(ito_stack(s, Extrapolation::Lower, c), ito_stack(s, Extrapolation::Upper, c),
                       SphereGeometry{paper.radius_um}, thermal, ito_roughness(), gold_roughness(),
                       theory_grid(grid_step_nm));
  t.comparison = compare(t.band, seps, force, budget.total_pn,
                         fmt::format("{} sample, carriers {}", to_string(s), to_string(c)));
  return t;
}

ReproduceReport reproduce(const ReproduceOptions& options) {
  using namespace materials;
  if (options.repetitions < 30) throw ValidationError("reproduce needs at least 30 repetitions");
  const auto& paper = load_paper_table();
  ReproduceReport rep;
  rep.options = options;
  rep.separation_nm = paper.separations_nm();
  for (double f : paper.force_pn(options.sample, 1)) rep.force_pn.push_back(-f);

  rep.floor = paper_systematic_floor(options.sample);
  rep.budget = error_budget(rep.separation_nm, paper_budget_inputs(options.sample), rep.floor.floor);

  for (auto c : {Carriers::Drude, Carriers::Excluded}) {
    rep.treatments.push_back(table_comparison(options.sample, c, options.grid_step_nm, options.thermal));
  }

  // Repeated measurements at the smallest separation, spread so that the
  // variance of their mean is the published one.
  std::mt19937_64 rng(options.seed);
  const double spread = paper.sample(options.sample).sigma_mean_pn * std::sqrt(options.repetitions);
  std::normal_distribution<double> noise(rep.force_pn.front(), spread);
  std::vector<double> samples;
  for (int i = 0; i < options.repetitions; ++i) samples.push_back(noise(rng));
  rep.resampled_random = random_error(samples);
  rep.histogram = histogram_and_gauss(samples, options.histogram_bin_pn);

  for (double a : rep.separation_nm) rep.uv_reduction.push_back(uv_reduction(a));
  return rep;
}

void write_reproduce_text(std::ostream& out, const ReproduceReport& r) {
  fmt::print(out, "# sample = {}\n# seed = {}\n", materials::to_string(r.options.sample),
             r.options.seed);
  fmt::print(out, "# floor: A = {:.4f} pN, B = {:.4f} pN, p = {:.4f}, max deviation {:.4f} pN\n",
             r.floor.floor.constant_pn, r.floor.floor.short_range_pn, r.floor.floor.exponent,
             r.floor.max_deviation_pn);
  fmt::print(out, "# a_nm, F_pN, dtot_pN, rel_pct, uv_reduction_pct");
  for (const auto& t : r.treatments) {
    const auto* c = materials::to_string(t.carriers);
    fmt::print(out, ", {0}_lo_pN, {0}_hi_pN, {0}_overlap", c);
  }
  fmt::print(out, "\n");
  for (std::size_t i = 0; i < r.separation_nm.size(); ++i) {
    fmt::print(out, "{}, {}, {:.4f}, {:.4f}, {:.2f}", r.separation_nm[i], r.force_pn[i],
               r.budget.total_pn[i], 100.0 * r.budget.total_pn[i] / std::abs(r.force_pn[i]),
               100.0 * r.uv_reduction[i]);
    for (const auto& t : r.treatments) {
      const auto& row = t.comparison.rows[i];
      fmt::print(out, ", {:.4f}, {:.4f}, {}", row.theory_lo_pn, row.theory_hi_pn,
                 row.overlap ? 1 : 0);
    }
    fmt::print(out, "\n");
  }
  for (const auto& t : r.treatments) {
    fmt::print(out, "# overlap_fraction[{}] = {:.4f}\n", materials::to_string(t.carriers),
               t.comparison.overlap_fraction());
  }
  fmt::print(out, "# resampled at {} nm: mean = {:.4f} pN, sigma_mean = {:.4f} pN, dr = {:.4f} pN\n",
             r.separation_nm.front(), r.resampled_random.mean_pn, r.resampled_random.sigma_mean_pn,
             r.resampled_random.delta_pn);
  fmt::print(out, "# histogram: mean = {:.4f} pN, sigma_G = {:.4f} pN\n", r.histogram.mean_pn,
             r.histogram.sigma_pn);
  fmt::print(out, "# bin_lo_pN, bin_hi_pN, fraction, gauss_fraction\n");
  for (std::size_t k = 0; k < r.histogram.bins.size(); ++k) {
    const auto& b = r.histogram.bins[k];
    fmt::print(out, "# {:.4f}, {:.4f}, {:.4f}, {:.4f}\n", b.lo_pn, b.hi_pn, b.fraction,
               r.histogram.gauss_fraction(k));
  }
}

void write_reproduce_json(std::ostream& out, const ReproduceReport& r) {
  nlohmann::json j;
  j["sample"] = materials::to_string(r.options.sample);
  j["seed"] = r.options.seed;
  j["floor"] = {{"constant_pN", r.floor.floor.constant_pn},
                {"short_range_pN", r.floor.floor.short_range_pn},
                {"exponent", r.floor.floor.exponent},
                {"reference_nm", r.floor.floor.reference_nm},
                {"max_deviation_pN", r.floor.max_deviation_pn}};
  j["separation_nm"] = r.separation_nm;
  j["force_pN"] = r.force_pn;
  j["random_pN"] = r.budget.random_pn;
  j["systematic_total_pN"] = r.budget.systematic_total_pn;
  j["systematic_electric_pN"] = r.budget.systematic_electric_pn;
  j["systematic_pN"] = r.budget.systematic_pn;
  j["total_pN"] = r.budget.total_pn;
  j["uv_reduction"] = r.uv_reduction;
  for (const auto& t : r.treatments) {
    nlohmann::json tj;
    tj["carriers"] = materials::to_string(t.carriers);
    tj["band_separation_nm"] = t.band.separation_nm;
    tj["band_lo_pN"] = t.band.lo_pn;
    tj["band_hi_pN"] = t.band.hi_pn;
    std::vector<bool> overlap;
    for (const auto& row : t.comparison.rows) overlap.push_back(row.overlap);
    tj["overlap"] = overlap;
    tj["overlap_fraction"] = t.comparison.overlap_fraction();
    j["treatments"].push_back(tj);
  }
  j["resampled"] = {{"mean_pN", r.resampled_random.mean_pn},
                    {"sigma_mean_pN", r.resampled_random.sigma_mean_pn},
                    {"random_error_pN", r.resampled_random.delta_pn}};
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : r.histogram.bins) bins.push_back({b.lo_pn, b.hi_pn, b.fraction});
  j["histogram"] = {{"mean_pN", r.histogram.mean_pn}, {"sigma_pN", r.histogram.sigma_pn}, {"bins", bins}};
  out << j.dump(2) << '\n';
}

} // namespace casimir

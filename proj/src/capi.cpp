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

#include "casimir.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "electrostatics.hpp"
#include "errors.hpp"
#include "paper_data.hpp"
#include "workbench.hpp"

using namespace casimir;

struct csm_config {
  WorkbenchConfig cfg;
};

struct csm_material {
  PermittivityModel model;
};

struct csm_solver {
  csm_solver(const WorkbenchConfig& c)
      : solver(c.stack, c.geometry, c.thermal),
        memo([this](double a) { return solver.force(a); }),
        plate(c.plate_roughness),
        sphere(c.sphere_roughness) {}
  ForceSolver solver;
  MemoizedForce memo;
  RoughnessDistribution plate;
  RoughnessDistribution sphere;
};

struct csm_dataset {
  DeflectionDataset data;
};

struct csm_calibration {
  CalibrationResult result;
  CalibrationOptions options;
};

namespace {

thread_local std::string last_error;

template <class F>
csm_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return CSM_OK;
  } catch (const ValidationError& e) {
    last_error = e.what();
    return CSM_ERR_VALIDATION;
  } catch (const NumericalError& e) {
    last_error = e.what();
    return CSM_ERR_NUMERICAL;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CSM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CSM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CSM_ERR_INTERNAL;
  }
}

template <class T>
void need(T* p, const char* what) {
  if (p == nullptr) throw ValidationError(fmt::format("{} must not be null", what));
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

materials::Sample to_sample(csm_sample s) {
  switch (s) {
    case CSM_SAMPLE_UNTREATED: return materials::Sample::Untreated;
    case CSM_SAMPLE_UV: return materials::Sample::UvTreated;
  }
  throw ValidationError("unknown sample");
}

materials::Carriers to_carriers(csm_carriers c) {
  switch (c) {
    case CSM_CARRIERS_DRUDE: return materials::Carriers::Drude;
    case CSM_CARRIERS_PLASMA: return materials::Carriers::Plasma;
    case CSM_CARRIERS_EXCLUDED: return materials::Carriers::Excluded;
  }
  throw ValidationError("unknown carrier treatment");
}

materials::Extrapolation to_extrapolation(csm_extrapolation e) {
  switch (e) {
    case CSM_EXTRAPOLATION_UPPER: return materials::Extrapolation::Upper;
    case CSM_EXTRAPOLATION_LOWER: return materials::Extrapolation::Lower;
  }
  throw ValidationError("unknown extrapolation");
}

KernelKind to_kernel(csm_kernel k) {
  switch (k) {
    case CSM_KERNEL_EXACT: return KernelKind::Exact;
    case CSM_KERNEL_POLYNOMIAL: return KernelKind::Polynomial;
  }
  throw ValidationError("unknown kernel");
}

std::vector<double> grid(double from, double to, double step) {
  if (!(std::isfinite(from) && std::isfinite(to) && std::isfinite(step))) {
    throw ValidationError("grid bounds must be finite");
  }
  if (!(step > 0.0) || to < from) throw ValidationError("grid needs step > 0 and to >= from");
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  if (n > 1000000) throw ValidationError("grid has too many points");
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(from + step * static_cast<double>(i));
  return out;
}

CalibrationSettings from_c(const csm_calibration_settings& s) {
  CalibrationSettings out;
  out.truth.v0_mv = s.truth.v0_mv;
  out.truth.m_nm_per_v = s.truth.m_nm_per_v;
  out.truth.z0_nm = s.truth.z0_nm;
  out.truth.ktilde_nn_per_v = s.truth.ktilde_nn_per_v;
  out.truth.drift_nm_per_s = s.truth.drift_nm_per_s;
  out.noise_v = s.noise_v;
  out.seed = s.seed;
  out.rounds = s.rounds;
  out.truth.validate();
  if (!(s.noise_v >= 0.0)) throw ValidationError("noise must be non-negative");
  return out;
}

void to_c(const CalibrationSettings& s, csm_calibration_settings* out) {
  out->truth.v0_mv = s.truth.v0_mv;
  out->truth.m_nm_per_v = s.truth.m_nm_per_v;
  out->truth.z0_nm = s.truth.z0_nm;
  out->truth.ktilde_nn_per_v = s.truth.ktilde_nn_per_v;
  out->truth.drift_nm_per_s = s.truth.drift_nm_per_s;
  out->noise_v = s.noise_v;
  out->seed = s.seed;
  out->rounds = s.rounds;
}

} // namespace

extern "C" {

const char* csm_last_error(void) { return last_error.c_str(); }

const char* csm_version(void) { return "0.1.0"; }

void csm_string_free(char* s) { std::free(s); }

csm_status csm_config_load(const char* path, csm_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new csm_config{load_config(path)};
  });
}

csm_status csm_config_parse(const char* text, const char* base_dir, csm_config** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    std::istringstream in(text);
    *out = new csm_config{parse_config(in, base_dir ? base_dir : ".")};
  });
}

csm_status csm_config_builtin(csm_sample sample, csm_extrapolation extrapolation,
                              csm_carriers carriers, csm_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new csm_config{
        default_config(to_sample(sample), to_extrapolation(extrapolation), to_carriers(carriers))};
  });
}

void csm_config_free(csm_config* cfg) { delete cfg; }

csm_status csm_config_strip_film_carriers(csm_config* cfg) {
  return guard([&] {
    need(cfg, "config");
    cfg->cfg.stack.film = strip_free_carriers(cfg->cfg.stack.film).model;
  });
}

csm_status csm_config_set_temperature(csm_config* cfg, double temperature_k) {
  return guard([&] {
    need(cfg, "config");
    auto t = cfg->cfg.thermal;
    t.temperature_k = temperature_k;
    t.validate();
    cfg->cfg.thermal = t;
  });
}

csm_status csm_config_set_flat(csm_config* cfg) {
  return guard([&] {
    need(cfg, "config");
    cfg->cfg.plate_roughness = RoughnessDistribution::flat();
    cfg->cfg.sphere_roughness = RoughnessDistribution::flat();
  });
}

void csm_calibration_settings_default(csm_calibration_settings* out) {
  if (out != nullptr) to_c(CalibrationSettings{}, out);
}

csm_status csm_config_calibration(const csm_config* cfg, csm_calibration_settings* out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    to_c(cfg->cfg.calibration, out);
  });
}

csm_status csm_config_material(const csm_config* cfg, csm_layer layer, csm_material** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    const auto& s = cfg->cfg.stack;
    switch (layer) {
      case CSM_LAYER_SPHERE: *out = new csm_material{s.sphere}; return;
      case CSM_LAYER_FILM: *out = new csm_material{s.film}; return;
      case CSM_LAYER_SUBSTRATE: *out = new csm_material{s.substrate}; return;
    }
    throw ValidationError("unknown layer");
  });
}

void csm_material_free(csm_material* m) { delete m; }

csm_status csm_material_eps(const csm_material* m, double xi_ev, double* out) {
  return guard([&] {
    need(m, "material");
    need(out, "out");
    *out = m->model.eps_imaginary_axis(xi_ev);
  });
}

csm_status csm_material_im_eps(const csm_material* m, double omega_ev, double* out) {
  return guard([&] {
    need(m, "material");
    need(out, "out");
    *out = m->model.im_eps(omega_ev);
  });
}

int csm_material_has_carriers(const csm_material* m) {
  return m != nullptr && m->model.has_carriers() ? 1 : 0;
}

csm_status csm_permittivity_table(const csm_material* m, double from_ev, double to_ev, int points,
                                  char** out) {
  return guard([&] {
    need(m, "material");
    need(out, "out");
    if (!(from_ev > 0.0 && to_ev > from_ev) || points < 2) {
      throw ValidationError("permittivity table needs 0 < from < to and at least 2 points");
    }
    std::ostringstream s;
    fmt::print(s, "# {}\nxi_eV, eps\n", m->model.describe());
    for (int i = 0; i < points; ++i) {
      const double xi = from_ev * std::pow(to_ev / from_ev, static_cast<double>(i) / (points - 1));
      fmt::print(s, "{}, {}\n", xi, m->model.eps_imaginary_axis(xi));
    }
    *out = copy_string(s.str());
  });
}

csm_status csm_solver_create(const csm_config* cfg, csm_solver** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = new csm_solver(cfg->cfg);
  });
}

void csm_solver_free(csm_solver* s) { delete s; }

csm_status csm_solver_force(const csm_solver* s, double a_nm, double* force_pn, int* terms) {
  return guard([&] {
    need(s, "solver");
    need(force_pn, "force");
    const auto r = s->solver.evaluate(a_nm);
    *force_pn = r.force_pn;
    if (terms != nullptr) *terms = r.matsubara_terms;
  });
}

csm_status csm_solver_rough_force(const csm_solver* s, double a_nm, double* force_pn) {
  return guard([&] {
    need(s, "solver");
    need(force_pn, "force");
    *force_pn = rough_force(s->memo, s->plate, s->sphere, a_nm);
  });
}

csm_status csm_force_table(const csm_config* cfg, double from_nm, double to_nm, double step_nm,
                           int rough, char** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    const auto& c = cfg->cfg;
    const auto seps = grid(from_nm, to_nm, step_nm);
    ForceCurve curve;
    if (rough) {
      curve = rough_force_curve(c.stack, c.geometry, c.thermal, c.plate_roughness,
                                c.sphere_roughness, seps);
    } else {
      curve = force_curve(c.stack, c.geometry, c.thermal, seps);
    }
    std::ostringstream s;
    write_force_curve(s, curve,
                      fmt::format("T = {} K, R = {} um, d = {} nm, {}", c.thermal.temperature_k,
                                  c.geometry.radius_um, c.stack.film_thickness_nm,
                                  rough ? "rough surfaces" : "smooth surfaces"));
    *out = copy_string(s.str());
  });
}

csm_status csm_roughness_levels(const csm_config* cfg, csm_surface surface, double* zero_level_nm,
                                double* rms_nm) {
  return guard([&] {
    need(cfg, "config");
    need(zero_level_nm, "zero level");
    need(rms_nm, "rms");
    const auto& d = surface == CSM_ROUGHNESS_PLATE ? cfg->cfg.plate_roughness
                                                   : cfg->cfg.sphere_roughness;
    if (surface != CSM_ROUGHNESS_PLATE && surface != CSM_ROUGHNESS_SPHERE) {
      throw ValidationError("unknown surface");
    }
    *zero_level_nm = d.zero_level_nm();
    *rms_nm = d.rms_nm();
  });
}

csm_status csm_roughness_table(const csm_config* cfg, double from_nm, double to_nm,
                               double step_nm, char** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    const auto& c = cfg->cfg;
    const ForceSolver solver(c.stack, c.geometry, c.thermal);
    const MemoizedForce memo([&](double a) { return solver.force(a); });
    std::ostringstream s;
    fmt::print(s, "# plate H0 = {:.4f} nm, delta = {:.4f} nm; sphere H0 = {:.4f} nm, delta = {:.4f} nm\n",
               c.plate_roughness.zero_level_nm(), c.plate_roughness.rms_nm(),
               c.sphere_roughness.zero_level_nm(), c.sphere_roughness.rms_nm());
    fmt::print(s, "a_nm, F_smooth_pN, F_rough_pN, correction_pct\n");
    for (double a : grid(from_nm, to_nm, step_nm)) {
      const double smooth = solver.force(a);
      const double rough = rough_force(memo, c.plate_roughness, c.sphere_roughness, a);
      fmt::print(s, "{}, {}, {}, {:.6f}\n", a, smooth, rough, 100.0 * (rough / smooth - 1.0));
    }
    *out = copy_string(s.str());
  });
}

csm_status csm_electrostatic_kernel(double a_nm, double radius_um, csm_kernel kind, double* out) {
  return guard([&] {
    need(out, "out");
    *out = x_kernel(to_kernel(kind), a_nm, radius_um);
  });
}

csm_status csm_electrostatic_force(double a_nm, double radius_um, double v_mv, double v0_mv,
                                   csm_kernel kind, double* out) {
  return guard([&] {
    need(out, "out");
    *out = electrostatic_force(a_nm, radius_um, v_mv, v0_mv, to_kernel(kind));
  });
}

csm_status csm_dataset_synthesize(const csm_calibration_settings* settings, csm_dataset** out) {
  return guard([&] {
    need(settings, "settings");
    need(out, "out");
    *out = new csm_dataset{synthetic_dataset(from_c(*settings))};
  });
}

csm_status csm_dataset_load(const char* path, csm_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new csm_dataset{load_dataset_file(path)};
  });
}

csm_status csm_dataset_save(const csm_dataset* ds, const char* path) {
  return guard([&] {
    need(ds, "dataset");
    need(path, "path");
    std::ofstream f(path);
    if (!f) throw ValidationError(fmt::format("cannot write '{}'", path));
    write_dataset(f, ds->data);
    if (!f) throw ValidationError(fmt::format("failed writing '{}'", path));
  });
}

size_t csm_dataset_sweeps(const csm_dataset* ds) { return ds ? ds->data.sweeps.size() : 0; }

void csm_dataset_free(csm_dataset* ds) { delete ds; }

void csm_calibration_options_default(csm_calibration_options* out) {
  if (out == nullptr) return;
  const CalibrationOptions d;
  out->correct_drift = d.correct_drift ? 1 : 0;
  out->interpolate_contact = d.interpolate_contact ? 1 : 0;
  out->radius_um = d.radius_um;
}

csm_status csm_calibrate(const csm_dataset* ds, const csm_calibration_options* options,
                         csm_calibration** out) {
  return guard([&] {
    need(ds, "dataset");
    need(out, "out");
    CalibrationOptions opt;
    if (options != nullptr) {
      opt.correct_drift = options->correct_drift != 0;
      opt.interpolate_contact = options->interpolate_contact != 0;
      opt.radius_um = options->radius_um;
    }
    *out = new csm_calibration{calibrate(ds->data, opt), opt};
  });
}

void csm_calibration_free(csm_calibration* c) { delete c; }

csm_status csm_calibration_summary_get(const csm_calibration* c, csm_calibration_summary* out) {
  return guard([&] {
    need(c, "calibration");
    need(out, "out");
    const auto& r = c->result;
    out->v0_mv = r.v0_mv.value;
    out->v0_err_mv = r.v0_mv.uncertainty;
    out->m_nm_per_v = r.m_nm_per_v.value;
    out->m_err_nm_per_v = r.m_nm_per_v.uncertainty;
    out->z0_nm = r.z0_nm.value;
    out->z0_err_nm = r.z0_nm.uncertainty;
    out->ktilde_nn_per_v = r.ktilde_nn_per_v.value;
    out->ktilde_err_nn_per_v = r.ktilde_nn_per_v.uncertainty;
    out->drift_nm_per_s = r.drift.rate_nm_per_s;
    out->drift_err_nm_per_s = r.drift.sigma_nm_per_s;
    out->v0_trend_slope_mv_per_nm = r.trend.slope_mv_per_nm;
    out->v0_trend_significance = r.trend.significance;
    out->v0_trend_monotone = r.trend.monotone ? 1 : 0;
  });
}

csm_status csm_calibration_report(const csm_calibration* c, char** out) {
  return guard([&] {
    need(c, "calibration");
    need(out, "out");
    std::ostringstream s;
    write_calibration_report(s, c->result);
    *out = copy_string(s.str());
  });
}

csm_status csm_calibration_extract(const csm_calibration* c, const csm_dataset* ds,
                                   double from_nm, double to_nm, double step_nm, char** out) {
  return guard([&] {
    need(c, "calibration");
    need(ds, "dataset");
    need(out, "out");
    const auto ex = extract_casimir(ds->data, c->result, grid(from_nm, to_nm, step_nm), c->options);
    std::ostringstream s;
    fmt::print(s, "a_nm, F_pN, sigma_mean_pN\n");
    for (std::size_t k = 0; k < ex.size(); ++k) {
      fmt::print(s, "{}, {}, {}\n", ex.separation_nm[k], ex.mean_pn[k], ex.sigma_mean_pn[k]);
    }
    *out = copy_string(s.str());
  });
}

csm_status csm_random_error(const double* samples_pn, size_t n, int exact_student, double* out_pn) {
  return guard([&] {
    need(samples_pn, "samples");
    need(out_pn, "out");
    const std::vector<double> x(samples_pn, samples_pn + n);
    *out_pn = random_error(x, 0.95, exact_student ? StudentCoefficient::Exact
                                                  : StudentCoefficient::Rounded)
                  .delta_pn;
  });
}

csm_status csm_combine_errors(double random_pn, const double* systematic_pn, size_t n,
                              double* systematic_out_pn, double* total_out_pn) {
  return guard([&] {
    if (n > 0) need(systematic_pn, "systematic errors");
    need(systematic_out_pn, "systematic out");
    need(total_out_pn, "total out");
    const std::vector<double> s(systematic_pn, systematic_pn + n);
    const auto c = combine_errors(random_pn, s);
    *systematic_out_pn = c.systematic_pn;
    *total_out_pn = c.total_pn;
  });
}

csm_status csm_error_report(csm_sample sample, char** out) {
  return guard([&] {
    need(out, "out");
    const auto s = to_sample(sample);
    const auto& paper = load_paper_table();
    const auto fit = paper_systematic_floor(s);
    const auto budget = error_budget(paper.separations_nm(), paper_budget_inputs(s), fit.floor);
    std::vector<double> force;
    for (double f : paper.force_pn(s, 1)) force.push_back(-f);
    std::ostringstream str;
    fmt::print(str, "# {} sample, 95% confidence; floor A = {:.4f} pN, B = {:.4f} pN, p = {:.4f}\n",
               materials::to_string(s), fit.floor.constant_pn, fit.floor.short_range_pn,
               fit.floor.exponent);
    write_error_report(str, force, budget);
    *out = copy_string(str.str());
  });
}

csm_status csm_paper_force(csm_sample sample, int set, double a_nm, double* out_pn) {
  return guard([&] {
    need(out_pn, "out");
    const auto& paper = load_paper_table();
    const auto seps = paper.separations_nm();
    const auto f = paper.force_pn(to_sample(sample), set);
    for (std::size_t i = 0; i < seps.size(); ++i) {
      if (seps[i] == a_nm) {
        *out_pn = f[i];
        return;
      }
    }
    throw ValidationError(fmt::format("no table row at {} nm", a_nm));
  });
}

csm_status csm_uv_reduction(double a_nm, double* out) {
  return guard([&] {
    need(out, "out");
    *out = uv_reduction(a_nm);
  });
}

csm_status csm_table_consistent(int* out) {
  return guard([&] {
    need(out, "out");
    *out = table_inconsistencies().empty() ? 1 : 0;
  });
}

csm_status csm_compare(csm_sample sample, csm_carriers carriers, double step_nm,
                       double* overlap_fraction, char** out) {
  return guard([&] {
    const auto t = table_comparison(to_sample(sample), to_carriers(carriers), step_nm);
    if (overlap_fraction != nullptr) *overlap_fraction = t.comparison.overlap_fraction();
    if (out != nullptr) {
      std::ostringstream s;
      write_comparison(s, t.comparison);
      *out = copy_string(s.str());
    }
  });
}

csm_status csm_reproduce(csm_sample sample, uint64_t seed, double step_nm, int json, char** out) {
  return guard([&] {
    need(out, "out");
    ReproduceOptions opt;
    opt.sample = to_sample(sample);
    opt.seed = seed;
    opt.grid_step_nm = step_nm;
    const auto r = reproduce(opt);
    std::ostringstream s;
    if (json) {
      write_reproduce_json(s, r);
    } else {
      write_reproduce_text(s, r);
    }
    *out = copy_string(s.str());
  });
}

} // extern "C"

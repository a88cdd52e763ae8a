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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "casimir.h"

namespace {

// Thrown with the status of a failed library call.
struct Failure {
  csm_status status;
};

void check(csm_status s) {
  if (s != CSM_OK) throw Failure{s};
}

int exit_code(csm_status s) { return s == CSM_ERR_VALIDATION ? 1 : 2; }

struct ConfigDeleter {
  void operator()(csm_config* c) const { csm_config_free(c); }
};
using ConfigPtr = std::unique_ptr<csm_config, ConfigDeleter>;

struct StringDeleter {
  void operator()(char* s) const { csm_string_free(s); }
};
using StringPtr = std::unique_ptr<char, StringDeleter>;

const std::map<std::string, csm_sample> samples{{"untreated", CSM_SAMPLE_UNTREATED},
                                                {"uv", CSM_SAMPLE_UV}};
const std::map<std::string, csm_extrapolation> extrapolations{
    {"upper", CSM_EXTRAPOLATION_UPPER}, {"lower", CSM_EXTRAPOLATION_LOWER}};
const std::map<std::string, csm_carriers> carrier_modes{{"drude", CSM_CARRIERS_DRUDE},
                                                        {"plasma", CSM_CARRIERS_PLASMA},
                                                        {"excluded", CSM_CARRIERS_EXCLUDED}};
const std::map<std::string, csm_layer> layers{
    {"sphere", CSM_LAYER_SPHERE}, {"film", CSM_LAYER_FILM}, {"substrate", CSM_LAYER_SUBSTRATE}};

struct StackOptions {
  std::string config;
  csm_sample sample = CSM_SAMPLE_UNTREATED;
  csm_extrapolation extrapolation = CSM_EXTRAPOLATION_UPPER;
  csm_carriers carriers = CSM_CARRIERS_DRUDE;
  bool carriers_set = false;
  double temperature = 0.0;

  void add(CLI::App* app) {
    app->add_option("--config", config, "Stack config file")->check(CLI::ExistingFile);
    app->add_option("--sample", sample, "Built-in ITO sample")
        ->transform(CLI::CheckedTransformer(samples));
    app->add_option("--extrapolation", extrapolation, "High-frequency extrapolation")
        ->transform(CLI::CheckedTransformer(extrapolations));
    app->add_option_function<csm_carriers>(
           "--carriers",
           [this](const csm_carriers& c) {
             carriers = c;
             carriers_set = true;
           },
           "Film free carriers: drude, plasma or excluded")
        ->transform(CLI::CheckedTransformer(carrier_modes));
    app->add_option("--temperature", temperature, "Override temperature, K");
  }

  ConfigPtr load() const {
    csm_config* raw = nullptr;
    if (config.empty()) {
      check(csm_config_builtin(sample, extrapolation, carriers, &raw));
    } else {
      check(csm_config_load(config.c_str(), &raw));
    }
    ConfigPtr cfg(raw);
    if (!config.empty() && carriers_set) {
      if (carriers == CSM_CARRIERS_EXCLUDED) {
        check(csm_config_strip_film_carriers(cfg.get()));
      } else if (carriers == CSM_CARRIERS_PLASMA) {
        std::cerr << "--carriers plasma applies to the built-in stack only\n";
        throw Failure{CSM_ERR_VALIDATION};
      }
    }
    if (temperature != 0.0) check(csm_config_set_temperature(cfg.get(), temperature));
    return cfg;
  }
};

struct Grid {
  double from = 60.0;
  double to = 300.0;
  double step = 1.0;
  void add(CLI::App* app) {
    app->add_option("--from", from, "First separation, nm")->capture_default_str();
    app->add_option("--to", to, "Last separation, nm")->capture_default_str();
    app->add_option("--step", step, "Separation step, nm")->capture_default_str();
  }
};

class Output {
 public:
  void add(CLI::App* app) { app->add_option("-o,--output", path_, "Write to file instead of stdout"); }
  void write(const std::string& text) const {
    if (path_.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path_);
    if (!f) {
      std::cerr << "cannot write " << path_ << "\n";
      throw Failure{CSM_ERR_VALIDATION};
    }
    f << text;
  }

 private:
  std::string path_;
};

std::string take(char* s) {
  StringPtr owned(s);
  return s ? std::string(s) : std::string();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir force workbench: ITO films, calibration and error analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(csm_version()));

  // permittivity
  auto* perm = app.add_subcommand("permittivity", "eps(i xi) of one layer");
  StackOptions perm_stack;
  perm_stack.add(perm);
  csm_layer layer = CSM_LAYER_FILM;
  double xi_from = 0.01, xi_to = 20.0;
  int xi_points = 50;
  perm->add_option("--layer", layer, "sphere, film or substrate")
      ->transform(CLI::CheckedTransformer(layers));
  perm->add_option("--from", xi_from, "Lowest xi, eV")->capture_default_str();
  perm->add_option("--to", xi_to, "Highest xi, eV")->capture_default_str();
  perm->add_option("--points", xi_points, "Log-spaced points")->capture_default_str();
  Output perm_out;
  perm_out.add(perm);

  // force
  auto* force = app.add_subcommand("force", "Sphere-plate Casimir force table");
  StackOptions force_stack;
  force_stack.add(force);
  Grid force_grid;
  force_grid.add(force);
  bool rough = false;
  force->add_flag("--rough", rough, "Average over the configured surface roughness");
  Output force_out;
  force_out.add(force);

  // roughness
  auto* rough_cmd = app.add_subcommand("roughness", "Roughness correction table");
  StackOptions rough_stack;
  rough_stack.add(rough_cmd);
  Grid rough_grid;
  rough_grid.step = 10.0;
  rough_grid.add(rough_cmd);
  Output rough_out;
  rough_out.add(rough_cmd);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Electrostatic calibration from deflection sweeps");
  std::string cal_config, cal_data, cal_save, cal_extract;
  bool synthetic = false, no_correct = false;
  double drift = 0.0, noise_mv = -1.0;
  std::uint64_t seed = 1;
  bool drift_set = false, seed_set = false;
  cal->add_option("--config", cal_config, "Config with a [calibration] section")
      ->check(CLI::ExistingFile);
  auto* data_opt = cal->add_option("--data", cal_data, "Dataset file")->check(CLI::ExistingFile);
  auto* synth_opt = cal->add_flag("--synthetic", synthetic, "Generate a synthetic dataset");
  data_opt->excludes(synth_opt);
  cal->add_option_function<double>(
      "--drift", [&](const double& d) { drift = d, drift_set = true; }, "Synthetic drift, nm/s");
  cal->add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { seed = s, seed_set = true; }, "Noise seed");
  cal->add_option("--noise-mv", noise_mv, "Synthetic sensor noise, mV");
  cal->add_flag("--no-correct", no_correct, "Skip drift and contact-point corrections");
  cal->add_option("--save", cal_save, "Write the dataset used");
  cal->add_option("--extract", cal_extract, "Write the extracted Casimir force to this file");
  Output cal_out;
  cal_out.add(cal);

  // errors
  auto* errors = app.add_subcommand("errors", "Random, systematic and total errors");
  csm_sample err_sample = CSM_SAMPLE_UNTREATED;
  errors->add_option("--sample", err_sample, "untreated or uv")
      ->transform(CLI::CheckedTransformer(samples));
  Output err_out;
  err_out.add(errors);

  // compare
  auto* cmp = app.add_subcommand("compare", "Theory band against the published forces");
  csm_sample cmp_sample = CSM_SAMPLE_UNTREATED;
  csm_carriers cmp_carriers = CSM_CARRIERS_DRUDE;
  double cmp_step = 1.0;
  cmp->add_option("--sample", cmp_sample, "untreated or uv")
      ->transform(CLI::CheckedTransformer(samples));
  cmp->add_option("--carriers", cmp_carriers, "drude, plasma or excluded")
      ->transform(CLI::CheckedTransformer(carrier_modes));
  cmp->add_option("--step", cmp_step, "Theory grid step, nm")->capture_default_str();
  Output cmp_out;
  cmp_out.add(cmp);

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Full chain from permittivities to comparison");
  csm_sample rep_sample = CSM_SAMPLE_UNTREATED;
  std::uint64_t rep_seed = 1;
  double rep_step = 1.0;
  bool json = false;
  rep->add_option("--sample", rep_sample, "untreated or uv")
      ->transform(CLI::CheckedTransformer(samples));
  rep->add_option("--seed", rep_seed, "Resampling seed")->capture_default_str();
  rep->add_option("--step", rep_step, "Theory grid step, nm")->capture_default_str();
  rep->add_flag("--json", json, "Machine-readable output");
  Output rep_out;
  rep_out.add(rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*perm) {
      const auto cfg = perm_stack.load();
      csm_material* m = nullptr;
      check(csm_config_material(cfg.get(), layer, &m));
      char* text = nullptr;
      const auto s = csm_permittivity_table(m, xi_from, xi_to, xi_points, &text);
      csm_material_free(m);
      check(s);
      perm_out.write(take(text));
    } else if (*force) {
      const auto cfg = force_stack.load();
      char* text = nullptr;
      check(csm_force_table(cfg.get(), force_grid.from, force_grid.to, force_grid.step, rough, &text));
      force_out.write(take(text));
    } else if (*rough_cmd) {
      const auto cfg = rough_stack.load();
      char* text = nullptr;
      check(csm_roughness_table(cfg.get(), rough_grid.from, rough_grid.to, rough_grid.step, &text));
      rough_out.write(take(text));
    } else if (*cal) {
      if (!synthetic && cal_data.empty()) {
        std::cerr << "calibrate needs --synthetic or --data\n";
        return 1;
      }
      csm_calibration_settings settings;
      csm_calibration_settings_default(&settings);
      if (!cal_config.empty()) {
        csm_config* raw = nullptr;
        check(csm_config_load(cal_config.c_str(), &raw));
        const ConfigPtr cfg(raw);
        check(csm_config_calibration(cfg.get(), &settings));
      }
      if (drift_set) settings.truth.drift_nm_per_s = drift;
      if (seed_set) settings.seed = seed;
      if (noise_mv >= 0.0) settings.noise_v = noise_mv * 1e-3;

      csm_dataset* ds = nullptr;
      if (synthetic) {
        check(csm_dataset_synthesize(&settings, &ds));
      } else {
        check(csm_dataset_load(cal_data.c_str(), &ds));
      }
      std::unique_ptr<csm_dataset, void (*)(csm_dataset*)> data(ds, csm_dataset_free);
      if (!cal_save.empty()) check(csm_dataset_save(ds, cal_save.c_str()));

      csm_calibration_options opt;
      csm_calibration_options_default(&opt);
      if (no_correct) opt.correct_drift = opt.interpolate_contact = 0;
      csm_calibration* c = nullptr;
      check(csm_calibrate(ds, &opt, &c));
      std::unique_ptr<csm_calibration, void (*)(csm_calibration*)> result(c, csm_calibration_free);
      char* text = nullptr;
      check(csm_calibration_report(c, &text));
      cal_out.write(take(text));
      if (!cal_extract.empty()) {
        check(csm_calibration_extract(c, ds, 60.0, 300.0, 1.0, &text));
        std::ofstream f(cal_extract);
        if (!f) {
          std::cerr << "cannot write " << cal_extract << "\n";
          return 1;
        }
        f << take(text);
      }
    } else if (*errors) {
      char* text = nullptr;
      check(csm_error_report(err_sample, &text));
      err_out.write(take(text));
    } else if (*cmp) {
      char* text = nullptr;
      double frac = 0.0;
      check(csm_compare(cmp_sample, cmp_carriers, cmp_step, &frac, &text));
      cmp_out.write(take(text));
    } else if (*rep) {
      char* text = nullptr;
      check(csm_reproduce(rep_sample, rep_seed, rep_step, json ? 1 : 0, &text));
      rep_out.write(take(text));
    }
  } catch (const Failure& f) {
    if (*csm_last_error()) std::cerr << "error: " << csm_last_error() << "\n";
    return exit_code(f.status);
  }
  return 0;
}

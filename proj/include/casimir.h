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

#ifndef CASIMIR_H
#define CASIMIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef CASIMIR_BUILDING
#    define CSM_API __declspec(dllexport)
#  else
#    define CSM_API __declspec(dllimport)
#  endif
#else
#  define CSM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Units: nm, pN, eV, K, um (sphere radius), mV (voltages), V (deflection). */

typedef enum {
  CSM_OK = 0,
  CSM_ERR_VALIDATION = 1, /* bad input or violated precondition */
  CSM_ERR_NUMERICAL = 2,  /* valid input, no converged answer */
  CSM_ERR_INTERNAL = 3
} csm_status;

typedef enum { CSM_SAMPLE_UNTREATED = 0, CSM_SAMPLE_UV = 1 } csm_sample;
typedef enum { CSM_EXTRAPOLATION_UPPER = 0, CSM_EXTRAPOLATION_LOWER = 1 } csm_extrapolation;
typedef enum {
  CSM_CARRIERS_DRUDE = 0,
  CSM_CARRIERS_PLASMA = 1,
  CSM_CARRIERS_EXCLUDED = 2
} csm_carriers;
typedef enum { CSM_LAYER_SPHERE = 0, CSM_LAYER_FILM = 1, CSM_LAYER_SUBSTRATE = 2 } csm_layer;
typedef enum { CSM_ROUGHNESS_PLATE = 0, CSM_ROUGHNESS_SPHERE = 1 } csm_surface;
typedef enum { CSM_KERNEL_EXACT = 0, CSM_KERNEL_POLYNOMIAL = 1 } csm_kernel;

typedef struct csm_config csm_config;
typedef struct csm_material csm_material;
typedef struct csm_solver csm_solver;
typedef struct csm_dataset csm_dataset;
typedef struct csm_calibration csm_calibration;

/* Message of the last failed call on this thread; "" after success. */
CSM_API const char* csm_last_error(void);
CSM_API const char* csm_version(void);
/* Frees strings returned through char** out-parameters. */
CSM_API void csm_string_free(char* s);

/* Configuration */
CSM_API csm_status csm_config_load(const char* path, csm_config** out);
CSM_API csm_status csm_config_parse(const char* text, const char* base_dir, csm_config** out);
CSM_API csm_status csm_config_builtin(csm_sample sample, csm_extrapolation extrapolation,
                                      csm_carriers carriers, csm_config** out);
CSM_API void csm_config_free(csm_config* cfg);
CSM_API csm_status csm_config_strip_film_carriers(csm_config* cfg);
CSM_API csm_status csm_config_set_temperature(csm_config* cfg, double temperature_k);
CSM_API csm_status csm_config_set_flat(csm_config* cfg);

typedef struct {
  double v0_mv;
  double m_nm_per_v;
  double z0_nm;
  double ktilde_nn_per_v;
  double drift_nm_per_s;
} csm_calibration_truth;

typedef struct {
  csm_calibration_truth truth;
  double noise_v;
  uint64_t seed;
  int rounds;
} csm_calibration_settings;

CSM_API void csm_calibration_settings_default(csm_calibration_settings* out);
CSM_API csm_status csm_config_calibration(const csm_config* cfg, csm_calibration_settings* out);

/* Permittivity */
CSM_API csm_status csm_config_material(const csm_config* cfg, csm_layer layer, csm_material** out);
CSM_API void csm_material_free(csm_material* m);
CSM_API csm_status csm_material_eps(const csm_material* m, double xi_ev, double* out);
CSM_API csm_status csm_material_im_eps(const csm_material* m, double omega_ev, double* out);
CSM_API int csm_material_has_carriers(const csm_material* m);
/* Table `xi_eV, eps` on a log grid. */
CSM_API csm_status csm_permittivity_table(const csm_material* m, double from_ev, double to_ev,
                                          int points, char** out);

/* Casimir force in the proximity force approximation */
CSM_API csm_status csm_solver_create(const csm_config* cfg, csm_solver** out);
CSM_API void csm_solver_free(csm_solver* s);
/* Smooth-surface force; terms may be NULL. */
CSM_API csm_status csm_solver_force(const csm_solver* s, double a_nm, double* force_pn, int* terms);
/* Averaged over the configured surface roughness. */
CSM_API csm_status csm_solver_rough_force(const csm_solver* s, double a_nm, double* force_pn);
/* Table `a_nm, F_pN`. */
CSM_API csm_status csm_force_table(const csm_config* cfg, double from_nm, double to_nm,
                                   double step_nm, int rough, char** out);

/* Roughness */
CSM_API csm_status csm_roughness_levels(const csm_config* cfg, csm_surface surface,
                                        double* zero_level_nm, double* rms_nm);
/* Table `a_nm, F_smooth_pN, F_rough_pN, correction_pct`. */
CSM_API csm_status csm_roughness_table(const csm_config* cfg, double from_nm, double to_nm,
                                       double step_nm, char** out);

/* Electrostatics: X(a) in pN/V^2. */
CSM_API csm_status csm_electrostatic_kernel(double a_nm, double radius_um, csm_kernel kind,
                                            double* out);
CSM_API csm_status csm_electrostatic_force(double a_nm, double radius_um, double v_mv,
                                           double v0_mv, csm_kernel kind, double* out);

/* Calibration */
CSM_API csm_status csm_dataset_synthesize(const csm_calibration_settings* settings,
                                          csm_dataset** out);
CSM_API csm_status csm_dataset_load(const char* path, csm_dataset** out);
CSM_API csm_status csm_dataset_save(const csm_dataset* ds, const char* path);
CSM_API size_t csm_dataset_sweeps(const csm_dataset* ds);
CSM_API void csm_dataset_free(csm_dataset* ds);

typedef struct {
  int correct_drift;
  int interpolate_contact;
  double radius_um;
} csm_calibration_options;

typedef struct {
  double v0_mv, v0_err_mv;
  double m_nm_per_v, m_err_nm_per_v;
  double z0_nm, z0_err_nm;
  double ktilde_nn_per_v, ktilde_err_nn_per_v;
  double drift_nm_per_s, drift_err_nm_per_s;
  double v0_trend_slope_mv_per_nm;
  double v0_trend_significance;
  int v0_trend_monotone;
} csm_calibration_summary;

CSM_API void csm_calibration_options_default(csm_calibration_options* out);
CSM_API csm_status csm_calibrate(const csm_dataset* ds, const csm_calibration_options* options,
                                 csm_calibration** out);
CSM_API void csm_calibration_free(csm_calibration* c);
CSM_API csm_status csm_calibration_summary_get(const csm_calibration* c,
                                               csm_calibration_summary* out);
CSM_API csm_status csm_calibration_report(const csm_calibration* c, char** out);
/* Table `a_nm, F_pN, sigma_mean_pN` of the mean extracted Casimir force. */
CSM_API csm_status csm_calibration_extract(const csm_calibration* c, const csm_dataset* ds,
                                           double from_nm, double to_nm, double step_nm,
                                           char** out);

/* Errors, 95% confidence */
CSM_API csm_status csm_random_error(const double* samples_pn, size_t n, int exact_student,
                                    double* out_pn);
CSM_API csm_status csm_combine_errors(double random_pn, const double* systematic_pn, size_t n,
                                      double* systematic_out_pn, double* total_out_pn);
/* Error budget on the published separations, `a_nm, F_pN, dr_pN, ds_pN, dtot_pN, rel_pct`. */
CSM_API csm_status csm_error_report(csm_sample sample, char** out);

/* Published data and comparison */
CSM_API csm_status csm_paper_force(csm_sample sample, int set, double a_nm, double* out_pn);
CSM_API csm_status csm_uv_reduction(double a_nm, double* out);
CSM_API csm_status csm_table_consistent(int* out);
CSM_API csm_status csm_compare(csm_sample sample, csm_carriers carriers, double step_nm,
                               double* overlap_fraction, char** out);
CSM_API csm_status csm_reproduce(csm_sample sample, uint64_t seed, double step_nm, int json,
                                 char** out);

#ifdef __cplusplus
}
#endif

#endif

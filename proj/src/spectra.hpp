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

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace casimir {

// Free-carrier response eps = 1 - wp^2 / (w (w + i gamma)). gamma = 0 is the
// dissipationless plasma model.
struct DrudeParams {
  double plasma_frequency_ev = 0.0;
  double relaxation_ev = 0.0;
  void validate() const;
};

struct PlasmaParams {
  double plasma_frequency_ev = 0.0;
  void validate() const;
};

// Lorentz oscillator Im eps(w) = g0 gamma0 w / ((w^2 - w0^2)^2 + gamma0^2 w^2).
struct OscillatorParams {
  double strength_ev2 = 0.0;
  double width_ev = 0.0;
  double center_ev = 0.0;
  void validate() const;
};

// Two undamped oscillators (IR + UV), written directly on the imaginary axis.
struct NinhamParsegianParams {
  double c_ir = 0.0;
  double c_uv = 0.0;
  double omega_ir_ev = 0.0;
  double omega_uv_ev = 0.0;
  void validate() const;
};

// eps -> infinity at every frequency. Used for the perfect-conductor limit.
struct IdealMetal {};

double im_eps(const DrudeParams& p, double omega_ev);
double im_eps(const OscillatorParams& p, double omega_ev);
double eps_imaginary_axis(const DrudeParams& p, double xi_ev);
double eps_imaginary_axis(const PlasmaParams& p, double xi_ev);
double eps_imaginary_axis(const OscillatorParams& p, double xi_ev);
double eps_imaginary_axis(const NinhamParsegianParams& p, double xi_ev);

struct SpectrumPoint {
  double omega_ev;
  double im_eps;
};

// Measured-style Im eps(w) table with analytic extrapolations on both sides.
// Below the table the optional Drude tail is used (absent means an
// insulator-like Im eps ~ w wedge); above it the oscillator tail.
class TabulatedSpectrum {
 public:
  static constexpr double default_mismatch_tolerance = 0.05;
  // Relative quadrature tolerance of the tabulated interval.
  static constexpr double kk_relative_tolerance = 1e-5;

  TabulatedSpectrum(std::vector<SpectrumPoint> points,
                    std::optional<DrudeParams> low_tail,
                    std::optional<OscillatorParams> high_tail,
                    double mismatch_tolerance = default_mismatch_tolerance);

  const std::vector<SpectrumPoint>& points() const { return points_; }
  const std::optional<DrudeParams>& low_tail() const { return low_tail_; }
  const std::optional<OscillatorParams>& high_tail() const { return high_tail_; }
  double mismatch_tolerance() const { return mismatch_tolerance_; }
  double omega_min() const { return points_.front().omega_ev; }
  double omega_max() const { return points_.back().omega_ev; }

  // Interpolated table inside [omega_min, omega_max], tails outside.
  double im_eps(double omega_ev) const;

  // eps(i xi) = 1 + (2/pi) Int_0^inf w Im eps(w) / (w^2 + xi^2) dw.
  double kramers_kronig(double xi_ev) const;

  // Same spectrum with the Drude part removed from table and low tail.
  TabulatedSpectrum without_carriers() const;

 private:
  double table_value(double omega_ev) const;
  double low_tail_integral(double xi_ev) const;
  double table_integral(double xi_ev) const;
  double high_tail_integral(double xi_ev) const;
  bool negligible(double value) const;

  std::vector<SpectrumPoint> points_;
  std::vector<double> log_omega_;
  std::optional<DrudeParams> low_tail_;
  std::optional<OscillatorParams> high_tail_;
  double mismatch_tolerance_;
  double max_im_eps_ = 0.0;
};

// How eps(i xi) behaves as xi -> 0. Needed because the l = 0 Matsubara term
// distinguishes Drude (eps ~ 1/xi) from plasma (eps ~ 1/xi^2) carriers.
enum class StaticKind { Finite, Drude, Plasma, Perfect };

struct StaticLimit {
  StaticKind kind = StaticKind::Finite;
  // Finite: eps(0). Drude: wp^2/gamma [eV]. Plasma: wp^2 [eV^2]. Perfect: unused.
  double coefficient = 1.0;
};

// Finite < Drude < Plasma < Perfect: the stronger divergence dominates.
int static_rank(StaticKind kind);
const char* to_string(StaticKind kind);

class PermittivityModel {
 public:
  using Term = std::variant<DrudeParams, PlasmaParams, OscillatorParams,
                            NinhamParsegianParams,
                            std::shared_ptr<const TabulatedSpectrum>,
                            IdealMetal>;

  // Vacuum: no terms, eps = 1.
  PermittivityModel() = default;

  static PermittivityModel drude(DrudeParams p);
  static PermittivityModel plasma(PlasmaParams p);
  static PermittivityModel oscillator(OscillatorParams p);
  static PermittivityModel ninham_parsegian(NinhamParsegianParams p);
  static PermittivityModel tabulated(TabulatedSpectrum spectrum);
  static PermittivityModel ideal_metal();
  // Susceptibilities add: eps = 1 + sum(eps_k - 1), Im eps = sum Im eps_k.
  static PermittivityModel sum(const std::vector<PermittivityModel>& parts);
  static PermittivityModel from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_vacuum() const { return terms_.empty(); }
  bool is_sum() const { return terms_.size() > 1; }
  bool has_carriers() const;
  bool is_ideal_metal() const;

  // Requires omega > 0.
  double im_eps(double omega_ev) const;
  // Requires xi >= 0; throws DivergentStaticPermittivity at xi = 0 when the
  // static limit is not finite.
  double eps_imaginary_axis(double xi_ev) const;
  StaticLimit static_limit() const;

  std::string describe() const;

 private:
  explicit PermittivityModel(Term t);
  std::vector<Term> terms_;
};

struct StripResult {
  PermittivityModel model;
  std::optional<std::string> warning;
};

// Removes every Drude/plasma contribution; non-carrier terms are kept as-is.
StripResult strip_free_carriers(const PermittivityModel& model);

// Spectrum files: two columns `omega_eV, im_eps`, comma or whitespace
// separated, `#` comments, an optional non-numeric header line.
std::vector<SpectrumPoint> read_spectrum(std::istream& in);
std::vector<SpectrumPoint> load_spectrum_file(const std::string& path);
void write_spectrum(std::ostream& out, const std::vector<SpectrumPoint>& points,
                    const std::string& comment = {});

} // namespace casimir

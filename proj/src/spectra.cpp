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

#include "spectra.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>

#include "errors.hpp"

namespace casimir {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

StaticLimit term_static_limit(const PermittivityModel::Term& term) {
  return std::visit(
      Overloaded{
          [](const DrudeParams& p) {
            const double wp2 = p.plasma_frequency_ev * p.plasma_frequency_ev;
            if (p.relaxation_ev == 0.0) return StaticLimit{StaticKind::Plasma, wp2};
            return StaticLimit{StaticKind::Drude, wp2 / p.relaxation_ev};
          },
          [](const PlasmaParams& p) {
            return StaticLimit{StaticKind::Plasma,
                               p.plasma_frequency_ev * p.plasma_frequency_ev};
          },
          [](const OscillatorParams& p) {
            return StaticLimit{StaticKind::Finite, eps_imaginary_axis(p, 0.0)};
          },
          [](const NinhamParsegianParams& p) {
            return StaticLimit{StaticKind::Finite, eps_imaginary_axis(p, 0.0)};
          },
          [](const std::shared_ptr<const TabulatedSpectrum>& s) {
            if (const auto& tail = s->low_tail()) {
              return term_static_limit(PermittivityModel::Term{*tail});
            }
            return StaticLimit{StaticKind::Finite, s->kramers_kronig(0.0)};
          },
          [](const IdealMetal&) { return StaticLimit{StaticKind::Perfect, 0.0}; },
      },
      term);
}

bool is_carrier_term(const PermittivityModel::Term& term) {
  if (std::holds_alternative<DrudeParams>(term) ||
      std::holds_alternative<PlasmaParams>(term)) {
    return true;
  }
  if (const auto* s = std::get_if<std::shared_ptr<const TabulatedSpectrum>>(&term)) {
    return (*s)->low_tail().has_value();
  }
  return false;
}

} // namespace

void DrudeParams::validate() const {
  if (!(plasma_frequency_ev > 0.0) || !(relaxation_ev >= 0.0)) {
    throw ValidationError(fmt::format(
        "Drude parameters need wp > 0 and gamma >= 0 (got wp={}, gamma={})",
        plasma_frequency_ev, relaxation_ev));
  }
}

void PlasmaParams::validate() const {
  if (!(plasma_frequency_ev > 0.0)) {
    throw ValidationError(fmt::format("plasma frequency must be positive (got {})",
                                      plasma_frequency_ev));
  }
}

void OscillatorParams::validate() const {
  if (!(strength_ev2 > 0.0) || !(width_ev > 0.0) || !(center_ev > 0.0)) {
    throw ValidationError(fmt::format(
        "oscillator parameters must be positive (g0={}, gamma0={}, w0={})",
        strength_ev2, width_ev, center_ev));
  }
}

void NinhamParsegianParams::validate() const {
  if (!(c_ir > 0.0) || !(c_uv > 0.0) || !(omega_ir_ev > 0.0) || !(omega_uv_ev > 0.0)) {
    throw ValidationError("Ninham-Parsegian parameters must all be positive");
  }
}

double im_eps(const DrudeParams& p, double omega_ev) {
  if (omega_ev <= 0.0) {
    throw DivergentInputError("Drude Im eps diverges at omega = 0");
  }
  const double g = p.relaxation_ev;
  return p.plasma_frequency_ev * p.plasma_frequency_ev * g /
         (omega_ev * (omega_ev * omega_ev + g * g));
}

double im_eps(const OscillatorParams& p, double omega_ev) {
  const double w2 = omega_ev * omega_ev;
  const double detune = w2 - p.center_ev * p.center_ev;
  return p.strength_ev2 * p.width_ev * omega_ev /
         (detune * detune + p.width_ev * p.width_ev * w2);
}

double eps_imaginary_axis(const DrudeParams& p, double xi_ev) {
  if (xi_ev == 0.0) {
    throw DivergentStaticPermittivity("divergent static permittivity (Drude term)");
  }
  return 1.0 + p.plasma_frequency_ev * p.plasma_frequency_ev /
                   (xi_ev * (xi_ev + p.relaxation_ev));
}

double eps_imaginary_axis(const PlasmaParams& p, double xi_ev) {
  if (xi_ev == 0.0) {
    throw DivergentStaticPermittivity("divergent static permittivity (plasma term)");
  }
  return 1.0 + p.plasma_frequency_ev * p.plasma_frequency_ev / (xi_ev * xi_ev);
}

double eps_imaginary_axis(const OscillatorParams& p, double xi_ev) {
  return 1.0 + p.strength_ev2 / (p.center_ev * p.center_ev + p.width_ev * xi_ev +
                                 xi_ev * xi_ev);
}

double eps_imaginary_axis(const NinhamParsegianParams& p, double xi_ev) {
  const double ir = xi_ev / p.omega_ir_ev;
  const double uv = xi_ev / p.omega_uv_ev;
  return 1.0 + p.c_ir / (1.0 + ir * ir) + p.c_uv / (1.0 + uv * uv);
}

int static_rank(StaticKind kind) {
  switch (kind) {
    case StaticKind::Finite: return 0;
    case StaticKind::Drude: return 1;
    case StaticKind::Plasma: return 2;
    case StaticKind::Perfect: return 3;
  }
  return 0;
}

const char* to_string(StaticKind kind) {
  switch (kind) {
    case StaticKind::Finite: return "finite";
    case StaticKind::Drude: return "drude";
    case StaticKind::Plasma: return "plasma";
    case StaticKind::Perfect: return "perfect";
  }
  return "?";
}

PermittivityModel::PermittivityModel(Term t) { terms_.push_back(std::move(t)); }

PermittivityModel PermittivityModel::drude(DrudeParams p) {
  p.validate();
  return PermittivityModel(Term{p});
}

PermittivityModel PermittivityModel::plasma(PlasmaParams p) {
  p.validate();
  return PermittivityModel(Term{p});
}

PermittivityModel PermittivityModel::oscillator(OscillatorParams p) {
  p.validate();
  return PermittivityModel(Term{p});
}

PermittivityModel PermittivityModel::ninham_parsegian(NinhamParsegianParams p) {
  p.validate();
  return PermittivityModel(Term{p});
}

PermittivityModel PermittivityModel::tabulated(TabulatedSpectrum spectrum) {
  return PermittivityModel(
      Term{std::make_shared<const TabulatedSpectrum>(std::move(spectrum))});
}

PermittivityModel PermittivityModel::from_terms(std::vector<Term> terms) {
  PermittivityModel out;
  out.terms_ = std::move(terms);
  if (out.is_ideal_metal() && out.terms_.size() > 1) {
    throw ValidationError("an ideal metal cannot be combined with other terms");
  }
  return out;
}

PermittivityModel PermittivityModel::ideal_metal() { return PermittivityModel(Term{IdealMetal{}}); }

PermittivityModel PermittivityModel::sum(const std::vector<PermittivityModel>& parts) {
  PermittivityModel out;
  for (const auto& part : parts) {
    out.terms_.insert(out.terms_.end(), part.terms_.begin(), part.terms_.end());
  }
  if (out.is_ideal_metal() && out.terms_.size() > 1) {
    throw ValidationError("an ideal metal cannot be combined with other terms");
  }
  return out;
}

bool PermittivityModel::has_carriers() const {
  for (const auto& t : terms_) {
    if (is_carrier_term(t)) return true;
  }
  return false;
}

bool PermittivityModel::is_ideal_metal() const {
  for (const auto& t : terms_) {
    if (std::holds_alternative<IdealMetal>(t)) return true;
  }
  return false;
}

double PermittivityModel::im_eps(double omega_ev) const {
  if (!(omega_ev > 0.0)) {
    if (has_carriers()) {
      throw DivergentInputError("Im eps of a free-carrier model diverges at omega = 0");
    }
    throw ValidationError("Im eps requires omega > 0");
  }
  double total = 0.0;
  for (const auto& term : terms_) {
    total += std::visit(
        Overloaded{
            [&](const DrudeParams& p) { return casimir::im_eps(p, omega_ev); },
            [](const PlasmaParams&) { return 0.0; },
            [&](const OscillatorParams& p) { return casimir::im_eps(p, omega_ev); },
            // Undamped oscillators: absorption only at the resonances.
            [](const NinhamParsegianParams&) { return 0.0; },
            [&](const std::shared_ptr<const TabulatedSpectrum>& s) {
              return s->im_eps(omega_ev);
            },
            [](const IdealMetal&) -> double {
              throw ValidationError("an ideal metal has no finite Im eps");
            },
        },
        term);
  }
  return total;
}

double PermittivityModel::eps_imaginary_axis(double xi_ev) const {
  if (!(xi_ev >= 0.0)) {
    throw ValidationError("eps(i xi) requires xi >= 0");
  }
  if (xi_ev == 0.0) {
    const StaticLimit limit = static_limit();
    if (limit.kind != StaticKind::Finite) {
      throw DivergentStaticPermittivity(fmt::format(
          "divergent static permittivity ({} carriers)", to_string(limit.kind)));
    }
    return limit.coefficient;
  }
  double chi = 0.0;
  for (const auto& term : terms_) {
    chi += std::visit(
        Overloaded{
            [&](const DrudeParams& p) { return casimir::eps_imaginary_axis(p, xi_ev) - 1.0; },
            [&](const PlasmaParams& p) { return casimir::eps_imaginary_axis(p, xi_ev) - 1.0; },
            [&](const OscillatorParams& p) {
              return casimir::eps_imaginary_axis(p, xi_ev) - 1.0;
            },
            [&](const NinhamParsegianParams& p) {
              return casimir::eps_imaginary_axis(p, xi_ev) - 1.0;
            },
            [&](const std::shared_ptr<const TabulatedSpectrum>& s) {
              return s->kramers_kronig(xi_ev) - 1.0;
            },
            [](const IdealMetal&) { return std::numeric_limits<double>::infinity(); },
        },
        term);
  }
  return 1.0 + chi;
}

StaticLimit PermittivityModel::static_limit() const {
  StaticLimit out{StaticKind::Finite, 1.0};
  for (const auto& term : terms_) {
    const StaticLimit t = term_static_limit(term);
    if (static_rank(t.kind) > static_rank(out.kind)) {
      out = t;
    } else if (t.kind == out.kind) {
      out.coefficient += (t.kind == StaticKind::Finite) ? t.coefficient - 1.0 : t.coefficient;
    }
  }
  return out;
}

std::string PermittivityModel::describe() const {
  if (terms_.empty()) return "vacuum";
  std::ostringstream os;
  bool first = true;
  for (const auto& term : terms_) {
    if (!first) os << " + ";
    first = false;
    std::visit(
        Overloaded{
            [&](const DrudeParams& p) {
              os << fmt::format("drude(wp={:g} eV, gamma={:g} eV)", p.plasma_frequency_ev,
                                p.relaxation_ev);
            },
            [&](const PlasmaParams& p) {
              os << fmt::format("plasma(wp={:g} eV)", p.plasma_frequency_ev);
            },
            [&](const OscillatorParams& p) {
              os << fmt::format("oscillator(g0={:g} eV^2, gamma0={:g} eV, w0={:g} eV)",
                                p.strength_ev2, p.width_ev, p.center_ev);
            },
            [&](const NinhamParsegianParams& p) {
              os << fmt::format("ninham_parsegian(C_IR={:g}, C_UV={:g}, w_IR={:g} eV, "
                                "w_UV={:g} eV)",
                                p.c_ir, p.c_uv, p.omega_ir_ev, p.omega_uv_ev);
            },
            [&](const std::shared_ptr<const TabulatedSpectrum>& s) {
              os << fmt::format("tabulated({} points, {:g}..{:g} eV{}{})", s->points().size(),
                                s->omega_min(), s->omega_max(),
                                s->low_tail() ? ", drude low tail" : "",
                                s->high_tail() ? ", oscillator high tail" : "");
            },
            [&](const IdealMetal&) { os << "ideal_metal"; },
        },
        term);
  }
  return os.str();
}

StripResult strip_free_carriers(const PermittivityModel& model) {
  if (!model.has_carriers()) {
    return {model, std::string("model has no free-carrier term; returned unchanged")};
  }
  std::vector<PermittivityModel::Term> kept;
  for (const auto& term : model.terms()) {
    if (std::holds_alternative<DrudeParams>(term) || std::holds_alternative<PlasmaParams>(term)) {
      continue;
    }
    if (const auto* s = std::get_if<std::shared_ptr<const TabulatedSpectrum>>(&term)) {
      if ((*s)->low_tail()) {
        kept.emplace_back(std::make_shared<const TabulatedSpectrum>((*s)->without_carriers()));
        continue;
      }
    }
    kept.push_back(term);
  }
  return {PermittivityModel::from_terms(std::move(kept)), std::nullopt};
}

} // namespace casimir

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

#include <stdexcept>
#include <string>

namespace casimir {

// Root of every error raised by the library. The C API maps the two
// families below onto its status codes (and the CLI onto exit codes 1 and 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed files, violated preconditions, inconsistent data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The numerics could not produce an answer for otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IncompleteSpectrumError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// No pair of sweeps with equal |V - V0| to measure drift from.
class DriftEstimationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// eps(i*xi) is infinite at xi = 0 for free-carrier models; callers that need
// the static limit should ask for StaticLimit instead.
class DivergentStaticPermittivity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergentInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Matsubara sum did not meet its tolerance before the term cap.
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, double partial_sum_pn,
                  double tail_estimate_pn, int terms)
      : NumericalError(what),
        partial_sum_pn_(partial_sum_pn),
        tail_estimate_pn_(tail_estimate_pn),
        terms_(terms) {}

  double partial_sum_pn() const { return partial_sum_pn_; }
  double tail_estimate_pn() const { return tail_estimate_pn_; }
  int terms() const { return terms_; }

 private:
  double partial_sum_pn_;
  double tail_estimate_pn_;
  int terms_;
};

} // namespace casimir

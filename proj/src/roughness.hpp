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

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace casimir {

struct RoughnessEntry {
  double fraction = 0.0;
  double height_nm = 0.0;
};

struct RoughnessLevels {
  double zero_level_nm = 0.0;  // H0, mean height
  double rms_nm = 0.0;         // delta
};

// Requires the fractions to sum to 1 within 1e-9.
RoughnessLevels derive_levels(const std::vector<RoughnessEntry>& entries);

// Fraction of surface area v_i at height h_i above the lowest point.
class RoughnessDistribution {
 public:
  static constexpr double normalization_tolerance = 1e-9;

  explicit RoughnessDistribution(std::vector<RoughnessEntry> entries);
  static RoughnessDistribution flat();

  const std::vector<RoughnessEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double zero_level_nm() const { return levels_.zero_level_nm; }
  double rms_nm() const { return levels_.rms_nm; }
  double max_height_nm() const { return max_height_; }

 private:
  std::vector<RoughnessEntry> entries_;
  RoughnessLevels levels_;
  double max_height_ = 0.0;
};

// Gaussian-weighted bins on equally spaced heights, shaped so the mean and
// rms match the targets and the lowest bin sits at zero.
RoughnessDistribution synthetic_distribution(int bins, double zero_level_nm, double rms_nm);

using SmoothForce = std::function<double(double)>;

// Average of the smooth force over every pair of plate and sphere heights.
double rough_force(const SmoothForce& smooth, const RoughnessDistribution& plate,
                   const RoughnessDistribution& sphere, double a_nm);

// Smooth force sampled on a fixed grid (default 0.5 nm) and interpolated with
// a four-point Lagrange stencil in log|F| vs log a. Copies share one cache.
// Not safe for concurrent use.
class MemoizedForce {
 public:
  explicit MemoizedForce(SmoothForce smooth, double step_nm = 0.5);
  double operator()(double a_nm) const;
  std::size_t evaluations() const { return cache_->size(); }

 private:
  double node(long k) const;

  SmoothForce smooth_;
  double step_;
  std::shared_ptr<std::map<long, double>> cache_;
};

// Distribution files: `fraction, height_nm` rows.
RoughnessDistribution read_distribution(std::istream& in);
RoughnessDistribution load_distribution_file(const std::string& path);
void write_distribution(std::ostream& out, const RoughnessDistribution& dist,
                        const std::string& comment = {});

} // namespace casimir

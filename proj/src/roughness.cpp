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

#include "roughness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "errors.hpp"
#include "table_io.hpp"

namespace casimir {

RoughnessLevels derive_levels(const std::vector<RoughnessEntry>& entries) {
  if (entries.empty()) throw ValidationError("roughness distribution has no entries");
  double total = 0.0;
  double mean = 0.0;
  for (const auto& e : entries) {
    if (!(e.fraction >= 0.0) || !std::isfinite(e.height_nm)) {
      throw ValidationError("roughness fractions must be >= 0 and heights finite");
    }
    total += e.fraction;
    mean += e.fraction * e.height_nm;
  }
  if (std::abs(total - 1.0) > RoughnessDistribution::normalization_tolerance) {
    throw ValidationError(
        fmt::format("roughness fractions sum to {:.12g}, expected 1", total));
  }
  double var = 0.0;
  for (const auto& e : entries) {
    const double dev = mean - e.height_nm;
    var += e.fraction * dev * dev;
  }
  return {mean, std::sqrt(var)};
}

RoughnessDistribution::RoughnessDistribution(std::vector<RoughnessEntry> entries)
    : entries_(std::move(entries)) {
  levels_ = derive_levels(entries_);
  double min_height = entries_.front().height_nm;
  max_height_ = min_height;
  for (const auto& e : entries_) {
    if (e.height_nm < 0.0) throw ValidationError("roughness heights must be >= 0");
    min_height = std::min(min_height, e.height_nm);
    max_height_ = std::max(max_height_, e.height_nm);
  }
  if (min_height != 0.0) {
    throw ValidationError(
        fmt::format("lowest roughness height must be 0 (got {} nm)", min_height));
  }
}

RoughnessDistribution RoughnessDistribution::flat() {
  return RoughnessDistribution({{1.0, 0.0}});
}

RoughnessDistribution synthetic_distribution(int bins, double zero_level_nm, double rms_nm) {
  if (bins < 3) throw ValidationError("a synthetic distribution needs at least 3 bins");
  if (!(zero_level_nm > 0.0) || !(rms_nm > 0.0)) {
    throw ValidationError("synthetic distribution targets must be positive");
  }
  const double target = zero_level_nm / rms_nm;
  const double top = bins - 1;
  const double width = top / (target + 3.0);

  auto moments = [&](double center) {
    std::vector<double> w(static_cast<std::size_t>(bins));
    double total = 0.0;
    for (int j = 0; j < bins; ++j) {
      const double z = (j - center) / width;
      w[static_cast<std::size_t>(j)] = std::exp(-0.5 * z * z);
      total += w[static_cast<std::size_t>(j)];
    }
    for (double& x : w) x /= total;
    double mean = 0.0;
    for (int j = 0; j < bins; ++j) mean += w[static_cast<std::size_t>(j)] * j;
    double var = 0.0;
    for (int j = 0; j < bins; ++j) var += w[static_cast<std::size_t>(j)] * (j - mean) * (j - mean);
    return std::tuple{w, mean, std::sqrt(var)};
  };
  auto mismatch = [&](double center) {
    const auto [w, mean, sd] = moments(center);
    return mean / sd - target;
  };

  if (mismatch(0.0) >= 0.0 || mismatch(top) <= 0.0) {
    throw ValidationError(fmt::format(
        "cannot shape {} bins to H0/delta = {:.4g}", bins, target));
  }
  boost::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      mismatch, 0.0, top, boost::math::tools::eps_tolerance<double>(50), iterations);
  const double center = 0.5 * (bracket.first + bracket.second);
  const auto [weights, mean, sd] = moments(center);
  const double scale = rms_nm / sd;

  std::vector<RoughnessEntry> entries;
  for (int j = 0; j < bins; ++j) {
    entries.push_back({weights[static_cast<std::size_t>(j)], scale * j});
  }
  return RoughnessDistribution(std::move(entries));
}

double rough_force(const SmoothForce& smooth, const RoughnessDistribution& plate,
                   const RoughnessDistribution& sphere, double a_nm) {
  const double base = a_nm + plate.zero_level_nm() + sphere.zero_level_nm();
  const auto& pe = plate.entries();
  const auto& se = sphere.entries();
  for (std::size_t i = 0; i < pe.size(); ++i) {
    for (std::size_t k = 0; k < se.size(); ++k) {
      const double sep = base - pe[i].height_nm - se[k].height_nm;
      if (!(sep > 0.0)) {
        throw DomainError(fmt::format(
            "non-positive effective separation {:.4g} nm for plate bin {} and sphere bin {} "
            "at a = {} nm",
            sep, i, k, a_nm));
      }
    }
  }
  double total = 0.0;
  for (const auto& p : pe) {
    double row = 0.0;
    for (const auto& s : se) {
      row += s.fraction * smooth(base - p.height_nm - s.height_nm);
    }
    total += p.fraction * row;
  }
  return total;
}

MemoizedForce::MemoizedForce(SmoothForce smooth, double step_nm)
    : smooth_(std::move(smooth)), step_(step_nm), cache_(std::make_shared<std::map<long, double>>()) {
  if (!(step_ > 0.0)) throw ValidationError("memoization step must be positive");
}

double MemoizedForce::node(long k) const {
  auto it = cache_->find(k);
  if (it != cache_->end()) return it->second;
  const double value = smooth_(step_ * static_cast<double>(k));
  cache_->emplace(k, value);
  return value;
}

double MemoizedForce::operator()(double a_nm) const {
  const double pos = a_nm / step_;
  const long k = static_cast<long>(std::floor(pos));
  if (static_cast<double>(k) == pos) return node(k);
  double xs[4];
  double fs[4];
  bool logs = true;
  for (int j = 0; j < 4; ++j) {
    const long idx = k - 1 + j;
    xs[j] = step_ * static_cast<double>(idx);
    fs[j] = node(idx);
    if (xs[j] <= 0.0) logs = false;
  }
  const double sign = fs[0] < 0.0 ? -1.0 : 1.0;
  for (double f : fs) {
    if (!(f * sign > 0.0)) logs = false;
  }
  const double x = logs ? std::log(a_nm) : a_nm;
  double result = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double xj = logs ? std::log(xs[j]) : xs[j];
    double basis = 1.0;
    for (int m = 0; m < 4; ++m) {
      if (m == j) continue;
      const double xm = logs ? std::log(xs[m]) : xs[m];
      basis *= (x - xm) / (xj - xm);
    }
    result += basis * (logs ? std::log(sign * fs[j]) : fs[j]);
  }
  return logs ? sign * std::exp(result) : result;
}

RoughnessDistribution read_distribution(std::istream& in) {
  std::vector<RoughnessEntry> entries;
  for (const auto& row : read_table(in, 2, "roughness distribution")) {
    entries.push_back({row[0], row[1]});
  }
  return RoughnessDistribution(std::move(entries));
}

RoughnessDistribution load_distribution_file(const std::string& path) {
  std::vector<RoughnessEntry> entries;
  for (const auto& row : load_table_file(path, 2, "roughness distribution")) {
    entries.push_back({row[0], row[1]});
  }
  return RoughnessDistribution(std::move(entries));
}

void write_distribution(std::ostream& out, const RoughnessDistribution& dist,
                        const std::string& comment) {
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  out << fmt::format("# H0 = {:.6g} nm, delta = {:.6g} nm\n", dist.zero_level_nm(), dist.rms_nm());
  out << "# fraction, height_nm\n";
  for (const auto& e : dist.entries()) {
    out << fmt::format("{:.17g}, {:.17g}\n", e.fraction, e.height_nm);
  }
}

} // namespace casimir

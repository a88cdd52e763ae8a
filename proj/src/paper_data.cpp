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

#include "paper_data.hpp"

#include <fmt/format.h>

#include "errors.hpp"

namespace casimir {

namespace {

const PaperDataset paper{
    {{
        {60, 303.8, 304.4, 2.5, 239.5, 238.8, 2.9},
        {70, 204.4, 204.0, 2.3, 156.4, 155.6, 2.5},
        {80, 143.6, 143.7, 2.1, 106.7, 105.5, 2.3},
        {90, 107.0, 106.2, 2.0, 75.4, 74.6, 2.1},
        {100, 81.6, 80.7, 1.9, 55.5, 54.9, 2.0},
        {120, 50.1, 51.1, 1.8, 33.0, 32.9, 1.8},
        {140, 32.9, 33.4, 1.7, 22.6, 21.2, 1.7},
        {160, 21.8, 23.3, 1.7, 15.4, 15.1, 1.6},
        {180, 16.3, 15.3, 1.6, 10.5, 10.9, 1.6},
        {200, 11.9, 11.0, 1.6, 6.6, 8.0, 1.6},
        {220, 6.7, 7.6, 1.6, 5.5, 6.3, 1.5},
        {240, 5.8, 5.5, 1.5, 4.4, 4.2, 1.5},
        {260, 5.7, 5.3, 1.5, 3.7, 3.8, 1.5},
        {280, 4.6, 4.2, 1.5, 3.1, 3.2, 1.5},
        {300, 4.0, 4.1, 1.5, 3.0, 2.4, 1.5},
    }},
    {{-196.8, 1.5, 104.4, 0.5, 29.5, 0.4, 1.45, 0.02}, 0.4, -260.0, -110.0, 0.55, 1.1},
    {{65.0, 2.0, 103.5, 0.6, 29.0, 0.6, 1.43, 0.02}, 0.6, -25.0, 150.0, 0.5, 1.0},
};

} // namespace

const PaperDataset& load_paper_table() { return paper; }

const PaperSample& PaperDataset::sample(materials::Sample s) const {
  return s == materials::Sample::Untreated ? untreated : uv_treated;
}

std::vector<double> PaperDataset::separations_nm() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.a_nm);
  return out;
}

std::vector<double> PaperDataset::force_pn(materials::Sample s, int set) const {
  if (set != 1 && set != 2) throw ValidationError(fmt::format("no measurement set {}", set));
  const bool untreated = s == materials::Sample::Untreated;
  std::vector<double> out;
  for (const auto& r : rows) {
    out.push_back(untreated ? (set == 1 ? r.untreated_set1 : r.untreated_set2)
                            : (set == 1 ? r.uv_set1 : r.uv_set2));
  }
  return out;
}

std::vector<double> PaperDataset::total_error_pn(materials::Sample s) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    out.push_back(s == materials::Sample::Untreated ? r.untreated_total_error : r.uv_total_error);
  }
  return out;
}

} // namespace casimir

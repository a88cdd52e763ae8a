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
#include <string>
#include <vector>

namespace casimir {

// Numeric text tables: comma or whitespace separated, `#` comments, blank
// lines ignored, one optional non-numeric header line before the data.
std::vector<std::vector<double>> read_table(std::istream& in, std::size_t columns,
                                            const std::string& what);
std::vector<std::vector<double>> load_table_file(const std::string& path, std::size_t columns,
                                                 const std::string& what);

} // namespace casimir

// Copyright 2026 The p2vsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small helpers shared by the CSV readers and writers.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace p2v::csv
{

std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::optional<double> parse_double(std::string_view field);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Fixed notation with the given number of decimals.
std::string format_fixed(double v, int decimals);

}  // namespace p2v::csv

// Copyright 2026-present the unvd project
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace unvd::cli {

using Row = nlohmann::ordered_json;

/// Prints rows either as ndjson or as a text table whose columns are the
/// keys of the first row.
void print_rows(std::ostream& out, const std::vector<Row>& rows, bool ndjson);

std::string cell_text(const Row& value);

}  // namespace unvd::cli

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

#include "cli/table.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

namespace unvd::cli {

std::string cell_text(const Row& value) {
    if (value.is_null()) {
        return "-";
    }
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_number_float()) {
        return fmt::format("{:.6g}", value.get<double>());
    }
    return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void print_rows(std::ostream& out, const std::vector<Row>& rows, bool ndjson) {
    if (ndjson) {
        for (const auto& r : rows) {
            out << r.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
        }
        return;
    }
    if (rows.empty()) {
        return;
    }
    std::vector<std::string> columns;
    for (const auto& [k, v] : rows.front().items()) {
        columns.push_back(k);
    }
    std::vector<std::size_t> width(columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        width[c] = columns[c].size();
    }
    for (const auto& r : rows) {
        auto& line = cells.emplace_back();
        for (std::size_t c = 0; c < columns.size(); ++c) {
            line.push_back(r.contains(columns[c]) ? cell_text(r[columns[c]]) : "");
            width[c] = std::max(width[c], line.back().size());
        }
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            out << (c ? "  " : "") << fmt::format("{:<{}}", line[c], c + 1 == line.size() ? 0 : width[c]);
        }
        out << '\n';
    };
    emit(columns);
    for (const auto& line : cells) {
        emit(line);
    }
}

}  // namespace unvd::cli

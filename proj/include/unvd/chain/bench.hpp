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

#include <optional>
#include <string>
#include <vector>

#include "unvd/chain/fixture_provider.hpp"

namespace unvd::chain {

struct BenchOptions {
    /// Subgraph style pays per page; cached-API style pays per token.
    FixtureLatency subgraph{Millis(50), Millis(0)};
    FixtureLatency cached{Millis(0), Millis(1)};
    std::uint32_t page_size = 10;
    std::uint32_t repeats = 1;
};

struct BenchRow {
    std::size_t n = 0;
    std::optional<double> subgraph_ms;
    std::optional<double> cached_ms;
    std::optional<std::string> error;

    /// subgraph_ms / cached_ms when both were measured.
    std::optional<double> ratio() const;
};

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::optional<LinearFit> cached_fit;
    std::optional<LinearFit> subgraph_fit;
};

/// Ordinary least squares. r2 is 1 when every y is equal and fits exactly.
LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// Times list_nfts for both provider styles on a contract holding exactly N
/// tokens, for each N in `sizes` (ascending). A size with no matching
/// contract gets an error row; N = 0 gets an empty row. Fits need at least
/// two measured rows.
BenchReport bench_providers(const FixtureSet& fixture, const std::vector<std::size_t>& sizes,
                            const BenchOptions& opts = {});

}  // namespace unvd::chain

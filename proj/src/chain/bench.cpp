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

#include "unvd/chain/bench.hpp"

#include <algorithm>
#include <chrono>

#include "unvd/common/error.hpp"

namespace unvd::chain {

std::optional<double> BenchRow::ratio() const {
    if (!subgraph_ms || !cached_ms || *cached_ms <= 0) {
        return std::nullopt;
    }
    return *subgraph_ms / *cached_ms;
}

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        raise(ErrorCode::InvalidArgument, "a line fit needs at least two paired samples");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0) {
        raise(ErrorCode::InvalidArgument, "a line fit needs at least two distinct x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r2 = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

namespace {

double time_listing(FixtureProvider& provider, const std::string& address, std::uint32_t repeats) {
    std::vector<double> samples;
    for (std::uint32_t r = 0; r < std::max<std::uint32_t>(1, repeats); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        provider.list_nfts(address);
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    return samples[samples.size() / 2];
}

std::optional<LinearFit> fit_rows(const std::vector<BenchRow>& rows, std::optional<double> BenchRow::*field) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.*field) {
            xs.push_back(static_cast<double>(r.n));
            ys.push_back(*(r.*field));
        }
    }
    std::vector<double> distinct(xs);
    std::sort(distinct.begin(), distinct.end());
    if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() < 2) {
        return std::nullopt;
    }
    return fit_line(xs, ys);
}

}  // namespace

BenchReport bench_providers(const FixtureSet& fixture, const std::vector<std::size_t>& sizes,
                            const BenchOptions& opts) {
    if (!std::is_sorted(sizes.begin(), sizes.end())) {
        raise(ErrorCode::InvalidArgument, "benchmark sizes must be ascending");
    }
    ProviderConfig cfg(ProviderKind::fixture, fixture.root.string(), opts.page_size);
    FixtureProvider subgraph(cfg, fixture, opts.subgraph);
    FixtureProvider cached(cfg, fixture, opts.cached);

    BenchReport report;
    for (const auto n : sizes) {
        BenchRow row;
        row.n = n;
        if (n == 0) {
            report.rows.push_back(row);
            continue;
        }
        const auto it = std::find_if(fixture.tokens.begin(), fixture.tokens.end(),
                                     [n](const auto& kv) { return kv.second.size() == n; });
        if (it == fixture.tokens.end()) {
            row.error = "no fixture contract holds exactly " + std::to_string(n) + " tokens";
            report.rows.push_back(row);
            continue;
        }
        try {
            row.subgraph_ms = time_listing(subgraph, it->first, opts.repeats);
            row.cached_ms = time_listing(cached, it->first, opts.repeats);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        report.rows.push_back(row);
    }
    report.cached_fit = fit_rows(report.rows, &BenchRow::cached_ms);
    report.subgraph_fit = fit_rows(report.rows, &BenchRow::subgraph_ms);
    return report;
}

}  // namespace unvd::chain

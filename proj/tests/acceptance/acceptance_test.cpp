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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cli/cli_app.hpp"
#include "support/knn_oracle.hpp"
#include "support/temp_dir.hpp"
#include "unvd/analytics/clustering.hpp"
#include "unvd/analytics/projection.hpp"
#include "unvd/analytics/tsne.hpp"
#include "unvd/api/api_service.hpp"
#include "unvd/chain/bench.hpp"
#include "unvd/chain/fixture_provider.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/common/rng.hpp"
#include "unvd/embedding/base64.hpp"
#include "unvd/embedding/embedder.hpp"
#include "unvd/meta/metadata_store.hpp"
#include "unvd/tasks/broker.hpp"
#include "unvd/tasks/pipeline.hpp"
#include "unvd/tasks/worker_pool.hpp"
#include "unvd/vectors/vector_store.hpp"

using namespace unvd;
using nlohmann::json;
using unvd::testing::TempDir;
using namespace std::chrono_literals;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
    std::vector<std::string> problems;

    void check(bool cond, std::string what) {
        if (!cond) {
            ok = false;
            if (problems.size() < 8) {
                problems.push_back(std::move(what));
            }
        }
    }
};

const std::filesystem::path kFixture = std::filesystem::path(UNVD_SOURCE_DIR) / "fixtures" / "two-collections";

chain::FixtureSet load_fixture() { return chain::FixtureSet::load(kFixture); }

std::shared_ptr<chain::FixtureProvider> fixture_provider(const chain::FixtureSet& set) {
    return std::make_shared<chain::FixtureProvider>(
        chain::ProviderConfig(chain::ProviderKind::fixture, set.root.string(), 10), set);
}

// Stores plus a pipeline fed by the two-collection fixture, fully ingested.
struct Ingested {
    explicit Ingested(const chain::FixtureSet& set) {
        tasks::PipelineOptions opts;
        opts.backoff = {tasks::Millis(1)};
        pipeline = std::make_unique<tasks::Pipeline>(meta, vectors, broker, fixture_provider(set),
                                                     embedding::default_embedder(), opts);
        for (const auto& c : set.contracts) {
            pipeline->enqueue_contract("ethereum", c.address);
        }
        tasks::WorkerPool pool(*pipeline, 4);
        pool.start();
        idle = pool.wait_idle(100s);
        pool.stop();
    }

    meta::MetadataStore meta;
    vectors::VectorStore vectors{2016};
    tasks::InMemoryBroker broker;
    std::unique_ptr<tasks::Pipeline> pipeline;
    bool idle = false;
};

std::vector<meta::TaskRecord> all_tasks(const meta::MetadataStore& m) {
    std::vector<meta::TaskRecord> out;
    std::string cursor;
    for (;;) {
        auto page = m.list_tasks(std::nullopt, cursor, 1000);
        out.insert(out.end(), page.items.begin(), page.items.end());
        if (!page.next_cursor) {
            return out;
        }
        cursor = *page.next_cursor;
    }
}

std::vector<meta::NftRecord> all_nfts(const meta::MetadataStore& m) {
    std::vector<meta::NftRecord> out;
    for (const auto& c : m.list_contracts()) {
        std::string cursor;
        for (;;) {
            auto page = m.list_nfts_by_contract(c.chain, c.address, cursor, 1000);
            out.insert(out.end(), page.items.begin(), page.items.end());
            if (!page.next_cursor) {
                break;
            }
            cursor = *page.next_cursor;
        }
    }
    return out;
}

// Oracle kNN equivalence

Verdict knn_oracle_equivalence() {
    Verdict v;
    std::mt19937_64 rng(20260101);
    const std::array<std::size_t, 3> dims{8, 64, 2016};
    std::size_t queries = 0;
    std::size_t total_vectors = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = dims[trial % 3];
        const std::size_t n = 1 + rng() % 5000;
        vectors::VectorStore store(static_cast<std::uint32_t>(d));
        std::vector<std::pair<std::string, std::vector<float>>> data;
        data.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<float> vec = (i > 0 && rng() % 20 == 0) ? data[rng() % i].second
                                                                : unvd::testing::random_vector(rng, d);
            auto id = fmt::format("v{:05}", (i * 7919) % 100000);
            store.upsert("main", {id, vec, {}});
            data.emplace_back(std::move(id), std::move(vec));
        }
        total_vectors += n;
        for (int q = 0; q < 5; ++q) {
            const auto probe = q % 2 == 0 ? data[rng() % n].second : unvd::testing::random_vector(rng, d);
            const std::size_t k = q == 4 ? n + 3 : 1 + rng() % 100;
            const auto got = store.query("main", probe, k);
            const auto want = unvd::testing::oracle_knn(data, probe, k);
            ++queries;
            v.check(got.size() == want.size(), fmt::format("trial {} query {}: size {} vs {}", trial, q,
                                                           got.size(), want.size()));
            for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
                const double gap = std::abs(got[i].distance - want[i].distance);
                worst = std::max(worst, gap);
                v.check(got[i].id == want[i].id && gap <= 1e-6,
                        fmt::format("trial {} query {} rank {}: {} vs {}", trial, q, i, got[i].id, want[i].id));
            }
        }
    }
    v.detail = fmt::format("200 stores, {} vectors, {} queries, max |distance gap| {:.2e}", total_vectors, queries,
                           worst);
    return v;
}

// End-to-end fixture ingest

Verdict end_to_end_ingest() {
    Verdict v;
    const auto set = load_fixture();
    Ingested env(set);
    v.check(env.idle, "workers did not go idle");
    const auto tasks = all_tasks(env.meta);
    const auto terminal = std::count_if(tasks.begin(), tasks.end(), [](const auto& t) {
        return meta::is_terminal(t.status);
    });
    const auto done = std::count_if(tasks.begin(), tasks.end(), [](const auto& t) {
        return t.status == meta::TaskStatus::done;
    });
    v.check(tasks.size() == 52 && terminal == 52, fmt::format("{} tasks, {} terminal", tasks.size(), terminal));
    const auto vector_count = env.vectors.stats("main").count;
    v.check(vector_count == 50, fmt::format("{} vectors", vector_count));
    const auto summary = env.meta.analytics_summary(&env.vectors);
    v.check(summary.nfts.at("embedded") == 50, fmt::format("{} embedded", summary.nfts.at("embedded")));

    std::size_t self_hits = 0;
    double worst = 0.0;
    const auto embedder = embedding::default_embedder();
    for (const auto& c : set.contracts) {
        for (const auto& t : set.tokens.at(c.address)) {
            const auto probe = embedding::embed_media(*embedder, read_file(set.media_path(t)));
            const auto hits = env.vectors.query("main", probe, 1);
            const auto id = meta::make_vector_id("ethereum", t.contract, t.token_id);
            const bool ok = !hits.empty() && hits[0].id == id && hits[0].distance <= 1e-6;
            self_hits += ok;
            if (!hits.empty()) {
                worst = std::max(worst, hits[0].distance);
            }
            v.check(ok, "self-search missed " + id);
        }
    }
    v.detail = fmt::format("{} tasks ({} done), {} vectors, {} embedded, self top-1 {}/50, max self distance {:.1e}",
                           tasks.size(), done, vector_count, summary.nfts.at("embedded"), self_hits, worst);
    return v;
}

// At-least-once chaos

Verdict chaos_500_tasks() {
    Verdict v;
    TempDir dir("unvd-accept-chaos");
    // 5 contract tasks plus 495 NFT tasks.
    const auto set = chain::generate_synthetic(dir.path(), {99, 99, 99, 99, 99});
    meta::MetadataStore meta;
    vectors::VectorStore vectors(2016);
    tasks::InMemoryBroker broker;
    std::mt19937_64 rng(500);
    std::mutex rng_mutex;
    std::atomic<std::size_t> expiries{0};
    std::atomic<std::size_t> duplicates{0};
    auto roll = [&](double p) {
        std::lock_guard lock(rng_mutex);
        return std::uniform_real_distribution<double>(0, 1)(rng) < p;
    };
    tasks::PipelineOptions opts;
    opts.visibility_timeout = tasks::Millis(50);
    opts.backoff = {tasks::Millis(1)};
    opts.fault_hook = [&](std::string_view, const meta::TaskRecord& t) {
        if (roll(0.03)) {
            ++expiries;
            throw tasks::AbandonLease{};
        }
        if (roll(0.05)) {
            ++duplicates;
            broker.send(t.task_id);
        }
    };
    tasks::Pipeline pipeline(meta, vectors, broker, fixture_provider(set), embedding::default_embedder(), opts);
    for (const auto& c : set.contracts) {
        pipeline.enqueue_contract("ethereum", c.address);
    }
    tasks::WorkerPool pool(pipeline, 4);
    pool.start();
    v.check(pool.wait_idle(110s), "no quiescence within 110 s");
    pool.stop();

    const auto tasks = all_tasks(meta);
    std::set<std::string> keys;
    std::size_t embedded = 0;
    for (const auto& n : all_nfts(meta)) {
        keys.insert(n.vector_id);
        embedded += n.status == meta::NftStatus::embedded;
        v.check(vectors.fetch("main", n.vector_id).has_value(), "missing vector " + n.vector_id);
    }
    const auto count = vectors.has_namespace("main") ? vectors.stats("main").count : 0;
    const auto done = std::count_if(tasks.begin(), tasks.end(), [](const auto& t) {
        return t.status == meta::TaskStatus::done;
    });
    v.check(tasks.size() == 500, fmt::format("{} tasks", tasks.size()));
    v.check(keys.size() == 495, fmt::format("{} distinct NFT keys", keys.size()));
    v.check(count == keys.size(), fmt::format("{} vectors for {} keys", count, keys.size()));
    v.check(embedded == keys.size(), fmt::format("{} embedded records", embedded));
    v.detail = fmt::format("{} tasks ({} done), {} lease expiries, {} duplicate deliveries, {} vectors = {} keys",
                           tasks.size(), done, expiries.load(), duplicates.load(), count, keys.size());
    return v;
}

// Numerical suite

analytics::Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
    analytics::Matrix m(n, d);
    for (auto& x : m.data()) {
        x = rng.normal() * scale;
    }
    return m;
}

double signed_column_gap(const analytics::Matrix& a, const analytics::Matrix& b) {
    double worst = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        double same = 0.0;
        double flipped = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            same = std::max(same, std::abs(a(r, c) - b(r, c)));
            flipped = std::max(flipped, std::abs(a(r, c) + b(r, c)));
        }
        worst = std::max(worst, std::min(same, flipped));
    }
    return worst;
}

double max_distance_gap(const analytics::Matrix& x, const analytics::Matrix& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            worst = std::max(worst, std::abs(analytics::euclidean(x.row(i), x.row(j)) -
                                             analytics::euclidean(y.row(i), y.row(j))));
        }
    }
    return worst;
}

Verdict numerical_suite() {
    Verdict v;
    Rng rng(741);

    double tsvd_gap = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 5 + rng.below(40);
        const std::size_t d = 2 + rng.below(30);
        const auto x = analytics::center_columns(random_matrix(rng, n, d, 1.0 + rng.uniform() * 10));
        const std::size_t k = 1 + rng.below(std::min(n - 1, d));
        tsvd_gap = std::max(tsvd_gap, signed_column_gap(analytics::tsvd(x, k).points, analytics::pca(x, k).points));
    }
    v.check(tsvd_gap <= 1e-9, fmt::format("tsvd vs pca gap {:.2e}", tsvd_gap));

    double mds_gap = 0.0;
    for (std::size_t dim : {1u, 2u, 3u}) {
        for (int trial = 0; trial < 8; ++trial) {
            const auto x = random_matrix(rng, 6 + rng.below(30), dim, 5.0);
            mds_gap = std::max(mds_gap, max_distance_gap(x, analytics::mds_classical(x, dim).points));
        }
    }
    v.check(mds_gap <= 1e-9, fmt::format("mds distance gap {:.2e}", mds_gap));

    double entropy_gap = 0.0;
    bool kl_drops = true;
    for (double perplexity : {5.0, 15.0, 30.0}) {
        const auto x = random_matrix(rng, 120, 20, 4.0);
        analytics::TsneOptions opts;
        opts.perplexity = perplexity;
        opts.seed = 3;
        const auto r = analytics::tsne(x, opts);
        for (double h : r.calibration.entropy_bits) {
            entropy_gap = std::max(entropy_gap, std::abs(h - std::log2(perplexity)));
        }
        kl_drops = kl_drops && r.final_kl() < r.initial_kl();
    }
    v.check(entropy_gap <= 1e-5, fmt::format("entropy gap {:.2e} bits", entropy_gap));
    v.check(kl_drops, "final KL not below initial KL");

    std::size_t kmeans_steps = 0;
    bool monotone = true;
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = 10 + rng.below(200);
        const auto x = random_matrix(rng, n, 1 + rng.below(6), 2.0);
        const auto k = 1 + rng.below(std::min<std::uint64_t>(n, 8));
        const auto r = analytics::kmeans(x, {k, rng.next()});
        for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
            monotone = monotone && r.inertia_trace[i] <= r.inertia_trace[i - 1];
            ++kmeans_steps;
        }
    }
    v.check(monotone, "k-means inertia increased");

    double rigid_gap = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 4 + rng.below(60);
        auto x = random_matrix(rng, n, 2, 5.0);
        std::vector<std::size_t> a(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = i < n / 2 ? 0 : 1;
        }
        const auto base = analytics::cluster_metrics(x, a).cluster_ratio;
        const double theta = rng.uniform() * 2 * std::numbers::pi;
        const double tx = rng.normal() * 100;
        const double ty = rng.normal() * 100;
        for (std::size_t i = 0; i < n; ++i) {
            const double px = x(i, 0);
            const double py = x(i, 1);
            x(i, 0) = std::cos(theta) * px - std::sin(theta) * py + tx;
            x(i, 1) = std::sin(theta) * px + std::cos(theta) * py + ty;
        }
        rigid_gap = std::max(rigid_gap, std::abs(analytics::cluster_metrics(x, a).cluster_ratio - base));
    }
    v.check(rigid_gap <= 1e-9, fmt::format("rigid-motion ratio gap {:.2e}", rigid_gap));

    const auto hand = analytics::cluster_metrics(
        analytics::Matrix::from_rows(std::vector<std::vector<double>>{{0, 0}, {0, 2}, {10, 0}, {10, 2}}),
        {0, 0, 1, 1});
    v.check(hand.cluster_distance == 10.0 && hand.collection_distance == 1.0 && hand.cluster_ratio == 10.0,
            fmt::format("hand case ({}, {}, {})", hand.cluster_distance, hand.collection_distance,
                        hand.cluster_ratio));

    v.detail = fmt::format(
        "tsvd~pca {:.1e}, mds {:.1e}, entropy {:.2e} bits, KL drops {}, k-means monotone over {} steps, "
        "rigid {:.1e}, hand case ({}, {}, {})",
        tsvd_gap, mds_gap, entropy_gap, kl_drops ? "yes" : "no", kmeans_steps, rigid_gap, hand.cluster_distance,
        hand.collection_distance, hand.cluster_ratio);
    return v;
}

// Experiment reproduction in shape

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "unvd");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<json> ndjson_lines(const std::string& text) {
    std::vector<json> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) {
            lines.push_back(json::parse(line));
        }
    }
    return lines;
}

Verdict experiment_shape() {
    Verdict v;
    const std::vector<std::string> args{"evaluate", "--dataset", kFixture.string(), "--seed", "7", "--format",
                                        "ndjson"};
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    v.check(first.code == 0 && second.code == 0, "evaluate exit " + std::to_string(first.code) + ": " + first.err);
    auto a = ndjson_lines(first.out);
    auto b = ndjson_lines(second.out);
    std::map<std::string, json> rows;
    for (auto& r : a) {
        r.erase("wall_ms");
        rows[r["technique"].get<std::string>()] = r;
    }
    for (auto& r : b) {
        r.erase("wall_ms");
    }
    v.check(a.size() == 5 && rows.size() == 5, fmt::format("{} technique rows", rows.size()));
    v.check(a == b, "two runs with seed 7 differ");
    auto ratio = [&](const std::string& t) {
        const auto it = rows.find(t);
        return it != rows.end() && it->second["cluster_ratio"].is_number() ? it->second["cluster_ratio"].get<double>()
                                                                             : 0.0;
    };
    v.check(ratio("pca") > 1.0, fmt::format("pca ratio {}", ratio("pca")));
    v.check(ratio("tsvd") > 1.0, fmt::format("tsvd ratio {}", ratio("tsvd")));

    std::string ranking;
    for (const auto& r : a) {
        const auto t = r["technique"].get<std::string>();
        ranking += (ranking.empty() ? "" : " > ") +
                   (r.contains("error") ? t + " (failed: " + r["error"].get<std::string>().substr(0, 17) + ")"
                                        : fmt::format("{} {:.2f}", t, r["cluster_ratio"].get<double>()));
    }
    const auto wide = run_cli({"evaluate", "--dataset", kFixture.string(), "--seed", "7", "--isomap-neighbors", "25",
                               "--format", "ndjson"});
    std::string isomap_wide = "n/a";
    for (const auto& r : ndjson_lines(wide.out)) {
        if (r["technique"] == "isomap" && r["cluster_ratio"].is_number()) {
            isomap_wide = fmt::format("{:.2f}", r["cluster_ratio"].get<double>());
        }
    }
    v.detail = fmt::format("5 rows, deterministic; ranking {}; winner {}; isomap with 25 neighbours {}", ranking,
                           a.empty() ? "-" : a[0]["technique"].get<std::string>(), isomap_wide);
    return v;
}

// Benchmark linearity

Verdict bench_linearity() {
    Verdict v;
    TempDir dir("unvd-accept-bench");
    const auto set = chain::generate_synthetic(dir.path(), {10, 100, 1000});
    chain::BenchOptions opts;
    opts.cached.per_token = chain::Millis(1);
    opts.subgraph.per_page = chain::Millis(20);
    opts.page_size = 100;
    const auto report = chain::bench_providers(set, {10, 100, 1000}, opts);
    v.check(report.cached_fit.has_value(), "no cached fit");
    const double r2 = report.cached_fit ? report.cached_fit->r2 : 0.0;
    v.check(r2 >= 0.99, fmt::format("cached R2 {:.5f}", r2));
    std::string times;
    for (const auto& r : report.rows) {
        times += fmt::format("{}N={}: cached {:.1f} ms, subgraph {:.1f} ms", times.empty() ? "" : "; ", r.n,
                             r.cached_ms.value_or(-1), r.subgraph_ms.value_or(-1));
    }
    v.detail = fmt::format("cached R2 {:.5f}, slope {:.3f} ms/token; {}", r2,
                           report.cached_fit ? report.cached_fit->slope : 0.0, times);
    return v;
}

// Persistence round trip across a process restart

std::string float_hex(const std::vector<float>& v) {
    std::string out;
    out.reserve(v.size() * 8);
    for (float f : v) {
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        out += fmt::format("{:08x}", bits);
    }
    return out;
}

json snapshot(const vectors::VectorStore& vectors, const meta::MetadataStore& meta) {
    json vec = json::object();
    for (const auto& id : vectors.list_ids("main")) {
        const auto rec = vectors.fetch("main", id);
        vec[id] = {{"bits", float_hex(rec->vector)}, {"metadata", rec->metadata}};
    }
    json contracts = json::array();
    for (const auto& c : meta.list_contracts()) {
        contracts.push_back(c);
    }
    json nfts = json::array();
    for (const auto& n : all_nfts(meta)) {
        nfts.push_back(n);
    }
    json tasks = json::array();
    for (const auto& t : all_tasks(meta)) {
        tasks.push_back(t);
    }
    return {{"vectors", vec}, {"contracts", contracts}, {"nfts", nfts}, {"tasks", tasks}};
}

// Runs in a child process: ingest into `dir`, then write what it stored.
int persistence_writer(const std::filesystem::path& dir) {
    const auto set = load_fixture();
    auto vectors = vectors::VectorStore::open(dir / "vectors", 2016);
    auto meta = meta::MetadataStore::open(dir / "meta");
    tasks::FileBroker broker(dir / "queue.unvq");
    tasks::Pipeline pipeline(meta, vectors, broker, fixture_provider(set), embedding::default_embedder());
    for (const auto& c : set.contracts) {
        pipeline.enqueue_contract("ethereum", c.address);
    }
    tasks::WorkerPool pool(pipeline, 2);
    pool.start();
    if (!pool.wait_idle(100s)) {
        return 3;
    }
    pool.stop();
    std::ofstream(dir / "expected.json") << snapshot(vectors, meta).dump();
    return 0;
}

Verdict persistence_round_trip() {
    Verdict v;
    TempDir dir("unvd-accept-persist");
    std::array<char, 4096> self{};
    const auto len = ::readlink("/proc/self/exe", self.data(), self.size() - 1);
    v.check(len > 0, "cannot locate own executable");
    const auto cmd = fmt::format("'{}' --persistence-writer '{}'", std::string(self.data(), len), dir.path().string());
    const int status = std::system(cmd.c_str());
    v.check(status == 0, fmt::format("writer process exited with {}", status));
    if (!v.ok) {
        return v;
    }
    const auto expected = json::parse(read_file(dir.path() / "expected.json"));

    const auto loaded_vectors = vectors::VectorStore::load(dir.path() / "vectors");
    const auto reopened_meta = meta::MetadataStore::open(dir.path() / "meta");
    const auto after_restart = snapshot(loaded_vectors, reopened_meta);
    v.check(after_restart == expected, "state after restart differs from what the writer stored");

    // Snapshots written by compaction must read back identically too.
    {
        auto attached = vectors::VectorStore::open(dir.path() / "vectors");
        auto meta = meta::MetadataStore::open(dir.path() / "meta");
        attached.compact();
        meta.compact();
    }
    const auto after_compact =
        snapshot(vectors::VectorStore::load(dir.path() / "vectors"), meta::MetadataStore::open(dir.path() / "meta"));
    v.check(after_compact == expected, "state after compaction differs");

    // And the stored vectors are exactly what the embedder produces.
    const auto set = load_fixture();
    std::size_t exact = 0;
    for (const auto& c : set.contracts) {
        for (const auto& t : set.tokens.at(c.address)) {
            const auto id = meta::make_vector_id("ethereum", t.contract, t.token_id);
            const auto want = embedding::embed_media(*embedding::default_embedder(), read_file(set.media_path(t)));
            const auto got = loaded_vectors.fetch("main", id);
            const bool same = got && float_hex(got->vector) == float_hex(want);
            exact += same;
            v.check(same, "vector differs from re-embedding: " + id);
        }
    }
    v.detail = fmt::format("{} vectors, {} contracts, {} nfts, {} tasks identical after restart and compaction; "
                           "{}/50 bit-identical to re-embedding",
                           expected["vectors"].size(), expected["contracts"].size(), expected["nfts"].size(),
                           expected["tasks"].size(), exact);
    return v;
}

// API fuzz and auth

std::string malformed_body(std::mt19937_64& rng, const std::vector<std::string>& valid) {
    switch (rng() % 3) {
    case 0: {
        for (;;) {
            std::string s(rng() % 200, '\0');
            for (auto& c : s) {
                c = static_cast<char>(rng() % 256);
            }
            const auto j = json::parse(s, nullptr, false);
            if (j.is_discarded() || !j.is_object()) {
                return s;
            }
        }
    }
    case 1: {
        const auto& base = valid[rng() % valid.size()];
        return base.substr(0, rng() % base.size());
    }
    default: {
        static const std::vector<std::string> confused = {
            "[]", "null", "42", "\"text\"", "{}", R"({"image_base64":5})", R"({"image_base64":"@@@"})",
            R"({"image_base64":"aGVsbG8=","top_k":3})", R"({"image_base64":"iVBORw0KGgo=","top_k":"x"})",
            R"({"image_base64":null,"top_k":0})", R"({"vector_ids":"abc"})", R"({"vector_ids":[1,2,3,4]})",
            R"({"vector_ids":["a","b"]})", R"({"vectors":[[1,"a"],[2,2],[3,3],[4,4]]})",
            R"({"vectors":[[1],[2,2],[3],[4]]})", R"({"vectors":[],"vector_ids":[]})", R"({"vectors":{}})",
            R"({"username":[],"password":{}})", R"({"username":"admin"})", R"({"password":"x"})",
            R"({"username":"admin","password":"wrong"})", R"({"address":"0xBAD"})", R"({"chain":"ethereum"})",
            R"({"address":12})"};
        return confused[rng() % confused.size()];
    }
    }
}

Verdict api_fuzz_and_auth() {
    Verdict v;
    const auto set = load_fixture();
    Ingested env(set);
    api::ApiConfig cfg;
    cfg.secret = "acceptance-secret-0123456789abcdef";
    cfg.admin_user = "admin";
    cfg.admin_password = "correct horse battery";
    api::ApiService service(cfg, api::ApiDeps{env.meta, env.vectors, embedding::default_embedder(),
                                              env.pipeline.get(), {}});
    const int port = service.start();
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(60, 0);

    const auto img = embedding::base64_encode(read_file(set.media_path(set.tokens.begin()->second.front())));
    const std::vector<std::string> valid = {
        json{{"image_base64", img}, {"top_k", 5}}.dump(),
        json{{"vector_ids", {"a", "b", "c", "d"}}, {"seed", 1}}.dump(),
        json{{"username", "admin"}, {"password", "correct horse battery"}}.dump(),
        json{{"chain", "ethereum"}, {"address", set.contracts[0].address}}.dump()};
    const std::vector<std::string> paths = {"/search", "/visualize", "/auth/login", "/admin/enqueue"};
    const httplib::Headers admin{{"Authorization", "Bearer " + service.signer().issue("admin")}};

    std::mt19937_64 rng(1000);
    std::map<int, int> statuses;
    const auto mutations_before_fuzz = service.admin_mutations();
    for (int i = 0; i < 1000; ++i) {
        const auto body = malformed_body(rng, valid);
        const auto& path = paths[rng() % paths.size()];
        auto r = path == "/admin/enqueue" ? client.Post(path, admin, body, "application/json")
                                          : client.Post(path, body, "application/json");
        const int status = r ? r->status : -1;
        ++statuses[status];
        v.check(status >= 400 && status < 500, fmt::format("{} {} -> {}", path, json(body).dump(-1, ' ', false, json::error_handler_t::replace), status));
    }
    v.check(service.admin_mutations() == mutations_before_fuzz, "a malformed admin body mutated state");

    const auto tasks_before = all_tasks(env.meta).size();
    const auto mutations_before = service.admin_mutations();
    api::TokenSigner foreign("attacker-secret-0123456789abcdef");
    const auto good = service.signer().issue("admin");
    std::size_t rejected = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string token;
        switch (i % 5) {
        case 0: token = foreign.issue("admin"); break;
        case 1: token = service.signer().issue("admin", std::chrono::seconds(-1 - static_cast<int>(rng() % 5000))); break;
        case 2: {
            token = good;
            const auto pos = good.rfind('.') + 1 + rng() % (good.size() - good.rfind('.') - 1);
            token[pos] = token[pos] == 'A' ? 'B' : 'A';
            break;
        }
        case 3: token = api::base64url_encode(R"({"alg":"none","typ":"JWT"})") + good.substr(good.find('.')); break;
        default: {
            token = good;
            token[rng() % token.size()] ^= static_cast<char>(1 + rng() % 127);
            if (token == good) {
                token += "x";
            }
        }
        }
        const httplib::Headers h{{"Authorization", "Bearer " + token}};
        const bool enqueue = i % 2 == 0;
        auto r = enqueue ? client.Post("/admin/enqueue", h,
                                       json{{"address", set.contracts[i % 2 == 0 ? 0 : 1].address}}.dump(),
                                       "application/json")
                         : client.Post("/admin/tasks/" + all_tasks(env.meta).front().task_id + "/retry", h, "",
                                       "application/json");
        const int status = r ? r->status : -1;
        rejected += status == 401;
        v.check(status == 401, fmt::format("forged token {} -> {}", i, status));
    }
    const auto mutations = service.admin_mutations() - mutations_before;
    v.check(mutations == 0, fmt::format("{} admin mutations with forged tokens", mutations));
    v.check(all_tasks(env.meta).size() == tasks_before, "task table changed under forged tokens");

    // Sanity: the genuine token does mutate.
    auto genuine = client.Post("/admin/enqueue", admin, json{{"address", set.contracts[0].address}}.dump(),
                               "application/json");
    v.check(genuine && genuine->status == 202, "genuine token could not enqueue");
    service.stop();

    std::string histogram;
    for (const auto& [s, n] : statuses) {
        histogram += fmt::format("{}{}x{}", histogram.empty() ? "" : " ", n, s);
    }
    v.detail = fmt::format("1000 malformed bodies -> {}; {}/1000 forged or expired tokens rejected, {} mutations",
                           histogram, rejected, mutations);
    return v;
}

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc == 3 && std::string(argv[1]) == "--persistence-writer") {
        return persistence_writer(argv[2]);
    }
    spdlog::set_level(spdlog::level::err);

    const std::vector<Criterion> criteria = {
        {"Oracle kNN equivalence", 60, knn_oracle_equivalence},
        {"End-to-end fixture ingest", 120, end_to_end_ingest},
        {"At-least-once chaos over 500 tasks", 120, chaos_500_tasks},
        {"Numerical suite", 60, numerical_suite},
        {"Experiment reproduction in shape", 0, experiment_shape},
        {"Benchmark linearity", 0, bench_linearity},
        {"Persistence round-trip", 0, persistence_round_trip},
        {"API contract fuzz and auth property", 0, api_fuzz_and_auth},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.ok = false;
            v.problems.push_back(std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            v.ok = false;
            v.problems.push_back(fmt::format("runtime {:.1f} s exceeds {:.0f} s", seconds, c.limit_seconds));
        }
        failures += !v.ok;
        std::cout << (v.ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << fmt::format("{:.1f} s", seconds)
                  << ")  " << v.detail << '\n';
        for (const auto& p : v.problems) {
            std::cout << "        " << p << '\n';
        }
        std::cout.flush();
    }
    std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

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

#include "cli/cli_app.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cli/table.hpp"
#include "unvd/analytics/tsne.hpp"
#include "unvd/api/api_service.hpp"
#include "unvd/chain/bench.hpp"
#include "unvd/chain/fixture_provider.hpp"
#include "unvd/chain/remote_providers.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/common/ids.hpp"
#include "unvd/embedding/embedder.hpp"
#include "unvd/meta/metadata_store.hpp"
#include "unvd/tasks/broker.hpp"
#include "unvd/tasks/pipeline.hpp"
#include "unvd/tasks/worker_pool.hpp"
#include "unvd/vectors/vector_store.hpp"

namespace unvd::cli {

namespace {

using namespace std::chrono_literals;

struct ProviderFlags {
    std::string kind;
    std::string endpoint;
    std::string nft_endpoint;
    std::uint32_t page_size = 100;
    std::string api_key;
    double requests_per_second = 10.0;
};

struct Options {
    std::filesystem::path data_dir = "unvd-data";
    std::string format = "table";
    std::string log_level = "warn";
    std::string chain{meta::kDefaultChain};
    std::string vector_namespace{tasks::kDefaultVectorNamespace};
    ProviderFlags provider;

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
    std::size_t serve_workers = 0;

    // work / ingest
    std::size_t concurrency = 4;
    std::int64_t visibility_timeout_ms = 30000;
    std::uint32_t max_attempts = 3;
    bool until_idle = false;
    bool discover = false;
    std::string contract;
    bool no_wait = false;

    // search / visualize
    std::filesystem::path image;
    std::size_t top_k = 10;
    std::filesystem::path ids_file;
    std::uint64_t seed = 0;
    std::optional<double> perplexity;

    // evaluate
    std::filesystem::path dataset;
    std::uint64_t experiment_seed = 2023;
    std::size_t isomap_neighbors = 10;
    std::size_t tsne_iterations = 1000;
    std::vector<std::string> techniques;

    // bench
    std::vector<std::size_t> sizes;
    std::uint32_t repeats = 1;
    std::int64_t page_latency_ms = 50;
    std::int64_t token_latency_ms = 1;

    // make-fixture
    std::filesystem::path fixture_out;
    std::uint32_t tokens_per_collection = 25;
    std::uint32_t image_size = 64;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stores and queue under the data directory, opened on first use.
class Workspace {
public:
    explicit Workspace(const Options& o) : o_(o) {}

    vectors::VectorStore& vectors() {
        if (!vectors_) {
            vectors_.emplace(vectors::VectorStore::open(o_.data_dir / "vectors",
                                                        embedding::default_embedder()->descriptor().dimension));
        }
        return *vectors_;
    }
    meta::MetadataStore& meta() {
        if (!meta_) {
            meta_.emplace(meta::MetadataStore::open(o_.data_dir / "meta"));
        }
        return *meta_;
    }
    tasks::FileBroker& broker() {
        if (!broker_) {
            std::filesystem::create_directories(o_.data_dir);
            broker_ = std::make_unique<tasks::FileBroker>(o_.data_dir / "queue.unvq");
        }
        return *broker_;
    }

    bool has_provider() const { return !o_.provider.kind.empty(); }

    std::shared_ptr<chain::ChainProvider> provider() {
        if (!has_provider()) {
            throw UsageError("this command needs a chain provider (--provider and --endpoint)");
        }
        auto make = [&](chain::ProviderKind kind, const std::string& endpoint) {
            chain::ProviderConfig cfg(kind, endpoint, o_.provider.page_size);
            cfg.chain = o_.chain;
            cfg.api_key = o_.provider.api_key;
            cfg.requests_per_second = o_.provider.requests_per_second;
            return chain::make_provider(cfg);
        };
        const auto kind = *chain::parse_provider_kind(o_.provider.kind);
        auto primary = make(kind, o_.provider.endpoint);
        if (o_.provider.nft_endpoint.empty()) {
            return primary;
        }
        return std::make_shared<chain::SplitProvider>(primary, make(chain::ProviderKind::nft_api,
                                                                    o_.provider.nft_endpoint));
    }

    tasks::Pipeline& pipeline() {
        if (!pipeline_) {
            tasks::PipelineOptions po;
            po.vector_namespace = o_.vector_namespace;
            po.visibility_timeout = tasks::Millis(o_.visibility_timeout_ms);
            po.max_attempts = o_.max_attempts;
            pipeline_ = std::make_unique<tasks::Pipeline>(meta(), vectors(), broker(), provider(),
                                                          embedding::default_embedder(), po);
        }
        return *pipeline_;
    }

private:
    const Options& o_;
    std::optional<vectors::VectorStore> vectors_;
    std::optional<meta::MetadataStore> meta_;
    std::unique_ptr<tasks::FileBroker> broker_;
    std::unique_ptr<tasks::Pipeline> pipeline_;
};

Row stats_row(const tasks::WorkerStats& s) {
    return Row{{"processed", s.processed},
               {"succeeded", s.succeeded},
               {"failed", s.failed},
               {"retried", s.retried},
               {"skipped", s.skipped},
               {"deferred", s.deferred},
               {"contract_per_s", s.contract_per_second},
               {"nft_per_s", s.nft_per_second},
               {"elapsed_s", s.elapsed_seconds}};
}

tasks::WorkerOptions worker_options(const Options& o) {
    tasks::WorkerOptions w;
    w.concurrency = o.concurrency;
    w.visibility_timeout = tasks::Millis(o.visibility_timeout_ms);
    return w;
}

// Runs workers until the queue drains (or forever without `until_idle`),
// returning early on a stop request.
tasks::WorkerStats run_workers(Workspace& ws, const Options& o, bool until_idle) {
    auto& pipeline = ws.pipeline();
    tasks::WorkerPool pool(pipeline.broker(),
                           [&pipeline](const tasks::Delivery& d) { return pipeline.handle(d); }, worker_options(o));
    pool.start();
    while (!stop_requested().load()) {
        if (until_idle && pool.wait_idle(200ms)) {
            break;
        }
        if (!until_idle) {
            std::this_thread::sleep_for(200ms);
        }
    }
    pool.stop();
    return pool.stats();
}

std::pair<std::size_t, std::size_t> nft_counts(const meta::MetadataStore& m, const std::string& chain,
                                               const std::string& address) {
    std::size_t embedded = 0;
    std::size_t failed = 0;
    std::string cursor;
    for (;;) {
        const auto page = m.list_nfts_by_contract(chain, address, cursor, 1000);
        for (const auto& n : page.items) {
            embedded += n.status == meta::NftStatus::embedded;
            failed += n.status == meta::NftStatus::failed;
        }
        if (!page.next_cursor) {
            return {embedded, failed};
        }
        cursor = *page.next_cursor;
    }
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

int cmd_ingest(const Options& o, std::ostream& out) {
    Workspace ws(o);
    auto& pipeline = ws.pipeline();
    const auto address = lower(o.contract);
    const auto task_id = pipeline.enqueue_contract(o.chain, address);
    std::optional<tasks::WorkerStats> stats;
    if (!o.no_wait) {
        stats = run_workers(ws, o, true);
    }
    const auto task = ws.meta().get_task(task_id);
    Row row{{"task_id", task_id}, {"address", address}, {"status", meta::to_string(task->status)}};
    if (!o.no_wait && ws.meta().get_contract(o.chain, address)) {
        const auto [embedded, failed] = nft_counts(ws.meta(), o.chain, address);
        row["embedded"] = embedded;
        row["failed"] = failed;
    }
    print_rows(out, {row}, o.format == "ndjson");
    return task->status == meta::TaskStatus::failed ? kExitDomain : kExitOk;
}

int cmd_work(const Options& o, std::ostream& out) {
    Workspace ws(o);
    if (o.discover) {
        const auto n = ws.pipeline().discover_contracts();
        spdlog::info("discovered {} contracts", n);
    }
    const auto stats = run_workers(ws, o, o.until_idle);
    print_rows(out, {stats_row(stats)}, o.format == "ndjson");
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
    Workspace ws(o);
    auto config = api::ApiConfig::from_env();
    config.cors_origin = o.cors_origin;
    tasks::Pipeline* pipeline = ws.has_provider() ? &ws.pipeline() : nullptr;
    std::unique_ptr<tasks::WorkerPool> pool;
    if (pipeline != nullptr && o.serve_workers > 0) {
        auto wo = worker_options(o);
        wo.concurrency = o.serve_workers;
        pool = std::make_unique<tasks::WorkerPool>(
            pipeline->broker(), [pipeline](const tasks::Delivery& d) { return pipeline->handle(d); }, wo);
    }
    api::ApiDeps deps{ws.meta(), ws.vectors(), embedding::default_embedder(), pipeline, {}};
    if (pool) {
        deps.worker_stats = [p = pool.get()]() -> std::optional<tasks::WorkerStats> { return p->stats(); };
    }
    api::ApiService service(config, deps);
    const int port = service.start(o.host, o.port);
    if (pool) {
        pool->start();
    }
    print_rows(out, {Row{{"listening", "http://" + o.host + ":" + std::to_string(port)}}}, o.format == "ndjson");
    out.flush();
    while (!stop_requested().load()) {
        std::this_thread::sleep_for(100ms);
    }
    if (pool) {
        pool->stop();
    }
    service.stop();
    return kExitOk;
}

int cmd_search(const Options& o, std::ostream& out) {
    Workspace ws(o);
    const auto bytes = read_file(o.image);
    const auto probe = embedding::embed_media(*embedding::default_embedder(), bytes);
    const auto hits = ws.vectors().query(o.vector_namespace, probe, o.top_k);
    std::vector<Row> rows;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& h = hits[i];
        auto meta_field = [&](const char* k) -> Row {
            const auto it = h.metadata.find(k);
            return it == h.metadata.end() ? Row(nullptr) : Row(it->second);
        };
        rows.push_back(Row{{"rank", i + 1},
                           {"id", h.id},
                           {"distance", h.distance},
                           {"contract", meta_field("contract")},
                           {"token_id", meta_field("token_id")}});
    }
    print_rows(out, rows, o.format == "ndjson");
    return kExitOk;
}

std::vector<std::string> read_ids(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        raise(ErrorCode::IoError, "cannot read " + file.string());
    }
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        const auto e = line.find_last_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') {
            continue;
        }
        ids.push_back(line.substr(b, e - b + 1));
    }
    return ids;
}

int cmd_visualize(const Options& o, std::ostream& out) {
    Workspace ws(o);
    const auto ids = read_ids(o.ids_file);
    std::vector<std::vector<float>> rows;
    for (const auto& id : ids) {
        auto rec = ws.vectors().fetch(o.vector_namespace, id);
        if (!rec) {
            raise(ErrorCode::InvalidId, "no vector '" + id + "' in namespace '" + o.vector_namespace + "'");
        }
        rows.push_back(std::move(rec->vector));
    }
    analytics::TsneOptions opts;
    opts.seed = o.seed;
    opts.perplexity = o.perplexity.value_or(analytics::default_perplexity(ids.size()));
    const auto result = analytics::tsne(analytics::Matrix::from_rows(rows), opts);
    std::vector<Row> out_rows;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out_rows.push_back(
            Row{{"id", ids[i]}, {"x", result.projection.points(i, 0)}, {"y", result.projection.points(i, 1)}});
    }
    print_rows(out, out_rows, o.format == "ndjson");
    return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
    const auto set = chain::FixtureSet::load(o.dataset);
    const auto data = analytics::embed_labeled_media(load_fixture_media(set), *embedding::default_embedder());
    analytics::ExperimentOptions eo;
    eo.seed = o.experiment_seed;
    eo.reduce.perplexity = o.perplexity;
    eo.reduce.isomap_neighbors = o.isomap_neighbors;
    eo.reduce.tsne_iterations = o.tsne_iterations;
    if (!o.techniques.empty()) {
        eo.techniques.clear();
        for (const auto& name : o.techniques) {
            eo.techniques.push_back(*analytics::parse_technique(name));
        }
    }
    const auto report = analytics::run_reduction_experiment(data, eo);
    out << (o.format == "ndjson" ? report.to_ndjson() : report.to_table());
    const bool any_ok = std::any_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return !r.error; });
    return any_ok ? kExitOk : kExitDomain;
}

Row fit_row(const char* style, const std::optional<chain::LinearFit>& fit) {
    if (!fit) {
        return Row{{"fit", style}, {"slope_ms", nullptr}, {"intercept_ms", nullptr}, {"r2", nullptr}};
    }
    return Row{{"fit", style}, {"slope_ms", fit->slope}, {"intercept_ms", fit->intercept}, {"r2", fit->r2}};
}

int cmd_bench(const Options& o, std::ostream& out) {
    auto sizes = o.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    chain::BenchOptions bo;
    bo.page_size = o.provider.page_size;
    bo.repeats = o.repeats;
    bo.subgraph.per_page = chain::Millis(o.page_latency_ms);
    bo.cached.per_token = chain::Millis(o.token_latency_ms);

    std::optional<chain::FixtureSet> set;
    const auto scratch = std::filesystem::temp_directory_path() / ("unvd-bench-" + random_hex_id(6));
    if (!o.dataset.empty()) {
        set = chain::FixtureSet::load(o.dataset);
    } else {
        set = chain::generate_synthetic(scratch, sizes);
    }
    const auto report = chain::bench_providers(*set, sizes, bo);
    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);

    std::vector<Row> rows;
    for (const auto& r : report.rows) {
        auto opt = [](const std::optional<double>& v) { return v ? Row(*v) : Row(nullptr); };
        Row row{{"n", r.n}, {"subgraph_ms", opt(r.subgraph_ms)}, {"cached_ms", opt(r.cached_ms)},
                {"ratio", opt(r.ratio())}};
        if (r.error) {
            row["error"] = *r.error;
        }
        rows.push_back(std::move(row));
    }
    const bool nd = o.format == "ndjson";
    if (nd) {
        for (auto& r : rows) {
            r["type"] = "row";
        }
    }
    std::vector<Row> fits{fit_row("subgraph", report.subgraph_fit), fit_row("cached", report.cached_fit)};
    if (nd) {
        for (auto& f : fits) {
            f["type"] = "fit";
        }
    }
    print_rows(out, rows, nd);
    if (!nd) {
        out << '\n';
    }
    print_rows(out, fits, nd);
    return kExitOk;
}

int cmd_compact(const Options& o, std::ostream& out) {
    Workspace ws(o);
    ws.vectors().compact();
    ws.meta().compact();
    ws.broker().compact();
    print_rows(out,
               {Row{{"data_dir", o.data_dir.string()},
                    {"vectors", ws.vectors().total_count()},
                    {"queue_depth", ws.broker().depth()}}},
               o.format == "ndjson");
    return kExitOk;
}

int cmd_make_fixture(const Options& o, std::ostream& out) {
    chain::GeneratorOptions g;
    g.tokens_per_collection = o.tokens_per_collection;
    g.image_size = o.image_size;
    g.seed = o.experiment_seed;
    const auto set = chain::generate_two_collections(o.fixture_out, g);
    std::vector<Row> rows;
    for (const auto& c : set.contracts) {
        rows.push_back(Row{{"address", c.address}, {"name", c.name}, {"tokens", set.tokens.at(c.address).size()}});
    }
    print_rows(out, rows, o.format == "ndjson");
    return kExitOk;
}

void configure_logging(const std::string& level) {
    auto logger = std::make_shared<spdlog::logger>("unvd", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    logger->set_level(spdlog::level::from_str(level));
    spdlog::set_default_logger(logger);
}

}  // namespace

std::atomic<bool>& stop_requested() {
    static std::atomic<bool> flag{false};
    return flag;
}

std::vector<analytics::LabeledMedia> load_fixture_media(const chain::FixtureSet& set) {
    std::vector<analytics::LabeledMedia> media;
    for (const auto& c : set.contracts) {
        for (const auto& t : set.tokens.at(c.address)) {
            media.push_back({meta::make_vector_id(meta::kDefaultChain, t.contract, t.token_id), c.address,
                             read_file(set.media_path(t))});
        }
    }
    return media;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"unvd: NFT image similarity search and collection analytics", "unvd"};
    app.set_config("--config", "", "TOML or INI file holding any of these flags by long name");
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);

    app.add_option("--data-dir", o.data_dir, "Directory for stores and the task queue")
        ->envname("UNVD_DATA_DIR")
        ->capture_default_str();
    app.add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"table", "ndjson"}))
        ->capture_default_str();
    app.add_option("--log-level", o.log_level, "trace, debug, info, warn, err or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "err", "critical", "off"}))
        ->capture_default_str();
    app.add_option("--chain", o.chain, "Chain name stored on records")->capture_default_str();
    app.add_option("--namespace", o.vector_namespace, "Vector namespace")->capture_default_str();
    app.add_option("--provider", o.provider.kind, "Chain provider: fixture, subgraph or nft_api")
        ->check(CLI::IsMember({"fixture", "subgraph", "nft_api"}));
    app.add_option("--endpoint", o.provider.endpoint, "Fixture directory or provider base URL");
    app.add_option("--nft-endpoint", o.provider.nft_endpoint,
                   "Cached NFT API URL used for token listings alongside --endpoint");
    app.add_option("--page-size", o.provider.page_size, "Provider page size")
        ->check(CLI::Range(10, 100))
        ->capture_default_str();
    app.add_option("--api-key", o.provider.api_key, "Provider API key")->envname("UNVD_PROVIDER_KEY");
    app.add_option("--rps", o.provider.requests_per_second, "Provider request rate limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto add_worker_flags = [&](CLI::App* sub) {
        sub->add_option("--concurrency", o.concurrency, "Worker threads")
            ->check(CLI::Range(1, 256))
            ->capture_default_str();
        sub->add_option("--visibility-timeout", o.visibility_timeout_ms, "Lease length in milliseconds")
            ->check(CLI::Range(std::int64_t{1}, std::int64_t{86'400'000}))
            ->capture_default_str();
        sub->add_option("--max-attempts", o.max_attempts, "Attempts before a task fails for good")
            ->check(CLI::Range(1, 100))
            ->capture_default_str();
    };

    auto* serve = app.add_subcommand("serve", "Run the HTTP API, optionally with in-process workers");
    serve->add_option("--host", o.host)->capture_default_str();
    serve->add_option("--port", o.port)->check(CLI::Range(0, 65535))->capture_default_str();
    serve->add_option("--cors-origin", o.cors_origin)->capture_default_str();
    serve->add_option("--workers", o.serve_workers, "In-process worker threads (needs a provider)")
        ->capture_default_str();
    add_worker_flags(serve);

    auto* work = app.add_subcommand("work", "Process queued tasks");
    add_worker_flags(work);
    work->add_flag("--until-idle", o.until_idle, "Exit once the queue is empty");
    work->add_flag("--discover", o.discover, "Enqueue every contract the provider lists first");

    auto* ingest = app.add_subcommand("ingest", "Enqueue a contract and process it");
    ingest->add_option("--contract", o.contract, "Contract address (0x + 40 hex digits)")
        ->required()
        ->check(CLI::Validator(
            [](std::string& v) {
                return meta::is_valid_address(lower(v))
                           ? std::string()
                           : "SchemaViolation: '" + v + "' is not a 0x-prefixed 40-digit hex address";
            },
            "ADDRESS"));
    ingest->add_flag("--no-wait", o.no_wait, "Only enqueue");
    add_worker_flags(ingest);

    auto* search = app.add_subcommand("search", "Nearest stored NFTs to an image");
    search->add_option("--image", o.image)->required()->check(CLI::ExistingFile);
    search->add_option("--top-k", o.top_k)->check(CLI::Range(1, 100))->capture_default_str();

    auto* visualize = app.add_subcommand("visualize", "t-SNE layout of stored vectors");
    visualize->add_option("--ids", o.ids_file, "File with one vector id per line")
        ->required()
        ->check(CLI::ExistingFile);
    visualize->add_option("--seed", o.seed)->capture_default_str();
    visualize->add_option("--perplexity", o.perplexity);

    auto* evaluate = app.add_subcommand("evaluate", "Compare reduction techniques on a labeled fixture");
    evaluate->add_option("--dataset", o.dataset, "Fixture directory")->required()->check(CLI::ExistingDirectory);
    evaluate->add_option("--seed", o.experiment_seed)->capture_default_str();
    evaluate->add_option("--perplexity", o.perplexity);
    evaluate->add_option("--isomap-neighbors", o.isomap_neighbors)->check(CLI::PositiveNumber)->capture_default_str();
    evaluate->add_option("--tsne-iterations", o.tsne_iterations)->check(CLI::PositiveNumber)->capture_default_str();
    evaluate->add_option("--techniques", o.techniques, "Subset of mds,tsne,pca,tsvd,isomap")
        ->delimiter(',')
        ->check(CLI::IsMember({"mds", "tsne", "pca", "tsvd", "isomap"}));

    auto* bench = app.add_subcommand("bench", "Time subgraph-style against cached-API token listing");
    bench->add_option("--sizes", o.sizes, "Comma-separated collection sizes")->required()->delimiter(',');
    bench->add_option("--dataset", o.dataset, "Fixture to bench instead of a generated one")
        ->check(CLI::ExistingDirectory);
    bench->add_option("--repeats", o.repeats)->check(CLI::Range(1, 100))->capture_default_str();
    bench->add_option("--page-latency-ms", o.page_latency_ms)->check(CLI::NonNegativeNumber)->capture_default_str();
    bench->add_option("--token-latency-ms", o.token_latency_ms)->check(CLI::NonNegativeNumber)->capture_default_str();

    auto* compact = app.add_subcommand("compact", "Fold logs into snapshots and drop acked queue frames");

    auto* make_fixture = app.add_subcommand("make-fixture", "Write the two-collection image fixture");
    make_fixture->add_option("--out", o.fixture_out)->required();
    make_fixture->add_option("--tokens", o.tokens_per_collection)->check(CLI::Range(1, 10000))->capture_default_str();
    make_fixture->add_option("--image-size", o.image_size)->check(CLI::Range(8, 4096))->capture_default_str();
    make_fixture->add_option("--seed", o.experiment_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (!o.provider.kind.empty() && o.provider.endpoint.empty()) {
        err << "error: --provider needs --endpoint\n" << app.help();
        return kExitUsage;
    }

    configure_logging(o.log_level);
    stop_requested().store(false);
    try {
        if (*serve) return cmd_serve(o, out);
        if (*work) return cmd_work(o, out);
        if (*ingest) return cmd_ingest(o, out);
        if (*search) return cmd_search(o, out);
        if (*visualize) return cmd_visualize(o, out);
        if (*evaluate) return cmd_evaluate(o, out);
        if (*bench) return cmd_bench(o, out);
        if (*compact) return cmd_compact(o, out);
        if (*make_fixture) return cmd_make_fixture(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

}  // namespace unvd::cli

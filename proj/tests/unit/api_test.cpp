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

#include <gtest/gtest.h>

#include <chrono>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support/temp_dir.hpp"
#include "unvd/api/api_service.hpp"
#include "unvd/chain/fixture_provider.hpp"
#include "unvd/common/error.hpp"
#include "unvd/common/file_io.hpp"
#include "unvd/common/rng.hpp"
#include "unvd/embedding/base64.hpp"
#include "unvd/meta/records.hpp"
#include "unvd/tasks/broker.hpp"

using namespace unvd;
using namespace unvd::api;
using nlohmann::json;
using unvd::testing::TempDir;
using namespace std::chrono_literals;

namespace {

constexpr const char* kSecret = "0123456789abcdef0123456789abcdef";

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an unvd::Error";
    return ErrorCode::InvalidArgument;
}

// TokenSigner

TEST(TokenSigner, RoundTripsSubjectAndExpiry) {
    auto clock = std::make_shared<ManualClock>();
    TokenSigner s(kSecret, clock);
    const auto t = s.issue("admin", 60s);
    const auto c = s.verify(t);
    EXPECT_EQ(c.subject, "admin");
    EXPECT_EQ(c.expires_at - c.issued_at, 60);
    EXPECT_EQ(std::count(t.begin(), t.end(), '.'), 2);
}

TEST(TokenSigner, ExpiresAtTheBoundary) {
    auto clock = std::make_shared<ManualClock>();
    TokenSigner s(kSecret, clock);
    const auto t = s.issue("admin", 10s);
    clock->advance(9999);
    EXPECT_NO_THROW(s.verify(t));
    clock->advance(1);
    EXPECT_EQ(code_of([&] { s.verify(t); }), ErrorCode::Unauthorized);
    EXPECT_EQ(code_of([&] { s.verify(s.issue("admin", -1s)); }), ErrorCode::Unauthorized);
}

TEST(TokenSigner, RejectsTamperingAndForeignKeys) {
    TokenSigner s(kSecret);
    TokenSigner other("another-secret-of-enough-length");
    const auto t = s.issue("admin");
    auto flipped = t;
    flipped[t.find('.') + 3] ^= 1;
    EXPECT_EQ(code_of([&] { s.verify(flipped); }), ErrorCode::Unauthorized);
    EXPECT_EQ(code_of([&] { s.verify(other.issue("admin")); }), ErrorCode::Unauthorized);
    EXPECT_EQ(code_of([&] { s.verify(""); }), ErrorCode::Unauthorized);
    EXPECT_EQ(code_of([&] { s.verify("a.b"); }), ErrorCode::Unauthorized);
    EXPECT_EQ(code_of([&] { s.verify(t + "."); }), ErrorCode::Unauthorized);
}

TEST(TokenSigner, RejectsAlgNone) {
    TokenSigner s(kSecret);
    const auto payload = base64url_encode(R"({"sub":"admin","iat":0,"exp":99999999999})");
    const auto header = base64url_encode(R"({"alg":"none","typ":"JWT"})");
    EXPECT_EQ(code_of([&] { s.verify(header + "." + payload + "."); }), ErrorCode::Unauthorized);
    const auto t = s.issue("admin");
    const auto rest = t.substr(t.find('.'));
    EXPECT_EQ(code_of([&] { s.verify(header + rest); }), ErrorCode::Unauthorized);
}

TEST(TokenSigner, ShortSecretIsAConfigError) {
    EXPECT_EQ(code_of([] { TokenSigner s("short"); }), ErrorCode::InvalidConfig);
}

TEST(Base64Url, RoundTripAndStrictness) {
    for (const std::string s : {"", "f", "fo", "foo", "foob", "\xff\xfe\xfd"}) {
        EXPECT_EQ(base64url_decode(base64url_encode(s)), s);
    }
    EXPECT_EQ(base64url_encode("\xfb\xff"), "-_8");
    EXPECT_EQ(code_of([] { base64url_decode("a+b/"); }), ErrorCode::Base64Error);
    EXPECT_EQ(code_of([] { base64url_decode("Zg=="); }), ErrorCode::Base64Error);
}

// Service over a fixture ingested into "main".

struct Env {
    explicit Env(const std::filesystem::path& fixture_root, const chain::FixtureSet& set,
                 std::shared_ptr<Clock> clock = system_clock()) {
        provider = std::make_shared<chain::FixtureProvider>(
            chain::ProviderConfig(chain::ProviderKind::fixture, fixture_root.string(), 10), set);
        tasks::PipelineOptions opts;
        opts.backoff = {tasks::Millis(1)};
        pipeline = std::make_unique<tasks::Pipeline>(meta, vectors, broker, provider,
                                                     embedding::default_embedder(), opts);
        ApiConfig cfg;
        cfg.secret = kSecret;
        cfg.admin_user = "admin";
        cfg.admin_password = "hunter2-but-longer";
        ApiDeps deps{meta, vectors, embedding::default_embedder(), pipeline.get(), {}};
        service = std::make_unique<ApiService>(cfg, deps, std::move(clock));
    }

    void ingest_directly(const chain::FixtureSet& set) {
        for (const auto& c : set.contracts) {
            pipeline->enqueue_contract("ethereum", c.address);
        }
        while (broker.depth() > 0) {
            if (!pipeline->process_one()) {
                std::this_thread::sleep_for(2ms);
            }
        }
    }

    meta::MetadataStore meta;
    vectors::VectorStore vectors{2016};
    tasks::InMemoryBroker broker;
    std::shared_ptr<chain::FixtureProvider> provider;
    std::unique_ptr<tasks::Pipeline> pipeline;
    std::unique_ptr<ApiService> service;
};

ApiResponse call(const ApiService& svc, std::string method, std::string path, std::string body = "",
                 std::map<std::string, std::string> headers = {}) {
    ApiRequest r;
    r.method = std::move(method);
    r.path = std::move(path);
    r.body = std::move(body);
    r.headers = std::move(headers);
    return svc.handle(r);
}

json body_of(const ApiResponse& r) { return json::parse(r.body); }

std::string error_code(const ApiResponse& r) { return body_of(r)["error"]["code"].get<std::string>(); }

class ApiTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir("unvd-api-fixture");
        set_ = new chain::FixtureSet(chain::generate_two_collections(dir_->path()));
        env_ = new Env(dir_->path(), *set_);
        env_->ingest_directly(*set_);
        port_ = env_->service->start();
    }
    static void TearDownTestSuite() {
        delete env_;
        delete set_;
        delete dir_;
    }

    static std::string image_b64(const chain::FixtureToken& t) {
        return embedding::base64_encode(read_file(set_->media_path(t)));
    }
    static const chain::FixtureToken& token(std::size_t contract, std::size_t i) {
        return set_->tokens.at(set_->contracts.at(contract).address).at(i);
    }
    static std::string bearer() { return "Bearer " + env_->service->signer().issue("admin"); }

    static httplib::Client client() {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(60, 0);
        return c;
    }

    static TempDir* dir_;
    static chain::FixtureSet* set_;
    static Env* env_;
    static int port_;
};
TempDir* ApiTest::dir_ = nullptr;
chain::FixtureSet* ApiTest::set_ = nullptr;
Env* ApiTest::env_ = nullptr;
int ApiTest::port_ = 0;

TEST_F(ApiTest, HealthAndCors) {
    auto r = call(*env_->service, "GET", "/health");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.headers["Access-Control-Allow-Origin"], "*");
    auto pre = call(*env_->service, "OPTIONS", "/search");
    EXPECT_EQ(pre.status, 204);
    EXPECT_NE(pre.headers["Access-Control-Allow-Headers"].find("Authorization"), std::string::npos);
}

TEST_F(ApiTest, SearchFindsTheQueryImageFirst) {
    const auto& t = token(0, 3);
    auto r = call(*env_->service, "POST", "/search", json{{"image_base64", image_b64(t)}, {"top_k", 3}}.dump());
    ASSERT_EQ(r.status, 200) << r.body;
    const auto b = body_of(r);
    ASSERT_EQ(b["results"].size(), 3u);
    EXPECT_EQ(b["results"][0]["id"], meta::make_vector_id("ethereum", t.contract, t.token_id));
    EXPECT_NEAR(b["results"][0]["distance"].get<double>(), 0.0, 1e-5);
    EXPECT_EQ(b["results"][0]["metadata"]["contract"], t.contract);
    EXPECT_EQ(b["embedder"]["dimension"], 2016);
    for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_GE(b["results"][i]["distance"], b["results"][i - 1]["distance"]);
    }
}

// Property: /search answers exactly what embed_base64 + query answer.
TEST_F(ApiTest, SearchIsAPureComposition) {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto& t = token(rng.below(2), rng.below(25));
        const auto b64 = image_b64(t);
        const auto k = 1 + rng.below(60);
        auto r = call(*env_->service, "POST", "/search", json{{"image_base64", b64}, {"top_k", k}}.dump());
        ASSERT_EQ(r.status, 200);
        const auto probe = embedding::embed_base64(*embedding::default_embedder(), b64);
        const auto direct = env_->vectors.query("main", probe, k);
        const auto results = body_of(r)["results"];
        ASSERT_EQ(results.size(), direct.size());
        for (std::size_t i = 0; i < direct.size(); ++i) {
            EXPECT_EQ(results[i]["id"], direct[i].id);
            EXPECT_EQ(results[i]["distance"].get<double>(), direct[i].distance);
        }
    }
}

TEST_F(ApiTest, SearchNeighboursStayInTheQueryCollection) {
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& t = token(c, 0);
        auto r = call(*env_->service, "POST", "/search", json{{"image_base64", image_b64(t)}, {"top_k", 10}}.dump());
        ASSERT_EQ(r.status, 200);
        for (const auto& hit : body_of(r)["results"]) {
            EXPECT_EQ(hit["metadata"]["contract"], t.contract);
        }
    }
}

TEST_F(ApiTest, SearchValidation) {
    auto& svc = *env_->service;
    const auto img = image_b64(token(0, 0));
    EXPECT_EQ(call(svc, "POST", "/search", R"({"image_base64":"@@@"})").status, 400);
    EXPECT_EQ(call(svc, "POST", "/search", R"({"top_k":3})").status, 400);
    EXPECT_EQ(call(svc, "POST", "/search", "not json").status, 400);
    EXPECT_EQ(call(svc, "POST", "/search", "[1,2]").status, 400);
    EXPECT_EQ(call(svc, "POST", "/search", json{{"image_base64", img}, {"top_k", 0}}.dump()).status, 422);
    EXPECT_EQ(call(svc, "POST", "/search", json{{"image_base64", img}, {"top_k", 101}}.dump()).status, 422);
    EXPECT_EQ(call(svc, "POST", "/search", json{{"image_base64", img}, {"top_k", "3"}}.dump()).status, 400);
    auto ns = call(svc, "POST", "/search", json{{"image_base64", img}, {"namespace", "nope"}}.dump());
    EXPECT_EQ(ns.status, 404);
    EXPECT_EQ(error_code(ns), "UnknownNamespace");
    auto text = call(svc, "POST", "/search", json{{"image_base64", embedding::base64_encode("hello")}}.dump());
    EXPECT_EQ(text.status, 400);
    EXPECT_EQ(error_code(text), "UnsupportedFormat");
    EXPECT_EQ(call(svc, "GET", "/search").status, 405);
    EXPECT_EQ(call(svc, "GET", "/nowhere").status, 404);
}

TEST_F(ApiTest, VisualizeIsDeterministicPerSeed) {
    json ids = json::array();
    for (std::size_t i = 0; i < 10; ++i) {
        const auto& t = token(i % 2, i / 2);
        ids.push_back(meta::make_vector_id("ethereum", t.contract, t.token_id));
    }
    const auto req = json{{"vector_ids", ids}, {"seed", 7}}.dump();
    auto a = call(*env_->service, "POST", "/visualize", req);
    auto b = call(*env_->service, "POST", "/visualize", req);
    ASSERT_EQ(a.status, 200) << a.body;
    EXPECT_EQ(a.body, b.body);
    const auto j = body_of(a);
    EXPECT_EQ(j["points"].size(), 10u);
    EXPECT_EQ(j["points"][0].size(), 2u);
    EXPECT_EQ(j["ids"], ids);
    EXPECT_DOUBLE_EQ(j["perplexity"].get<double>(), 3.0);
    auto c = call(*env_->service, "POST", "/visualize", json{{"vector_ids", ids}, {"seed", 8}}.dump());
    EXPECT_NE(body_of(c)["points"], j["points"]);
}

TEST_F(ApiTest, VisualizeValidation) {
    auto& svc = *env_->service;
    json three = json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& t = token(0, i);
        three.push_back(meta::make_vector_id("ethereum", t.contract, t.token_id));
    }
    auto small = call(svc, "POST", "/visualize", json{{"vector_ids", three}}.dump());
    EXPECT_EQ(small.status, 422);
    auto four = three;
    four.push_back("ethereum:0xdead:1");
    EXPECT_EQ(call(svc, "POST", "/visualize", json{{"vector_ids", four}}.dump()).status, 404);
    auto big_perp = three;
    const auto& t = token(1, 0);
    big_perp.push_back(meta::make_vector_id("ethereum", t.contract, t.token_id));
    auto perp = call(svc, "POST", "/visualize", json{{"vector_ids", big_perp}, {"perplexity", 50}}.dump());
    EXPECT_EQ(perp.status, 422);
    EXPECT_EQ(error_code(perp), "PerplexityOutOfRange");
    EXPECT_EQ(call(svc, "POST", "/visualize", "{}").status, 400);
    EXPECT_EQ(call(svc, "POST", "/visualize", json{{"vector_ids", three}, {"vectors", json::array()}}.dump()).status,
              400);
    EXPECT_EQ(call(svc, "POST", "/visualize", R"({"vectors":[[1,2],[3,4],[5],[6,7]]})").status, 422);
    json many = json::array();
    for (int i = 0; i < 2001; ++i) {
        many.push_back({i, i % 7});
    }
    EXPECT_EQ(call(svc, "POST", "/visualize", json{{"vectors", many}}.dump()).status, 422);
}

TEST_F(ApiTest, VisualizeRawVectors) {
    json rows = json::array();
    Rng rng(5);
    for (int i = 0; i < 12; ++i) {
        rows.push_back({rng.normal(), rng.normal(), rng.normal()});
    }
    auto r = call(*env_->service, "POST", "/visualize", json{{"vectors", rows}}.dump());
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(body_of(r)["indices"].size(), 12u);
}

TEST_F(ApiTest, LoginIssuesUsableTokens) {
    auto& svc = *env_->service;
    auto bad = call(svc, "POST", "/auth/login", R"({"username":"admin","password":"wrong"})");
    EXPECT_EQ(bad.status, 401);
    EXPECT_EQ(call(svc, "POST", "/auth/login", R"({"username":"admin"})").status, 400);
    auto ok = call(svc, "POST", "/auth/login", R"({"username":"admin","password":"hunter2-but-longer"})");
    ASSERT_EQ(ok.status, 200);
    const auto token = body_of(ok)["token"].get<std::string>();
    EXPECT_TRUE(parse_utc(body_of(ok)["expires_at"].get<std::string>()));
    auto a = call(svc, "GET", "/admin/analytics", "", {{"authorization", "Bearer " + token}});
    EXPECT_EQ(a.status, 200);
}

TEST_F(ApiTest, AdminRoutesNeedAValidToken) {
    auto& svc = *env_->service;
    EXPECT_EQ(call(svc, "GET", "/admin/tasks").status, 401);
    EXPECT_EQ(call(svc, "GET", "/admin/tasks", "", {{"authorization", "Basic abc"}}).status, 401);
    const auto expired = "Bearer " + svc.signer().issue("admin", -1s);
    EXPECT_EQ(call(svc, "GET", "/admin/tasks", "", {{"authorization", expired}}).status, 401);
    auto tampered = bearer();
    tampered.back() = tampered.back() == 'A' ? 'B' : 'A';
    EXPECT_EQ(call(svc, "GET", "/admin/analytics", "", {{"authorization", tampered}}).status, 401);
    EXPECT_EQ(call(svc, "POST", "/admin/enqueue", "garbage", {{"authorization", expired}}).status, 401);
}

TEST_F(ApiTest, AnalyticsReportsIngestedCollection) {
    auto r = call(*env_->service, "GET", "/admin/analytics", "", {{"authorization", bearer()}});
    ASSERT_EQ(r.status, 200);
    const auto b = body_of(r);
    EXPECT_EQ(b["contracts"], 2);
    EXPECT_EQ(b["nfts"]["embedded"], 50);
    EXPECT_EQ(b["nfts"]["failed"], 0);
    EXPECT_EQ(b["tasks"]["done"], 52);
    EXPECT_EQ(b["vectors"], 50);
    EXPECT_TRUE(b["workers"].is_null());
}

TEST_F(ApiTest, TaskListingPagesAndFilters) {
    auto& svc = *env_->service;
    std::set<std::string> seen;
    std::string cursor;
    for (int guard = 0; guard < 100; ++guard) {
        ApiRequest r{"GET", "/admin/tasks", {{"status", "done"}, {"limit", "20"}, {"cursor", cursor}},
                     {{"authorization", bearer()}}, ""};
        auto res = svc.handle(r);
        ASSERT_EQ(res.status, 200) << res.body;
        const auto b = body_of(res);
        for (const auto& t : b["items"]) {
            EXPECT_EQ(t["status"], "done");
            EXPECT_TRUE(seen.insert(t["task_id"].get<std::string>()).second);
        }
        if (b["next_cursor"].is_null()) {
            break;
        }
        cursor = b["next_cursor"].get<std::string>();
    }
    EXPECT_EQ(seen.size(), 52u);
    ApiRequest bad_status{"GET", "/admin/tasks", {{"status", "sleeping"}}, {{"authorization", bearer()}}, ""};
    EXPECT_EQ(svc.handle(bad_status).status, 422);
    ApiRequest bad_limit{"GET", "/admin/tasks", {{"limit", "0"}}, {{"authorization", bearer()}}, ""};
    EXPECT_EQ(svc.handle(bad_limit).status, 422);
    ApiRequest bad_cursor{"GET", "/admin/tasks", {{"cursor", "%%%"}}, {{"authorization", bearer()}}, ""};
    EXPECT_EQ(svc.handle(bad_cursor).status, 400);
}

TEST_F(ApiTest, RetryRules) {
    auto& svc = *env_->service;
    auto missing = call(svc, "POST", "/admin/tasks/nt-missing/retry", "", {{"authorization", bearer()}});
    EXPECT_EQ(missing.status, 404);
    const auto done = env_->meta.list_tasks(meta::TaskStatus::done, "", 1).items.at(0);
    auto conflict = call(svc, "POST", "/admin/tasks/" + done.task_id + "/retry", "", {{"authorization", bearer()}});
    EXPECT_EQ(conflict.status, 409);
    EXPECT_EQ(error_code(conflict), "IllegalTransition");
}

TEST_F(ApiTest, EnqueueValidation) {
    auto& svc = *env_->service;
    auto bad = call(svc, "POST", "/admin/enqueue", R"({"address":"0xBAD"})", {{"authorization", bearer()}});
    EXPECT_EQ(bad.status, 422);
    EXPECT_EQ(error_code(bad), "SchemaViolation");
    EXPECT_EQ(call(svc, "POST", "/admin/enqueue", R"({"chain":"ethereum"})", {{"authorization", bearer()}}).status,
              400);
}

TEST_F(ApiTest, HttpTransportCarriesStatusAndHeaders) {
    auto c = client();
    auto health = c.Get("/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");
    auto search = c.Post("/search", json{{"image_base64", image_b64(token(1, 4))}, {"top_k", 1}}.dump(),
                         "application/json");
    ASSERT_TRUE(search);
    ASSERT_EQ(search->status, 200);
    EXPECT_EQ(json::parse(search->body)["results"][0]["metadata"]["token_id"], token(1, 4).token_id);
    auto tasks = c.Get("/admin/tasks?status=done&limit=5", {{"Authorization", bearer()}});
    ASSERT_TRUE(tasks);
    EXPECT_EQ(tasks->status, 200);
    EXPECT_EQ(json::parse(tasks->body)["items"].size(), 5u);
}

TEST_F(ApiTest, OversizeBodyIs413) {
    ApiConfig cfg;
    cfg.secret = kSecret;
    cfg.max_body_bytes = 1024;
    ApiService small(cfg, ApiDeps{env_->meta, env_->vectors, embedding::default_embedder(), nullptr, {}});
    const int port = small.start();
    httplib::Client c("127.0.0.1", port);
    auto r = c.Post("/search", std::string(4096, 'x'), "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 413);
    small.stop();
}

// Property: arbitrary bodies never produce a 5xx and every error is a JSON error object.
TEST_F(ApiTest, FuzzedBodiesOnlyYieldClientErrors) {
    auto c = client();
    Rng rng(2023);
    const std::vector<std::string> paths = {"/search", "/visualize", "/auth/login"};
    const std::vector<std::string> seeds = {
        R"({"image_base64":)", R"({"top_k":-1,"image_base64":"AAAA"})", R"({"vector_ids":[1,2,3,4]})",
        R"({"vectors":[[1e400,0],[0,0],[1,1],[2,2]]})", R"({"vector_ids":null,"vectors":"x"})",
        R"({"username":7,"password":[]})", "[[[[[[[[[[", "\xff\xfe{}", "{\"a\":\"\\ud800\"}",
        R"({"vectors":[[0,0],[0,0],[0,0],[0,0]]})", R"({"top_k":1e3,"image_base64":""})"};
    std::map<int, int> statuses;
    for (int i = 0; i < 1000; ++i) {
        std::string body;
        switch (rng.below(3)) {
        case 0: {
            body.resize(rng.below(64));
            for (auto& ch : body) {
                ch = static_cast<char>(rng.below(256));
            }
            break;
        }
        case 1: body = seeds[rng.below(seeds.size())]; break;
        default: {
            body = seeds[rng.below(seeds.size())];
            const auto flips = 1 + rng.below(4);
            for (std::uint64_t f = 0; f < flips && !body.empty(); ++f) {
                body[rng.below(body.size())] = static_cast<char>(rng.below(128));
            }
        }
        }
        const auto& path = paths[rng.below(paths.size())];
        auto r = c.Post(path, body, "application/json");
        ASSERT_TRUE(r) << "request " << i << " got no response";
        ++statuses[r->status];
        ASSERT_LT(r->status, 500) << path << " " << body << " -> " << r->body;
        if (r->status >= 400) {
            ASSERT_TRUE(json::parse(r->body, nullptr, false).contains("error"));
        }
    }
    EXPECT_GT(statuses[400], 500);
    auto health = c.Get("/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
}

// Property: forged, expired or re-signed tokens never mutate state.
TEST_F(ApiTest, ForgedTokensNeverMutate) {
    auto& svc = *env_->service;
    const auto before = svc.admin_mutations();
    const auto tasks_before = env_->meta.analytics_summary().tasks;
    TokenSigner foreign("an-attacker-secret-0123456789");
    const auto good = svc.signer().issue("admin");
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        std::string token;
        switch (i % 4) {
        case 0: token = foreign.issue("admin"); break;
        case 1: token = svc.signer().issue("admin", std::chrono::seconds(-1 - static_cast<int>(rng.below(1000)))); break;
        case 2: {
            token = good;
            token[rng.below(token.size())] = "ABCxyz019-_."[rng.below(12)];
            if (token == good) {
                token += "A";
            }
            break;
        }
        default: {
            const auto header = base64url_encode(R"({"alg":"none"})");
            token = header + good.substr(good.find('.'));
        }
        }
        const auto& c = set_->contracts[rng.below(set_->contracts.size())];
        auto r = call(svc, "POST", i % 2 ? "/admin/enqueue" : "/admin/tasks/ct-x/retry",
                      json{{"address", c.address}}.dump(), {{"authorization", "Bearer " + token}});
        ASSERT_EQ(r.status, 401) << token;
    }
    EXPECT_EQ(svc.admin_mutations(), before);
    EXPECT_EQ(env_->meta.analytics_summary().tasks, tasks_before);
}

// End to end: enqueue over HTTP, workers ingest, poll until done.
TEST(ApiIngest, EnqueueAndPollUntilDone) {
    TempDir dir("unvd-api-ingest");
    auto set = chain::generate_two_collections(dir.path(), {.tokens_per_collection = 6});
    Env env(dir.path(), set);
    tasks::WorkerPool pool(*env.pipeline, 2);
    pool.start();
    const int port = env.service->start();
    httplib::Client c("127.0.0.1", port);
    const auto auth = httplib::Headers{{"Authorization", "Bearer " + env.service->signer().issue("admin")}};
    std::vector<std::string> ids;
    for (const auto& contract : set.contracts) {
        auto upper = contract.address;
        std::transform(upper.begin() + 2, upper.end(), upper.begin() + 2, ::toupper);
        auto r = c.Post("/admin/enqueue", auth, json{{"address", upper}}.dump(), "application/json");
        ASSERT_TRUE(r);
        ASSERT_EQ(r->status, 202) << r->body;
        ids.push_back(json::parse(r->body)["task_id"].get<std::string>());
        EXPECT_EQ(json::parse(r->body)["status"], "pending");
    }
    auto dup = c.Post("/admin/enqueue", auth, json{{"address", set.contracts[0].address}}.dump(), "application/json");
    ASSERT_TRUE(dup);
    EXPECT_TRUE(dup->status == 409 || dup->status == 202);

    ASSERT_TRUE(pool.wait_idle(60s));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto t = env.meta.get_task(ids[i]);
        ASSERT_TRUE(t);
        EXPECT_EQ(t->status, meta::TaskStatus::done);
        EXPECT_EQ(t->address, set.contracts[i].address);
    }
    const auto token = "Bearer " + env.service->signer().issue("admin");
    ApiRequest poll{"GET", "/admin/tasks", {{"limit", "100"}}, {{"authorization", token}}, ""};
    const auto listed = body_of(env.service->handle(poll));
    ASSERT_EQ(listed["items"].size(), 14u);
    for (const auto& t : listed["items"]) {
        std::vector<std::string> seen;
        for (const auto& h : t["history"]) {
            seen.push_back(h["status"].get<std::string>());
        }
        EXPECT_EQ(seen, (std::vector<std::string>{"pending", "processing", "done"})) << t.dump();
    }
    auto a = c.Get("/admin/analytics", auth);
    ASSERT_TRUE(a);
    const auto b = json::parse(a->body);
    EXPECT_EQ(b["nfts"]["embedded"], 12);
    EXPECT_EQ(b["contracts"], 2);
    pool.stop();
    env.service->stop();
}

}  // namespace

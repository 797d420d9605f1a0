#include <doctest.h>

#include <fstream>

#include "raglab/config.hpp"
#include "raglab/errors.hpp"
#include "test_support.hpp"

using namespace raglab;
using raglab_test::TempDir;

namespace {

const char* kFixtureConfig = RAGLAB_FIXTURE_DIR "/config.json";

std::filesystem::path write_config(const TempDir& tmp, const json& body) {
    auto path = tmp.path / "config.json";
    std::ofstream(path) << body.dump(2);
    return path;
}

json minimal_config() {
    return json{{"corpus", "corpus.jsonl"}, {"qa", "qa.jsonl"}};
}

} // namespace

TEST_CASE("fixture config loads with resolved paths") {
    auto cfg = load_config(kFixtureConfig);
    CHECK(cfg.preset == "hybrid");
    CHECK(cfg.mode == PipelineMode::hybrid);
    CHECK(cfg.seed == 7);
    CHECK(cfg.parallelism == 2);
    CHECK(cfg.dense.dimension == 64);
    CHECK(cfg.rerank.scorer == "oracle");
    CHECK(cfg.generation.client == "gold");
    bool anchored = cfg.corpus_path.is_absolute() ||
                    cfg.corpus_path.string().find("fixtures") != std::string::npos;
    CHECK(anchored);
    CHECK(std::filesystem::exists(cfg.corpus_path));
    CHECK(std::filesystem::exists(cfg.qa_path));
    CHECK(cfg.evaluation.full_combination);
    CHECK(cfg.evaluation.strat_dimensions.size() == 5);
    CHECK(cfg.deterministic_bindings());
    CHECK_FALSE(cfg.generation.refusal_phrases.empty());
}

TEST_CASE("builtin preset names select the pipeline mode") {
    CHECK(load_config(kFixtureConfig, "sparse").mode == PipelineMode::sparse);
    CHECK(load_config(kFixtureConfig, "dense").mode == PipelineMode::dense);
    CHECK(load_config(kFixtureConfig, "hybrid-rerank").mode == PipelineMode::hybrid_rerank);
    CHECK(load_config(kFixtureConfig, "doc2query").mode == PipelineMode::doc2query);
    CHECK(load_config(kFixtureConfig, "doc2query").identity() == "doc2query");
}

TEST_CASE("unknown presets without an overlay are rejected") {
    CHECK_THROWS_AS(load_config(kFixtureConfig, "turbo"), ConfigError);
}

TEST_CASE("preset overlays deep-merge over the base config") {
    TempDir tmp("raglab-config");
    auto body = minimal_config();
    body["fusion"] = {{"k_each", 30}};
    body["presets"] = {{"tight",
                        {{"mode", "sparse"},
                         {"fusion", {{"k_each", 5}, {"top_n", 4}}},
                         {"seed", 99}}}};
    auto path = write_config(tmp, body);

    auto cfg = load_config(path, "tight");
    CHECK(cfg.preset == "tight");
    CHECK(cfg.mode == PipelineMode::sparse);
    CHECK(cfg.fusion.k_each == 5);
    CHECK(cfg.fusion.top_n == 4);
    CHECK(cfg.seed == 99);

    auto base = load_config(path, "hybrid");
    CHECK(base.fusion.k_each == 30);
}

TEST_CASE("the config file's own preset key is the default") {
    TempDir tmp("raglab-config");
    auto body = minimal_config();
    body["preset"] = "dense";
    auto path = write_config(tmp, body);
    CHECK(load_config(path).mode == PipelineMode::dense);
    CHECK(load_config(path, "sparse").mode == PipelineMode::sparse);
}

TEST_CASE("config validation rejects out-of-range values") {
    TempDir tmp("raglab-config");

    SUBCASE("parallelism zero") {
        auto body = minimal_config();
        body["parallelism"] = 0;
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("b outside the unit interval") {
        auto body = minimal_config();
        body["sparse"] = {{"b", 1.5}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("fusion pool larger than both lists") {
        auto body = minimal_config();
        body["fusion"] = {{"k_each", 5}, {"top_n", 11}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("unknown scorer binding") {
        auto body = minimal_config();
        body["rerank"] = {{"scorer", "psychic"}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("unknown generation client") {
        auto body = minimal_config();
        body["generation"] = {{"client", "carrier-pigeon"}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("top_p of zero") {
        auto body = minimal_config();
        body["generation"] = {{"top_p", 0.0}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("empty refusal phrase list") {
        auto body = minimal_config();
        body["generation"] = {{"refusal_phrases", json::array()}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("stratification over a dimension the taxonomy lacks") {
        auto body = minimal_config();
        body["evaluation"] = {{"strat_dimensions", {"mood"}}};
        CHECK_THROWS_AS(load_config(write_config(tmp, body)), ConfigError);
    }
    SUBCASE("missing corpus key") {
        CHECK_THROWS_AS(load_config(write_config(tmp, json{{"qa", "qa.jsonl"}})),
                        ConfigError);
    }
}

TEST_CASE("defaults fill unspecified fields") {
    TempDir tmp("raglab-config");
    auto cfg = load_config(write_config(tmp, minimal_config()));
    CHECK(cfg.max_tokens == 512);
    CHECK(cfg.sparse.bm25.k1 == 1.2);
    CHECK(cfg.sparse.bm25.b == 0.75);
    CHECK(cfg.fusion.k_each == 30);
    CHECK(cfg.fusion.top_n == 10);
    CHECK(cfg.generation.params.temperature == 0.6);
    CHECK(cfg.generation.params.top_p == 0.9);
    CHECK(cfg.generation.params.max_answer_tokens == 200);
    CHECK(cfg.generation.params.context_size == 10);
    CHECK(cfg.seed == 42);
    CHECK(cfg.evaluation.strat_dimensions.size() == 5);
}

TEST_CASE("the config snapshot never carries credentials") {
    auto cfg = load_config(kFixtureConfig);
    auto dump = cfg.to_json().dump();
    CHECK(dump.find("api_key") == std::string::npos);
    CHECK(dump.find("API_KEY") == std::string::npos);
}

TEST_CASE("http bindings mark the run as nondeterministic") {
    auto cfg = load_config(kFixtureConfig);
    CHECK(cfg.deterministic_bindings());
    cfg.generation.client = "http";
    CHECK_FALSE(cfg.deterministic_bindings());
}

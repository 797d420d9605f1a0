#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "raglab/errors.hpp"
#include "raglab/pipeline.hpp"
#include "test_support.hpp"

using namespace raglab;
using raglab_test::TempDir;

namespace {

const char* kFixtureConfig = RAGLAB_FIXTURE_DIR "/config.json";

PipelineConfig fixture_config(const TempDir& tmp, const std::string& preset = "") {
    auto cfg = load_config(kFixtureConfig, preset);
    cfg.workdir = tmp.path / "work";
    return cfg;
}

DocumentChunk make_chunk(const std::string& doc, std::size_t ordinal, const std::string& text,
                         std::size_t tokens) {
    DocumentChunk c;
    c.chunk_id = doc + "#" + std::to_string(ordinal);
    c.parent_doc_id = doc;
    c.ordinal = ordinal;
    c.text = text;
    c.token_count = tokens;
    return c;
}

struct EnvGuard {
    std::string name;
    std::string saved;
    bool had = false;

    EnvGuard(const std::string& var, const std::string& value) : name(var) {
        if (const char* old = std::getenv(var.c_str())) {
            had = true;
            saved = old;
        }
        setenv(var.c_str(), value.c_str(), 1);
    }
    ~EnvGuard() {
        if (had) {
            setenv(name.c_str(), saved.c_str(), 1);
        } else {
            unsetenv(name.c_str());
        }
    }
};

} // namespace

TEST_CASE("chunk artifacts round trip") {
    TempDir tmp("raglab-artifacts");
    std::vector<DocumentChunk> chunks = {make_chunk("doc-a", 0, "Tides rise twice.", 3),
                                         make_chunk("doc-a", 1, "They also fall.", 3),
                                         make_chunk("doc-b", 0, "Kelp sways.", 2)};
    auto path = tmp.path / "chunks.jsonl";
    save_chunks(path, chunks);
    auto loaded = load_chunks(path);

    REQUIRE(loaded.size() == 3);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        CHECK(loaded[i].chunk_id == chunks[i].chunk_id);
        CHECK(loaded[i].parent_doc_id == chunks[i].parent_doc_id);
        CHECK(loaded[i].ordinal == chunks[i].ordinal);
        CHECK(loaded[i].text == chunks[i].text);
        CHECK(loaded[i].token_count == chunks[i].token_count);
    }
}

TEST_CASE("ranking artifacts round trip and reject duplicate question ids") {
    TempDir tmp("raglab-artifacts");
    RankedList first = {{"doc-a#0", 2.5, Provenance::fused}, {"doc-b#0", 1.0, Provenance::fused}};
    RankedList second = {{"doc-b#0", 0.75, Provenance::sparse}};
    auto path = tmp.path / "rankings.jsonl";
    save_rankings(path, {{"q1", first}, {"q2", second}});

    auto loaded = load_rankings(path);
    REQUIRE(loaded.size() == 2);
    REQUIRE(loaded.at("q1").size() == 2);
    CHECK(loaded.at("q1")[0].chunk_id == "doc-a#0");
    CHECK(loaded.at("q1")[0].score == 2.5);
    CHECK(loaded.at("q1")[0].provenance == Provenance::fused);
    CHECK(loaded.at("q2")[0].provenance == Provenance::sparse);

    save_rankings(path, {{"q1", first}, {"q1", second}});
    CHECK_THROWS_AS(load_rankings(path), IntegrityError);
}

TEST_CASE("generation artifacts keep error rows distinct from answers") {
    TempDir tmp("raglab-artifacts");
    GenerationRow ok;
    ok.answer = "The ferry runs daily.";
    ok.is_refusal = false;
    ok.prompt_chunk_ids = {"doc-a#0", "doc-b#0"};
    GenerationRow failed;
    failed.error = "backend unavailable";

    auto path = tmp.path / "generations.jsonl";
    save_generations(path, {{"q1", ok}, {"q2", failed}});
    auto loaded = load_generations(path);

    REQUIRE(loaded.size() == 2);
    CHECK(loaded.at("q1").answer == "The ferry runs daily.");
    CHECK(loaded.at("q1").error.empty());
    CHECK(loaded.at("q1").prompt_chunk_ids.size() == 2);
    CHECK(loaded.at("q2").error == "backend unavailable");
    CHECK(loaded.at("q2").answer.empty());
}

TEST_CASE("timing artifacts round trip") {
    TempDir tmp("raglab-artifacts");
    auto path = tmp.path / "timings.jsonl";
    save_timings(path, {{"q1", 0.25}, {"q2", 1.5}});
    auto loaded = load_timings(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.at("q1") == 0.25);
    CHECK(loaded.at("q2") == 1.5);
}

TEST_CASE("file hashes are short stable hex strings") {
    TempDir tmp("raglab-artifacts");
    auto path = tmp.path / "blob.txt";
    std::ofstream(path) << "low tide at noon";

    auto h1 = file_hash_hex(path);
    auto h2 = file_hash_hex(path);
    CHECK(h1 == h2);
    CHECK(h1.size() == 16);
    CHECK(h1.find_first_not_of("0123456789abcdef") == std::string::npos);

    std::ofstream(path) << "high tide at dusk";
    CHECK(file_hash_hex(path) != h1);
}

TEST_CASE("the run manifest persists and reloads") {
    TempDir tmp("raglab-artifacts");
    RunManifest manifest;
    manifest.config = json{{"preset", "hybrid"}};
    manifest.artifact_hashes["chunks"] = "0123456789abcdef";
    manifest.counts["documents"] = 30;
    manifest.timestamps["index"] = "2026-01-01T00:00:00Z";
    manifest.stage_seconds["index"] = 1.5;
    manifest.deterministic = true;

    auto path = tmp.path / "manifest.json";
    manifest.save(path);
    auto loaded = RunManifest::load_or_empty(path);
    CHECK(loaded.to_json().dump(2) == manifest.to_json().dump(2));

    auto empty = RunManifest::load_or_empty(tmp.path / "absent.json");
    CHECK(empty.counts.empty());
    CHECK(empty.deterministic);
}

TEST_CASE("cmd_index writes every index artifact and the manifest") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp);
    cmd_index(cfg);

    ArtifactPaths paths{cfg.workdir};
    CHECK(std::filesystem::exists(paths.chunks()));
    CHECK(std::filesystem::exists(paths.sparse_index()));
    CHECK(std::filesystem::exists(paths.doc2query_index()));
    CHECK(std::filesystem::exists(paths.dense_index()));
    CHECK(std::filesystem::exists(paths.manifest()));

    auto manifest = RunManifest::load_or_empty(paths.manifest());
    CHECK(manifest.counts.at("documents") == 30);
    CHECK(manifest.counts.at("chunks") == 30);
    CHECK(manifest.artifact_hashes.count("chunks") == 1);
    CHECK(manifest.artifact_hashes.count("dense_index") == 1);
    CHECK(manifest.deterministic);
    CHECK(manifest.timestamps.count("index") == 1);

    auto chunks = load_chunks(paths.chunks());
    CHECK(chunks.size() == 30);
}

TEST_CASE("cmd_index refuses to run against a missing corpus") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp);
    cfg.corpus_path = tmp.path / "no-such-corpus.jsonl";
    CHECK_THROWS_AS(cmd_index(cfg), ConfigError);
    CHECK_FALSE(std::filesystem::exists(cfg.workdir));
}

TEST_CASE("the doc2query index vocabulary covers the plain index") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp);
    cmd_index(cfg);

    ArtifactPaths paths{cfg.workdir};
    auto plain = SparseIndex::from_json(json::parse(read_file(paths.sparse_index())));
    auto expanded = SparseIndex::from_json(json::parse(read_file(paths.doc2query_index())));

    std::set<std::string> plain_vocab;
    std::set<std::string> expanded_vocab;
    for (const auto& [term, _] : plain.postings()) {
        plain_vocab.insert(term);
    }
    for (const auto& [term, _] : expanded.postings()) {
        expanded_vocab.insert(term);
    }
    CHECK(std::includes(expanded_vocab.begin(), expanded_vocab.end(), plain_vocab.begin(),
                        plain_vocab.end()));
    CHECK(expanded_vocab.size() > plain_vocab.size());
}

TEST_CASE("cmd_retrieve demands the index stage first") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp);
    try {
        cmd_retrieve(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("raglab index") != std::string::npos);
    }
}

TEST_CASE("sparse retrieval writes capped sparse-provenance rankings") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp, "sparse");
    cmd_index(cfg);
    cmd_retrieve(cfg);

    ArtifactPaths paths{cfg.workdir};
    auto rankings = load_rankings(paths.rankings("sparse"));
    CHECK(rankings.size() == 10);
    for (const auto& [qid, list] : rankings) {
        CHECK(list.size() <= cfg.fusion.k_each);
        CHECK_FALSE(list.empty());
        for (const auto& entry : list) {
            CHECK(entry.provenance == Provenance::sparse);
        }
        for (std::size_t i = 1; i < list.size(); ++i) {
            CHECK(list[i - 1].score >= list[i].score);
        }
    }
    CHECK(std::filesystem::exists(paths.retrieval_timings("sparse")));
}

TEST_CASE("hybrid retrieval truncates fused lists to the configured pool") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp, "hybrid");
    cmd_index(cfg);
    cmd_retrieve(cfg);

    auto rankings = load_rankings(ArtifactPaths{cfg.workdir}.rankings("hybrid"));
    CHECK(rankings.size() == 10);
    for (const auto& [qid, list] : rankings) {
        CHECK(list.size() <= cfg.fusion.top_n);
        for (const auto& entry : list) {
            CHECK(entry.provenance == Provenance::fused);
        }
    }
}

TEST_CASE("fusion degenerates to the sparse ranking when the dense side is empty") {
    TempDir tmp("raglab-pipeline");
    auto sparse_cfg = fixture_config(tmp, "sparse");
    cmd_index(sparse_cfg);
    cmd_retrieve(sparse_cfg);

    ArtifactPaths paths{sparse_cfg.workdir};
    atomic_write(paths.dense_index(),
                 json{{"type", "dense_index"},
                      {"dimension", 64},
                      {"vectors", json::object()}}
                     .dump());

    auto hybrid_cfg = fixture_config(tmp, "hybrid");
    cmd_retrieve(hybrid_cfg);

    auto sparse = load_rankings(paths.rankings("sparse"));
    auto hybrid = load_rankings(paths.rankings("hybrid"));
    for (const auto& [qid, sparse_list] : sparse) {
        const auto& fused = hybrid.at(qid);
        std::size_t expected = std::min<std::size_t>(hybrid_cfg.fusion.top_n,
                                                     sparse_list.size());
        REQUIRE(fused.size() == expected);
        for (std::size_t i = 0; i < expected; ++i) {
            CHECK(fused[i].chunk_id == sparse_list[i].chunk_id);
        }
    }
}

TEST_CASE("generation failures are recorded per question unless fail_fast is set") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp);
    cmd_index(cfg);
    cmd_retrieve(cfg);

    cfg.generation.client = "http";
    EnvGuard endpoint("GENERATION_ENDPOINT", "http://127.0.0.1:2");

    SUBCASE("per-row errors") {
        cfg.fail_fast = false;
        cmd_generate(cfg);
        auto rows = load_generations(ArtifactPaths{cfg.workdir}.generations(cfg.preset));
        REQUIRE(rows.size() == 10);
        for (const auto& [qid, row] : rows) {
            CHECK_FALSE(row.error.empty());
            CHECK(row.answer.empty());
        }
    }
    SUBCASE("fail fast") {
        cfg.fail_fast = true;
        CHECK_THROWS_AS(cmd_generate(cfg), ServiceError);
    }
}

TEST_CASE("cmd_evaluate demands the generate stage first") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp);
    cmd_index(cfg);
    cmd_retrieve(cfg);
    try {
        cmd_evaluate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("raglab generate") != std::string::npos);
    }
}

TEST_CASE("the full offline pipeline evaluates and compares presets in order") {
    TempDir tmp("raglab-pipeline");
    auto base = fixture_config(tmp);
    cmd_index(base);

    for (const std::string preset : {"hybrid", "sparse"}) {
        auto cfg = fixture_config(tmp, preset);
        cmd_retrieve(cfg);
        cmd_generate(cfg);
        auto report = cmd_evaluate(cfg);
        CHECK(report.n_questions == 10);
        CHECK(report.n_generated == 10);
        CHECK(report.generation.rouge1_recall == 1.0);
        CHECK(report.generation.refusal_rate == 0.0);
        CHECK(report.retrieval.map > 0.5);
    }

    ArtifactPaths paths{base.workdir};
    CHECK(std::filesystem::exists(paths.report_json("sparse")));
    CHECK(std::filesystem::exists(paths.report_json("hybrid")));
    CHECK(std::filesystem::exists(paths.report_table("hybrid", "md")));

    auto table = cmd_report(base);
    auto sparse_pos = table.find("| sparse |");
    auto hybrid_pos = table.find("| hybrid |");
    REQUIRE(sparse_pos != std::string::npos);
    REQUIRE(hybrid_pos != std::string::npos);
    CHECK(sparse_pos < hybrid_pos);
    CHECK(std::filesystem::exists(paths.comparison("md")));

    auto csv_table = cmd_report(base, "csv");
    CHECK(csv_table.rfind("scope,", 0) == 0);
    CHECK(std::filesystem::exists(paths.comparison("csv")));
}

TEST_CASE("evaluate with the json format writes no extra table file") {
    TempDir tmp("raglab-pipeline");
    auto cfg = fixture_config(tmp, "sparse");
    cmd_index(cfg);
    cmd_retrieve(cfg);
    cmd_generate(cfg);
    cmd_evaluate(cfg, "json");

    ArtifactPaths paths{cfg.workdir};
    CHECK(std::filesystem::exists(paths.report_json("sparse")));
    CHECK_FALSE(std::filesystem::exists(paths.report_table("sparse", "md")));
    CHECK_FALSE(std::filesystem::exists(paths.report_table("sparse", "csv")));

    CHECK_THROWS_AS(cmd_evaluate(cfg, "yaml"), ConfigError);
}

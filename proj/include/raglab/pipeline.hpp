#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "raglab/config.hpp"
#include "raglab/corpus.hpp"
#include "raglab/embedding.hpp"
#include "raglab/generation.hpp"
#include "raglab/ranking.hpp"
#include "raglab/report.hpp"
#include "raglab/sparse_index.hpp"

namespace raglab {

/// Canonical on-disk layout under the configured workdir. Timing artifacts
/// live apart from rankings and generations so the latter stay byte-stable
/// across reruns.
struct ArtifactPaths {
    std::filesystem::path workdir;

    std::filesystem::path manifest() const { return workdir / "manifest.json"; }
    std::filesystem::path chunks() const { return workdir / "chunks.jsonl"; }
    std::filesystem::path sparse_index() const { return workdir / "sparse_index.json"; }
    std::filesystem::path doc2query_index() const {
        return workdir / "sparse_index_doc2query.json";
    }
    std::filesystem::path dense_index() const { return workdir / "dense_index.json"; }
    std::filesystem::path rankings(const std::string& preset) const {
        return workdir / "rankings" / (preset + ".jsonl");
    }
    std::filesystem::path retrieval_timings(const std::string& preset) const {
        return workdir / "timings" / (preset + ".retrieval.jsonl");
    }
    std::filesystem::path generations(const std::string& preset) const {
        return workdir / "generations" / (preset + ".jsonl");
    }
    std::filesystem::path generation_timings(const std::string& preset) const {
        return workdir / "timings" / (preset + ".generation.jsonl");
    }
    std::filesystem::path report_json(const std::string& preset) const {
        return workdir / "eval" / (preset + ".report.json");
    }
    std::filesystem::path report_table(const std::string& preset,
                                       const std::string& format) const {
        return workdir / "eval" / (preset + ".report." + format);
    }
    std::filesystem::path comparison(const std::string& format) const {
        return workdir / "eval" / ("comparison." + format);
    }
};

/// Everything needed to rerun a workdir: config snapshot, input/artifact
/// hashes, per-stage timestamps and wall-clock totals.
struct RunManifest {
    json config;
    std::map<std::string, std::string> artifact_hashes;
    std::map<std::string, std::size_t> counts;
    std::map<std::string, std::string> timestamps;
    std::map<std::string, double> stage_seconds;
    bool deterministic = true;

    json to_json() const;
    static RunManifest from_json(const json& j);
    static RunManifest load_or_empty(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

std::string file_hash_hex(const std::filesystem::path& path);

// Binding factories; "http" bindings pull endpoints from the environment.
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& cfg);
std::unique_ptr<QuestionGenerator> make_question_generator(const PipelineConfig& cfg);
std::unique_ptr<GenerationClient> make_generation_client(const PipelineConfig& cfg,
                                                         const std::vector<QaRecord>& records);
std::unique_ptr<PassageScorer> make_passage_scorer(const PipelineConfig& cfg,
                                                   const ChunkStore& store,
                                                   const QaRecord& record);

// Artifact IO; every writer has a loader and the pair round-trips.
void save_chunks(const std::filesystem::path& path, const std::vector<DocumentChunk>& chunks);
std::vector<DocumentChunk> load_chunks(const std::filesystem::path& path);

void save_rankings(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, RankedList>>& rankings);
std::map<std::string, RankedList> load_rankings(const std::filesystem::path& path);

void save_generations(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, GenerationRow>>& rows);
std::map<std::string, GenerationRow> load_generations(const std::filesystem::path& path);

void save_timings(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, double>>& timings);
std::map<std::string, double> load_timings(const std::filesystem::path& path);

/// Chunk the corpus and persist the chunk store, BM25 index, doc2query BM25
/// index and dense index, recording hashes in the manifest.
void cmd_index(const PipelineConfig& cfg);

/// Produce one ranking per question for the active preset, plus per-question
/// retrieval timings.
void cmd_retrieve(const PipelineConfig& cfg);

/// Generate one answer per question from the preset's rankings. Failures are
/// recorded per question unless fail_fast is set.
void cmd_generate(const PipelineConfig& cfg);

/// Score the preset's run and write the JSON report plus a table file in the
/// requested format ("md" or "csv"; "json" skips the table).
EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::string& format = "md");

/// Combine every <preset>.report.json under the workdir into one comparison
/// table; returns the rendered table.
std::string cmd_report(const PipelineConfig& cfg, const std::string& format = "md");

} // namespace raglab

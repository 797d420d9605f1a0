#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "raglab/dataset.hpp"
#include "raglab/generation.hpp"
#include "raglab/jsonl.hpp"
#include "raglab/ranking.hpp"
#include "raglab/sparse_index.hpp"

namespace raglab {

/// The five system configurations: plain BM25, plain dense, score fusion,
/// fusion plus pointwise re-ranking, and BM25 over doc2query-expanded chunks.
enum class PipelineMode { sparse, dense, hybrid, hybrid_rerank, doc2query };

std::string to_string(PipelineMode m);
PipelineMode pipeline_mode_from_string(const std::string& s);

/// Names accepted by --preset, in declaration order.
const std::vector<std::string>& builtin_presets();

struct SparseConfig {
    Bm25Params bm25;
    std::size_t doc2query_questions = 3;
    std::string question_generator = "mock"; // mock | http
};

struct DenseConfig {
    std::string provider = "hashing"; // hashing | http
    std::size_t dimension = 256;
    std::string query_prefix;
    std::string passage_prefix;
};

struct RerankBinding {
    std::string scorer = "token-overlap"; // token-overlap | constant | oracle | http
    std::size_t top_n = 10;
};

struct GenerationBinding {
    GenerationConfig params;
    std::string client = "echo"; // echo | fixed | gold | http
    std::string fixed_answer = "I don't have enough information to answer this question.";
    std::vector<std::string> refusal_phrases;
    std::filesystem::path prompt_template; // optional file override
};

struct EvaluationConfig {
    std::vector<std::string> strat_dimensions;
    bool full_combination = false;
};

struct PipelineConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path qa_path;
    std::filesystem::path workdir = "work";
    CategoryTaxonomy taxonomy;
    std::size_t max_tokens = 512;
    SparseConfig sparse;
    DenseConfig dense;
    FusionConfig fusion;
    RerankBinding rerank;
    GenerationBinding generation;
    EvaluationConfig evaluation;
    std::size_t parallelism = 1;
    std::uint64_t seed = 42;
    bool fail_fast = false;
    std::string preset = "hybrid";
    PipelineMode mode = PipelineMode::hybrid;

    /// Preset name; doubles as the config identity in reports.
    const std::string& identity() const { return preset; }
    /// True when every binding is an offline mock.
    bool deterministic_bindings() const;

    json to_json() const;
};

/// Parse a JSON config file. A non-empty preset first applies the built-in
/// mode of that name, then deep-merges the file's optional
/// presets.<name> overlay. Relative paths resolve against the config file's
/// directory.
PipelineConfig load_config(const std::filesystem::path& path, const std::string& preset = "");

} // namespace raglab

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "raglab/dataset.hpp"
#include "raglab/embedding.hpp"
#include "raglab/jsonl.hpp"
#include "raglab/ranking.hpp"

namespace raglab {

struct RetrievalMetrics {
    double map = 0.0;
    double mrr = 0.0;
    double ndcg_at_10 = 0.0;
    double recall_at_1 = 0.0;
    double recall_at_10 = 0.0;
    double prec_at_1 = 0.0;
    double prec_at_10 = 0.0;
    double mean_time_seconds = 0.0;
};

/// ROUGE headline values are recall; F1 is carried alongside and tables say
/// which column shows what.
struct GenerationMetrics {
    double rouge1_recall = 0.0;
    double rouge1_f1 = 0.0;
    double rougeL_recall = 0.0;
    double rougeL_f1 = 0.0;
    double bleu = 0.0;
    double cosine_sim = 0.0;
    double refusal_rate = 0.0;
};

/// One ranked list plus the wall-clock cost of producing it.
struct RetrievalRow {
    RankedList list;
    double seconds = 0.0;
};

/// One generated answer; a non-empty `error` marks a failed generation,
/// which is excluded from generation means.
struct GenerationRow {
    std::string answer;
    bool is_refusal = false;
    double seconds = 0.0;
    std::vector<std::string> prompt_chunk_ids;
    std::string error;
};

struct QuestionEval {
    std::string question_id;
    std::map<std::string, std::string> labels;
    double ap = 0.0;
    double rr = 0.0;
    double ndcg_at_10 = 0.0;
    double recall_at_1 = 0.0;
    double recall_at_10 = 0.0;
    double prec_at_1 = 0.0;
    double prec_at_10 = 0.0;
    double retrieval_seconds = 0.0;
    bool has_generation = false;
    std::string answer;
    bool is_refusal = false;
    double rouge1_recall = 0.0;
    double rouge1_f1 = 0.0;
    double rougeL_recall = 0.0;
    double rougeL_f1 = 0.0;
    double bleu = 0.0;
    double cosine_sim = 0.0;
    double generation_seconds = 0.0;
    std::string error;
};

struct StratumReport {
    std::string dimension; // empty for full-combination strata
    std::map<std::string, std::string> selector;
    std::size_t size = 0;
    std::size_t generated = 0; // rows with a usable generation
    RetrievalMetrics retrieval;
    GenerationMetrics generation;
};

struct EvalReport {
    std::string config_identity;
    std::size_t n_questions = 0;
    std::size_t n_generated = 0;
    RetrievalMetrics retrieval;
    GenerationMetrics generation;
    std::vector<StratumReport> strata;
    std::vector<QuestionEval> per_question;
    double mean_generation_seconds = 0.0;
    double mean_total_seconds = 0.0;

    json to_json() const;
    static EvalReport from_json(const json& j);

    /// Tables with one row per scope; wall-clock columns labeled as such.
    std::string to_markdown() const;
    std::string to_csv() const;
};

struct EvalOptions {
    std::string config_identity;
    std::vector<std::string> strat_dimensions;
    bool full_combination = false;
};

/// Scores every question against its gold labels, aggregates overall means
/// and per-stratum means. Retrievals and generations must cover every record
/// (a failed generation still covers, flagged by its error field); missing
/// ids raise CompletenessError.
EvalReport evaluate_run(const std::vector<QaRecord>& records,
                        const std::map<std::string, RetrievalRow>& retrievals,
                        const std::map<std::string, GenerationRow>& generations,
                        const std::function<std::string(const std::string&)>& chunk_parent,
                        const EmbeddingProvider& sim_provider,
                        const CategoryTaxonomy& taxonomy, const EvalOptions& options);

/// One comparison table across several reports, one row per config identity.
std::string markdown_comparison(const std::vector<EvalReport>& reports);
std::string csv_comparison(const std::vector<EvalReport>& reports);

} // namespace raglab

#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace raglab {

enum class Provenance { sparse, dense, fused, reranked };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct RankedEntry {
    std::string chunk_id;
    double score = 0.0;
    Provenance provenance = Provenance::sparse;
};

/// Ordered candidate list from one retrieval stage. Scores are non-increasing
/// and chunk_ids unique.
using RankedList = std::vector<RankedEntry>;

struct FusionConfig {
    std::size_t k_each = 30;
    std::size_t top_n = 10;
    double w_sparse = 1.0;
    double w_dense = 1.0;
};

/// (s - min)/(max - min) elementwise. Empty stays empty; a degenerate range
/// (max == min) maps every element to 1.0, since each is the best of its list.
std::vector<double> min_max_normalize(const std::vector<double>& scores);

/// Weighted CombSUM over independently min-max normalized lists. Ties break
/// by appears-in-both first, then higher normalized sparse score, then
/// ascending chunk_id. Result truncated to cfg.top_n, provenance "fused".
RankedList fuse(const RankedList& sparse, const RankedList& dense, const FusionConfig& cfg);

/// Pointwise relevance scorer: (query, passage) -> real. Each passage is
/// scored independently of all other candidates.
class PassageScorer {
public:
    virtual ~PassageScorer() = default;
    virtual double score(const std::string& query, const std::string& passage) const = 0;
};

/// Exactly "Query: " + query + " Passage: " + passage.
std::string build_rerank_prompt(const std::string& query, const std::string& passage);

struct RerankCall {
    std::string chunk_id;
    double score = 0.0;
    double seconds = 0.0;
};

struct RerankOutcome {
    RankedList list;
    std::vector<RerankCall> calls; // one per candidate, in candidate order
};

/// Score every candidate once via the scorer, sort descending with ties kept
/// in prior order, truncate to top_n. Scoring calls may run concurrently up
/// to `parallelism`; assembly is deterministic. Scorer failures surface as
/// ServiceError naming the chunk.
RerankOutcome rerank(const RankedList& candidates, const std::string& query,
                     const PassageScorer& scorer,
                     const std::function<std::string(const std::string&)>& chunk_text,
                     std::size_t top_n, std::size_t parallelism = 1);

} // namespace raglab

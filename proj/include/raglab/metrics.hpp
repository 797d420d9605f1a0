#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "raglab/embedding.hpp"
#include "raglab/generation.hpp"
#include "raglab/ranking.hpp"
#include "raglab/tokenizer.hpp"

namespace raglab {

/// Collapse a chunk ranking to document granularity: each document appears at
/// the position of its best-ranked chunk.
std::vector<std::string> to_doc_ranking(
    const RankedList& list, const std::function<std::string(const std::string&)>& chunk_parent);

/// Mean over relevant docs of precision at their rank; unretrieved relevant
/// docs contribute zero. Binary relevance throughout this module.
double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& relevant);

/// 1/rank of the first relevant doc, 0 when none retrieved.
double reciprocal_rank(const std::vector<std::string>& ranking,
                       const std::set<std::string>& relevant);

/// Binary-gain nDCG: DCG = sum of 1/log2(i+1) over relevant positions i <= k,
/// ideal DCG over min(|relevant|, k) leading positions.
double ndcg_at_k(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                 std::size_t k = 10);

double recall_at_k(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                   std::size_t k);

/// Fixed denominator k even when fewer docs were retrieved.
double precision_at_k(const std::vector<std::string>& ranking,
                      const std::set<std::string>& relevant, std::size_t k);

struct RougeScore {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

/// Clipped n-gram multiset overlap over tokenizer output. Division by an
/// empty n-gram bag is defined as zero.
RougeScore rouge_n(const std::string& candidate, const std::string& reference, std::size_t n = 1,
                   const Tokenizer& tokenizer = default_tokenizer());

/// Token-level longest common subsequence: recall = LCS/|reference tokens|,
/// precision = LCS/|candidate tokens|.
RougeScore rouge_l(const std::string& candidate, const std::string& reference,
                   const Tokenizer& tokenizer = default_tokenizer());

/// exp(1 - ref_len/cand_len) when cand_len < ref_len, else 1.
double bleu_brevity_penalty(std::size_t cand_len, std::size_t ref_len);

/// Sentence-level BLEU: geometric mean of clipped 1..4-gram precisions, with
/// zero overlap counts replaced by 1e-9 and orders the candidate is too short
/// to form treated as precision 1, scaled by the brevity penalty. Empty
/// candidate or reference scores 0.
double bleu(const std::string& candidate, const std::string& reference,
            const Tokenizer& tokenizer = default_tokenizer());

/// Cosine similarity of the two texts' embeddings; 0 when either text embeds
/// to a zero vector (so empty answers score 0 instead of failing).
double semantic_similarity(const std::string& candidate, const std::string& reference,
                           const EmbeddingProvider& provider);

/// Fraction of results flagged as refusals. Empty input is a domain error.
double refusal_rate(const std::vector<GenerationResult>& results);

} // namespace raglab

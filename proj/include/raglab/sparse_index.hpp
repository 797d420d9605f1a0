#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "raglab/corpus.hpp"
#include "raglab/jsonl.hpp"
#include "raglab/ranking.hpp"
#include "raglab/tokenizer.hpp"

namespace raglab {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::string chunk_id;
    std::size_t term_frequency = 0;
};

/// Immutable BM25 inverted index over chunks.
class SparseIndex {
public:
    SparseIndex() = default;
    SparseIndex(std::map<std::string, std::vector<Posting>> postings,
                std::map<std::string, std::size_t> doc_lengths, Bm25Params params);

    const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
    const std::map<std::string, std::size_t>& doc_lengths() const { return doc_lengths_; }
    double avg_doc_length() const { return avg_doc_length_; }
    std::size_t doc_count() const { return doc_lengths_.size(); }
    const Bm25Params& params() const { return params_; }

    /// ln(1 + (N - df + 0.5)/(df + 0.5)); df = 0 for unseen terms.
    double idf(const std::string& term) const;

    json to_json() const;
    static SparseIndex from_json(const json& j);

private:
    std::map<std::string, std::vector<Posting>> postings_;
    std::map<std::string, std::size_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
};

/// Build from tokenized chunk texts. Empty input and duplicate chunk_ids are
/// build errors.
SparseIndex build_sparse_index(const std::vector<DocumentChunk>& chunks,
                               const Bm25Params& params = {},
                               const Tokenizer& tokenizer = default_tokenizer());

/// Lucene-style BM25: sum over query terms of
/// idf(t) * tf / (tf + k1 * (1 - b + b * len/avglen)).
/// Repeated query terms contribute once per occurrence.
double bm25_score(const SparseIndex& index, const std::vector<std::string>& query_terms,
                  const std::string& chunk_id);

/// Top-k chunks by bm25_score, descending, ties by ascending chunk_id.
/// Chunks scoring zero are never returned.
RankedList search_sparse(const SparseIndex& index, const std::string& query,
                         std::size_t k = 30,
                         const Tokenizer& tokenizer = default_tokenizer());

/// Produces candidate questions for a chunk of text.
class QuestionGenerator {
public:
    virtual ~QuestionGenerator() = default;
    virtual std::vector<std::string> generate(const std::string& chunk_text,
                                              std::size_t n_questions) const = 0;
};

/// Offline seeded generator emitting template questions about tokens drawn
/// deterministically from the chunk text.
class MockQuestionGenerator : public QuestionGenerator {
public:
    explicit MockQuestionGenerator(std::uint64_t seed = 0) : seed_(seed) {}

    std::vector<std::string> generate(const std::string& chunk_text,
                                      std::size_t n_questions) const override;

private:
    std::uint64_t seed_ = 0;
};

/// Returns a copy of the chunk whose text is the original text followed by a
/// newline-joined block of generated questions; token_count recomputed.
DocumentChunk augment_doc2query(const DocumentChunk& chunk, const QuestionGenerator& gen,
                                std::size_t n_questions,
                                const Tokenizer& tokenizer = default_tokenizer());

} // namespace raglab

#pragma once

#include <map>
#include <string>
#include <vector>

#include "raglab/corpus.hpp"
#include "raglab/embedding.hpp"
#include "raglab/jsonl.hpp"
#include "raglab/ranking.hpp"

namespace raglab {

/// dot(u,v)/(|u|*|v|). Throws DomainError on dimension mismatch or a zero
/// vector.
double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

/// In-memory store of unit-normalized chunk vectors; exact search only.
class DenseIndex {
public:
    DenseIndex() = default;
    DenseIndex(std::map<std::string, std::vector<double>> vectors, std::size_t dimension);

    const std::map<std::string, std::vector<double>>& vectors() const { return vectors_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    json to_json() const;
    static DenseIndex from_json(const json& j);

private:
    std::map<std::string, std::vector<double>> vectors_;
    std::size_t dimension_ = 0;
};

/// Embeds every chunk once (optionally prefixed), L2-normalizes and stores.
/// Provider calls may run concurrently up to `parallelism`; assembly is by
/// chunk order. A zero embedding is a domain error naming the chunk.
DenseIndex build_dense_index(const std::vector<DocumentChunk>& chunks,
                             const EmbeddingProvider& provider,
                             const std::string& passage_prefix = "",
                             std::size_t parallelism = 1);

/// Exact top-k by cosine against the normalized query embedding, descending,
/// ties by ascending chunk_id, provenance "dense".
RankedList search_dense(const DenseIndex& index, const std::string& query,
                        const EmbeddingProvider& provider, std::size_t k = 30,
                        const std::string& query_prefix = "");

} // namespace raglab

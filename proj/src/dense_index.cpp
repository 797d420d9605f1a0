#include "raglab/dense_index.hpp"

#include <algorithm>
#include <cmath>

#include "raglab/errors.hpp"
#include "raglab/parallel.hpp"

namespace raglab {

namespace {

double l2_norm(const std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) {
        sq += x * x;
    }
    return std::sqrt(sq);
}

double dot(const std::vector<double>& u, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i] * v[i];
    }
    return acc;
}

} // namespace

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        throw DomainError("cosine_similarity dimension mismatch: " +
                          std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    }
    double nu = l2_norm(u);
    double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw DomainError("cosine_similarity is undefined for a zero vector");
    }
    return dot(u, v) / (nu * nv);
}

DenseIndex::DenseIndex(std::map<std::string, std::vector<double>> vectors,
                       std::size_t dimension)
    : vectors_(std::move(vectors)), dimension_(dimension) {
    for (const auto& [chunk_id, vec] : vectors_) {
        if (vec.size() != dimension_) {
            throw IntegrityError("vector for chunk \"" + chunk_id +
                                 "\" has dimension " + std::to_string(vec.size()) +
                                 ", expected " + std::to_string(dimension_));
        }
        if (std::abs(l2_norm(vec) - 1.0) > 1e-6) {
            throw IntegrityError("vector for chunk \"" + chunk_id + "\" is not unit-normalized");
        }
    }
}

json DenseIndex::to_json() const {
    json vecs = json::object();
    for (const auto& [chunk_id, vec] : vectors_) {
        vecs[chunk_id] = vec;
    }
    return json{{"type", "dense_index"}, {"dimension", dimension_}, {"vectors", std::move(vecs)}};
}

DenseIndex DenseIndex::from_json(const json& j) {
    if (j.value("type", "") != "dense_index") {
        throw ParseError("not a dense index snapshot");
    }
    std::map<std::string, std::vector<double>> vecs;
    for (const auto& [chunk_id, arr] : j.at("vectors").items()) {
        vecs[chunk_id] = arr.get<std::vector<double>>();
    }
    return DenseIndex(std::move(vecs), j.at("dimension").get<std::size_t>());
}

DenseIndex build_dense_index(const std::vector<DocumentChunk>& chunks,
                             const EmbeddingProvider& provider,
                             const std::string& passage_prefix, std::size_t parallelism) {
    if (chunks.empty()) {
        throw ValidationError("cannot build a dense index from an empty chunk list");
    }
    std::vector<std::vector<double>> embedded(chunks.size());
    parallel_for(chunks.size(), parallelism, [&](std::size_t i) {
        std::vector<double> vec;
        try {
            vec = provider.embed(passage_prefix + chunks[i].text);
        } catch (const std::exception& e) {
            throw ServiceError("embedding failed for chunk \"" + chunks[i].chunk_id +
                               "\": " + e.what());
        }
        if (vec.size() != provider.dimension()) {
            throw ServiceError("embedding for chunk \"" + chunks[i].chunk_id +
                               "\" has dimension " + std::to_string(vec.size()) +
                               ", expected " + std::to_string(provider.dimension()));
        }
        double norm = l2_norm(vec);
        if (norm == 0.0) {
            throw DomainError("chunk \"" + chunks[i].chunk_id + "\" embedded to a zero vector");
        }
        for (double& x : vec) {
            x /= norm;
        }
        embedded[i] = std::move(vec);
    });
    std::map<std::string, std::vector<double>> vectors;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (!vectors.emplace(chunks[i].chunk_id, std::move(embedded[i])).second) {
            throw IntegrityError("duplicate chunk_id \"" + chunks[i].chunk_id + "\"");
        }
    }
    return DenseIndex(std::move(vectors), provider.dimension());
}

RankedList search_dense(const DenseIndex& index, const std::string& query,
                        const EmbeddingProvider& provider, std::size_t k,
                        const std::string& query_prefix) {
    if (provider.dimension() != index.dimension()) {
        throw DomainError("provider dimension " + std::to_string(provider.dimension()) +
                          " does not match index dimension " +
                          std::to_string(index.dimension()));
    }
    std::vector<double> q = provider.embed(query_prefix + query);
    double norm = l2_norm(q);
    if (norm == 0.0) {
        throw DomainError("query embedded to a zero vector");
    }
    for (double& x : q) {
        x /= norm;
    }
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(index.size());
    for (const auto& [chunk_id, vec] : index.vectors()) {
        scored.emplace_back(chunk_id, dot(q, vec));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    RankedList out;
    std::size_t n = std::min(k, scored.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(RankedEntry{scored[i].first, scored[i].second, Provenance::dense});
    }
    return out;
}

} // namespace raglab

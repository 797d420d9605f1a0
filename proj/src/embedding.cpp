#include "raglab/embedding.hpp"

#include <cmath>

#include "raglab/errors.hpp"
#include "raglab/jsonl.hpp"
#include "raglab/tokenizer.hpp"

namespace raglab {

HashingEmbedder::HashingEmbedder(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ == 0) {
        throw DomainError("embedding dimension must be positive");
    }
}

std::string HashingEmbedder::identity() const {
    return "hashing-embedder(dim=" + std::to_string(dim_) +
           ",seed=" + std::to_string(seed_) + ")";
}

std::size_t HashingEmbedder::bucket_of(const std::string& token) const {
    return static_cast<std::size_t>(fnv1a64(token, seed_) % dim_);
}

std::vector<double> HashingEmbedder::embed(const std::string& text) const {
    std::vector<double> vec(dim_, 0.0);
    for (const auto& token : tokenize(text)) {
        vec[bucket_of(token)] += 1.0;
    }
    double norm_sq = 0.0;
    for (double x : vec) {
        norm_sq += x * x;
    }
    if (norm_sq > 0.0) {
        double norm = std::sqrt(norm_sq);
        for (double& x : vec) {
            x /= norm;
        }
    }
    return vec;
}

} // namespace raglab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace raglab {

/// Text-to-vector contract. Implementations must be deterministic: the same
/// text always maps to the same vector of the provider's fixed dimension.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::string identity() const = 0;
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

/// Seeded feature-hashing embedder: each token is hashed into one of `dim`
/// buckets, bucket counts form the vector, which is then L2-normalized.
/// A text with no tokens embeds to the zero vector.
class HashingEmbedder : public EmbeddingProvider {
public:
    explicit HashingEmbedder(std::size_t dim = 256, std::uint64_t seed = 0);

    std::size_t dimension() const override { return dim_; }
    std::string identity() const override;
    std::vector<double> embed(const std::string& text) const override;

    std::size_t bucket_of(const std::string& token) const;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

} // namespace raglab

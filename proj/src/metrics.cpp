#include "raglab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "raglab/dense_index.hpp"
#include "raglab/errors.hpp"

namespace raglab {

namespace {

void require_relevant(const std::set<std::string>& relevant) {
    if (relevant.empty()) {
        throw DomainError("relevant doc set must be non-empty");
    }
}

std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    if (tokens.size() < n) {
        return counts;
    }
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::vector<std::string> gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
        ++counts[std::move(gram)];
    }
    return counts;
}

std::size_t clipped_overlap(const std::map<std::vector<std::string>, std::size_t>& cand,
                            const std::map<std::vector<std::string>, std::size_t>& ref) {
    std::size_t overlap = 0;
    for (const auto& [gram, count] : cand) {
        auto it = ref.find(gram);
        if (it != ref.end()) {
            overlap += std::min(count, it->second);
        }
    }
    return overlap;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) {
        return 0;
    }
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double f1_of(double precision, double recall) {
    if (precision + recall == 0.0) {
        return 0.0;
    }
    return 2.0 * precision * recall / (precision + recall);
}

} // namespace

std::vector<std::string> to_doc_ranking(
    const RankedList& list, const std::function<std::string(const std::string&)>& chunk_parent) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& entry : list) {
        std::string doc_id = chunk_parent(entry.chunk_id);
        if (seen.insert(doc_id).second) {
            out.push_back(std::move(doc_id));
        }
    }
    return out;
}

double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& relevant) {
    require_relevant(relevant);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (relevant.count(ranking[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double reciprocal_rank(const std::vector<std::string>& ranking,
                       const std::set<std::string>& relevant) {
    require_relevant(relevant);
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (relevant.count(ranking[i])) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

double ndcg_at_k(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                 std::size_t k) {
    require_relevant(relevant);
    double dcg = 0.0;
    std::size_t depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.count(ranking[i])) {
            dcg += 1.0 / std::log2(static_cast<double>(i + 2));
        }
    }
    double idcg = 0.0;
    std::size_t ideal = std::min(k, relevant.size());
    for (std::size_t i = 0; i < ideal; ++i) {
        idcg += 1.0 / std::log2(static_cast<double>(i + 2));
    }
    return dcg / idcg;
}

double recall_at_k(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                   std::size_t k) {
    require_relevant(relevant);
    std::size_t hits = 0;
    std::size_t depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.count(ranking[i])) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double precision_at_k(const std::vector<std::string>& ranking,
                      const std::set<std::string>& relevant, std::size_t k) {
    require_relevant(relevant);
    if (k == 0) {
        throw DomainError("k must be at least 1");
    }
    std::size_t hits = 0;
    std::size_t depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i) {
        if (relevant.count(ranking[i])) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

RougeScore rouge_n(const std::string& candidate, const std::string& reference, std::size_t n,
                   const Tokenizer& tokenizer) {
    if (n == 0) {
        throw DomainError("n must be at least 1");
    }
    auto cand = ngram_counts(tokenizer.tokenize(candidate), n);
    auto ref = ngram_counts(tokenizer.tokenize(reference), n);
    std::size_t cand_total = 0;
    for (const auto& [gram, count] : cand) {
        cand_total += count;
    }
    std::size_t ref_total = 0;
    for (const auto& [gram, count] : ref) {
        ref_total += count;
    }
    std::size_t overlap = clipped_overlap(cand, ref);
    RougeScore score;
    score.recall = ref_total ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
    score.precision =
        cand_total ? static_cast<double>(overlap) / static_cast<double>(cand_total) : 0.0;
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

RougeScore rouge_l(const std::string& candidate, const std::string& reference,
                   const Tokenizer& tokenizer) {
    std::vector<std::string> cand = tokenizer.tokenize(candidate);
    std::vector<std::string> ref = tokenizer.tokenize(reference);
    std::size_t lcs = lcs_length(cand, ref);
    RougeScore score;
    score.recall = ref.empty() ? 0.0 : static_cast<double>(lcs) / static_cast<double>(ref.size());
    score.precision =
        cand.empty() ? 0.0 : static_cast<double>(lcs) / static_cast<double>(cand.size());
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

double bleu_brevity_penalty(std::size_t cand_len, std::size_t ref_len) {
    if (cand_len == 0) {
        return 0.0;
    }
    if (cand_len >= ref_len) {
        return 1.0;
    }
    return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
}

double bleu(const std::string& candidate, const std::string& reference,
            const Tokenizer& tokenizer) {
    std::vector<std::string> cand = tokenizer.tokenize(candidate);
    std::vector<std::string> ref = tokenizer.tokenize(reference);
    if (cand.empty() || ref.empty()) {
        return 0.0;
    }
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        if (cand.size() < n) {
            // No n-grams of this order to judge; neutral in the geometric mean.
            continue;
        }
        auto cand_grams = ngram_counts(cand, n);
        auto ref_grams = ngram_counts(ref, n);
        double total = static_cast<double>(cand.size() - n + 1);
        double overlap = static_cast<double>(clipped_overlap(cand_grams, ref_grams));
        if (overlap == 0.0) {
            overlap = 1e-9;
        }
        log_sum += std::log(overlap / total);
    }
    return bleu_brevity_penalty(cand.size(), ref.size()) * std::exp(log_sum / 4.0);
}

double semantic_similarity(const std::string& candidate, const std::string& reference,
                           const EmbeddingProvider& provider) {
    std::vector<double> u;
    std::vector<double> v;
    try {
        u = provider.embed(candidate);
        v = provider.embed(reference);
    } catch (const ServiceError&) {
        throw;
    } catch (const std::exception& e) {
        throw ServiceError(std::string("similarity embedding failed: ") + e.what());
    }
    auto norm_sq = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) {
            s += xi * xi;
        }
        return s;
    };
    if (norm_sq(u) == 0.0 || norm_sq(v) == 0.0) {
        return 0.0;
    }
    return cosine_similarity(u, v);
}

double refusal_rate(const std::vector<GenerationResult>& results) {
    if (results.empty()) {
        throw DomainError("refusal_rate needs at least one result");
    }
    std::size_t refusals = 0;
    for (const auto& r : results) {
        if (r.is_refusal) {
            ++refusals;
        }
    }
    return static_cast<double>(refusals) / static_cast<double>(results.size());
}

} // namespace raglab

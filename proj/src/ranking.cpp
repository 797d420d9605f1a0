#include "raglab/ranking.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "raglab/errors.hpp"
#include "raglab/parallel.hpp"

namespace raglab {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::sparse: return "sparse";
        case Provenance::dense: return "dense";
        case Provenance::fused: return "fused";
        case Provenance::reranked: return "reranked";
    }
    throw DomainError("invalid provenance value");
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "sparse") return Provenance::sparse;
    if (s == "dense") return Provenance::dense;
    if (s == "fused") return Provenance::fused;
    if (s == "reranked") return Provenance::reranked;
    throw DomainError("unknown provenance \"" + s + "\"");
}

std::vector<double> min_max_normalize(const std::vector<double>& scores) {
    if (scores.empty()) {
        return {};
    }
    double lo = scores[0];
    double hi = scores[0];
    for (double s : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    std::vector<double> out(scores.size());
    if (hi == lo) {
        std::fill(out.begin(), out.end(), 1.0);
        return out;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = (scores[i] - lo) / (hi - lo);
    }
    return out;
}

RankedList fuse(const RankedList& sparse, const RankedList& dense, const FusionConfig& cfg) {
    struct Candidate {
        std::string chunk_id;
        double norm_sparse = 0.0;
        double norm_dense = 0.0;
        bool in_sparse = false;
        bool in_dense = false;
    };

    std::vector<Candidate> candidates;
    std::unordered_map<std::string, std::size_t> index;
    auto slot = [&](const std::string& chunk_id) -> Candidate& {
        auto it = index.find(chunk_id);
        if (it == index.end()) {
            it = index.emplace(chunk_id, candidates.size()).first;
            candidates.push_back(Candidate{chunk_id, 0.0, 0.0, false, false});
        }
        return candidates[it->second];
    };

    std::vector<double> raw;
    raw.reserve(sparse.size());
    for (const auto& e : sparse) {
        raw.push_back(e.score);
    }
    std::vector<double> norm = min_max_normalize(raw);
    for (std::size_t i = 0; i < sparse.size(); ++i) {
        Candidate& c = slot(sparse[i].chunk_id);
        c.norm_sparse = norm[i];
        c.in_sparse = true;
    }

    raw.clear();
    for (const auto& e : dense) {
        raw.push_back(e.score);
    }
    norm = min_max_normalize(raw);
    for (std::size_t i = 0; i < dense.size(); ++i) {
        Candidate& c = slot(dense[i].chunk_id);
        c.norm_dense = norm[i];
        c.in_dense = true;
    }

    auto fused_score = [&](const Candidate& c) {
        return cfg.w_sparse * c.norm_sparse + cfg.w_dense * c.norm_dense;
    };
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                  double fa = fused_score(a);
                  double fb = fused_score(b);
                  if (fa != fb) {
                      return fa > fb;
                  }
                  bool both_a = a.in_sparse && a.in_dense;
                  bool both_b = b.in_sparse && b.in_dense;
                  if (both_a != both_b) {
                      return both_a;
                  }
                  if (a.norm_sparse != b.norm_sparse) {
                      return a.norm_sparse > b.norm_sparse;
                  }
                  return a.chunk_id < b.chunk_id;
              });

    RankedList out;
    std::size_t n = std::min(cfg.top_n, candidates.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(RankedEntry{candidates[i].chunk_id, fused_score(candidates[i]),
                                  Provenance::fused});
    }
    return out;
}

std::string build_rerank_prompt(const std::string& query, const std::string& passage) {
    return "Query: " + query + " Passage: " + passage;
}

RerankOutcome rerank(const RankedList& candidates, const std::string& query,
                     const PassageScorer& scorer,
                     const std::function<std::string(const std::string&)>& chunk_text,
                     std::size_t top_n, std::size_t parallelism) {
    RerankOutcome outcome;
    if (candidates.empty()) {
        return outcome;
    }

    std::vector<std::string> passages(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        passages[i] = chunk_text(candidates[i].chunk_id);
    }

    outcome.calls.resize(candidates.size());
    parallel_for(candidates.size(), parallelism, [&](std::size_t i) {
        auto started = std::chrono::steady_clock::now();
        double s = 0.0;
        try {
            s = scorer.score(query, passages[i]);
        } catch (const std::exception& e) {
            throw ServiceError("rerank scorer failed for chunk \"" +
                               candidates[i].chunk_id + "\": " + e.what());
        }
        auto finished = std::chrono::steady_clock::now();
        outcome.calls[i].chunk_id = candidates[i].chunk_id;
        outcome.calls[i].score = s;
        outcome.calls[i].seconds = std::chrono::duration<double>(finished - started).count();
    });

    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcome.calls[a].score > outcome.calls[b].score;
    });

    std::size_t n = std::min(top_n, order.size());
    outcome.list.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        outcome.list.push_back(RankedEntry{candidates[order[i]].chunk_id,
                                           outcome.calls[order[i]].score,
                                           Provenance::reranked});
    }
    return outcome;
}

} // namespace raglab

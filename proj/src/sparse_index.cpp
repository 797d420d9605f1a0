#include "raglab/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "raglab/errors.hpp"

namespace raglab {

SparseIndex::SparseIndex(std::map<std::string, std::vector<Posting>> postings,
                         std::map<std::string, std::size_t> doc_lengths, Bm25Params params)
    : postings_(std::move(postings)), doc_lengths_(std::move(doc_lengths)), params_(params) {
    if (doc_lengths_.empty()) {
        throw ValidationError("cannot build a sparse index from an empty chunk list");
    }
    double total = 0.0;
    for (const auto& [id, len] : doc_lengths_) {
        total += static_cast<double>(len);
    }
    avg_doc_length_ = total / static_cast<double>(doc_lengths_.size());
}

double SparseIndex::idf(const std::string& term) const {
    double n = static_cast<double>(doc_count());
    double df = 0.0;
    auto it = postings_.find(term);
    if (it != postings_.end()) {
        df = static_cast<double>(it->second.size());
    }
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

json SparseIndex::to_json() const {
    json postings = json::object();
    for (const auto& [term, plist] : postings_) {
        json arr = json::array();
        for (const auto& p : plist) {
            arr.push_back(json::array({p.chunk_id, p.term_frequency}));
        }
        postings[term] = std::move(arr);
    }
    json lengths = json::object();
    for (const auto& [id, len] : doc_lengths_) {
        lengths[id] = len;
    }
    return json{{"type", "sparse_index"},
                {"params", {{"k1", params_.k1}, {"b", params_.b}}},
                {"postings", std::move(postings)},
                {"doc_lengths", std::move(lengths)}};
}

SparseIndex SparseIndex::from_json(const json& j) {
    if (j.value("type", "") != "sparse_index") {
        throw ParseError("not a sparse index snapshot");
    }
    Bm25Params params;
    params.k1 = j.at("params").at("k1").get<double>();
    params.b = j.at("params").at("b").get<double>();
    std::map<std::string, std::vector<Posting>> postings;
    for (const auto& [term, arr] : j.at("postings").items()) {
        std::vector<Posting> plist;
        for (const auto& pair : arr) {
            plist.push_back(Posting{pair.at(0).get<std::string>(),
                                    pair.at(1).get<std::size_t>()});
        }
        postings[term] = std::move(plist);
    }
    std::map<std::string, std::size_t> lengths;
    for (const auto& [id, len] : j.at("doc_lengths").items()) {
        lengths[id] = len.get<std::size_t>();
    }
    return SparseIndex(std::move(postings), std::move(lengths), params);
}

SparseIndex build_sparse_index(const std::vector<DocumentChunk>& chunks,
                               const Bm25Params& params, const Tokenizer& tokenizer) {
    if (chunks.empty()) {
        throw ValidationError("cannot build a sparse index from an empty chunk list");
    }
    std::map<std::string, std::vector<Posting>> postings;
    std::map<std::string, std::size_t> doc_lengths;
    for (const auto& chunk : chunks) {
        std::vector<std::string> tokens = tokenizer.tokenize(chunk.text);
        if (!doc_lengths.emplace(chunk.chunk_id, tokens.size()).second) {
            throw IntegrityError("duplicate chunk_id \"" + chunk.chunk_id + "\"");
        }
        std::map<std::string, std::size_t> tf;
        for (const auto& tok : tokens) {
            ++tf[tok];
        }
        for (const auto& [term, count] : tf) {
            postings[term].push_back(Posting{chunk.chunk_id, count});
        }
    }
    return SparseIndex(std::move(postings), std::move(doc_lengths), params);
}

namespace {

double bm25_term(const SparseIndex& index, double idf, std::size_t tf, std::size_t len) {
    const Bm25Params& p = index.params();
    double tfd = static_cast<double>(tf);
    double norm = p.k1 * (1.0 - p.b + p.b * static_cast<double>(len) / index.avg_doc_length());
    return idf * tfd / (tfd + norm);
}

} // namespace

double bm25_score(const SparseIndex& index, const std::vector<std::string>& query_terms,
                  const std::string& chunk_id) {
    auto len_it = index.doc_lengths().find(chunk_id);
    if (len_it == index.doc_lengths().end()) {
        throw LookupError("unknown chunk_id \"" + chunk_id + "\"");
    }
    double score = 0.0;
    for (const auto& term : query_terms) {
        auto it = index.postings().find(term);
        if (it == index.postings().end()) {
            continue;
        }
        std::size_t tf = 0;
        for (const auto& posting : it->second) {
            if (posting.chunk_id == chunk_id) {
                tf = posting.term_frequency;
                break;
            }
        }
        if (tf == 0) {
            continue;
        }
        score += bm25_term(index, index.idf(term), tf, len_it->second);
    }
    return score;
}

RankedList search_sparse(const SparseIndex& index, const std::string& query, std::size_t k,
                         const Tokenizer& tokenizer) {
    std::unordered_map<std::string, double> accum;
    for (const auto& term : tokenizer.tokenize(query)) {
        auto it = index.postings().find(term);
        if (it == index.postings().end()) {
            continue;
        }
        double idf = index.idf(term);
        for (const auto& posting : it->second) {
            std::size_t len = index.doc_lengths().at(posting.chunk_id);
            accum[posting.chunk_id] += bm25_term(index, idf, posting.term_frequency, len);
        }
    }
    std::vector<std::pair<std::string, double>> scored(accum.begin(), accum.end());
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
        out.push_back(RankedEntry{scored[i].first, scored[i].second, Provenance::sparse});
    }
    return out;
}

std::vector<std::string> MockQuestionGenerator::generate(const std::string& chunk_text,
                                                         std::size_t n_questions) const {
    std::vector<std::string> tokens = tokenize(chunk_text);
    std::vector<std::string> out;
    out.reserve(n_questions);
    for (std::size_t i = 0; i < n_questions; ++i) {
        if (tokens.empty()) {
            out.push_back("What is this passage about?");
            continue;
        }
        std::uint64_t h = fnv1a64(chunk_text, seed_ + i);
        const std::string& focus = tokens[h % tokens.size()];
        out.push_back("What does the passage say about " + focus + "?");
    }
    return out;
}

DocumentChunk augment_doc2query(const DocumentChunk& chunk, const QuestionGenerator& gen,
                                std::size_t n_questions, const Tokenizer& tokenizer) {
    DocumentChunk out = chunk;
    if (n_questions > 0) {
        std::vector<std::string> questions;
        try {
            questions = gen.generate(chunk.text, n_questions);
        } catch (const std::exception& e) {
            throw ServiceError("question generation failed for chunk \"" + chunk.chunk_id +
                               "\": " + e.what());
        }
        if (questions.size() > n_questions) {
            questions.resize(n_questions);
        }
        for (const auto& q : questions) {
            out.text += '\n';
            out.text += q;
        }
    }
    out.token_count = tokenizer.tokenize(out.text).size();
    return out;
}

} // namespace raglab

#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "raglab/errors.hpp"
#include "raglab/generation.hpp"
#include "raglab/ranking.hpp"
#include "raglab/tokenizer.hpp"

namespace raglab {

class ConstantScorer : public PassageScorer {
public:
    explicit ConstantScorer(double value = 0.0) : value_(value) {}
    double score(const std::string&, const std::string&) const override { return value_; }

private:
    double value_;
};

/// Fraction of the query's unique tokens that occur in the passage.
class TokenOverlapScorer : public PassageScorer {
public:
    double score(const std::string& query, const std::string& passage) const override {
        std::unordered_set<std::string> query_tokens;
        for (auto& tok : tokenize(query)) {
            query_tokens.insert(std::move(tok));
        }
        if (query_tokens.empty()) {
            return 0.0;
        }
        std::unordered_set<std::string> passage_tokens;
        for (auto& tok : tokenize(passage)) {
            passage_tokens.insert(std::move(tok));
        }
        std::size_t hits = 0;
        for (const auto& tok : query_tokens) {
            if (passage_tokens.count(tok)) {
                ++hits;
            }
        }
        return static_cast<double>(hits) / static_cast<double>(query_tokens.size());
    }
};

/// Gold-aware test scorer: 1.0 for passages whose parent document is in the
/// gold set, 0.0 otherwise. Passages are recognized by their exact text.
class OraclePassageScorer : public PassageScorer {
public:
    OraclePassageScorer(std::map<std::string, std::string> text_to_doc,
                        std::set<std::string> gold_docs)
        : text_to_doc_(std::move(text_to_doc)), gold_docs_(std::move(gold_docs)) {}

    double score(const std::string&, const std::string& passage) const override {
        auto it = text_to_doc_.find(passage);
        if (it == text_to_doc_.end()) {
            return 0.0;
        }
        return gold_docs_.count(it->second) ? 1.0 : 0.0;
    }

private:
    std::map<std::string, std::string> text_to_doc_;
    std::set<std::string> gold_docs_;
};

/// Pointwise generative scorer: sends "Query: ... Passage: ..." to a
/// generation client and parses the reply as a number.
class GenerativePassageScorer : public PassageScorer {
public:
    explicit GenerativePassageScorer(const GenerationClient& client) : client_(client) {}

    double score(const std::string& query, const std::string& passage) const override {
        std::string reply = client_.generate(build_rerank_prompt(query, passage),
                                             /*temperature=*/0.0, /*top_p=*/1.0,
                                             /*max_tokens=*/8);
        try {
            return std::stod(reply);
        } catch (const std::exception&) {
            throw ServiceError("scorer reply \"" + reply + "\" is not a number");
        }
    }

private:
    const GenerationClient& client_;
};

} // namespace raglab

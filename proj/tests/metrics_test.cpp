#include <doctest.h>

#include <cmath>

#include "raglab/embedding.hpp"
#include "raglab/errors.hpp"
#include "raglab/metrics.hpp"

using namespace raglab;

namespace {

std::string parent_of(const std::string& chunk_id) {
    return chunk_id.substr(0, chunk_id.find('#'));
}

} // namespace

TEST_CASE("to_doc_ranking keeps each document at its best chunk position") {
    RankedList list = {{"d1#2", 5.0, Provenance::fused},
                       {"d2#0", 4.0, Provenance::fused},
                       {"d1#0", 3.0, Provenance::fused},
                       {"d3#1", 2.0, Provenance::fused},
                       {"d2#4", 1.0, Provenance::fused}};
    auto docs = to_doc_ranking(list, parent_of);
    CHECK(docs == std::vector<std::string>{"d1", "d2", "d3"});
}

TEST_CASE("ranking metrics match hand-computed values") {
    std::vector<std::string> ranking = {"d1", "d2", "d3"};
    std::set<std::string> relevant = {"d1", "d3"};

    CHECK(average_precision(ranking, relevant) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(reciprocal_rank(ranking, relevant) == 1.0);

    double dcg = 1.0 + 1.0 / std::log2(4.0);
    double idcg = 1.0 + 1.0 / std::log2(3.0);
    CHECK(ndcg_at_k(ranking, relevant, 10) == doctest::Approx(dcg / idcg).epsilon(1e-12));

    CHECK(recall_at_k(ranking, relevant, 1) == 0.5);
    CHECK(recall_at_k(ranking, relevant, 10) == 1.0);
    CHECK(precision_at_k(ranking, relevant, 1) == 1.0);
    CHECK(precision_at_k(ranking, relevant, 10) == doctest::Approx(0.2));
}

TEST_CASE("unretrieved relevant documents contribute zero") {
    std::vector<std::string> ranking = {"d9"};
    std::set<std::string> relevant = {"d1"};
    CHECK(average_precision(ranking, relevant) == 0.0);
    CHECK(reciprocal_rank(ranking, relevant) == 0.0);
    CHECK(ndcg_at_k(ranking, relevant, 10) == 0.0);
    CHECK(recall_at_k(ranking, relevant, 10) == 0.0);
}

TEST_CASE("precision@k divides by k even for short rankings") {
    std::vector<std::string> ranking = {"d1"};
    std::set<std::string> relevant = {"d1"};
    CHECK(precision_at_k(ranking, relevant, 10) == doctest::Approx(0.1));
}

TEST_CASE("ideal dcg caps at the number of relevant documents") {
    std::vector<std::string> ranking = {"d1", "d2"};
    std::set<std::string> relevant = {"d1", "d2", "d3", "d4"};
    // Perfect prefix of length 2; ideal@2 uses two relevant docs, not four.
    double dcg = 1.0 + 1.0 / std::log2(3.0);
    CHECK(ndcg_at_k(ranking, relevant, 2) == doctest::Approx(dcg / dcg));
}

TEST_CASE("ranking metrics reject degenerate arguments") {
    std::vector<std::string> ranking = {"d1"};
    CHECK_THROWS_AS(average_precision(ranking, {}), DomainError);
    CHECK_THROWS_AS(reciprocal_rank(ranking, {}), DomainError);
    CHECK_THROWS_AS(ndcg_at_k(ranking, {}, 10), DomainError);
    CHECK_THROWS_AS(recall_at_k(ranking, {}, 5), DomainError);
    CHECK_THROWS_AS(precision_at_k(ranking, {"d1"}, 0), DomainError);
}

TEST_CASE("rouge-1 matches the worked example") {
    auto score = rouge_n("the cat", "the cat sat", 1);
    CHECK(score.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(score.precision == doctest::Approx(1.0));
    CHECK(score.f1 == doctest::Approx(2.0 * (2.0 / 3.0) / (1.0 + 2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("rouge-n clips repeated candidate n-grams") {
    auto score = rouge_n("the the the", "the cat", 1);
    CHECK(score.precision == doctest::Approx(1.0 / 3.0));
    CHECK(score.recall == doctest::Approx(0.5));
}

TEST_CASE("rouge-2 counts bigram overlap") {
    auto score = rouge_n("the cat sat down", "the cat sat", 2);
    CHECK(score.recall == doctest::Approx(1.0));
    CHECK(score.precision == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rouge handles empty and too-short inputs") {
    CHECK(rouge_n("", "the cat", 1).recall == 0.0);
    CHECK(rouge_n("the cat", "", 1).recall == 0.0);
    CHECK(rouge_n("a", "a b", 2).recall == 0.0);
    CHECK_THROWS_AS(rouge_n("a", "b", 0), DomainError);
}

TEST_CASE("rouge-l matches the worked lcs example") {
    auto score = rouge_l("a c d b", "a b c d");
    CHECK(score.recall == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(score.precision == doctest::Approx(0.75));
}

TEST_CASE("rouge-l swaps recall and precision when arguments swap") {
    auto ab = rouge_l("one two three", "one three");
    auto ba = rouge_l("one three", "one two three");
    CHECK(ab.recall == doctest::Approx(ba.precision));
    CHECK(ab.precision == doctest::Approx(ba.recall));
    CHECK(ab.f1 == doctest::Approx(ba.f1));
}

TEST_CASE("brevity penalty matches its formula") {
    CHECK(bleu_brevity_penalty(10, 10) == 1.0);
    CHECK(bleu_brevity_penalty(12, 10) == 1.0);
    CHECK(std::abs(bleu_brevity_penalty(5, 10) - std::exp(-1.0)) < 1e-12);
    CHECK(bleu_brevity_penalty(0, 10) == 0.0);
}

TEST_CASE("bleu of identical text is exactly one") {
    CHECK(bleu("the tide peaks at noon today", "the tide peaks at noon today") == 1.0);
    // Shorter than the largest n-gram order; absent orders stay neutral.
    CHECK(bleu("hello world", "hello world") == 1.0);
}

TEST_CASE("bleu is small but positive on disjoint text") {
    double score = bleu("alpha beta gamma delta", "epsilon zeta eta theta");
    CHECK(score > 0.0);
    CHECK(score < 1e-6);
}

TEST_CASE("bleu applies the brevity penalty to short candidates") {
    double full = bleu("a b c d e f g h i j", "a b c d e f g h i j");
    double clipped = bleu("a b c d e", "a b c d e f g h i j");
    CHECK(full == 1.0);
    CHECK(clipped < std::exp(-1.0) + 1e-9);
}

TEST_CASE("bleu of empty inputs is zero") {
    CHECK(bleu("", "the cat") == 0.0);
    CHECK(bleu("the cat", "") == 0.0);
}

TEST_CASE("semantic similarity uses the provider's geometry") {
    HashingEmbedder emb(64, 7);
    CHECK(semantic_similarity("tide pool", "tide pool", emb) == doctest::Approx(1.0));
    CHECK(semantic_similarity("", "tide pool", emb) == 0.0);
    CHECK(semantic_similarity("tide pool", "!!!", emb) == 0.0);
    double partial = semantic_similarity("tide pool reef", "tide pool", emb);
    CHECK(partial > 0.0);
    CHECK(partial < 1.0);
}

TEST_CASE("refusal_rate is the flagged fraction") {
    std::vector<GenerationResult> results(100);
    for (int i = 0; i < 17; ++i) {
        results[i].is_refusal = true;
    }
    CHECK(refusal_rate(results) == 17.0 / 100.0);
    CHECK_THROWS_AS(refusal_rate({}), DomainError);
}

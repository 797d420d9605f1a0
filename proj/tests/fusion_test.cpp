#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "raglab/errors.hpp"
#include "raglab/ranking.hpp"
#include "raglab/scorers.hpp"

using namespace raglab;

namespace {

RankedList make_list(std::initializer_list<std::pair<const char*, double>> entries,
                     Provenance prov) {
    RankedList list;
    for (const auto& [id, score] : entries) {
        list.push_back(RankedEntry{id, score, prov});
    }
    return list;
}

RankedList random_list(std::mt19937_64& rng, Provenance prov) {
    RankedList list;
    std::size_t n = rng() % 12;
    std::vector<int> ids;
    for (int i = 0; i < 20; ++i) {
        ids.push_back(i);
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<double> scores;
    for (std::size_t i = 0; i < n; ++i) {
        scores.push_back(static_cast<double>(rng() % 1000) / 50.0);
    }
    std::sort(scores.rbegin(), scores.rend());
    for (std::size_t i = 0; i < n; ++i) {
        list.push_back(
            RankedEntry{"c" + std::to_string(10 + ids[i]) + "#0", scores[i], prov});
    }
    return list;
}

// Independent restatement of the fusion contract used as an oracle below.
RankedList fuse_oracle(const RankedList& sparse, const RankedList& dense,
                       const FusionConfig& cfg) {
    std::vector<double> s_raw, d_raw;
    for (const auto& e : sparse) {
        s_raw.push_back(e.score);
    }
    for (const auto& e : dense) {
        d_raw.push_back(e.score);
    }
    auto s_norm = min_max_normalize(s_raw);
    auto d_norm = min_max_normalize(d_raw);

    struct Cand {
        double fused = 0.0;
        double ns = 0.0;
        bool in_s = false;
        bool in_d = false;
    };
    std::map<std::string, Cand> cands;
    for (std::size_t i = 0; i < sparse.size(); ++i) {
        auto& c = cands[sparse[i].chunk_id];
        c.ns = s_norm[i];
        c.in_s = true;
    }
    for (std::size_t i = 0; i < dense.size(); ++i) {
        cands[dense[i].chunk_id].in_d = true;
    }
    for (auto& [id, c] : cands) {
        double nd = 0.0;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            if (dense[i].chunk_id == id) {
                nd = d_norm[i];
            }
        }
        c.fused = cfg.w_sparse * c.ns + cfg.w_dense * nd;
    }
    std::vector<std::pair<std::string, Cand>> rows(cands.begin(), cands.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second.fused != b.second.fused) {
            return a.second.fused > b.second.fused;
        }
        bool a_both = a.second.in_s && a.second.in_d;
        bool b_both = b.second.in_s && b.second.in_d;
        if (a_both != b_both) {
            return a_both;
        }
        if (a.second.ns != b.second.ns) {
            return a.second.ns > b.second.ns;
        }
        return a.first < b.first;
    });
    RankedList out;
    for (std::size_t i = 0; i < rows.size() && i < cfg.top_n; ++i) {
        out.push_back(RankedEntry{rows[i].first, rows[i].second.fused, Provenance::fused});
    }
    return out;
}

} // namespace

TEST_CASE("min_max_normalize maps to the unit interval") {
    auto out = min_max_normalize({10.0, 5.0, 0.0});
    REQUIRE(out.size() == 3);
    CHECK(out[0] == doctest::Approx(1.0));
    CHECK(out[1] == doctest::Approx(0.5));
    CHECK(out[2] == doctest::Approx(0.0));
}

TEST_CASE("min_max_normalize edge cases") {
    CHECK(min_max_normalize({}).empty());
    auto flat = min_max_normalize({3.0, 3.0, 3.0});
    CHECK(flat == std::vector<double>{1.0, 1.0, 1.0});
    auto single = min_max_normalize({42.0});
    CHECK(single == std::vector<double>{1.0});
}

TEST_CASE("fuse reproduces the worked two-plus-two example") {
    auto sparse = make_list({{"A", 10.0}, {"B", 5.0}}, Provenance::sparse);
    auto dense = make_list({{"B", 0.9}, {"C", 0.1}}, Provenance::dense);
    FusionConfig cfg;
    auto fused = fuse(sparse, dense, cfg);
    REQUIRE(fused.size() == 3);
    // A and B both land on 1.0; B is in both lists so it wins the tie.
    CHECK(fused[0].chunk_id == "B");
    CHECK(fused[0].score == doctest::Approx(1.0));
    CHECK(fused[1].chunk_id == "A");
    CHECK(fused[1].score == doctest::Approx(1.0));
    CHECK(fused[2].chunk_id == "C");
    CHECK(fused[2].score == doctest::Approx(0.0));
    for (const auto& e : fused) {
        CHECK(e.provenance == Provenance::fused);
    }
}

TEST_CASE("fuse with an empty dense list preserves sparse order") {
    auto sparse = make_list({{"a", 9.0}, {"b", 7.5}, {"c", 7.5}, {"d", 1.0}},
                            Provenance::sparse);
    FusionConfig cfg;
    cfg.top_n = 3;
    auto fused = fuse(sparse, {}, cfg);
    REQUIRE(fused.size() == 3);
    CHECK(fused[0].chunk_id == "a");
    CHECK(fused[1].chunk_id == "b");
    CHECK(fused[2].chunk_id == "c");
}

TEST_CASE("fuse matches an independently coded oracle on random lists") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        auto sparse = random_list(rng, Provenance::sparse);
        auto dense = random_list(rng, Provenance::dense);
        FusionConfig cfg;
        cfg.top_n = 1 + rng() % 15;
        cfg.w_sparse = 0.25 + static_cast<double>(rng() % 8);
        cfg.w_dense = 0.25 + static_cast<double>(rng() % 8);
        auto got = fuse(sparse, dense, cfg);
        auto want = fuse_oracle(sparse, dense, cfg);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].chunk_id == want[i].chunk_id);
            CHECK(std::abs(got[i].score - want[i].score) < 1e-12);
        }
    }
}

TEST_CASE("fusion is invariant to positive rescaling of either list") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 30; ++trial) {
        auto sparse = random_list(rng, Provenance::sparse);
        auto dense = random_list(rng, Provenance::dense);
        FusionConfig cfg;
        auto base = fuse(sparse, dense, cfg);

        double c = std::pow(10.0, static_cast<double>(rng() % 7) - 3.0);
        auto scaled_sparse = sparse;
        for (auto& e : scaled_sparse) {
            e.score *= c;
        }
        auto scaled = fuse(scaled_sparse, dense, cfg);
        REQUIRE(scaled.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(scaled[i].chunk_id == base[i].chunk_id);
            CHECK(std::abs(scaled[i].score - base[i].score) < 1e-12);
        }
    }
}

TEST_CASE("fusion weights tilt the blend") {
    auto sparse = make_list({{"s", 10.0}, {"m", 5.0}}, Provenance::sparse);
    auto dense = make_list({{"d", 0.9}, {"m", 0.5}}, Provenance::dense);
    FusionConfig cfg;
    cfg.w_sparse = 3.0;
    cfg.w_dense = 1.0;
    auto fused = fuse(sparse, dense, cfg);
    REQUIRE(!fused.empty());
    CHECK(fused[0].chunk_id == "s");
}

TEST_CASE("both empty inputs fuse to an empty list") {
    CHECK(fuse({}, {}, FusionConfig{}).empty());
}

TEST_CASE("rerank orders by scorer output and keeps tie order stable") {
    auto candidates = make_list({{"a", 3.0}, {"b", 2.0}, {"c", 1.0}}, Provenance::fused);
    auto text_of = [](const std::string& id) { return "passage " + id; };

    SUBCASE("constant scores keep the incoming order") {
        ConstantScorer scorer(0.5);
        auto out = rerank(candidates, "q", scorer, text_of, 2);
        REQUIRE(out.list.size() == 2);
        CHECK(out.list[0].chunk_id == "a");
        CHECK(out.list[1].chunk_id == "b");
        CHECK(out.list[0].provenance == Provenance::reranked);
        REQUIRE(out.calls.size() == 3);
        CHECK(out.calls[0].chunk_id == "a");
        CHECK(out.calls[2].chunk_id == "c");
    }

    SUBCASE("a decisive scorer reverses the order") {
        struct ReverseScorer : PassageScorer {
            double score(const std::string&, const std::string& passage) const override {
                return passage == "passage c" ? 1.0 : 0.0;
            }
        };
        auto out = rerank(candidates, "q", ReverseScorer{}, text_of, 3);
        REQUIRE(out.list.size() == 3);
        CHECK(out.list[0].chunk_id == "c");
        CHECK(out.list[1].chunk_id == "a");
        CHECK(out.list[2].chunk_id == "b");
    }
}

TEST_CASE("rerank parallel run matches the serial one") {
    RankedList candidates;
    for (int i = 0; i < 20; ++i) {
        candidates.push_back(
            RankedEntry{"c" + std::to_string(10 + i) + "#0", 20.0 - i, Provenance::fused});
    }
    TokenOverlapScorer scorer;
    auto text_of = [](const std::string& id) {
        return id + (id.size() % 2 ? " tide kelp" : " fog");
    };
    auto serial = rerank(candidates, "tide kelp fog", scorer, text_of, 10, 1);
    auto parallel = rerank(candidates, "tide kelp fog", scorer, text_of, 10, 6);
    REQUIRE(serial.list.size() == parallel.list.size());
    for (std::size_t i = 0; i < serial.list.size(); ++i) {
        CHECK(serial.list[i].chunk_id == parallel.list[i].chunk_id);
        CHECK(serial.list[i].score == parallel.list[i].score);
    }
}

TEST_CASE("rerank wraps scorer failures with the chunk id") {
    struct FailingScorer : PassageScorer {
        double score(const std::string&, const std::string& passage) const override {
            if (passage == "boom") {
                throw std::runtime_error("no backend");
            }
            return 0.0;
        }
    };
    auto candidates = make_list({{"ok", 2.0}, {"bad", 1.0}}, Provenance::fused);
    auto text_of = [](const std::string& id) {
        return id == "bad" ? std::string("boom") : std::string("fine");
    };
    try {
        rerank(candidates, "q", FailingScorer{}, text_of, 2);
        FAIL("expected ServiceError");
    } catch (const ServiceError& e) {
        CHECK(std::string(e.what()).find("bad") != std::string::npos);
    }
}

TEST_CASE("build_rerank_prompt is the exact query-passage concatenation") {
    CHECK(build_rerank_prompt("why kelp", "Kelp shelters otters.") ==
          "Query: why kelp Passage: Kelp shelters otters.");
}

TEST_CASE("oracle scorer flags only gold-parent passages") {
    OraclePassageScorer scorer({{"kelp text", "doc-1"}, {"fog text", "doc-2"}}, {"doc-1"});
    CHECK(scorer.score("q", "kelp text") == 1.0);
    CHECK(scorer.score("q", "fog text") == 0.0);
    CHECK(scorer.score("q", "unknown text") == 0.0);
}

TEST_CASE("token overlap scorer counts unique query coverage") {
    TokenOverlapScorer scorer;
    CHECK(scorer.score("tide kelp", "the tide is high") == doctest::Approx(0.5));
    CHECK(scorer.score("tide tide kelp", "tide kelp") == doctest::Approx(1.0));
    CHECK(scorer.score("", "anything") == 0.0);
}

TEST_CASE("provenance strings round-trip") {
    for (auto p : {Provenance::sparse, Provenance::dense, Provenance::fused,
                   Provenance::reranked}) {
        CHECK(provenance_from_string(to_string(p)) == p);
    }
    CHECK_THROWS_AS(provenance_from_string("bogus"), DomainError);
}

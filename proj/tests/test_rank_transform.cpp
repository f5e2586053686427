#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>

#include "mock_server.hpp"
#include "rankzip/error.hpp"
#include "rankzip/kernels.hpp"
#include "rankzip/rank_transform.hpp"
#include "test_util.hpp"

using namespace rankzip;
using namespace rankzip::testing;

namespace {

Vocabulary small(std::uint32_t n) { return Vocabulary(n, "test-v" + std::to_string(n)); }

// Rank by full sort, the definition the transform must agree with.
Rank sorted_rank(std::span<const double> p, TokenId t) {
    std::vector<TokenId> order(p.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) { return p[a] > p[b]; });
    return static_cast<Rank>(std::find(order.begin(), order.end(), t) - order.begin());
}

}  // namespace

TEST_CASE("uniform predictor ranks equal token ids") {
    UniformPredictor p(small(3));
    const auto ranks = tokens_to_ranks(p, TokenSequence(small(3), {2, 0, 1}));
    CHECK(ranks == RankSequence(small(3), {2, 0, 1}));
    CHECK(ranks_to_tokens(p, RankSequence(small(3), {2, 0, 1})) == TokenSequence(small(3), {2, 0, 1}));
}

TEST_CASE("perfect oracle gives all-zero ranks") {
    std::mt19937_64 rng(1);
    const auto truth = random_tokens(rng, 40, 300);
    OraclePredictor p(small(40), truth);
    const auto ranks = tokens_to_ranks(p, TokenSequence(small(40), truth));
    CHECK(std::all_of(ranks.values().begin(), ranks.values().end(), [](Rank r) { return r == 0; }));
    CHECK(ranks_to_tokens(p, RankSequence(small(40), std::vector<Rank>(300, 0))).values().size() == 300);
    CHECK(ranks_to_tokens(p, RankSequence(small(40), std::vector<Rank>(300, 0))) == TokenSequence(small(40), truth));
}

TEST_CASE("ngram trained on [0,0,0,1] ranks [0,1] as [0,1]") {
    NgramModel m(small(2), 1);
    m.update(std::vector<TokenId>{0, 0, 0, 1});
    NgramPredictor p(std::move(m), "t");
    CHECK(tokens_to_ranks(p, TokenSequence(small(2), {0, 1})) == RankSequence(small(2), {0, 1}));
}

TEST_CASE("empty input makes no predictor calls") {
    UniformPredictor inner(small(5));
    CountingPredictor p(inner);
    CHECK(tokens_to_ranks(p, TokenSequence(small(5))).empty());
    CHECK(ranks_to_tokens(p, RankSequence(small(5))).empty());
    CHECK(p.predicts + p.observes + p.resets == 0);
}

TEST_CASE("one predict and one observe per token") {
    UniformPredictor inner(small(5));
    CountingPredictor p(inner);
    tokens_to_ranks(p, TokenSequence(small(5), {1, 2, 3, 4}));
    CHECK(p.resets == 1);
    CHECK(p.predicts == 4);
    CHECK(p.observes == 4);
}

TEST_CASE("rank at or beyond the vocabulary is corrupt") {
    UniformPredictor p(small(3));
    try {
        ranks_to_tokens(p, RankSequence(Vocabulary(4, "test-v3"), {3}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VocabMismatch);
    }
    const double probs[3] = {0.2, 0.5, 0.3};
    try {
        token_at_rank(probs, 3);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptStream);
    }
}

TEST_CASE("token_at_rank inverts rank_of under ties") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 40;
        std::vector<double> p(n);
        for (auto& x : p) x = static_cast<double>(rng() % 4) / 4.0;  // heavy ties
        for (TokenId t = 0; t < n; ++t) {
            const Rank r = sorted_rank(p, t);
            CHECK(kernels::rank_of(p, t) == r);
            CHECK(token_at_rank(p, r) == t);
        }
    }
}

TEST_CASE("rank 0 share grows with predictor quality") {
    // First-order Markov source: mostly a fixed successor, sometimes noise.
    std::mt19937_64 rng(4);
    auto markov = [&](std::size_t n) {
        std::vector<TokenId> out{0};
        while (out.size() < n) out.push_back(rng() % 5 == 0 ? rng() % 16 : (out.back() * 5 + 3) % 16);
        return out;
    };
    const auto train = markov(4000);
    const auto text = markov(2000);
    auto zeros = [&](Predictor& p) {
        const auto r = tokens_to_ranks(p, TokenSequence(small(16), text));
        return std::count(r.values().begin(), r.values().end(), 0u);
    };
    UniformPredictor u(small(16));
    auto ng = trained_ngram(small(16), 2, train);
    OraclePredictor o(small(16), text);
    const auto zu = zeros(u), zn = zeros(ng), zo = zeros(o);
    CHECK(zu < zn);
    CHECK(zn < zo);
    CHECK(zo == 2000);
    // Under the uniform predictor ranks are the tokens themselves.
    CHECK(zu == std::count(text.begin(), text.end(), 0u));
}

TEST_CASE("round trip of 1000 random sequences per predictor") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint32_t V = 2 + rng() % 60;
        const auto v = small(V);
        const TokenSequence t(v, random_tokens(rng, V, rng() % 120));
        UniformPredictor u(v);
        auto ng = trained_ngram(v, 1 + rng() % 4, random_tokens(rng, V, rng() % 200));
        auto server = std::make_shared<MockServer>(v.identifier(), V, hashed_model(V, rng()));
        auto remote = make_mock_remote(server, 1 + rng() % 16);
        for (Predictor* p : {static_cast<Predictor*>(&u), static_cast<Predictor*>(&ng), static_cast<Predictor*>(remote.get())}) {
            const auto ranks = tokens_to_ranks(*p, t);
            REQUIRE(ranks.size() == t.size());
            REQUIRE(ranks_to_tokens(*p, ranks) == t);
        }
    }
}

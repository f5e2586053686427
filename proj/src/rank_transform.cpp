#include "rankzip/rank_transform.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "rankzip/error.hpp"
#include "rankzip/kernels.hpp"

namespace rankzip {

RankSequence tokens_to_ranks(Predictor& predictor, const TokenSequence& tokens) {
    require_same_vocab(predictor.vocabulary(), tokens.vocab());
    RankSequence ranks(tokens.vocab());
    if (tokens.empty()) return ranks;

    const auto context = tokens.values();
    std::vector<double> probs(tokens.vocab().size());
    predictor.reset();
    for (std::size_t i = 0; i < context.size(); ++i) {
        predictor.predict(context.first(i), probs);
        ranks.push_back(kernels::rank_of(probs, context[i]));
        predictor.observe(context.first(i), context[i]);
    }
    return ranks;
}

TokenId token_at_rank(std::span<const double> probs, Rank rank) {
    if (rank >= probs.size()) fail(ErrorCode::CorruptStream, "rank " + std::to_string(rank) + " outside the vocabulary");
    // Rank 0 is by far the most common case for a useful predictor.
    if (rank == 0) {
        return static_cast<TokenId>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }
    std::vector<TokenId> order(probs.size());
    std::iota(order.begin(), order.end(), TokenId{0});
    const auto before = [&](TokenId a, TokenId b) {
        return probs[a] > probs[b] || (probs[a] == probs[b] && a < b);
    };
    std::nth_element(order.begin(), order.begin() + rank, order.end(), before);
    return order[rank];
}

TokenSequence ranks_to_tokens(Predictor& predictor, const RankSequence& ranks) {
    require_same_vocab(predictor.vocabulary(), ranks.vocab());
    TokenSequence tokens(ranks.vocab());
    if (ranks.empty()) return tokens;

    std::vector<TokenId> context;
    context.reserve(ranks.size());
    std::vector<double> probs(ranks.vocab().size());
    predictor.reset();
    for (Rank r : ranks.values()) {
        predictor.predict(context, probs);
        const TokenId t = token_at_rank(probs, r);
        predictor.observe(context, t);
        context.push_back(t);
    }
    return TokenSequence(ranks.vocab(), std::move(context));
}

}  // namespace rankzip

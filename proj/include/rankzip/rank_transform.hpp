#pragma once

#include <span>

#include "rankzip/predictor.hpp"

namespace rankzip {

/// Replaces every token by its 0-based position in the candidate list
/// sorted by (probability descending, token id ascending), where the
/// probabilities come from `predictor` given all preceding tokens.
RankSequence tokens_to_ranks(Predictor& predictor, const TokenSequence& tokens);

/// Inverse of tokens_to_ranks under an identically configured predictor.
/// Throws CorruptStream if a rank is outside the vocabulary.
TokenSequence ranks_to_tokens(Predictor& predictor, const RankSequence& ranks);

/// Token id at position `rank` of the (probability desc, id asc) order.
TokenId token_at_rank(std::span<const double> probs, Rank rank);

}  // namespace rankzip

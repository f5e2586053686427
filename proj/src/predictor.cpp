#include "rankzip/predictor.hpp"

#include <algorithm>

#include "rankzip/error.hpp"

namespace rankzip {

void UniformPredictor::predict(std::span<const TokenId> /*context*/, std::span<double> out) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(vocab_.size()));
}

ProbabilityDistribution uniform_predict(const Vocabulary& vocab, const TokenSequence& context) {
    UniformPredictor p(vocab);
    return predict(p, context);
}

ProbabilityDistribution predict(Predictor& predictor, const TokenSequence& context) {
    require_same_vocab(predictor.vocabulary(), context.vocab());
    ProbabilityDistribution dist;
    dist.probs.resize(predictor.vocabulary().size());
    predictor.predict(context.values(), dist.probs);
    return dist;
}

}  // namespace rankzip

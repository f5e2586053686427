#pragma once

#include <memory>
#include <span>
#include <string>

#include "rankzip/types.hpp"

namespace rankzip {

/// Source of next-token distributions p(t_i | t_1..t_{i-1}).
///
/// Encoders and decoders drive a predictor strictly in order: reset() at the
/// start of a stream, then predict()/observe() once per position. Two
/// predictors with equal id() must produce bit-identical distributions for
/// the same call sequence, or streams coded with one will not decode with
/// the other. Instances are single-caller but movable between threads.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual const Vocabulary& vocabulary() const = 0;

    /// Stable name recorded in containers, e.g. "uniform" or "ngram:k=3:<hash>".
    virtual std::string id() const = 0;

    /// Drops any per-stream adaptation.
    virtual void reset() {}

    /// Writes the normalized distribution for the token following `context`
    /// into `out`, which holds exactly vocabulary().size() entries.
    virtual void predict(std::span<const TokenId> context, std::span<double> out) = 0;

    /// Reports that `next` followed `context`.
    virtual void observe(std::span<const TokenId> context, TokenId next) {
        (void)context;
        (void)next;
    }
};

class UniformPredictor final : public Predictor {
public:
    explicit UniformPredictor(Vocabulary vocab) : vocab_(std::move(vocab)) {}

    const Vocabulary& vocabulary() const override { return vocab_; }
    std::string id() const override { return "uniform"; }
    void predict(std::span<const TokenId> context, std::span<double> out) override;

private:
    Vocabulary vocab_;
};

/// 1/size for every id, whatever the context.
ProbabilityDistribution uniform_predict(const Vocabulary& vocab, const TokenSequence& context);

/// Calls predictor.predict on a sequence and wraps the result.
ProbabilityDistribution predict(Predictor& predictor, const TokenSequence& context);

}  // namespace rankzip

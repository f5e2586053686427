#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankzip/predictor.hpp"

namespace rankzip {

/// Count-based order-k model. The unigram level is the add-one estimate
/// (count(j) + 1) / (count + V); each longer context suffix (up to k-1
/// tokens) that has been seen interpolates toward it by Witten-Bell:
///   P(j | h) = (count(h, j) + T(h) P(j | shorter h)) / (count(h) + T(h))
/// with T(h) the number of distinct tokens seen after h. With no
/// observations at all the estimate is uniform.
class NgramModel {
public:
    NgramModel(Vocabulary vocab, unsigned order);

    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    unsigned order() const noexcept { return order_; }

    /// Counts every (context, token) event of a whole sequence.
    void update(std::span<const TokenId> tokens);

    /// Counts the single event `next` after `history`.
    void observe(std::span<const TokenId> history, TokenId next);

    void predict(std::span<const TokenId> context, std::span<double> out) const;

    /// Number of events observed at order 0.
    std::uint64_t event_count() const noexcept;

private:
    struct ContextCounts {
        std::uint64_t total = 0;
        std::unordered_map<TokenId, std::uint32_t> next;
    };

    static std::string key_of(std::span<const TokenId> suffix);

    Vocabulary vocab_;
    unsigned order_;
    // tables_[h] maps a length-h context suffix to its successor counts.
    std::vector<std::unordered_map<std::string, ContextCounts>> tables_;
};

void ngram_update(NgramModel& model, const TokenSequence& tokens);
ProbabilityDistribution ngram_predict(const NgramModel& model, const TokenSequence& context);

/// Adaptive predictor: starts each stream from a trained snapshot and keeps
/// counting the stream's own tokens as they are coded.
class NgramPredictor final : public Predictor {
public:
    /// `training_hash` identifies the corpus the snapshot was trained on and
    /// becomes part of id().
    NgramPredictor(NgramModel trained, std::string training_hash);

    const Vocabulary& vocabulary() const override { return trained_.vocabulary(); }
    std::string id() const override;
    void reset() override { live_ = trained_; }
    void predict(std::span<const TokenId> context, std::span<double> out) override;
    void observe(std::span<const TokenId> context, TokenId next) override;

    const NgramModel& model() const noexcept { return live_; }

private:
    NgramModel trained_;
    NgramModel live_;
    std::string training_hash_;
};

/// FNV-1a 64 over the bytes, as 16 lowercase hex digits.
std::string content_hash(std::span<const std::uint8_t> bytes);

}  // namespace rankzip

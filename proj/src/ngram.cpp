#include "rankzip/ngram.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

#include "rankzip/error.hpp"

namespace rankzip {

NgramModel::NgramModel(Vocabulary vocab, unsigned order)
    : vocab_(std::move(vocab)), order_(order), tables_(order) {
    if (order_ < 1) fail(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
}

std::string NgramModel::key_of(std::span<const TokenId> suffix) {
    std::string key(suffix.size() * sizeof(TokenId), '\0');
    if (!suffix.empty()) std::memcpy(key.data(), suffix.data(), key.size());
    return key;
}

void NgramModel::update(std::span<const TokenId> tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) observe(tokens.first(i), tokens[i]);
}

void NgramModel::observe(std::span<const TokenId> history, TokenId next) {
    if (next >= vocab_.size()) fail(ErrorCode::InvalidArgument, "token outside the vocabulary");
    const std::size_t longest = std::min<std::size_t>(order_ - 1, history.size());
    for (std::size_t h = 0; h <= longest; ++h) {
        auto& counts = tables_[h][key_of(history.last(h))];
        ++counts.total;
        ++counts.next[next];
    }
}

void NgramModel::predict(std::span<const TokenId> context, std::span<double> out) const {
    if (out.size() != vocab_.size()) fail(ErrorCode::InvalidArgument, "output size != vocabulary size");
    const auto V = static_cast<double>(vocab_.size());

    const auto base = tables_[0].find(std::string());
    if (base == tables_[0].end()) {
        std::fill(out.begin(), out.end(), 1.0 / V);
        return;
    }
    const double denom = static_cast<double>(base->second.total) + V;
    std::fill(out.begin(), out.end(), 1.0 / denom);
    for (const auto& [token, count] : base->second.next) out[token] = (static_cast<double>(count) + 1.0) / denom;

    // Witten-Bell: each longer context keeps T/(n+T) of the shorter
    // estimate, T being the number of distinct tokens seen after it.
    const std::size_t longest = std::min<std::size_t>(order_ - 1, context.size());
    for (std::size_t h = 1; h <= longest; ++h) {
        const auto it = tables_[h].find(key_of(context.last(h)));
        if (it == tables_[h].end()) break;  // longer suffixes are unseen too
        const double n = static_cast<double>(it->second.total);
        const double types = static_cast<double>(it->second.next.size());
        const double keep = types / (n + types);
        for (double& x : out) x *= keep;
        for (const auto& [token, count] : it->second.next) out[token] += static_cast<double>(count) / (n + types);
    }
}

std::uint64_t NgramModel::event_count() const noexcept {
    const auto it = tables_[0].find(std::string());
    return it == tables_[0].end() ? 0 : it->second.total;
}

void ngram_update(NgramModel& model, const TokenSequence& tokens) {
    require_same_vocab(model.vocabulary(), tokens.vocab());
    model.update(tokens.values());
}

ProbabilityDistribution ngram_predict(const NgramModel& model, const TokenSequence& context) {
    require_same_vocab(model.vocabulary(), context.vocab());
    ProbabilityDistribution dist;
    dist.probs.resize(model.vocabulary().size());
    model.predict(context.values(), dist.probs);
    return dist;
}

NgramPredictor::NgramPredictor(NgramModel trained, std::string training_hash)
    : trained_(std::move(trained)), live_(trained_), training_hash_(std::move(training_hash)) {}

std::string NgramPredictor::id() const {
    return "ngram:k=" + std::to_string(trained_.order()) + ":" + training_hash_;
}

void NgramPredictor::predict(std::span<const TokenId> context, std::span<double> out) {
    live_.predict(context, out);
}

void NgramPredictor::observe(std::span<const TokenId> context, TokenId next) {
    live_.observe(context, next);
}

std::string content_hash(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rankzip

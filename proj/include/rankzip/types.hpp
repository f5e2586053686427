#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rankzip {

using TokenId = std::uint32_t;
using Rank = std::uint32_t;

/// Token alphabet: ids are 0..size-1. The identifier names the tokenizer
/// scheme and is compared verbatim when a stream is decoded.
class Vocabulary {
public:
    Vocabulary(std::uint32_t size, std::string identifier);

    static Vocabulary bytes();  // 256 ids, "bytes-v1"

    std::uint32_t size() const noexcept { return size_; }
    const std::string& identifier() const noexcept { return identifier_; }

    bool operator==(const Vocabulary&) const = default;

private:
    std::uint32_t size_;
    std::string identifier_;
};

inline constexpr std::string_view kByteVocabId = "bytes-v1";

/// Throws VocabMismatch unless both vocabularies agree on size and identifier.
void require_same_vocab(const Vocabulary& expected, const Vocabulary& actual);

/// Integer sequence whose every element is < vocab.size(). Shared base of
/// TokenSequence and RankSequence; the two are distinct types so a rank
/// stream is never fed where tokens are expected.
template <typename Tag>
class SymbolSequence {
public:
    explicit SymbolSequence(Vocabulary vocab) : vocab_(std::move(vocab)) {}
    SymbolSequence(Vocabulary vocab, std::vector<std::uint32_t> values);

    const Vocabulary& vocab() const noexcept { return vocab_; }
    std::span<const std::uint32_t> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::uint32_t operator[](std::size_t i) const { return values_[i]; }

    void push_back(std::uint32_t v);

    bool operator==(const SymbolSequence&) const = default;

private:
    Vocabulary vocab_;
    std::vector<std::uint32_t> values_;
};

struct TokenTag {};
struct RankTag {};
using TokenSequence = SymbolSequence<TokenTag>;
using RankSequence = SymbolSequence<RankTag>;

extern template class SymbolSequence<TokenTag>;
extern template class SymbolSequence<RankTag>;

/// Next-token weights over a vocabulary.
struct ProbabilityDistribution {
    std::vector<double> probs;
    bool normalized = true;

    /// Throws InvalidArgument if any weight is negative or non-finite, all
    /// weights are zero, or (when normalized) the sum is off by more than 1e-6.
    void validate() const;
};

}  // namespace rankzip

#include "rankzip/types.hpp"

#include <cmath>

#include "rankzip/error.hpp"

namespace rankzip {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
        case ErrorCode::VocabMismatch: return "VocabMismatch";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::CorruptStream: return "CorruptStream";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NotAContainer: return "NotAContainer";
        case ErrorCode::Truncated: return "Truncated";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::InvalidHeader: return "InvalidHeader";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::DegenerateCurve: return "DegenerateCurve";
        case ErrorCode::InvalidReading: return "InvalidReading";
        case ErrorCode::EmptyInput: return "EmptyInput";
    }
    return "Unknown";
}

Vocabulary::Vocabulary(std::uint32_t size, std::string identifier)
    : size_(size), identifier_(std::move(identifier)) {
    if (size_ < 2) fail(ErrorCode::InvalidArgument, "vocabulary size must be >= 2");
    if (identifier_.empty()) fail(ErrorCode::InvalidArgument, "vocabulary identifier is empty");
}

Vocabulary Vocabulary::bytes() { return Vocabulary(256, std::string(kByteVocabId)); }

void require_same_vocab(const Vocabulary& expected, const Vocabulary& actual) {
    if (expected == actual) return;
    fail(ErrorCode::VocabMismatch, "expected vocabulary '" + expected.identifier() + "' (" +
                                       std::to_string(expected.size()) + " ids), got '" +
                                       actual.identifier() + "' (" +
                                       std::to_string(actual.size()) + " ids)");
}

template <typename Tag>
SymbolSequence<Tag>::SymbolSequence(Vocabulary vocab, std::vector<std::uint32_t> values)
    : vocab_(std::move(vocab)), values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] >= vocab_.size()) {
            fail(ErrorCode::InvalidArgument, "symbol " + std::to_string(values_[i]) +
                                                 " at position " + std::to_string(i) +
                                                 " is outside the vocabulary");
        }
    }
}

template <typename Tag>
void SymbolSequence<Tag>::push_back(std::uint32_t v) {
    if (v >= vocab_.size()) {
        fail(ErrorCode::InvalidArgument, "symbol " + std::to_string(v) + " is outside the vocabulary");
    }
    values_.push_back(v);
}

template class SymbolSequence<TokenTag>;
template class SymbolSequence<RankTag>;

void ProbabilityDistribution::validate() const {
    if (probs.empty()) fail(ErrorCode::InvalidArgument, "empty distribution");
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) {
            fail(ErrorCode::InvalidArgument, "distribution weight is negative or non-finite");
        }
        sum += p;
    }
    if (!(sum > 0.0)) fail(ErrorCode::InvalidArgument, "distribution has no positive weight");
    if (normalized && std::abs(sum - 1.0) > 1e-6) {
        fail(ErrorCode::InvalidArgument, "normalized distribution sums to " + std::to_string(sum));
    }
}

}  // namespace rankzip

#include "rankzip/range_coder.hpp"

#include <algorithm>
#include <cmath>

#include "rankzip/entropy.hpp"
#include "rankzip/error.hpp"
#include "rankzip/kernels.hpp"

namespace rankzip {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
// The decoder pre-reads four bytes; the encoder's final cached byte (always
// zero) is never written, so a well-formed stream is read three bytes past its end.
constexpr std::size_t kImplicitTail = 3;
}  // namespace

void FrequencyTable::assign(std::span<const double> probs) {
    const auto n = probs.size();
    if (n < 2 || n > kMaxSymbols) {
        fail(ErrorCode::InvalidArgument, "arithmetic coding supports 2.." + std::to_string(kMaxSymbols) + " symbols");
    }
    freq_.resize(n);
    cum_.resize(n + 1);

    const double mass = kernels::sum(probs);
    if (!(mass > 0.0) || !std::isfinite(mass)) fail(ErrorCode::InvalidArgument, "distribution has no mass");
    const double scale = static_cast<double>(kTotal - n) / mass;
    const std::uint64_t assigned = kernels::quantize(probs, scale, freq_);

    const auto top = static_cast<std::size_t>(std::max_element(freq_.begin(), freq_.end()) - freq_.begin());
    const std::int64_t remainder = std::int64_t{kTotal} - static_cast<std::int64_t>(assigned);
    if (std::int64_t{freq_[top]} + remainder < 1) fail(ErrorCode::InvalidArgument, "frequency quantization overflow");
    freq_[top] = static_cast<std::uint32_t>(std::int64_t{freq_[top]} + remainder);

    cum_[0] = 0;
    for (std::size_t i = 0; i < n; ++i) cum_[i + 1] = cum_[i] + freq_[i];
}

std::uint32_t FrequencyTable::find(std::uint32_t target) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    return static_cast<std::uint32_t>(it - cum_.begin()) - 1;
}

void RangeEncoder::shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xff000000u || (low_ >> 32) != 0) {
        const auto carry = static_cast<std::uint8_t>(low_ >> 32);
        if (has_cache_) out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
        for (; pending_ff_ > 0; --pending_ff_) out_.push_back(static_cast<std::uint8_t>(0xff + carry));
        cache_ = static_cast<std::uint8_t>(low_ >> 24);
        has_cache_ = true;
    } else {
        ++pending_ff_;
    }
    low_ = (low_ & 0x00ffffffu) << 8;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq) {
    const std::uint32_t r = range_ >> FrequencyTable::kTotalBits;
    low_ += std::uint64_t{r} * cum;
    range_ = r * freq;
    while (range_ < kTop) {
        range_ <<= 8;
        shift_low();
    }
}

std::vector<std::uint8_t> RangeEncoder::finish() && {
    // Any interval of width >= 2^24 holds a multiple of 2^24; emitting that
    // value's top byte lets the decoder fill the rest with zeros.
    low_ = (low_ + (kTop - 1)) & ~std::uint64_t{kTop - 1};
    shift_low();
    shift_low();
    return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
    if (pos_ >= bytes_.size() + kImplicitTail) fail(ErrorCode::CorruptStream, "arithmetic payload ended early");
    const std::uint8_t b = pos_ < bytes_.size() ? bytes_[pos_] : 0;
    ++pos_;
    return b;
}

std::uint32_t RangeDecoder::decode(const FrequencyTable& table) {
    const std::uint32_t r = range_ >> FrequencyTable::kTotalBits;
    const std::uint32_t target = code_ / r;
    if (target >= FrequencyTable::kTotal) fail(ErrorCode::CorruptStream, "arithmetic code value out of range");
    const std::uint32_t s = table.find(target);
    code_ -= r * table.cum(s);
    range_ = r * table.freq(s);
    while (range_ < kTop) {
        code_ = (code_ << 8) | next_byte();
        range_ <<= 8;
    }
    return s;
}

void RangeDecoder::finish() const {
    if (pos_ != bytes_.size() + kImplicitTail) fail(ErrorCode::CorruptStream, "arithmetic payload length does not match its content");
}

Bitstream arithmetic_encode(Predictor& predictor, const TokenSequence& tokens, CodingStats* stats) {
    require_same_vocab(predictor.vocabulary(), tokens.vocab());
    double cross_entropy = 0.0;
    std::vector<std::uint8_t> bytes;
    if (!tokens.empty()) {
        const auto context = tokens.values();
        std::vector<double> probs(tokens.vocab().size());
        FrequencyTable table;
        RangeEncoder enc;
        predictor.reset();
        for (std::size_t i = 0; i < context.size(); ++i) {
            predictor.predict(context.first(i), probs);
            table.assign(probs);
            const TokenId t = context[i];
            enc.encode(table.cum(t), table.freq(t));
            cross_entropy += FrequencyTable::kTotalBits - std::log2(static_cast<double>(table.freq(t)));
            predictor.observe(context.first(i), t);
        }
        bytes = std::move(enc).finish();
    }
    Bitstream bs = Bitstream::whole_bytes(std::move(bytes), Backend::Arithmetic);
    if (stats) *stats = CodingStats{tokens.size(), bs.bit_length, cross_entropy};
    return bs;
}

TokenSequence arithmetic_decode(Predictor& predictor, const Bitstream& bs, const Vocabulary& vocab,
                                std::size_t count) {
    if (bs.backend != Backend::Arithmetic) fail(ErrorCode::InvalidArgument, "not an arithmetic bitstream");
    require_same_vocab(predictor.vocabulary(), vocab);
    if (count == 0) {
        if (!bs.bytes.empty()) fail(ErrorCode::LengthMismatch, "payload present for an empty stream");
        return TokenSequence(vocab);
    }
    if (bs.bytes.empty()) fail(ErrorCode::LengthMismatch, "empty payload for a non-empty stream");

    std::vector<TokenId> tokens;
    std::vector<double> probs(vocab.size());
    FrequencyTable table;
    RangeDecoder dec(bs.bytes);
    predictor.reset();
    for (std::size_t i = 0; i < count; ++i) {
        predictor.predict(tokens, probs);
        table.assign(probs);
        const TokenId t = dec.decode(table);
        predictor.observe(tokens, t);
        tokens.push_back(t);
    }
    dec.finish();
    return TokenSequence(vocab, std::move(tokens));
}

}  // namespace rankzip

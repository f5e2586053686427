#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rankzip {

/// Integer frequency model derived from a probability vector.
///
/// Frequencies sum to exactly kTotal. Every symbol gets at least 1, the rest
/// of the mass is split as floor(p * (kTotal - V) / sum(p)), and the rounding
/// remainder goes to the first most probable symbol.
class FrequencyTable {
public:
    static constexpr unsigned kTotalBits = 16;
    static constexpr std::uint32_t kTotal = 1u << kTotalBits;
    static constexpr std::uint32_t kMaxSymbols = kTotal / 2;

    void assign(std::span<const double> probs);

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(freq_.size()); }
    std::uint32_t freq(std::uint32_t s) const { return freq_[s]; }
    std::uint32_t cum(std::uint32_t s) const { return cum_[s]; }
    /// Symbol whose interval [cum, cum + freq) contains `target`.
    std::uint32_t find(std::uint32_t target) const;

private:
    std::vector<std::uint32_t> freq_;
    std::vector<std::uint32_t> cum_;  // size + 1 entries
};

/// 32-bit range coder with carry propagation (LZMA-style low/cache/pending
/// 0xFF bytes). Totals are fixed at FrequencyTable::kTotal.
class RangeEncoder {
public:
    void encode(std::uint32_t cum, std::uint32_t freq);
    /// Flushes the final interval; the encoder must not be used afterwards.
    std::vector<std::uint8_t> finish() &&;

private:
    void shift_low();

    std::uint64_t low_ = 0;
    std::uint32_t range_ = 0xffffffffu;
    std::uint8_t cache_ = 0;
    bool has_cache_ = false;
    std::uint64_t pending_ff_ = 0;
    std::vector<std::uint8_t> out_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint8_t> bytes);

    /// Decodes one symbol against `table`. Throws CorruptStream when the code
    /// value lies outside every symbol interval.
    std::uint32_t decode(const FrequencyTable& table);

    /// Throws CorruptStream unless exactly the bytes the encoder flushed were consumed.
    void finish() const;

private:
    std::uint8_t next_byte();

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::uint32_t code_ = 0;
    std::uint32_t range_ = 0xffffffffu;
};

}  // namespace rankzip

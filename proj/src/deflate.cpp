#include <zlib.h>

#include <algorithm>

#include "rankzip/entropy.hpp"
#include "rankzip/error.hpp"

namespace rankzip {

namespace {

constexpr int kLevel = 9;
constexpr int kRawWindowBits = -15;
constexpr int kMemLevel = 9;
constexpr std::size_t kMaxLebBytes = 5;

class Deflater {
public:
    Deflater() {
        if (deflateInit2(&z_, kLevel, Z_DEFLATED, kRawWindowBits, kMemLevel, Z_DEFAULT_STRATEGY) != Z_OK) {
            throw std::bad_alloc();
        }
    }
    ~Deflater() { deflateEnd(&z_); }
    Deflater(const Deflater&) = delete;
    Deflater& operator=(const Deflater&) = delete;

    std::vector<std::uint8_t> run(std::span<const std::uint8_t> in) {
        std::vector<std::uint8_t> out(deflateBound(&z_, static_cast<uLong>(in.size())));
        z_.next_in = const_cast<Bytef*>(in.data());
        z_.avail_in = static_cast<uInt>(in.size());
        z_.next_out = out.data();
        z_.avail_out = static_cast<uInt>(out.size());
        if (deflate(&z_, Z_FINISH) != Z_STREAM_END) fail(ErrorCode::InvalidArgument, "deflate failed");
        out.resize(z_.total_out);
        return out;
    }

private:
    z_stream z_{};
};

class Inflater {
public:
    Inflater() {
        if (inflateInit2(&z_, kRawWindowBits) != Z_OK) throw std::bad_alloc();
    }
    ~Inflater() { inflateEnd(&z_); }
    Inflater(const Inflater&) = delete;
    Inflater& operator=(const Inflater&) = delete;

    // Inflates at most `limit` bytes; one more byte of output means the
    // stream holds more than the caller asked for.
    std::vector<std::uint8_t> run(std::span<const std::uint8_t> in, std::size_t limit) {
        std::vector<std::uint8_t> out(limit + 1);
        z_.next_in = const_cast<Bytef*>(in.data());
        z_.avail_in = static_cast<uInt>(in.size());
        z_.next_out = out.data();
        z_.avail_out = static_cast<uInt>(out.size());
        const int rc = inflate(&z_, Z_FINISH);
        if (z_.total_out > limit) fail(ErrorCode::LengthMismatch, "deflate payload holds more symbols than declared");
        if (rc != Z_STREAM_END) fail(ErrorCode::CorruptStream, std::string("invalid deflate stream: ") + (z_.msg ? z_.msg : "incomplete"));
        if (z_.avail_in != 0) fail(ErrorCode::CorruptStream, "trailing bytes after deflate stream");
        out.resize(z_.total_out);
        return out;
    }

private:
    z_stream z_{};
};

}  // namespace

Bitstream deflate_encode(std::span<const std::uint32_t> symbols, CodingStats* stats) {
    std::vector<std::uint8_t> payload;
    if (!symbols.empty()) payload = Deflater().run(leb128::encode(symbols));
    Bitstream bs = Bitstream::whole_bytes(std::move(payload), Backend::Deflate);
    if (stats) *stats = CodingStats{symbols.size(), bs.bit_length, std::nullopt};
    return bs;
}

std::vector<std::uint32_t> deflate_decode(const Bitstream& bs, std::uint32_t alphabet, std::size_t count) {
    if (bs.backend != Backend::Deflate) fail(ErrorCode::InvalidArgument, "not a deflate bitstream");
    if (count == 0) {
        if (!bs.bytes.empty()) fail(ErrorCode::LengthMismatch, "payload present for an empty stream");
        return {};
    }
    if (bs.bytes.empty()) fail(ErrorCode::LengthMismatch, "empty payload for a non-empty stream");
    // DEFLATE expands at most ~1032:1, which bounds the buffer for hostile counts.
    const std::uint64_t by_input = std::uint64_t{bs.bytes.size()} * 1032 + 64;
    const std::size_t cap = count > by_input ? by_input : std::min<std::uint64_t>(count * kMaxLebBytes, by_input);
    const auto raw = Inflater().run(bs.bytes, cap);
    auto values = leb128::decode(raw);
    if (values.size() != count) {
        fail(ErrorCode::LengthMismatch, "decoded " + std::to_string(values.size()) + " symbols, expected " +
                                            std::to_string(count));
    }
    for (std::uint32_t v : values) {
        if (v >= alphabet) fail(ErrorCode::CorruptStream, "symbol outside the alphabet");
    }
    return values;
}

Bitstream deflate_encode(const RankSequence& ranks, CodingStats* stats) {
    return deflate_encode(ranks.values(), stats);
}

RankSequence deflate_decode(const Bitstream& bs, const Vocabulary& vocab, std::size_t count) {
    return RankSequence(vocab, deflate_decode(bs, vocab.size(), count));
}

}  // namespace rankzip

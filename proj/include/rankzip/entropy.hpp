#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankzip/bitstream.hpp"
#include "rankzip/predictor.hpp"

namespace rankzip {

// Symbol-stream coders. Streams carry no length; decoders are told the
// symbol count and the alphabet size and reject streams that disagree.

/// Raw DEFLATE (RFC 1951) over the LEB128 serialization of the symbols.
/// An empty symbol stream encodes to an empty payload.
Bitstream deflate_encode(std::span<const std::uint32_t> symbols, CodingStats* stats = nullptr);
std::vector<std::uint32_t> deflate_decode(const Bitstream& bs, std::uint32_t alphabet, std::size_t count);

/// FGK adaptive Huffman with an escape leaf for first occurrences; an
/// escaped symbol is written in ceil(log2(alphabet)) plain bits.
Bitstream adaptive_huffman_encode(std::span<const std::uint32_t> symbols, std::uint32_t alphabet,
                                  CodingStats* stats = nullptr);
std::vector<std::uint32_t> adaptive_huffman_decode(const Bitstream& bs, std::uint32_t alphabet,
                                                   std::size_t count);

/// Range coding of the tokens themselves against the predictor's
/// distribution, quantized to 16-bit frequencies.
Bitstream arithmetic_encode(Predictor& predictor, const TokenSequence& tokens, CodingStats* stats = nullptr);
TokenSequence arithmetic_decode(Predictor& predictor, const Bitstream& bs, const Vocabulary& vocab,
                                std::size_t count);

// Typed conveniences for rank streams.
Bitstream deflate_encode(const RankSequence& ranks, CodingStats* stats = nullptr);
RankSequence deflate_decode(const Bitstream& bs, const Vocabulary& vocab, std::size_t count);
Bitstream adaptive_huffman_encode(const RankSequence& ranks, CodingStats* stats = nullptr);
RankSequence adaptive_huffman_decode(const Bitstream& bs, const Vocabulary& vocab, std::size_t count);

}  // namespace rankzip

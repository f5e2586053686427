#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rankzip/types.hpp"

namespace rankzip {

// Token file: a header line `# rankzip-tokens vocab=<identifier> size=<n>`
// followed by one decimal token id per line.

TokenSequence read_token_file(std::istream& in);
void write_token_file(std::ostream& out, const TokenSequence& tokens);

/// Byte-level tokenization ("bytes-v1", 256 ids).
TokenSequence bytes_to_tokens(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> tokens_to_bytes(const TokenSequence& tokens);

}  // namespace rankzip

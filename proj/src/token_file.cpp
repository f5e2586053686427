#include "rankzip/token_file.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "rankzip/error.hpp"

namespace rankzip {

namespace {
constexpr std::string_view kHeaderTag = "# rankzip-tokens";

std::string_view field(std::string_view line, std::string_view key) {
    const auto at = line.find(key);
    if (at == std::string_view::npos) return {};
    auto rest = line.substr(at + key.size());
    return rest.substr(0, rest.find(' '));
}
}  // namespace

TokenSequence read_token_file(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !line.starts_with(kHeaderTag)) {
        fail(ErrorCode::InvalidArgument, "token file must start with '# rankzip-tokens vocab=<id> size=<n>'");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto id = field(line, " vocab=");
    const auto size_text = field(line, " size=");
    std::uint32_t size = 0;
    if (id.empty() || std::from_chars(size_text.data(), size_text.data() + size_text.size(), size).ec != std::errc{}) {
        fail(ErrorCode::InvalidArgument, "malformed token file header");
    }
    TokenSequence tokens(Vocabulary(size, std::string(id)));
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TokenId t = 0;
        const auto [end, ec] = std::from_chars(line.data(), line.data() + line.size(), t);
        if (ec != std::errc{} || end != line.data() + line.size() || t >= size) {
            fail(ErrorCode::InvalidArgument, "bad token id at line " + std::to_string(lineno));
        }
        tokens.push_back(t);
    }
    return tokens;
}

void write_token_file(std::ostream& out, const TokenSequence& tokens) {
    out << kHeaderTag << " vocab=" << tokens.vocab().identifier() << " size=" << tokens.vocab().size() << '\n';
    for (TokenId t : tokens.values()) out << t << '\n';
}

TokenSequence bytes_to_tokens(std::span<const std::uint8_t> bytes) {
    return TokenSequence(Vocabulary::bytes(), std::vector<std::uint32_t>(bytes.begin(), bytes.end()));
}

std::vector<std::uint8_t> tokens_to_bytes(const TokenSequence& tokens) {
    require_same_vocab(Vocabulary::bytes(), tokens.vocab());
    return std::vector<std::uint8_t>(tokens.values().begin(), tokens.values().end());
}

}  // namespace rankzip

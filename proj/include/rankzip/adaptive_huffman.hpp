#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rankzip/bitstream.hpp"

namespace rankzip {

/// FGK dynamic Huffman tree. Encoder and decoder each own one and apply the
/// same update after every symbol, so their trees stay identical.
///
/// Nodes are stored in implicit-number order: index 0 is the root (highest
/// number) and weights never increase with the index. Siblings of equal
/// weight form a block whose leader is the block's lowest index.
class AdaptiveHuffmanTree {
public:
    explicit AdaptiveHuffmanTree(std::uint32_t alphabet);

    void encode(std::uint32_t symbol, BitWriter& out);
    std::uint32_t decode(BitReader& in);

    struct NodeState {
        std::uint64_t weight;
        std::int32_t parent;
        std::int32_t zero;
        std::int32_t one;
        std::int64_t symbol;  // >= 0 leaf, -1 internal, -2 escape
        bool operator==(const NodeState&) const = default;
    };
    std::vector<NodeState> snapshot() const;

    /// Sum over leaves of weight * depth: the number of bits the current
    /// tree would spend re-coding every symbol seen so far.
    std::uint64_t weighted_path_length() const;

    std::size_t distinct_symbols() const noexcept { return leaf_.size(); }
    unsigned escape_bits() const noexcept { return escape_bits_; }

private:
    static constexpr std::int64_t kInternal = -1;
    static constexpr std::int64_t kEscape = -2;

    struct Node {
        std::uint64_t weight = 0;
        std::int32_t parent = -1;
        std::int32_t child[2] = {-1, -1};
        std::int64_t symbol = kInternal;
    };

    void emit_path(std::int32_t node, BitWriter& out);
    std::int32_t spawn(std::uint32_t symbol);
    void update(std::int32_t node);
    void swap_nodes(std::int32_t a, std::int32_t b);
    void adopt(std::int32_t at);

    std::uint32_t alphabet_;
    unsigned escape_bits_;
    std::vector<Node> nodes_;
    std::unordered_map<std::uint32_t, std::int32_t> leaf_;
    std::int32_t escape_ = 0;
    std::vector<bool> path_scratch_;
};

}  // namespace rankzip

#include "rankzip/adaptive_huffman.hpp"

#include <bit>
#include <utility>

#include "rankzip/entropy.hpp"
#include "rankzip/error.hpp"

namespace rankzip {

AdaptiveHuffmanTree::AdaptiveHuffmanTree(std::uint32_t alphabet)
    : alphabet_(alphabet), escape_bits_(static_cast<unsigned>(std::bit_width(alphabet - 1))) {
    if (alphabet < 2) fail(ErrorCode::InvalidArgument, "alphabet must hold at least two symbols");
    Node root;
    root.symbol = kEscape;
    nodes_.push_back(root);
}

void AdaptiveHuffmanTree::emit_path(std::int32_t node, BitWriter& out) {
    auto& bits = path_scratch_;
    bits.clear();
    while (node != 0) {
        const std::int32_t parent = nodes_[node].parent;
        bits.push_back(nodes_[parent].child[1] == node);
        node = parent;
    }
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) out.put(*it);
}

std::int32_t AdaptiveHuffmanTree::spawn(std::uint32_t symbol) {
    const std::int32_t old = escape_;
    const auto leaf = static_cast<std::int32_t>(nodes_.size());
    const std::int32_t esc = leaf + 1;

    Node l;
    l.parent = old;
    l.symbol = symbol;
    Node e;
    e.parent = old;
    e.symbol = kEscape;
    nodes_.push_back(l);
    nodes_.push_back(e);

    nodes_[old].symbol = kInternal;
    nodes_[old].child[0] = esc;
    nodes_[old].child[1] = leaf;
    escape_ = esc;
    leaf_[symbol] = leaf;
    return leaf;
}

void AdaptiveHuffmanTree::adopt(std::int32_t at) {
    Node& n = nodes_[at];
    if (n.symbol == kInternal) {
        nodes_[n.child[0]].parent = at;
        nodes_[n.child[1]].parent = at;
    } else if (n.symbol == kEscape) {
        escape_ = at;
    } else {
        leaf_[static_cast<std::uint32_t>(n.symbol)] = at;
    }
}

// Exchanges the subtrees rooted at two positions of equal weight. Positions
// keep their parent links; only the contents move.
void AdaptiveHuffmanTree::swap_nodes(std::int32_t a, std::int32_t b) {
    std::swap(nodes_[a].child, nodes_[b].child);
    std::swap(nodes_[a].symbol, nodes_[b].symbol);
    adopt(a);
    adopt(b);
}

void AdaptiveHuffmanTree::update(std::int32_t q) {
    for (;;) {
        const std::uint64_t w = nodes_[q].weight;
        std::int32_t leader = q;
        while (leader > 0 && nodes_[leader - 1].weight == w) --leader;
        if (leader != q && leader != nodes_[q].parent) {
            swap_nodes(q, leader);
            q = leader;
        }
        ++nodes_[q].weight;
        if (q == 0) return;
        q = nodes_[q].parent;
    }
}

void AdaptiveHuffmanTree::encode(std::uint32_t symbol, BitWriter& out) {
    if (symbol >= alphabet_) fail(ErrorCode::InvalidArgument, "symbol outside the alphabet");
    std::int32_t node;
    if (const auto it = leaf_.find(symbol); it != leaf_.end()) {
        node = it->second;
        emit_path(node, out);
    } else {
        emit_path(escape_, out);
        out.put_bits(symbol, escape_bits_);
        node = spawn(symbol);
    }
    update(node);
}

std::uint32_t AdaptiveHuffmanTree::decode(BitReader& in) {
    std::int32_t node = 0;
    while (nodes_[node].symbol == kInternal) node = nodes_[node].child[in.get() ? 1 : 0];
    std::uint32_t symbol;
    if (nodes_[node].symbol == kEscape) {
        symbol = in.get_bits(escape_bits_);
        if (symbol >= alphabet_) fail(ErrorCode::CorruptStream, "escaped symbol outside the alphabet");
        if (leaf_.contains(symbol)) fail(ErrorCode::CorruptStream, "escape for an already-seen symbol");
        node = spawn(symbol);
    } else {
        symbol = static_cast<std::uint32_t>(nodes_[node].symbol);
    }
    update(node);
    return symbol;
}

std::vector<AdaptiveHuffmanTree::NodeState> AdaptiveHuffmanTree::snapshot() const {
    std::vector<NodeState> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) out.push_back({n.weight, n.parent, n.child[0], n.child[1], n.symbol});
    return out;
}

std::uint64_t AdaptiveHuffmanTree::weighted_path_length() const {
    // Parents always precede their children in number order.
    std::vector<std::uint32_t> depth(nodes_.size(), 0);
    std::uint64_t total = 0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        depth[i] = depth[static_cast<std::size_t>(nodes_[i].parent)] + 1;
        if (nodes_[i].symbol != kInternal) total += nodes_[i].weight * depth[i];
    }
    return total;
}

Bitstream adaptive_huffman_encode(std::span<const std::uint32_t> symbols, std::uint32_t alphabet,
                                  CodingStats* stats) {
    AdaptiveHuffmanTree tree(alphabet);
    BitWriter out;
    for (std::uint32_t s : symbols) tree.encode(s, out);
    Bitstream bs = std::move(out).finish(Backend::AdaptiveHuffman);
    if (stats) *stats = CodingStats{symbols.size(), bs.bit_length, std::nullopt};
    return bs;
}

std::vector<std::uint32_t> adaptive_huffman_decode(const Bitstream& bs, std::uint32_t alphabet, std::size_t count) {
    if (bs.backend != Backend::AdaptiveHuffman) fail(ErrorCode::InvalidArgument, "not an adaptive Huffman bitstream");
    if (bs.bit_length > 8 * static_cast<std::uint64_t>(bs.bytes.size())) {
        fail(ErrorCode::CorruptStream, "bit length exceeds the payload");
    }
    AdaptiveHuffmanTree tree(alphabet);
    BitReader in(bs);
    std::vector<std::uint32_t> out;
    // Every symbol costs at least one bit.
    if (count > bs.bit_length) fail(ErrorCode::LengthMismatch, "payload too short for the declared count");
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(tree.decode(in));
    if (in.remaining() >= 8) fail(ErrorCode::LengthMismatch, "payload holds more data than the declared count");
    while (in.remaining() > 0) {
        if (in.get()) fail(ErrorCode::CorruptStream, "non-zero padding bits");
    }
    return out;
}

Bitstream adaptive_huffman_encode(const RankSequence& ranks, CodingStats* stats) {
    return adaptive_huffman_encode(ranks.values(), ranks.vocab().size(), stats);
}

RankSequence adaptive_huffman_decode(const Bitstream& bs, const Vocabulary& vocab, std::size_t count) {
    return RankSequence(vocab, adaptive_huffman_decode(bs, vocab.size(), count));
}

}  // namespace rankzip

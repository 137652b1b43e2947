#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bct/sequence.hpp"

namespace bct {

/// A proper m-ary tree model given by its leaf contexts, each read
/// most-recent-symbol-first. Leaves are kept in depth-first child order,
/// which is canonical for a proper tree.
struct TreeModel {
    std::vector<std::vector<symbol_t>> leaves;

    std::uint32_t depth() const;
    std::size_t leaf_count() const { return leaves.size(); }
    std::size_t leaves_at_depth(std::uint32_t d) const;

    /// Index of the unique leaf that suffixes the given recent history
    /// (most-recent-first, length >= depth()).
    std::size_t leaf_for(std::span<const symbol_t> recent) const;

    /// True when every internal node has exactly m children; the root-only
    /// tree (single empty leaf) is proper.
    bool is_proper(std::uint32_t m) const;

    /// Canonical text key, e.g. "0;1,0;1,1;1,2;2" ("-" for the root-only tree).
    std::string key() const;

    static TreeModel root_only() { return TreeModel{{{}}}; }

    bool operator==(const TreeModel& other) const { return leaves == other.leaves; }
};

/// Per-leaf next-symbol distributions, flattened row-major in leaf order.
struct ParamSet {
    std::uint32_t m = 0;
    std::vector<double> theta;  // leaf_count * m

    std::span<const double> row(std::size_t leaf) const {
        return {theta.data() + leaf * m, m};
    }
    std::span<double> row(std::size_t leaf) {
        return {theta.data() + leaf * m, m};
    }
    std::size_t rows() const { return m == 0 ? 0 : theta.size() / m; }
};

/// A fully specified variable-memory chain.
struct ChainSpec {
    Alphabet alphabet;
    TreeModel tree;
    ParamSet params;

    /// All conditional probabilities strictly positive (required for the
    /// exact entropy path).
    bool positive() const;
    std::uint32_t depth() const { return tree.depth(); }
    void validate() const;
};

/// Trie over leaf contexts for O(depth) suffix-to-leaf lookup on hot paths.
class LeafIndex {
  public:
    LeafIndex(const TreeModel& tree, std::uint32_t m);

    /// Leaf index suffixing the recent history (most-recent-first); the
    /// history must be at least as long as the tree depth.
    std::size_t lookup(std::span<const symbol_t> recent) const;

  private:
    std::uint32_t m_;
    std::int64_t root_leaf_ = -1;
    // internal node = m consecutive slots; slot > 0: child base + 1,
    // slot < 0: ~leaf index, slot == 0: unset
    std::vector<std::int64_t> slots_;
};

/// Format a context most-recent-first ("-" when empty); digits for m <= 10,
/// comma-separated integers otherwise.
std::string format_context(std::span<const symbol_t> ctx, std::uint32_t m);

/// Inverse of format_context.
std::vector<symbol_t> parse_context(const std::string& text, std::uint32_t m);

}  // namespace bct

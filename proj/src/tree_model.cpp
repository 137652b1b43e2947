#include "bct/tree_model.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "bct/error.hpp"

namespace bct {

std::uint32_t TreeModel::depth() const {
    std::size_t d = 0;
    for (const auto& leaf : leaves) d = std::max(d, leaf.size());
    return static_cast<std::uint32_t>(d);
}

std::size_t TreeModel::leaves_at_depth(std::uint32_t d) const {
    std::size_t count = 0;
    for (const auto& leaf : leaves)
        if (leaf.size() == d) ++count;
    return count;
}

std::size_t TreeModel::leaf_for(std::span<const symbol_t> recent) const {
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const auto& leaf = leaves[i];
        if (leaf.size() > recent.size()) continue;
        bool match = true;
        for (std::size_t k = 0; k < leaf.size(); ++k) {
            if (leaf[k] != recent[k]) {
                match = false;
                break;
            }
        }
        if (match) return i;
    }
    throw internal_error("no leaf suffixes the given history (improper tree?)");
}

namespace {

// Trie walk over the leaf set; each reachable internal node must have all m
// children and no leaf may be an ancestor of another.
bool check_proper(const std::vector<std::vector<symbol_t>>& leaves, std::uint32_t m,
                  std::vector<symbol_t>& prefix, std::size_t depth) {
    int exact = 0;
    bool deeper = false;
    for (const auto& leaf : leaves) {
        if (leaf.size() < depth) continue;
        bool matches = true;
        for (std::size_t k = 0; k < depth; ++k) {
            if (leaf[k] != prefix[k]) {
                matches = false;
                break;
            }
        }
        if (!matches) continue;
        if (leaf.size() == depth)
            ++exact;
        else
            deeper = true;
    }
    if (exact > 1) return false;              // duplicate leaf
    if (exact == 1 && deeper) return false;   // leaf is an ancestor of another leaf
    if (exact == 1) return true;              // proper leaf here
    if (!deeper) return false;                // dangling internal node
    for (symbol_t j = 0; j < m; ++j) {
        prefix.push_back(j);
        const bool ok = check_proper(leaves, m, prefix, depth + 1);
        prefix.pop_back();
        if (!ok) return false;
    }
    return true;
}

}  // namespace

bool TreeModel::is_proper(std::uint32_t m) const {
    if (leaves.empty()) return false;
    for (const auto& leaf : leaves)
        for (symbol_t s : leaf)
            if (s >= m) return false;
    std::vector<symbol_t> prefix;
    return check_proper(leaves, m, prefix, 0);
}

std::string TreeModel::key() const {
    std::string out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (i > 0) out += ';';
        if (leaves[i].empty()) {
            out += '-';
        } else {
            for (std::size_t k = 0; k < leaves[i].size(); ++k) {
                if (k > 0) out += ',';
                out += std::to_string(leaves[i][k]);
            }
        }
    }
    return out;
}

LeafIndex::LeafIndex(const TreeModel& tree, std::uint32_t m) : m_(m) {
    if (tree.leaf_count() == 1 && tree.leaves[0].empty()) {
        root_leaf_ = 0;
        return;
    }
    slots_.assign(m_, 0);
    for (std::size_t i = 0; i < tree.leaves.size(); ++i) {
        const auto& leaf = tree.leaves[i];
        std::size_t base = 0;
        for (std::size_t k = 0; k < leaf.size(); ++k) {
            // index, not a reference: the resize below invalidates references
            const std::size_t at = base + leaf[k];
            if (k + 1 == leaf.size()) {
                slots_[at] = -static_cast<std::int64_t>(i) - 1;
            } else {
                if (slots_[at] == 0) {
                    slots_[at] = static_cast<std::int64_t>(slots_.size()) + 1;
                    slots_.resize(slots_.size() + m_, 0);
                }
                base = static_cast<std::size_t>(slots_[at] - 1);
            }
        }
    }
}

std::size_t LeafIndex::lookup(std::span<const symbol_t> recent) const {
    if (root_leaf_ >= 0) return static_cast<std::size_t>(root_leaf_);
    std::size_t base = 0;
    for (std::size_t k = 0; k < recent.size(); ++k) {
        const std::int64_t slot = slots_[base + recent[k]];
        if (slot < 0) return static_cast<std::size_t>(-slot - 1);
        if (slot == 0) break;
        base = static_cast<std::size_t>(slot - 1);
    }
    throw internal_error("history does not reach a leaf (improper tree or short history)");
}

bool ChainSpec::positive() const {
    for (double v : params.theta)
        if (!(v > 0.0)) return false;
    return true;
}

void ChainSpec::validate() const {
    if (!tree.is_proper(alphabet.m))
        throw data_error("leaf contexts do not form a proper tree");
    if (params.m != alphabet.m || params.rows() != tree.leaf_count())
        throw data_error("parameter table shape does not match tree");
    for (std::size_t i = 0; i < tree.leaf_count(); ++i) {
        double sum = 0.0;
        for (double v : params.row(i)) {
            if (v < 0.0) throw data_error("negative probability in theta row " + std::to_string(i));
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw data_error("theta row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
}

std::string format_context(std::span<const symbol_t> ctx, std::uint32_t m) {
    if (ctx.empty()) return "-";
    std::string out;
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        if (m <= 10) {
            out += static_cast<char>('0' + ctx[k]);
        } else {
            if (k > 0) out += ',';
            out += std::to_string(ctx[k]);
        }
    }
    return out;
}

std::vector<symbol_t> parse_context(const std::string& text, std::uint32_t m) {
    std::vector<symbol_t> ctx;
    if (text == "-") return ctx;
    if (m <= 10 && text.find(',') == std::string::npos) {
        for (char c : text) {
            if (c < '0' || c > '9') throw data_error("invalid context '" + text + "'");
            const symbol_t s = static_cast<symbol_t>(c - '0');
            if (s >= m) throw data_error("context symbol out of range in '" + text + "'");
            ctx.push_back(s);
        }
        return ctx;
    }
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t j = text.find(',', i);
        if (j == std::string::npos) j = text.size();
        unsigned long v = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, v);
        if (ec != std::errc() || ptr != text.data() + j || v >= m)
            throw data_error("invalid context '" + text + "'");
        ctx.push_back(static_cast<symbol_t>(v));
        i = j + 1;
    }
    return ctx;
}

}  // namespace bct

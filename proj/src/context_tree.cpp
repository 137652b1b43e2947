#include "bct/context_tree.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace bct {

double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

double log_pe_counts(std::span<const std::uint64_t> counts) {
    const double m = static_cast<double>(counts.size());
    std::uint64_t total = 0;
    double num = 0.0;
    for (std::uint64_t a : counts) {
        total += a;
        if (a > 0) num += std::lgamma(static_cast<double>(a) + 0.5);
    }
    if (total == 0) return 0.0;
    std::size_t nonzero = 0;
    for (std::uint64_t a : counts)
        if (a > 0) ++nonzero;
    num -= static_cast<double>(nonzero) * std::lgamma(0.5);
    const double den = std::lgamma(m / 2.0 + static_cast<double>(total)) - std::lgamma(m / 2.0);
    return num - den;
}

double log_pe_increment(std::span<const std::uint64_t> counts, symbol_t j) {
    const double m = static_cast<double>(counts.size());
    std::uint64_t total = 0;
    for (std::uint64_t a : counts) total += a;
    return std::log((static_cast<double>(counts[j]) + 0.5) /
                    (static_cast<double>(total) + m / 2.0));
}

ContextTree::ContextTree(Alphabet alphabet, const PriorConfig& cfg)
    : alphabet_(alphabet), cfg_(cfg), dense_(alphabet.m <= kDenseChildLimit) {
    add_node(0);
}

ContextTree::node_t ContextTree::add_node(std::uint32_t depth) {
    const node_t v = static_cast<node_t>(totals_.size());
    counts_.resize(counts_.size() + alphabet_.m, 0);
    totals_.push_back(0);
    log_pe_.push_back(0.0);
    log_pw_.push_back(0.0);
    depths_.push_back(depth);
    if (dense_) dense_children_.resize(dense_children_.size() + alphabet_.m, kNone);
    return v;
}

ContextTree::node_t ContextTree::child(node_t v, symbol_t j) const {
    if (dense_) return dense_children_[static_cast<std::size_t>(v) * alphabet_.m + j];
    const auto it = sparse_children_.find(static_cast<std::uint64_t>(v) * alphabet_.m + j);
    return it == sparse_children_.end() ? kNone : it->second;
}

bool ContextTree::is_leaf(node_t v) const {
    if (depths_[v] >= cfg_.depth) return true;
    for (symbol_t j = 0; j < alphabet_.m; ++j)
        if (child(v, j) != kNone) return false;
    return true;
}

ContextTree::node_t ContextTree::get_or_add_child(node_t v, symbol_t j) {
    node_t c = child(v, j);
    if (c != kNone) return c;
    c = add_node(depths_[v] + 1);
    if (dense_)
        dense_children_[static_cast<std::size_t>(v) * alphabet_.m + j] = c;
    else
        sparse_children_[static_cast<std::uint64_t>(v) * alphabet_.m + j] = c;
    return c;
}

void ContextTree::score_symbol(node_t v, symbol_t j) {
    const std::size_t base = static_cast<std::size_t>(v) * alphabet_.m;
    log_pe_[v] += std::log((static_cast<double>(counts_[base + j]) + 0.5) /
                           (static_cast<double>(totals_[v]) + alphabet_.m / 2.0));
    ++counts_[base + j];
    ++totals_[v];
}

ContextTree ContextTree::build(const Sequence& x, const PriorConfig& cfg) {
    if (x.symbols.empty()) throw data_error("empty input sequence");
    const std::uint32_t D = cfg.depth;

    ContextTree tree(x.alphabet, cfg);
    // ext = initial context (length D, time order) followed by the scored
    // symbols; when no context is given the first D symbols serve as one.
    std::vector<symbol_t> ext;
    if (x.initial_context.size() >= D) {
        ext.assign(x.initial_context.end() - D, x.initial_context.end());
        ext.insert(ext.end(), x.symbols.begin(), x.symbols.end());
    } else if (x.initial_context.empty()) {
        if (x.symbols.size() <= D)
            throw data_error("sequence of length " + std::to_string(x.symbols.size()) +
                             " too short to consume a depth-" + std::to_string(D) +
                             " initial context");
        ext = x.symbols;
        tree.context_consumed_ = D > 0;
    } else {
        throw data_error("initial context length " + std::to_string(x.initial_context.size()) +
                         " shorter than depth bound " + std::to_string(D));
    }
    tree.context_used_.assign(ext.begin(), ext.begin() + D);
    tree.n_scored_ = ext.size() - D;

    for (std::size_t i = D; i < ext.size(); ++i) {
        const symbol_t sym = ext[i];
        node_t v = kRoot;
        tree.score_symbol(v, sym);
        for (std::uint32_t k = 1; k <= D; ++k) {
            v = tree.get_or_add_child(v, ext[i - k]);
            tree.score_symbol(v, sym);
        }
    }
    return tree;
}

ContextTree ContextTree::prior_only(Alphabet alphabet, const PriorConfig& cfg) {
    ContextTree tree(alphabet, cfg);
    tree.weighted_ = true;
    return tree;
}

void ContextTree::compute_weighted() {
    const double log_beta = cfg_.log_beta();
    const double log_1mbeta = cfg_.log_1mbeta();
    // children always carry larger indices than their parent
    for (std::size_t i = totals_.size(); i-- > 0;) {
        const node_t v = static_cast<node_t>(i);
        if (depths_[v] >= cfg_.depth) {
            log_pw_[v] = log_pe_[v];
            continue;
        }
        double sum_children = 0.0;
        bool any = false;
        for (symbol_t j = 0; j < alphabet_.m; ++j) {
            const node_t c = child(v, j);
            if (c != kNone) {
                sum_children += log_pw_[c];
                any = true;
            }
        }
        log_pw_[v] = any ? log_add_exp(log_beta + log_pe_[v], log_1mbeta + sum_children)
                         : log_pe_[v];
    }
    weighted_ = true;
}

double ContextTree::log_prior_predictive() const {
    if (!weighted_) throw internal_error("weighted probabilities not computed");
    return log_pw_[kRoot];
}

double ContextTree::ctw_entropy_estimate() const {
    if (n_scored_ == 0) throw data_error("no scored symbols");
    return -log_prior_predictive() / static_cast<double>(n_scored_);
}

std::vector<std::uint64_t> ContextTree::counts_at(std::span<const symbol_t> context) const {
    const node_t v = locate(context);
    if (v == kNone) return std::vector<std::uint64_t>(alphabet_.m, 0);
    const auto counts = count_vector(v);
    return {counts.begin(), counts.end()};
}

ContextTree::node_t ContextTree::locate(std::span<const symbol_t> context) const {
    node_t v = kRoot;
    for (symbol_t j : context) {
        v = child(v, j);
        if (v == kNone) return kNone;
    }
    return v;
}

void ContextTree::dump(std::ostream& os) const {
    std::vector<std::pair<node_t, std::string>> stack;
    stack.emplace_back(kRoot, "-");
    while (!stack.empty()) {
        auto [v, label] = std::move(stack.back());
        stack.pop_back();
        os << label;
        for (symbol_t j = 0; j < alphabet_.m; ++j) os << ' ' << count(v, j);
        os << ' ' << log_pe_[v] << ' ' << log_pw_[v] << '\n';
        for (symbol_t j = alphabet_.m; j-- > 0;) {
            const node_t c = child(v, j);
            if (c == kNone) continue;
            std::string child_label = (v == kRoot) ? std::string() : label;
            if (alphabet_.m <= 10) {
                child_label += static_cast<char>('0' + j);
            } else {
                if (!child_label.empty()) child_label += ',';
                child_label += std::to_string(j);
            }
            stack.emplace_back(c, std::move(child_label));
        }
    }
}

}  // namespace bct

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "bct/prior.hpp"
#include "bct/sequence.hpp"

namespace bct {

/// Count tree over all depth-<=D contexts realized in the data, with
/// Krichevsky-Trofimov estimated probabilities and weighted (mixture)
/// probabilities held in natural-log domain.
///
/// Node paths read the context most-recent-symbol-first: the depth-1 child j
/// of the root is the context "previous symbol was j". Children absent from
/// the data are virtual zero-count nodes (log Pe = log Pw = 0) and are never
/// materialized here.
///
/// Construction is single-writer; once weighted probabilities are computed
/// the tree is frozen and safe for concurrent readers.
class ContextTree {
  public:
    using node_t = std::uint32_t;
    static constexpr node_t kNone = std::numeric_limits<node_t>::max();
    static constexpr node_t kRoot = 0;

    /// Build the maximal count tree from x. If x carries no initial context,
    /// the first D symbols are consumed as context and the remaining n-D are
    /// scored (reported via context_consumed()).
    static ContextTree build(const Sequence& x, const PriorConfig& cfg);

    /// Count-free tree (root only): weighted and estimated probabilities are
    /// all one, so posterior sampling on it reproduces the prior.
    static ContextTree prior_only(Alphabet alphabet, const PriorConfig& cfg);

    const Alphabet& alphabet() const { return alphabet_; }
    const PriorConfig& config() const { return cfg_; }

    /// Number of symbols actually scored (root total count).
    std::uint64_t scored() const { return n_scored_; }
    bool context_consumed() const { return context_consumed_; }
    /// Initial context used, in time order (empty when D = 0).
    const std::vector<symbol_t>& context_used() const { return context_used_; }

    std::size_t node_count() const { return totals_.size(); }
    std::uint32_t depth_of(node_t v) const { return depths_[v]; }
    node_t child(node_t v, symbol_t j) const;
    bool is_leaf(node_t v) const;

    std::uint64_t count(node_t v, symbol_t j) const { return counts_[static_cast<std::size_t>(v) * alphabet_.m + j]; }
    std::uint64_t total(node_t v) const { return totals_[v]; }
    std::span<const std::uint64_t> count_vector(node_t v) const {
        return {counts_.data() + static_cast<std::size_t>(v) * alphabet_.m, alphabet_.m};
    }

    double log_pe(node_t v) const { return log_pe_[v]; }
    double log_pw(node_t v) const { return log_pw_[v]; }
    bool weighted() const { return weighted_; }

    /// Bottom-up pass filling log Pw at every node (Eq.-(3)-style mixture,
    /// done stably in log domain). Freezes the tree.
    void compute_weighted();

    /// log Pw at the root: the log prior predictive likelihood of the data.
    double log_prior_predictive() const;

    /// Naive CTW entropy estimate -(1/n) log Pw_root, in nats per symbol.
    double ctw_entropy_estimate() const;

    /// Counts at an arbitrary context (most-recent-first); zeros when the
    /// context is not realized in the data.
    std::vector<std::uint64_t> counts_at(std::span<const symbol_t> context) const;

    /// Node reached by the context, or kNone if it leaves the stored tree.
    node_t locate(std::span<const symbol_t> context) const;

    /// Line-oriented debug dump: context, counts, log Pe, log Pw per node,
    /// depth-first in child order.
    void dump(std::ostream& os) const;

  private:
    ContextTree(Alphabet alphabet, const PriorConfig& cfg);

    node_t add_node(std::uint32_t depth);
    node_t get_or_add_child(node_t v, symbol_t j);
    void score_symbol(node_t v, symbol_t j);

    Alphabet alphabet_;
    PriorConfig cfg_;
    std::uint64_t n_scored_ = 0;
    bool context_consumed_ = false;
    bool weighted_ = false;
    std::vector<symbol_t> context_used_;

    // node arena; parents always precede children
    std::vector<std::uint64_t> counts_;  // node_count * m
    std::vector<std::uint64_t> totals_;
    std::vector<double> log_pe_;
    std::vector<double> log_pw_;
    std::vector<std::uint32_t> depths_;
    // dense child table for small alphabets, associative above
    static constexpr std::uint32_t kDenseChildLimit = 8;
    std::vector<node_t> dense_children_;
    std::unordered_map<std::uint64_t, node_t> sparse_children_;
    bool dense_ = true;
};

/// log(exp(a) + exp(b)) without leaving the log domain.
double log_add_exp(double a, double b);

/// Natural log of the KT estimated probability of a count vector (Eq.-(2)
/// batch form); zero when all counts are zero.
double log_pe_counts(std::span<const std::uint64_t> counts);

/// Sequential KT increment log((a_j + 1/2) / (M + m/2)) for observing j at
/// the given counts; summing increments over the data reproduces the batch
/// value exactly.
double log_pe_increment(std::span<const std::uint64_t> counts, symbol_t j);

}  // namespace bct

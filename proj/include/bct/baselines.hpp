#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bct/sequence.hpp"

namespace bct {

/// Empirical distribution of overlapping k-blocks, sorted lexicographically.
struct BlockDistribution {
    std::uint32_t k = 0;
    std::vector<std::pair<std::vector<symbol_t>, double>> table;
};

BlockDistribution block_distribution(const Sequence& x, std::uint32_t k);

/// Plug-in estimator: (1/k) * H(empirical k-block distribution).
double plugin_estimate(const Sequence& x, std::uint32_t k);

/// Match-length backend: the suffix-array index is the production path, the
/// quadratic scan exists to cross-check it.
enum class MatchSearch : std::uint8_t { Indexed, Naive };

/// Per-position match lengths for the increasing-window LZ estimator.
/// lambda[i] (0-based) = min(1 + L_i, n - i) where L_i is the longest prefix
/// of x_{i+1}.. occurring as a contiguous block inside x_1..x_i.
struct MatchLengthProfile {
    std::vector<std::uint32_t> lambda;
    std::size_t n0 = 0;  // 1-based start index of the estimator sum
};

MatchLengthProfile lz_profile(const Sequence& x, MatchSearch search = MatchSearch::Indexed);

/// Increasing-window LZ estimator:
/// [ (1/(n-n0+1)) * sum_{i=n0}^n lambda_i / log i ]^(-1), n0 = max(2, ceil(n/10)).
/// Clamped to [0, log m + 0.1]; the formula is a reconstruction from the
/// cited literature, reported as such by the CLI.
double lz_estimate(const Sequence& x, MatchSearch search = MatchSearch::Indexed);

/// PPM with interpolated smoothing (stand-in variant, labeled in output):
/// Q_k(j|s_k) = (a(j) + e_k Q_{k-1}(j|s_{k-1})) / (M + e_k), Q_{-1} = 1/m,
/// e_k = max(1, distinct symbols seen after s_k). Returns -(1/n) log Q(x).
double ppm_estimate(const Sequence& x, std::uint32_t depth = 10);

}  // namespace bct

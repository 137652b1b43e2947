#pragma once

#include <cstdint>
#include <vector>

#include "bct/posterior.hpp"
#include "bct/rng.hpp"
#include "bct/tree_model.hpp"

namespace bct {

/// Posterior-sample summary: moments, equal-tailed credible interval, and a
/// normalized equal-width histogram.
struct EntropySummary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;  // unbiased
    double level = 0.95;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> bin_edges;    // bins + 1
    std::vector<double> frequencies;  // sum to 1
};

struct EntropyPolicy {
    /// Path length M for the Eq.-style Monte Carlo fallback.
    std::uint64_t mc_length = 1000000;
    /// Dense linear solve up to this many states, power iteration above it.
    std::uint64_t dense_state_limit = 2000;
    /// Power iteration up to this many states, Monte Carlo above it.
    std::uint64_t power_state_limit = 1000000;
    /// Stream seed for per-sample Monte Carlo fallbacks.
    std::uint64_t seed = 0;
    bool force_mc = false;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct FillReport {
    std::uint64_t exact = 0;
    std::uint64_t mc = 0;
    std::uint64_t failed = 0;
};

/// Stationary distribution over A^d states (d = tree depth), oldest symbol in
/// the most significant base-m digit. Throws a data error on non-positive
/// parameters and a resource error past the power-iteration budget; both mean
/// "fall back to Monte Carlo".
std::vector<double> stationary_distribution(const ChainSpec& spec, const EntropyPolicy& policy = {});

/// H(T, theta) = -sum_s' pi(s') sum_j theta(j|s') log theta(j|s').
double entropy_rate_exact(const ChainSpec& spec, const EntropyPolicy& policy = {});

/// Monte Carlo entropy: -(1/M) log P(Y_1^M | Y_{-d+1}^0, T, theta) along one
/// simulated path, with the naive path-average standard error.
McEstimate entropy_rate_mc(const ChainSpec& spec, std::uint64_t M, RngStream& rng);

/// Fill every sample's entropy, exact when the state budget allows and Monte
/// Carlo otherwise; per-sample failures are recorded, not thrown. Parallel
/// over samples; bit-identical to fill_entropy_serial.
FillReport fill_entropy(PosteriorSampleSet& set, const EntropyPolicy& policy = {});

/// Serial reference implementation of fill_entropy.
FillReport fill_entropy_serial(PosteriorSampleSet& set, const EntropyPolicy& policy = {});

/// Linear-interpolation quantile (R type 7) of an ascending-sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double q);

/// Mean, unbiased sd, equal-tailed interval at the given level, and a
/// bin-count equal-width histogram over [min, max]. Needs >= 2 values.
EntropySummary summarize(const std::vector<double>& values, double level, std::uint32_t bins);

}  // namespace bct

#pragma once

#include <cmath>
#include <cstdint>

#include "bct/error.hpp"

namespace bct {

/// Hyperparameters of the context-tree prior: depth bound D and branching
/// weight beta, with alpha = (1-beta)^(1/(m-1)) derived.
struct PriorConfig {
    std::uint32_t depth = 10;
    double beta = 0.5;
    double alpha = 0.5;

    PriorConfig(std::uint32_t m, std::uint32_t depth_bound, double b)
        : depth(depth_bound), beta(b) {
        if (m < 2) throw data_error("alphabet size must be >= 2");
        if (!(beta > 0.0 && beta < 1.0))
            throw data_error("beta must lie in (0,1), got " + std::to_string(beta));
        alpha = std::pow(1.0 - beta, 1.0 / (static_cast<double>(m) - 1.0));
    }

    static double default_beta(std::uint32_t m) {
        return 1.0 - std::pow(2.0, -(static_cast<double>(m) - 1.0));
    }

    static PriorConfig defaults(std::uint32_t m, std::uint32_t depth_bound = 10) {
        return PriorConfig(m, depth_bound, default_beta(m));
    }

    double log_beta() const { return std::log(beta); }
    double log_1mbeta() const { return std::log1p(-beta); }
    double log_alpha() const { return std::log(alpha); }
};

}  // namespace bct

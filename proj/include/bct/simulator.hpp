#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bct/rng.hpp"
#include "bct/sequence.hpp"
#include "bct/tree_model.hpp"

namespace bct {

enum class InitialContextPolicy : std::uint8_t {
    Given,    // req.context supplies the d symbols before time 1
    BurnIn,   // start uniform, discard 10^3 + 10*d steps
};

struct SimulationRequest {
    ChainSpec spec;
    std::uint64_t length = 0;
    InitialContextPolicy policy = InitialContextPolicy::BurnIn;
    std::vector<symbol_t> context;  // time order, used by Given
    std::uint64_t seed = 0;
};

/// Stateful single-path walker over a chain; every consumer of simulated
/// paths (sequence generation, the Monte Carlo entropy fallback) steps one of
/// these so the path law lives in one place.
class ChainWalker {
  public:
    ChainWalker(const ChainSpec& spec, std::vector<symbol_t> recent_first);

    /// Walker started from uniform random symbols with 10^3 + 10*d burn-in
    /// steps discarded.
    static ChainWalker burned_in(const ChainSpec& spec, RngStream& rng);

    struct Step {
        symbol_t symbol;
        double prob;  // theta at the suffixing leaf, evaluated at symbol
    };
    Step step(RngStream& rng);

    /// Current history, most recent first.
    const std::vector<symbol_t>& recent() const { return recent_; }

  private:
    const ChainSpec* spec_;
    LeafIndex index_;
    std::vector<symbol_t> recent_;
};

/// Draw a sequence from the chain. The returned Sequence carries the realized
/// initial context (the d symbols preceding x_1) in time order.
Sequence generate(const SimulationRequest& req);

struct Fixture {
    std::string name;
    ChainSpec spec;
    double entropy;  // pinned from the exact solve at fixture-definition time
};

/// Documented fixtures: "iid-fair-coin", "binary-d1", "ternary-d2".
Fixture fixture_chain(const std::string& name);

const std::vector<std::string>& fixture_names();

/// Random proper tree grown with branch probability 1/2 down to max_depth,
/// with theta rows from a symmetric Dirichlet(concentration). Strictly
/// positive parameters; same seed gives the same spec.
ChainSpec random_chain(std::uint32_t m, std::uint32_t max_depth, double concentration,
                       std::uint64_t seed);

}  // namespace bct

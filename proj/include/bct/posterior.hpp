#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bct/context_tree.hpp"
#include "bct/rng.hpp"
#include "bct/tree_model.hpp"

namespace bct {

/// How a sample's entropy value was produced.
enum class EntropyMethod : std::uint8_t {
    Unfilled,
    Exact,
    MonteCarlo,
    Failed,
};

/// One draw (T, theta) from the joint posterior, with its entropy value
/// filled in a later pass.
struct JointSample {
    TreeModel tree;
    ParamSet params;
    double entropy = 0.0;
    EntropyMethod method = EntropyMethod::Unfilled;
    std::uint64_t index = 0;
    std::uint64_t stream_id = 0;
};

struct SampleSetOptions {
    std::uint64_t count = 100000;
    std::uint64_t seed = 0;
    /// Refuse runs whose expected sample storage exceeds this many bytes.
    std::uint64_t memory_budget_bytes = 4ull << 30;
};

struct PosteriorSampleSet {
    Alphabet alphabet;
    std::uint64_t seed = 0;
    std::vector<JointSample> samples;
};

/// Probability that the sampling procedure stops at this node:
/// beta * Pe / Pw, computed from the stored log values. Virtual zero-count
/// nodes give exactly beta.
double branch_prob(const ContextTree& tree, ContextTree::node_t node);

/// Draw one tree from the model posterior by the branching walk: stop at a
/// node with probability beta*Pe/Pw, otherwise recurse into all m children;
/// depth-D nodes always stop. Zero-count children below the stored tree are
/// visited with branch probability beta and never materialized.
TreeModel sample_tree(const ContextTree& tree, RngStream& rng);

/// Draw theta | T, x: independent Dirichlet(1/2 + counts) at every leaf of T
/// (plain Dir(1/2,...,1/2) for leaves with no data).
ParamSet sample_params(const TreeModel& model, const ContextTree& tree, RngStream& rng);

/// N i.i.d. draws from the joint posterior. Sample i consumes only the
/// stream keyed by (seed, i), so any parallel schedule reproduces the serial
/// result exactly. Entropy fields are left unfilled.
PosteriorSampleSet sample_joint(const ContextTree& tree, const SampleSetOptions& opts);

/// Serial reference implementation of sample_joint (kept for testing and
/// benchmarking against the parallel kernel).
PosteriorSampleSet sample_joint_serial(const ContextTree& tree, const SampleSetOptions& opts);

/// Expected byte footprint of one posterior draw, computed exactly from the
/// branch probabilities (no randomness); used for the memory budget check.
double expected_sample_bytes(const ContextTree& tree);

}  // namespace bct

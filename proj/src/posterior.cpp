#include "bct/posterior.hpp"

#include <algorithm>
#include <cmath>

#include "bct/parallel.hpp"

namespace bct {

double branch_prob(const ContextTree& tree, ContextTree::node_t node) {
    if (node == ContextTree::kNone) return tree.config().beta;
    const double lp = tree.config().log_beta() + tree.log_pe(node) - tree.log_pw(node);
    return std::min(1.0, std::exp(lp));
}

namespace {

struct WalkFrame {
    ContextTree::node_t node;  // kNone below the stored tree
    std::vector<symbol_t> ctx;
};

}  // namespace

TreeModel sample_tree(const ContextTree& tree, RngStream& rng) {
    if (!tree.weighted()) throw internal_error("sample_tree requires weighted probabilities");
    const std::uint32_t m = tree.alphabet().m;
    const std::uint32_t D = tree.config().depth;

    TreeModel model;
    if (D == 0) {
        model.leaves.push_back({});
        return model;
    }

    // explicit DFS, children visited in symbol order so the draw sequence fed
    // to the stream is canonical regardless of tree shape
    std::vector<WalkFrame> stack;
    stack.push_back({ContextTree::kRoot, {}});
    while (!stack.empty()) {
        WalkFrame f = std::move(stack.back());
        stack.pop_back();
        const std::uint32_t depth = static_cast<std::uint32_t>(f.ctx.size());
        const bool stop = depth == D || rng.uniform() < branch_prob(tree, f.node);
        if (stop) {
            model.leaves.emplace_back(std::move(f.ctx));
            continue;
        }
        for (symbol_t j = m; j-- > 0;) {
            WalkFrame child;
            child.node = f.node == ContextTree::kNone ? ContextTree::kNone : tree.child(f.node, j);
            child.ctx = f.ctx;
            child.ctx.push_back(j);
            stack.push_back(std::move(child));
        }
    }
    return model;
}

ParamSet sample_params(const TreeModel& model, const ContextTree& tree, RngStream& rng) {
    const std::uint32_t m = tree.alphabet().m;
    ParamSet params;
    params.m = m;
    params.theta.resize(model.leaf_count() * m);
    std::vector<double> shapes(m);
    for (std::size_t i = 0; i < model.leaf_count(); ++i) {
        const auto counts = tree.counts_at(model.leaves[i]);
        for (std::uint32_t j = 0; j < m; ++j)
            shapes[j] = static_cast<double>(counts[j]) + 0.5;
        rng.dirichlet(shapes, params.row(i));
    }
    return params;
}

namespace {

JointSample draw_one(const ContextTree& tree, std::uint64_t seed, std::uint64_t index) {
    RngStream rng(seed, StreamPurpose::TreeSample, index);
    JointSample s;
    s.index = index;
    s.stream_id = rng.stream_id();
    s.tree = sample_tree(tree, rng);
    s.params = sample_params(s.tree, tree, rng);
    return s;
}

void check_budget(const ContextTree& tree, const SampleSetOptions& opts) {
    const double per_sample = expected_sample_bytes(tree);
    const double total = per_sample * static_cast<double>(opts.count);
    if (total > static_cast<double>(opts.memory_budget_bytes))
        throw resource_error("expected sample storage " + std::to_string(total / (1 << 20)) +
                             " MiB exceeds budget " +
                             std::to_string(opts.memory_budget_bytes >> 20) + " MiB");
}

}  // namespace

PosteriorSampleSet sample_joint_serial(const ContextTree& tree, const SampleSetOptions& opts) {
    if (opts.count < 1) throw data_error("sample count must be >= 1");
    check_budget(tree, opts);
    PosteriorSampleSet set{tree.alphabet(), opts.seed, {}};
    set.samples.resize(opts.count);
    for (std::uint64_t i = 0; i < opts.count; ++i) set.samples[i] = draw_one(tree, opts.seed, i);
    return set;
}

PosteriorSampleSet sample_joint(const ContextTree& tree, const SampleSetOptions& opts) {
    if (opts.count < 1) throw data_error("sample count must be >= 1");
    check_budget(tree, opts);
    PosteriorSampleSet set{tree.alphabet(), opts.seed, {}};
    set.samples.resize(opts.count);
    parallel_for(opts.count, [&](std::uint64_t i) { set.samples[i] = draw_one(tree, opts.seed, i); });
    return set;
}

double expected_sample_bytes(const ContextTree& tree) {
    const std::uint32_t m = tree.alphabet().m;
    const std::uint32_t D = tree.config().depth;
    const double beta = tree.config().beta;

    // expected leaves of a branching walk below the stored tree, by depth
    std::vector<double> virtual_leaves(D + 1, 0.0);
    for (std::uint32_t d = D + 1; d-- > 0;) {
        if (d == D)
            virtual_leaves[d] = 1.0;
        else
            virtual_leaves[d] = beta + (1.0 - beta) * m * virtual_leaves[d + 1];
    }

    // walk the stored tree accumulating reach probabilities
    double expected_leaves = 0.0;
    struct Frame {
        ContextTree::node_t node;
        std::uint32_t depth;
        double reach;
    };
    std::vector<Frame> stack{{ContextTree::kRoot, 0, 1.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.depth == D) {
            expected_leaves += f.reach;
            continue;
        }
        const double pb = branch_prob(tree, f.node);
        expected_leaves += f.reach * pb;
        const double down = f.reach * (1.0 - pb);
        if (down <= 0.0) continue;
        for (symbol_t j = 0; j < m; ++j) {
            const ContextTree::node_t c = tree.child(f.node, j);
            if (c == ContextTree::kNone)
                expected_leaves += down * virtual_leaves[f.depth + 1];
            else
                stack.push_back({c, f.depth + 1, down});
        }
    }
    // conservative per-leaf footprint: context symbols, theta row, vector
    // bookkeeping
    const double per_leaf = 4.0 * D + 8.0 * m + 48.0;
    return expected_leaves * per_leaf + sizeof(JointSample);
}

}  // namespace bct

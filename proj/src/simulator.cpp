#include "bct/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "bct/error.hpp"

namespace bct {

ChainWalker::ChainWalker(const ChainSpec& spec, std::vector<symbol_t> recent_first)
    : spec_(&spec), index_(spec.tree, spec.alphabet.m), recent_(std::move(recent_first)) {
    const std::uint32_t d = spec.depth();
    if (recent_.size() < d)
        throw data_error("initial context has " + std::to_string(recent_.size()) +
                         " symbols but the chain depth is " + std::to_string(d));
    recent_.resize(d);
    for (const symbol_t s : recent_)
        if (s >= spec.alphabet.m) throw data_error("initial context symbol out of range");
}

ChainWalker ChainWalker::burned_in(const ChainSpec& spec, RngStream& rng) {
    const std::uint32_t d = spec.depth();
    std::vector<symbol_t> recent(d);
    for (std::uint32_t k = 0; k < d; ++k)
        recent[k] = static_cast<symbol_t>(rng.uniform_int(spec.alphabet.m));
    ChainWalker walker(spec, std::move(recent));
    const std::uint64_t burn = 1000 + 10ull * d;
    for (std::uint64_t t = 0; t < burn; ++t) walker.step(rng);
    return walker;
}

ChainWalker::Step ChainWalker::step(RngStream& rng) {
    const auto row = spec_->params.row(index_.lookup(recent_));
    const auto j = static_cast<symbol_t>(rng.categorical(row));
    if (!recent_.empty()) {
        std::copy_backward(recent_.begin(), recent_.end() - 1, recent_.end());
        recent_[0] = j;
    }
    return {j, row[j]};
}

Sequence generate(const SimulationRequest& req) {
    req.spec.validate();
    if (req.length < 1) throw data_error("simulation length must be >= 1");
    RngStream rng(req.seed, StreamPurpose::Simulate, 0);

    ChainWalker walker = [&] {
        if (req.policy == InitialContextPolicy::Given) {
            // context arrives in time order, the walker wants it most recent
            // first
            std::vector<symbol_t> recent(req.context.rbegin(), req.context.rend());
            return ChainWalker(req.spec, std::move(recent));
        }
        return ChainWalker::burned_in(req.spec, rng);
    }();

    std::vector<symbol_t> context(walker.recent().rbegin(), walker.recent().rend());
    std::vector<symbol_t> out;
    out.reserve(req.length);
    for (std::uint64_t t = 0; t < req.length; ++t) out.push_back(walker.step(rng).symbol);
    return Sequence{req.spec.alphabet, std::move(out), std::move(context)};
}

namespace {

ChainSpec make_spec(std::uint32_t m, std::vector<std::vector<symbol_t>> leaves,
                    std::vector<double> theta) {
    ChainSpec spec;
    spec.alphabet = Alphabet{m};
    spec.tree = TreeModel{std::move(leaves)};
    spec.params.m = m;
    spec.params.theta = std::move(theta);
    spec.validate();
    return spec;
}

}  // namespace

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names{"iid-fair-coin", "binary-d1", "ternary-d2"};
    return names;
}

Fixture fixture_chain(const std::string& name) {
    // Entropy values pinned from the exact stationary solve when each fixture
    // was defined; the committed chain files come from `bctent fixture --write-all`.
    if (name == "iid-fair-coin")
        return {name, make_spec(2, {{}}, {0.5, 0.5}), 0.69314718055994529};
    if (name == "binary-d1")
        return {name, make_spec(2, {{0}, {1}}, {0.9, 0.1, 0.2, 0.8}), 0.38352279010702806};
    if (name == "ternary-d2")
        return {name,
                make_spec(3, {{0}, {1, 0}, {1, 1}, {1, 2}, {2}},
                          {0.1, 0.6, 0.3,
                           0.7, 0.2, 0.1,
                           0.2, 0.2, 0.6,
                           0.45, 0.45, 0.1,
                           0.3, 0.1, 0.6}),
                0.88558903243875586};
    throw data_error("unknown fixture '" + name + "'; known: iid-fair-coin, binary-d1, ternary-d2");
}

namespace {

void grow(std::vector<std::vector<symbol_t>>& leaves, std::vector<symbol_t>& ctx,
          std::uint32_t m, std::uint32_t max_depth, RngStream& rng) {
    const bool stop = ctx.size() >= max_depth || rng.uniform() < 0.5;
    if (stop) {
        leaves.push_back(ctx);
        return;
    }
    for (symbol_t j = 0; j < m; ++j) {
        ctx.push_back(j);
        grow(leaves, ctx, m, max_depth, rng);
        ctx.pop_back();
    }
}

}  // namespace

ChainSpec random_chain(std::uint32_t m, std::uint32_t max_depth, double concentration,
                       std::uint64_t seed) {
    if (m < 2) throw data_error("alphabet size must be >= 2");
    if (!(concentration > 0.0)) throw data_error("concentration must be positive");
    RngStream rng(seed, StreamPurpose::ChainBuild, 0);

    ChainSpec spec;
    spec.alphabet = Alphabet{m};
    std::vector<symbol_t> ctx;
    grow(spec.tree.leaves, ctx, m, max_depth, rng);

    spec.params.m = m;
    spec.params.theta.resize(spec.tree.leaf_count() * m);
    const std::vector<double> shapes(m, concentration);
    for (std::size_t i = 0; i < spec.tree.leaf_count(); ++i)
        rng.dirichlet(shapes, spec.params.row(i));
    spec.validate();
    return spec;
}

}  // namespace bct

#include "bct/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "bct/error.hpp"
#include "bct/parallel.hpp"
#include "bct/simulator.hpp"

namespace bct {

namespace {

// m^d as uint64, saturating so oversized trees trip the budget check instead
// of wrapping
std::uint64_t state_count(std::uint32_t m, std::uint32_t d) {
    std::uint64_t s = 1;
    for (std::uint32_t k = 0; k < d; ++k) {
        if (s > std::numeric_limits<std::uint64_t>::max() / m)
            return std::numeric_limits<std::uint64_t>::max();
        s *= m;
    }
    return s;
}

// leaf index for every state, recent-first digits read least significant
// first
std::vector<std::uint32_t> state_leaves(const ChainSpec& spec, std::uint64_t S) {
    const std::uint32_t m = spec.alphabet.m;
    const std::uint32_t d = spec.depth();
    const LeafIndex index(spec.tree, m);
    std::vector<std::uint32_t> leaf_of(S);
    std::vector<symbol_t> recent(d);
    for (std::uint64_t v = 0; v < S; ++v) {
        std::uint64_t rest = v;
        for (std::uint32_t k = 0; k < d; ++k) {
            recent[k] = static_cast<symbol_t>(rest % m);
            rest /= m;
        }
        leaf_of[v] = static_cast<std::uint32_t>(index.lookup(recent));
    }
    return leaf_of;
}

// The solvers below see an abstract finite chain: state v carries the theta
// row row_of[v] and moves to succ(v, j) on symbol j.
template <class Succ>
double residual_l1(const ParamSet& params, const std::vector<std::uint32_t>& row_of, Succ succ,
                   const std::vector<double>& pi) {
    const std::uint32_t m = params.m;
    const std::uint64_t S = pi.size();
    std::vector<double> next(S, 0.0);
    for (std::uint64_t v = 0; v < S; ++v) {
        const auto row = params.row(row_of[v]);
        for (std::uint32_t j = 0; j < m; ++j) next[succ(v, j)] += pi[v] * row[j];
    }
    double r = 0.0;
    for (std::uint64_t v = 0; v < S; ++v) r += std::abs(next[v] - pi[v]);
    return r;
}

template <class Succ>
std::vector<double> dense_solve(const ParamSet& params, const std::vector<std::uint32_t>& row_of,
                                Succ succ, std::uint64_t S) {
    const std::uint32_t m = params.m;
    const auto n = static_cast<Eigen::Index>(S);

    // pi P = pi with sum(pi) = 1: solve (P^T - I) pi = 0, first row replaced
    // by the normalization
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (std::uint64_t v = 0; v < S; ++v) {
        const auto row = params.row(row_of[v]);
        for (std::uint32_t j = 0; j < m; ++j)
            A(static_cast<Eigen::Index>(succ(v, j)), static_cast<Eigen::Index>(v)) += row[j];
    }
    A.diagonal().array() -= 1.0;
    A.row(0).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(0) = 1.0;
    const Eigen::VectorXd x = A.partialPivLu().solve(b);

    std::vector<double> pi(S);
    double total = 0.0;
    for (std::uint64_t v = 0; v < S; ++v) {
        pi[v] = std::max(0.0, x(static_cast<Eigen::Index>(v)));
        total += pi[v];
    }
    for (auto& p : pi) p /= total;
    return pi;
}

template <class Succ>
std::vector<double> power_iterate(const ParamSet& params, const std::vector<std::uint32_t>& row_of,
                                  Succ succ, std::vector<double> pi) {
    const std::uint32_t m = params.m;
    const std::uint64_t S = pi.size();
    std::vector<double> next(S);
    for (std::uint64_t iter = 0; iter < 100000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint64_t v = 0; v < S; ++v) {
            const auto row = params.row(row_of[v]);
            for (std::uint32_t j = 0; j < m; ++j) next[succ(v, j)] += pi[v] * row[j];
        }
        double diff = 0.0, total = 0.0;
        for (std::uint64_t v = 0; v < S; ++v) {
            diff += std::abs(next[v] - pi[v]);
            total += next[v];
        }
        for (auto& p : next) p /= total;
        pi.swap(next);
        // stop two decades below the 1e-10 postcondition so the final
        // residual check cannot trip on the last normalization
        if (diff <= 1e-12) return pi;
    }
    throw resource_error("power iteration did not reach residual 1e-12 in 100000 steps; "
                         "use the Monte Carlo fallback");
}

// The LU factorization is cubic in S while one iteration sweep is linear, so
// iterate first beyond genuinely small systems; posterior fills land here
// once per sample. The dense solve stays primary for tiny systems and is the
// rescue when iteration stalls inside the dense budget.
template <class Succ>
std::vector<double> solve_states(const ParamSet& params, const std::vector<std::uint32_t>& row_of,
                                 Succ succ, std::uint64_t S, const EntropyPolicy& policy) {
    constexpr std::uint64_t kDenseFirst = 128;
    std::vector<double> pi;
    if (S <= std::min(kDenseFirst, policy.dense_state_limit)) {
        pi = dense_solve(params, row_of, succ, S);
        if (residual_l1(params, row_of, succ, pi) > 1e-10)
            pi = power_iterate(params, row_of, succ, std::move(pi));
    } else {
        try {
            pi = power_iterate(params, row_of, succ,
                               std::vector<double>(S, 1.0 / static_cast<double>(S)));
        } catch (const Error&) {
            if (S > policy.dense_state_limit) throw;
            pi = dense_solve(params, row_of, succ, S);
        }
    }

    const double res = residual_l1(params, row_of, succ, pi);
    if (res > 1e-10)
        throw internal_error("stationary residual " + std::to_string(res) + " exceeds 1e-10");
    return pi;
}

// Validations and the exact-mode budget shared by both exact entry points.
// Returns the suffix-grid state count m^d.
std::uint64_t checked_state_count(const ChainSpec& spec, const EntropyPolicy& policy) {
    spec.validate();
    if (!spec.positive())
        throw data_error("degenerate chain: a conditional probability is zero; "
                         "use the Monte Carlo fallback or floor the parameters");
    const std::uint64_t S = state_count(spec.alphabet.m, spec.depth());
    if (S > policy.power_state_limit)
        throw resource_error("stationary solve needs " + std::to_string(S) +
                             " states, above the exact-mode budget of " +
                             std::to_string(policy.power_state_limit) +
                             "; use the Monte Carlo fallback");
    return S;
}

// Minimal closed machine of the model: leaves are refined until every
// (symbol, leaf) pair determines the next leaf without older history, the
// classic finite-state construction for variable-memory chains. A tree made
// of a shallow core plus deep whiskers collapses to a handful of states where
// the full suffix grid would need m^depth, which is what makes per-sample
// exact entropy fills affordable.
struct Machine {
    std::vector<std::uint32_t> row_of;  // state -> theta row of the model leaf
    std::vector<std::uint32_t> to;      // state * m + j -> next state
};

Machine closed_machine(const ChainSpec& spec) {
    const std::uint32_t m = spec.alphabet.m;

    struct Node {
        std::int32_t parent = -1;
        std::int32_t kids = -1;  // base index into kid_tab, -1 = leaf
        std::int32_t row = -1;   // theta row inherited at and below a model leaf
        symbol_t sym = 0;        // edge label from the parent
    };
    std::vector<Node> nodes(1);
    std::vector<std::int32_t> kid_tab;

    auto split = [&](std::int32_t u) {
        const std::int32_t row = nodes[u].row;
        nodes[u].kids = static_cast<std::int32_t>(kid_tab.size());
        for (std::uint32_t j = 0; j < m; ++j) {
            kid_tab.push_back(static_cast<std::int32_t>(nodes.size()));
            Node child;
            child.parent = u;
            child.row = row;
            child.sym = static_cast<symbol_t>(j);
            nodes.push_back(child);
        }
    };

    for (std::size_t i = 0; i < spec.tree.leaves.size(); ++i) {
        std::int32_t u = 0;
        for (const symbol_t s : spec.tree.leaves[i]) {
            if (nodes[u].kids < 0) split(u);
            u = kid_tab[nodes[u].kids + s];
        }
        nodes[u].row = static_cast<std::int32_t>(i);
    }

    std::vector<symbol_t> path;  // root-to-node edge labels = context, recent first
    auto load_path = [&](std::int32_t u) {
        path.clear();
        for (std::int32_t v = u; v != 0; v = nodes[v].parent) path.push_back(nodes[v].sym);
        std::reverse(path.begin(), path.end());
    };
    // Walk symbol j then the context of u; the landing node is the next
    // context, or still internal when older history than u would be needed.
    auto walk = [&](std::uint32_t j) {
        std::int32_t w = kid_tab[nodes[0].kids + static_cast<std::int32_t>(j)];
        std::size_t k = 0;
        while (nodes[w].kids >= 0 && k < path.size())
            w = kid_tab[nodes[w].kids + path[k++]];
        return w;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::int32_t u = 0; u < static_cast<std::int32_t>(nodes.size()); ++u) {
            if (nodes[u].kids >= 0) continue;
            load_path(u);
            for (std::uint32_t j = 0; j < m && nodes[u].kids < 0; ++j) {
                if (nodes[walk(j)].kids >= 0) {  // ran out of known history
                    split(u);
                    changed = true;
                }
            }
        }
    }

    Machine mach;
    std::vector<std::uint32_t> state_of(nodes.size(), 0);
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const std::int32_t u = stack.back();
        stack.pop_back();
        if (nodes[u].kids < 0) {
            state_of[static_cast<std::size_t>(u)] = static_cast<std::uint32_t>(mach.row_of.size());
            mach.row_of.push_back(static_cast<std::uint32_t>(nodes[u].row));
        } else {
            for (std::uint32_t j = m; j-- > 0;) stack.push_back(kid_tab[nodes[u].kids + j]);
        }
    }

    mach.to.resize(mach.row_of.size() * m);
    for (std::int32_t u = 0; u < static_cast<std::int32_t>(nodes.size()); ++u) {
        if (nodes[u].kids >= 0) continue;
        load_path(u);
        for (std::uint32_t j = 0; j < m; ++j)
            mach.to[state_of[static_cast<std::size_t>(u)] * m + j] =
                state_of[static_cast<std::size_t>(walk(j))];
    }
    return mach;
}

}  // namespace

std::vector<double> stationary_distribution(const ChainSpec& spec, const EntropyPolicy& policy) {
    const std::uint64_t S = checked_state_count(spec, policy);
    if (spec.depth() == 0) return {1.0};

    const std::uint32_t m = spec.alphabet.m;
    const std::uint64_t shift = S / m;
    const auto leaf_of = state_leaves(spec, S);
    const auto succ = [shift, m](std::uint64_t v, std::uint32_t j) { return (v % shift) * m + j; };
    return solve_states(spec.params, leaf_of, succ, S, policy);
}

double entropy_rate_exact(const ChainSpec& spec, const EntropyPolicy& policy) {
    checked_state_count(spec, policy);
    const std::uint32_t m = spec.alphabet.m;

    // per-leaf conditional entropies, then average over states
    std::vector<double> h(spec.tree.leaf_count(), 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (const double p : spec.params.row(i))
            if (p > 0.0) h[i] -= p * std::log(p);
    }
    if (spec.depth() == 0) return std::clamp(h[0], 0.0, std::log(static_cast<double>(m)));

    const Machine mach = closed_machine(spec);
    const auto succ = [&mach, m](std::uint64_t v, std::uint32_t j) {
        return static_cast<std::uint64_t>(mach.to[v * m + j]);
    };
    const auto pi = solve_states(spec.params, mach.row_of, succ, mach.row_of.size(), policy);

    double H = 0.0;
    for (std::uint64_t v = 0; v < pi.size(); ++v) H += pi[v] * h[mach.row_of[v]];
    return std::clamp(H, 0.0, std::log(static_cast<double>(m)));
}

McEstimate entropy_rate_mc(const ChainSpec& spec, std::uint64_t M, RngStream& rng) {
    spec.validate();
    if (M < 1) throw data_error("Monte Carlo path length must be >= 1");
    const std::uint32_t m = spec.alphabet.m;

    ChainWalker walker = ChainWalker::burned_in(spec, rng);
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < M; ++t) {
        const auto [symbol, prob] = walker.step(rng);
        if (prob <= 0.0)
            throw internal_error("generated a symbol with zero conditional probability");
        const double lp = -std::log(prob);
        sum += lp;
        sum_sq += lp * lp;
    }

    McEstimate est;
    const double Md = static_cast<double>(M);
    est.value = std::clamp(sum / Md, 0.0, std::log(static_cast<double>(m)));
    if (M > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / Md) / (Md - 1.0));
        est.std_error = std::sqrt(var / Md);
    }
    return est;
}

namespace {

FillReport fill_one_range(PosteriorSampleSet& set, const EntropyPolicy& policy, bool parallel) {
    const std::uint32_t m = set.alphabet.m;
    auto fill_one = [&](std::uint64_t i) {
        JointSample& s = set.samples[i];
        ChainSpec spec{set.alphabet, s.tree, s.params};
        try {
            const std::uint64_t S = state_count(m, spec.depth());
            if (!policy.force_mc && S <= policy.power_state_limit && spec.positive()) {
                s.entropy = entropy_rate_exact(spec, policy);
                s.method = EntropyMethod::Exact;
                return;
            }
        } catch (const Error&) {
            // fall through to the Monte Carlo path
        }
        try {
            RngStream rng(policy.seed, StreamPurpose::McEntropy, s.index);
            s.entropy = entropy_rate_mc(spec, policy.mc_length, rng).value;
            s.method = EntropyMethod::MonteCarlo;
        } catch (const std::exception&) {
            s.entropy = 0.0;
            s.method = EntropyMethod::Failed;
        }
    };

    if (parallel)
        parallel_for(set.samples.size(), fill_one);
    else
        for (std::uint64_t i = 0; i < set.samples.size(); ++i) fill_one(i);

    FillReport report;
    for (const JointSample& s : set.samples) {
        switch (s.method) {
            case EntropyMethod::Exact: ++report.exact; break;
            case EntropyMethod::MonteCarlo: ++report.mc; break;
            default: ++report.failed; break;
        }
    }
    return report;
}

}  // namespace

FillReport fill_entropy(PosteriorSampleSet& set, const EntropyPolicy& policy) {
    return fill_one_range(set, policy, true);
}

FillReport fill_entropy_serial(PosteriorSampleSet& set, const EntropyPolicy& policy) {
    return fill_one_range(set, policy, false);
}

double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw data_error("quantile of an empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

EntropySummary summarize(const std::vector<double>& values, double level, std::uint32_t bins) {
    if (values.size() < 2)
        throw data_error("summary needs at least 2 values, got " + std::to_string(values.size()));
    if (!(level > 0.0 && level < 1.0))
        throw data_error("credible level must lie strictly between 0 and 1");
    if (bins < 1) throw data_error("histogram needs at least 1 bin");

    EntropySummary s;
    s.count = values.size();
    s.level = level;

    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.sd = std::sqrt(ss / (n - 1.0));

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    const double tail = (1.0 - level) / 2.0;
    s.ci_lo = sorted_quantile(sorted, tail);
    s.ci_hi = sorted_quantile(sorted, 1.0 - tail);

    if (s.max == s.min) {
        s.bin_edges = {s.min, s.max};
        s.frequencies = {1.0};
        return s;
    }
    s.bin_edges.resize(bins + 1);
    const double width = (s.max - s.min) / static_cast<double>(bins);
    for (std::uint32_t b = 0; b <= bins; ++b)
        s.bin_edges[b] = s.min + width * static_cast<double>(b);
    s.bin_edges[bins] = s.max;

    s.frequencies.assign(bins, 0.0);
    for (const double v : values) {
        auto b = static_cast<std::uint64_t>((v - s.min) / width);
        if (b >= bins) b = bins - 1;  // max lands in the last bin
        s.frequencies[b] += 1.0;
    }
    for (auto& f : s.frequencies) f /= n;
    return s;
}

}  // namespace bct

#include "bct/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <unordered_map>

#include "bct/error.hpp"

namespace bct {

namespace {

// ---- suffix-array machinery (shared by the LZ matcher and large-k blocks)

// cyclic prefix-doubling over x plus a virtual terminal symbol; the terminal
// makes cyclic-shift order equal suffix order
std::vector<std::uint32_t> suffix_array(std::span<const symbol_t> x) {
    const auto n = static_cast<std::uint32_t>(x.size());
    const std::uint32_t N = n + 1;
    std::vector<std::uint32_t> sa(N), cls(N), shifted(N), next_cls(N), sorted(N);
    std::vector<std::uint32_t> cnt;

    const auto sym = [&](std::uint32_t i) -> std::uint64_t {
        return i == n ? 0 : static_cast<std::uint64_t>(x[i]) + 1;
    };
    std::iota(sa.begin(), sa.end(), 0u);
    std::sort(sa.begin(), sa.end(),
              [&](std::uint32_t a, std::uint32_t b) { return sym(a) < sym(b); });
    std::uint32_t classes = 1;
    cls[sa[0]] = 0;
    for (std::uint32_t r = 1; r < N; ++r) {
        if (sym(sa[r]) != sym(sa[r - 1])) ++classes;
        cls[sa[r]] = classes - 1;
    }

    for (std::uint32_t len = 1; classes < N; len <<= 1) {
        // order by second half = previous order shifted left by len
        for (std::uint32_t r = 0; r < N; ++r) shifted[r] = (sa[r] + N - len) % N;
        // stable counting sort by first-half class
        cnt.assign(classes + 1, 0);
        for (std::uint32_t i = 0; i < N; ++i) ++cnt[cls[i] + 1];
        for (std::uint32_t c = 1; c <= classes; ++c) cnt[c] += cnt[c - 1];
        for (std::uint32_t r = 0; r < N; ++r) sorted[cnt[cls[shifted[r]]]++] = shifted[r];
        sa.swap(sorted);

        next_cls[sa[0]] = 0;
        classes = 1;
        for (std::uint32_t r = 1; r < N; ++r) {
            const std::uint32_t a = sa[r], b = sa[r - 1];
            if (cls[a] != cls[b] || cls[(a + len) % N] != cls[(b + len) % N]) ++classes;
            next_cls[a] = classes - 1;
        }
        cls.swap(next_cls);
    }
    return {sa.begin() + 1, sa.end()};
}

// Kasai
std::vector<std::uint32_t> lcp_array(std::span<const symbol_t> x,
                                     const std::vector<std::uint32_t>& sa,
                                     const std::vector<std::uint32_t>& rank) {
    const auto n = static_cast<std::uint32_t>(x.size());
    std::vector<std::uint32_t> lcp(n > 0 ? n - 1 : 0, 0);
    std::uint32_t h = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (rank[i] + 1 < n) {
            const std::uint32_t j = sa[rank[i] + 1];
            while (i + h < n && j + h < n && x[i + h] == x[j + h]) ++h;
            lcp[rank[i]] = h;
            if (h > 0) --h;
        } else {
            h = 0;
        }
    }
    return lcp;
}

class SparseMin {
  public:
    explicit SparseMin(std::vector<std::uint32_t> values) {
        const std::size_t n = values.size();
        levels_.push_back(std::move(values));
        for (std::size_t half = 1; half * 2 <= n; half *= 2) {
            const auto& prev = levels_.back();
            std::vector<std::uint32_t> row(prev.size() - half);
            for (std::size_t i = 0; i < row.size(); ++i)
                row[i] = std::min(prev[i], prev[i + half]);
            levels_.push_back(std::move(row));
        }
    }

    // min over the inclusive range [l, r]
    std::uint32_t query(std::size_t l, std::size_t r) const {
        const auto width = r - l + 1;
        const auto k = static_cast<std::size_t>(std::bit_width(width) - 1);
        return std::min(levels_[k][l], levels_[k][r + 1 - (std::size_t{1} << k)]);
    }

  private:
    std::vector<std::vector<std::uint32_t>> levels_;
};

// longest-match queries against every strictly earlier, fully contained block
class MatchIndex {
  public:
    explicit MatchIndex(std::span<const symbol_t> x)
        : n_(static_cast<std::uint32_t>(x.size())),
          sa_(suffix_array(x)),
          rank_(n_),
          lcp_min_(nullptr),
          start_min_(std::vector<std::uint32_t>(sa_)) {
        for (std::uint32_t r = 0; r < n_; ++r) rank_[sa_[r]] = r;
        lcp_ = lcp_array(x, sa_, rank_);
        if (!lcp_.empty()) lcp_min_ = std::make_unique<SparseMin>(lcp_);
    }

    // does x[i..i+len) occur starting at some p with p + len <= i?
    bool occurs_before(std::uint32_t i, std::uint32_t len) const {
        if (len == 0) return true;
        if (len > i) return false;
        const std::uint32_t r = rank_[i];
        // SA interval around r whose suffixes share a prefix of length >= len
        std::uint32_t left = r;
        if (r > 0) {
            std::uint32_t lo = 0, hi = r;
            while (lo < hi) {
                const std::uint32_t mid = (lo + hi) / 2;
                if (lcp_min_->query(mid, r - 1) >= len)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            left = lo;
        }
        std::uint32_t right = r;
        if (r + 1 < n_) {
            std::uint32_t lo = r, hi = n_ - 1;
            while (lo < hi) {
                const std::uint32_t mid = (lo + hi + 1) / 2;
                if (lcp_min_->query(r, mid - 1) >= len)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            right = lo;
        }
        return start_min_.query(left, right) + len <= i;
    }

    std::uint32_t size() const { return n_; }

  private:
    std::uint32_t n_;
    std::vector<std::uint32_t> sa_;
    std::vector<std::uint32_t> rank_;
    std::vector<std::uint32_t> lcp_;
    std::unique_ptr<SparseMin> lcp_min_;
    SparseMin start_min_;
};

std::uint32_t naive_match(std::span<const symbol_t> x, std::uint32_t i) {
    const auto n = static_cast<std::uint32_t>(x.size());
    std::uint32_t best = 0;
    for (std::uint32_t p = 0; p < i; ++p) {
        std::uint32_t len = 0;
        while (p + len < i && i + len < n && x[p + len] == x[i + len]) ++len;
        best = std::max(best, len);
    }
    return best;
}

}  // namespace

MatchLengthProfile lz_profile(const Sequence& x, MatchSearch search) {
    const auto n = static_cast<std::uint32_t>(x.symbols.size());
    if (n == 0) throw data_error("empty sequence");
    MatchLengthProfile profile;
    profile.n0 = std::max<std::size_t>(2, (n + 9) / 10);
    profile.lambda.resize(n);

    if (search == MatchSearch::Naive) {
        for (std::uint32_t i = 0; i < n; ++i)
            profile.lambda[i] = std::min(1 + naive_match(x.symbols, i), n - i);
        return profile;
    }

    const MatchIndex index(x.symbols);
    std::uint32_t prev = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t cap = std::min(i, n - i);
        // monotone: a length-L match before i implies a length-(L-1) match
        // before i+1, so the previous answer seeds the lower bound
        std::uint32_t lo = std::min(prev > 0 ? prev - 1 : 0, cap);
        std::uint32_t hi = cap;
        while (lo < hi) {
            const std::uint32_t mid = (lo + hi + 1) / 2;
            if (index.occurs_before(i, mid))
                lo = mid;
            else
                hi = mid - 1;
        }
        prev = lo;
        profile.lambda[i] = std::min(1 + lo, n - i);
    }
    return profile;
}

double lz_estimate(const Sequence& x, MatchSearch search) {
    const std::size_t n = x.symbols.size();
    const std::size_t n0 = std::max<std::size_t>(2, (n + 9) / 10);
    if (n < 4 * n0)
        throw data_error("LZ estimator needs n >= 4*n0 = " + std::to_string(4 * n0) +
                         " symbols, got " + std::to_string(n));
    const MatchLengthProfile profile = lz_profile(x, search);
    double total = 0.0;
    for (std::size_t i = n0; i <= n; ++i)
        total += static_cast<double>(profile.lambda[i - 1]) / std::log(static_cast<double>(i));
    const double mean = total / static_cast<double>(n - n0 + 1);
    const double cap = std::log(static_cast<double>(x.alphabet.m)) + 0.1;
    return std::clamp(1.0 / mean, 0.0, cap);
}

namespace {

// k-block codes fit a u64 exactly when m^k < 2^63
bool codable(std::uint32_t m, std::uint32_t k) {
    long double v = 1.0L;
    for (std::uint32_t i = 0; i < k; ++i) {
        v *= m;
        if (v >= 9.2e18L) return false;
    }
    return true;
}

// counts of distinct overlapping k-blocks via exact u64 encoding
std::unordered_map<std::uint64_t, std::uint64_t> block_counts_coded(std::span<const symbol_t> x,
                                                                    std::uint32_t m,
                                                                    std::uint32_t k) {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    const std::size_t n = x.size();
    counts.reserve(n - k + 2);
    std::uint64_t code = 0, high = 1;
    for (std::uint32_t i = 0; i + 1 < k; ++i) high *= m;
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= k) code -= high * x[i - k];
        code = code * m + x[i];
        if (i + 1 >= k) ++counts[code];
    }
    return counts;
}

// group sizes of equal k-blocks via the suffix array, for k too large to code
std::vector<std::uint64_t> block_group_sizes(std::span<const symbol_t> x, std::uint32_t k,
                                             std::vector<std::uint32_t>* heads) {
    const auto n = static_cast<std::uint32_t>(x.size());
    const auto sa = suffix_array(x);
    std::vector<std::uint32_t> rank(n);
    for (std::uint32_t r = 0; r < n; ++r) rank[sa[r]] = r;
    const auto lcp = lcp_array(x, sa, rank);

    std::vector<std::uint64_t> sizes;
    for (std::uint32_t r = 0; r < n; ++r) {
        if (sa[r] + k > n) continue;  // block would run off the end
        const bool fresh = sizes.empty() || r == 0 || lcp[r - 1] < k ||
                           sa[r - 1] + k > n;
        if (fresh) {
            sizes.push_back(1);
            if (heads) heads->push_back(sa[r]);
        } else {
            ++sizes.back();
        }
    }
    return sizes;
}

}  // namespace

BlockDistribution block_distribution(const Sequence& x, std::uint32_t k) {
    const std::size_t n = x.symbols.size();
    const std::uint32_t m = x.alphabet.m;
    if (k < 1 || k > n)
        throw data_error("block length k must satisfy 1 <= k <= n; got k=" + std::to_string(k) +
                         ", n=" + std::to_string(n));
    const double denom = static_cast<double>(n - k + 1);

    BlockDistribution dist;
    dist.k = k;
    if (codable(m, k)) {
        auto counts = block_counts_coded(x.symbols, m, k);
        std::vector<std::pair<std::uint64_t, std::uint64_t>> rows(counts.begin(), counts.end());
        std::sort(rows.begin(), rows.end());
        dist.table.reserve(rows.size());
        for (const auto& [code, count] : rows) {
            std::vector<symbol_t> block(k);
            std::uint64_t rest = code;
            for (std::uint32_t j = k; j-- > 0;) {
                block[j] = static_cast<symbol_t>(rest % m);
                rest /= m;
            }
            dist.table.emplace_back(std::move(block), static_cast<double>(count) / denom);
        }
        return dist;
    }

    std::vector<std::uint32_t> heads;
    const auto sizes = block_group_sizes(x.symbols, k, &heads);
    if (sizes.size() * static_cast<std::uint64_t>(k) > 50'000'000)
        throw resource_error("block table of " + std::to_string(sizes.size()) +
                             " length-" + std::to_string(k) + " blocks is too large");
    dist.table.reserve(sizes.size());
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        std::vector<symbol_t> block(x.symbols.begin() + heads[g],
                                    x.symbols.begin() + heads[g] + k);
        dist.table.emplace_back(std::move(block), static_cast<double>(sizes[g]) / denom);
    }
    return dist;
}

double plugin_estimate(const Sequence& x, std::uint32_t k) {
    const std::size_t n = x.symbols.size();
    const std::uint32_t m = x.alphabet.m;
    if (k < 1 || k > n)
        throw data_error("block length k must satisfy 1 <= k <= n; got k=" + std::to_string(k) +
                         ", n=" + std::to_string(n));
    const double denom = static_cast<double>(n - k + 1);

    double H = 0.0;
    if (codable(m, k)) {
        for (const auto& [code, count] : block_counts_coded(x.symbols, m, k)) {
            const double p = static_cast<double>(count) / denom;
            H -= p * std::log(p);
        }
    } else {
        for (const std::uint64_t count : block_group_sizes(x.symbols, k, nullptr)) {
            const double p = static_cast<double>(count) / denom;
            H -= p * std::log(p);
        }
    }
    return std::max(0.0, H / static_cast<double>(k));
}

namespace {

// context trie for PPM: per node, m child slots and m counts in flat arenas
class PpmTrie {
  public:
    explicit PpmTrie(std::uint32_t m) : m_(m) { add_node(); }

    std::uint32_t root() const { return 0; }

    std::uint32_t child(std::uint32_t node, symbol_t j) const {
        return children_[static_cast<std::size_t>(node) * m_ + j];
    }

    std::uint32_t ensure_child(std::uint32_t node, symbol_t j) {
        auto& slot = children_[static_cast<std::size_t>(node) * m_ + j];
        if (slot == 0) {
            const std::uint32_t fresh = add_node();
            children_[static_cast<std::size_t>(node) * m_ + j] = fresh;
            return fresh;
        }
        return slot;
    }

    std::uint32_t count(std::uint32_t node, symbol_t j) const {
        return counts_[static_cast<std::size_t>(node) * m_ + j];
    }
    std::uint32_t total(std::uint32_t node) const { return totals_[node]; }
    std::uint32_t distinct(std::uint32_t node) const { return distinct_[node]; }

    void record(std::uint32_t node, symbol_t j) {
        auto& c = counts_[static_cast<std::size_t>(node) * m_ + j];
        if (c == 0) ++distinct_[node];
        ++c;
        ++totals_[node];
    }

  private:
    std::uint32_t add_node() {
        const auto id = static_cast<std::uint32_t>(totals_.size());
        children_.resize(children_.size() + m_, 0);
        counts_.resize(counts_.size() + m_, 0);
        totals_.push_back(0);
        distinct_.push_back(0);
        return id;
    }

    std::uint32_t m_;
    std::vector<std::uint32_t> children_;  // 0 = absent (root is never a child)
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> totals_;
    std::vector<std::uint32_t> distinct_;
};

}  // namespace

double ppm_estimate(const Sequence& x, std::uint32_t depth) {
    const std::size_t n = x.symbols.size();
    if (n == 0) throw data_error("empty sequence");
    const std::uint32_t m = x.alphabet.m;
    PpmTrie trie(m);
    std::vector<std::uint32_t> chain;
    chain.reserve(depth + 1);

    double log_q_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const symbol_t next = x.symbols[i];
        const auto max_k = static_cast<std::uint32_t>(std::min<std::size_t>(depth, i));

        // contexts present in the trie form a prefix of the chain root,
        // x_{i-1}, x_{i-1}x_{i-2}, ...; absent ones pass Q through untouched
        chain.clear();
        chain.push_back(trie.root());
        for (std::uint32_t k = 1; k <= max_k; ++k) {
            const std::uint32_t c = trie.child(chain.back(), x.symbols[i - k]);
            if (c == 0) break;
            chain.push_back(c);
        }

        double q = 1.0 / static_cast<double>(m);
        for (const std::uint32_t node : chain) {
            const double e = std::max(1u, trie.distinct(node));
            q = (static_cast<double>(trie.count(node, next)) + e * q) /
                (static_cast<double>(trie.total(node)) + e);
        }
        log_q_total += std::log(q);

        std::uint32_t node = trie.root();
        trie.record(node, next);
        for (std::uint32_t k = 1; k <= max_k; ++k) {
            node = trie.ensure_child(node, x.symbols[i - k]);
            trie.record(node, next);
        }
    }
    return -log_q_total / static_cast<double>(n);
}

}  // namespace bct

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "bct/baselines.hpp"
#include "bct/error.hpp"
#include "bct/rng.hpp"
#include "bct/sequence.hpp"

using namespace bct;

namespace {

Sequence random_sequence(std::uint32_t m, std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, StreamPurpose::Summary, 2);
    std::vector<symbol_t> x(n);
    for (auto& s : x) s = static_cast<symbol_t>(rng.uniform_int(m));
    return Sequence(Alphabet(m), std::move(x));
}

// dictionary re-implementation of the interpolated-smoothing PPM recursion
double ppm_oracle(const Sequence& x, std::uint32_t depth) {
    struct Node {
        std::map<symbol_t, std::uint32_t> counts;
        std::uint32_t total = 0;
    };
    std::map<std::vector<symbol_t>, Node> nodes;
    const std::uint32_t m = x.alphabet.m;
    double log_q = 0.0;
    for (std::size_t i = 0; i < x.symbols.size(); ++i) {
        const symbol_t next = x.symbols[i];
        const auto max_k = static_cast<std::uint32_t>(std::min<std::size_t>(depth, i));
        double q = 1.0 / m;
        std::vector<symbol_t> ctx;
        for (std::uint32_t k = 0; k <= max_k; ++k) {
            if (k > 0) ctx.push_back(x.symbols[i - k]);
            const auto it = nodes.find(ctx);
            if (k > 0 && it == nodes.end()) break;  // absent context: Q passes through
            const Node& node = it == nodes.end() ? Node{} : it->second;
            const double e = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(node.counts.size()));
            const auto cit = node.counts.find(next);
            const double a = cit == node.counts.end() ? 0.0 : cit->second;
            q = (a + e * q) / (node.total + e);
        }
        log_q += std::log(q);

        ctx.clear();
        for (std::uint32_t k = 0; k <= max_k; ++k) {
            if (k > 0) ctx.push_back(x.symbols[i - k]);
            Node& node = nodes[ctx];
            ++node.counts[next];
            ++node.total;
        }
    }
    return -log_q / static_cast<double>(x.symbols.size());
}

std::map<std::vector<symbol_t>, double> block_oracle(const Sequence& x, std::uint32_t k) {
    std::map<std::vector<symbol_t>, double> freq;
    const std::size_t n = x.symbols.size();
    for (std::size_t i = 0; i + k <= n; ++i)
        freq[{x.symbols.begin() + i, x.symbols.begin() + i + k}] += 1.0;
    for (auto& [block, f] : freq) f /= static_cast<double>(n - k + 1);
    return freq;
}

void check_against_oracle(const Sequence& x, std::uint32_t k) {
    const BlockDistribution dist = block_distribution(x, k);
    const auto expect = block_oracle(x, k);
    REQUIRE(dist.k == k);
    REQUIRE(dist.table.size() == expect.size());
    auto it = expect.begin();
    for (std::size_t row = 0; row < dist.table.size(); ++row, ++it) {
        CHECK(dist.table[row].first == it->first);  // lexicographic order
        CHECK(dist.table[row].second == doctest::Approx(it->second).epsilon(1e-15));
    }
}

}  // namespace

TEST_CASE("match lengths on a worked example") {
    const Sequence x = parse_sequence("01010", 2);
    for (const auto search : {MatchSearch::Indexed, MatchSearch::Naive}) {
        const MatchLengthProfile p = lz_profile(x, search);
        CHECK(p.n0 == 2);
        CHECK(p.lambda == std::vector<std::uint32_t>{1, 1, 3, 2, 1});
    }
}

TEST_CASE("indexed and naive match searches agree everywhere") {
    for (const std::uint32_t m : {2u, 3u, 5u}) {
        for (const std::size_t n : {1ul, 2ul, 17ul, 150ul, 400ul}) {
            const Sequence x = random_sequence(m, n, 31 * m + n);
            const auto fast = lz_profile(x, MatchSearch::Indexed);
            const auto slow = lz_profile(x, MatchSearch::Naive);
            CAPTURE(m);
            CAPTURE(n);
            CHECK(fast.lambda == slow.lambda);
            CHECK(fast.n0 == slow.n0);
        }
    }
    // degenerate repetitive inputs stress the suffix array
    const Sequence ones = parse_sequence(std::string(64, '1'), 2);
    CHECK(lz_profile(ones, MatchSearch::Indexed).lambda ==
          lz_profile(ones, MatchSearch::Naive).lambda);
    const Sequence period = parse_sequence("010101010101010101", 2);
    CHECK(lz_profile(period, MatchSearch::Indexed).lambda ==
          lz_profile(period, MatchSearch::Naive).lambda);
}

TEST_CASE("lz estimate implements the match-length formula") {
    const Sequence x = random_sequence(2, 60, 3);
    const auto p = lz_profile(x, MatchSearch::Naive);
    double total = 0.0;
    for (std::size_t i = p.n0; i <= 60; ++i)
        total += p.lambda[i - 1] / std::log(static_cast<double>(i));
    const double expect = 1.0 / (total / static_cast<double>(60 - p.n0 + 1));
    CHECK(lz_estimate(x) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(lz_estimate(x, MatchSearch::Naive) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("lz estimate needs enough data and stays in range") {
    CHECK_THROWS_AS(lz_estimate(parse_sequence("0101010", 2)), Error);
    const Sequence x = random_sequence(2, 4000, 9);
    const double est = lz_estimate(x);
    CHECK(est > 0.4);
    CHECK(est <= std::log(2.0) + 0.1);
    // a constant sequence is maximally compressible
    const Sequence ones = parse_sequence(std::string(400, '1'), 2);
    CHECK(lz_estimate(ones) < 0.15);
}

TEST_CASE("block distributions match the dictionary oracle") {
    for (const std::uint32_t m : {2u, 3u}) {
        for (const std::uint32_t k : {1u, 2u, 3u, 5u}) {
            const Sequence x = random_sequence(m, 120, 7 * m + k);
            CAPTURE(m);
            CAPTURE(k);
            check_against_oracle(x, k);
        }
    }
}

TEST_CASE("giant-k blocks fall back to the suffix array and agree") {
    // m^k overflows u64 here, forcing the suffix-array grouping path
    const Sequence x3 = random_sequence(3, 60, 41);
    check_against_oracle(x3, 41);
    const Sequence x2 = random_sequence(2, 100, 42);
    check_against_oracle(x2, 63);
    check_against_oracle(x2, 64);
    check_against_oracle(x2, 97);
}

TEST_CASE("plug-in estimator basics") {
    // k=1 is the per-symbol empirical entropy
    const Sequence x = parse_sequence("0010010", 2);  // five 0s, two 1s
    const double p1 = 2.0 / 7.0;
    const double expect = -(1 - p1) * std::log(1 - p1) - p1 * std::log(p1);
    CHECK(plugin_estimate(x, 1) == doctest::Approx(expect).epsilon(1e-12));

    // the full-length block is unique, so the k=n estimate is zero
    CHECK(plugin_estimate(x, 7) == 0.0);

    CHECK_THROWS_AS(plugin_estimate(x, 0), Error);
    CHECK_THROWS_AS(plugin_estimate(x, 8), Error);
    CHECK_THROWS_AS(block_distribution(x, 8), Error);
}

TEST_CASE("plug-in estimator approaches log m on uniform iid data") {
    const Sequence x = random_sequence(2, 20000, 17);
    CHECK(plugin_estimate(x, 5) == doctest::Approx(std::log(2.0)).epsilon(0.02));
    const Sequence y = random_sequence(3, 20000, 18);
    CHECK(plugin_estimate(y, 3) == doctest::Approx(std::log(3.0)).epsilon(0.02));
}

TEST_CASE("ppm matches the dictionary oracle exactly") {
    for (const std::uint32_t m : {2u, 3u}) {
        for (const std::uint32_t depth : {0u, 1u, 2u, 3u, 10u}) {
            const Sequence x = random_sequence(m, 160, 100 + 10 * m + depth);
            CAPTURE(m);
            CAPTURE(depth);
            CHECK(ppm_estimate(x, depth) ==
                  doctest::Approx(ppm_oracle(x, depth)).epsilon(1e-12));
        }
    }
}

TEST_CASE("ppm sanity on structured and iid data") {
    const Sequence x = random_sequence(3, 20000, 21);
    CHECK(ppm_estimate(x, 5) == doctest::Approx(std::log(3.0)).epsilon(0.03));
    const Sequence ones = parse_sequence(std::string(500, '1'), 2);
    CHECK(ppm_estimate(ones, 5) < 0.05);
    CHECK_THROWS_AS(ppm_estimate(Sequence(Alphabet(2), {}), 3), Error);
    CHECK_THROWS_AS(lz_profile(Sequence(Alphabet(2), {})), Error);
}

#include <doctest.h>

#include <vector>

#include "bct/error.hpp"
#include "bct/rng.hpp"
#include "bct/simulator.hpp"
#include "bct/tree_model.hpp"

using namespace bct;

namespace {

const TreeModel kTernary{{{0}, {1, 0}, {1, 1}, {1, 2}, {2}}};

}  // namespace

TEST_CASE("root-only tree") {
    const TreeModel t = TreeModel::root_only();
    CHECK(t.depth() == 0);
    CHECK(t.leaf_count() == 1);
    CHECK(t.is_proper(2));
    CHECK(t.is_proper(5));
    CHECK(t.key() == "-");
    const std::vector<symbol_t> recent{1, 0, 1};
    CHECK(t.leaf_for(recent) == 0);
}

TEST_CASE("ternary tree geometry") {
    CHECK(kTernary.depth() == 2);
    CHECK(kTernary.leaf_count() == 5);
    CHECK(kTernary.leaves_at_depth(1) == 2);
    CHECK(kTernary.leaves_at_depth(2) == 3);
    CHECK(kTernary.is_proper(3));
    CHECK_FALSE(kTernary.is_proper(2));
    CHECK(kTernary.key() == "0;1,0;1,1;1,2;2");

    // leaf_for reads the history most recent symbol first
    CHECK(kTernary.leaf_for(std::vector<symbol_t>{0, 2, 1}) == 0);
    CHECK(kTernary.leaf_for(std::vector<symbol_t>{1, 0, 0}) == 1);
    CHECK(kTernary.leaf_for(std::vector<symbol_t>{1, 2, 2}) == 3);
    CHECK(kTernary.leaf_for(std::vector<symbol_t>{2, 1, 0}) == 4);
}

TEST_CASE("improper trees are detected") {
    CHECK_FALSE(TreeModel{{{0}}}.is_proper(2));
    CHECK_FALSE(TreeModel{{{0}, {1, 0}, {1, 1}}}.is_proper(3));
    CHECK(TreeModel{{{0}, {1}}}.is_proper(2));
}

TEST_CASE("leaf index agrees with the linear scan on random chains") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::uint32_t m = 2 + static_cast<std::uint32_t>(seed % 3);
        const ChainSpec spec = random_chain(m, 4, 1.0, seed);
        REQUIRE(spec.tree.is_proper(m));
        const LeafIndex index(spec.tree, m);
        RngStream rng(seed, StreamPurpose::Summary, 99);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<symbol_t> recent(6);
            for (auto& s : recent) s = static_cast<symbol_t>(rng.uniform_int(m));
            CHECK(index.lookup(recent) == spec.tree.leaf_for(recent));
        }
    }
}

TEST_CASE("leaf_for requires enough history") {
    CHECK_THROWS_AS(kTernary.leaf_for(std::vector<symbol_t>{1}), Error);
}

TEST_CASE("context formatting round trips") {
    CHECK(format_context(std::vector<symbol_t>{}, 3) == "-");
    CHECK(format_context(std::vector<symbol_t>{1, 0, 2}, 3) == "102");
    CHECK(format_context(std::vector<symbol_t>{11, 0, 3}, 12) == "11,0,3");
    CHECK(parse_context("-", 3).empty());
    CHECK(parse_context("102", 3) == std::vector<symbol_t>{1, 0, 2});
    CHECK(parse_context("11,0,3", 12) == std::vector<symbol_t>{11, 0, 3});
    CHECK_THROWS_AS(parse_context("13", 3), Error);
    CHECK_THROWS_AS(parse_context("1,x", 12), Error);
}

TEST_CASE("param rows and chain validation") {
    ParamSet params;
    params.m = 3;
    params.theta = {0.1, 0.6, 0.3, 0.7, 0.2, 0.1, 0.2, 0.2, 0.6, 0.45, 0.45, 0.1, 0.3, 0.1, 0.6};
    CHECK(params.rows() == 5);
    CHECK(params.row(1)[0] == 0.7);

    ChainSpec spec{Alphabet(3), kTernary, params};
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.positive());
    CHECK(spec.depth() == 2);

    ChainSpec bad_rows = spec;
    bad_rows.params.theta.resize(12);
    CHECK_THROWS_AS(bad_rows.validate(), Error);

    ChainSpec bad_sum = spec;
    bad_sum.params.theta[0] = 0.4;
    CHECK_THROWS_AS(bad_sum.validate(), Error);

    ChainSpec improper = spec;
    improper.tree.leaves.pop_back();
    improper.params.theta.resize(12);
    CHECK_THROWS_AS(improper.validate(), Error);

    ChainSpec zero = spec;
    zero.params.theta[0] = 0.0;
    zero.params.theta[1] = 0.7;
    CHECK_NOTHROW(zero.validate());  // zeros are legal, just not "positive"
    CHECK_FALSE(zero.positive());
}

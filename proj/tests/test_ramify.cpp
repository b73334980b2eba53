#include <catch2/catch_amalgamated.hpp>

#include "canon/bounds.hpp"
#include "canon/ramify.hpp"
#include "helpers.hpp"

using namespace canon;
using canon_test::make_ram_input;
using canon_test::RamGenParams;

static RamInput constant_input(uint32_t size, uint32_t target) {
    RamInput in;
    for (uint32_t i = 1; i <= size; ++i) in.ground.push_back(i);
    in.arity = 2;
    in.fs = {constant_fn(0)};
    in.hs = {constant_fn(0)};
    in.g = constant_fn(0);
    in.t = 1;
    in.target = target;
    return in;
}

TEST_CASE("signature of the empty branch separates every element") {
    RamInput in = constant_input(6, 3);
    CHECK(eb_signature({}, 3, in) != eb_signature({}, 4, in));
    CHECK(eb_signature({}, 5, in) == eb_signature({}, 5, in));
}

TEST_CASE("constant clauses give a single signature") {
    RamInput in = constant_input(8, 3);
    Subset branch{1, 2, 3};
    auto s4 = eb_signature(branch, 4, in);
    for (Elem i = 5; i <= 8; ++i) CHECK(eb_signature(branch, i, in) == s4);
}

TEST_CASE("short branches produce a single class at arity 3") {
    RamInput in = constant_input(8, 3);
    in.arity = 3;
    // |B| = 1 < n*-1: all clause families empty, so one class even for a
    // non-constant f
    in.fs = {canon_test::hash_fn(123, 5)};
    Subset branch{2};
    auto sig = eb_signature(branch, 3, in);
    for (Elem i = 4; i <= 8; ++i) CHECK(eb_signature(branch, i, in) == sig);
}

TEST_CASE("candidate below the branch tip is rejected") {
    RamInput in = constant_input(8, 3);
    CHECK_THROWS_AS(eb_signature(Subset{1, 4}, 3, in), std::invalid_argument);
}

TEST_CASE("constant input builds a single path") {
    RamInput in = constant_input(7, 5);  // m*+2 elements with m* = 5
    RamTree tree = build_tree(in);
    REQUIRE(tree.levels.size() == 7);
    for (const auto& lvl : tree.levels) CHECK(lvl.size() == 1);
    auto ext = extract(tree, 5);
    REQUIRE(ext.out);
    CHECK(ext.out->astar == Subset{1, 2, 3, 4, 5, 6});
    CHECK(ext.out->jstar == 7);
    CHECK(verify_ram_output(in, *ext.out));
}

TEST_CASE("single element ground set") {
    RamInput in = constant_input(1, 1);
    RamTree tree = build_tree(in);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].candidates.empty());
    auto ext = extract(tree, 1);
    CHECK(!ext.out);
    CHECK(ext.deepest_level == 0);
}

TEST_CASE("too-shallow trees report the deepest level") {
    RamGenParams p;
    p.nstar = 2;
    p.size = 12;
    p.colors = 40;  // near-injective: classes split fast, tree stays shallow
    p.target = 10;
    RamInput in = make_ram_input(3, p);
    RamTree tree = build_tree(in);
    auto ext = extract(tree, 10);
    if (!ext.out) CHECK(ext.deepest_level < 11);
}

TEST_CASE("restricted signatures induce the same partition as the full E_B") {
    for (uint64_t seed = 0; seed < 12; ++seed) {
        RamGenParams p;
        p.nstar = 2 + seed % 2;
        p.size = 14 + seed % 5;
        p.kstar = 1 + seed % 2;
        p.t = 1 + seed % 3;
        p.colors = 2 + seed % 2;
        p.target = 3;
        RamInput in = make_ram_input(seed, p);
        RamTree tree = build_tree(in);
        for (size_t idx = 0; idx < tree.nodes.size(); ++idx) {
            const auto& node = tree.nodes[idx];
            Subset branch = tree.branch_of(uint32_t(idx));
            const auto& cand = node.candidates;
            for (size_t a = 0; a < cand.size(); ++a)
                for (size_t b = a + 1; b < cand.size(); ++b) {
                    bool restricted = eb_signature(branch, cand[a], in) ==
                                      eb_signature(branch, cand[b], in);
                    bool full = canon_test::full_eb_equal(branch, cand[a], cand[b], in);
                    INFO("seed=" << seed << " node=" << idx << " pair=(" << cand[a] << ","
                                 << cand[b] << ")");
                    REQUIRE(restricted == full);
                }
        }
    }
}

TEST_CASE("finer branches refine the equivalence") {
    for (uint64_t seed = 20; seed < 26; ++seed) {
        RamGenParams p;
        p.nstar = 2;
        p.size = 16;
        p.colors = 2;
        RamInput in = make_ram_input(seed, p);
        const Subset& A = in.ground;
        // B = first two elements, B' = first four
        Subset b(A.begin(), A.begin() + 2), bp(A.begin(), A.begin() + 4);
        for (size_t x = 4; x < A.size(); ++x)
            for (size_t y = x + 1; y < A.size(); ++y)
                if (canon_test::full_eb_equal(bp, A[x], A[y], in))
                    CHECK(canon_test::full_eb_equal(b, A[x], A[y], in));
    }
}

TEST_CASE("order compatibility and level coverage") {
    RamGenParams p;
    p.nstar = 2;
    p.size = 30;
    p.colors = 2;
    p.target = 30;  // force exhaustion
    RamInput in = make_ram_input(42, p);
    RamTree tree = build_tree(in);
    // i <_l j implies i <= j: parents precede children in value
    for (const auto& nd : tree.nodes)
        if (nd.parent >= 0) CHECK(tree.nodes[nd.parent].elem < nd.elem);
    // built to exhaustion: levels cover the whole ground set
    CHECK(tree.covered() == in.ground);
}

TEST_CASE("successor counts satisfy the exact bound") {
    // the pinned instance: l=2, n*=2, k=1, t=1 gives 4*4*1*2 = 32
    CHECK(successor_bound(2, 2, 1, 1) == BigNat(32));
    for (uint64_t seed = 0; seed < 20; ++seed) {
        RamGenParams p;
        p.nstar = 2 + seed % 2;
        p.size = p.nstar == 2 ? 40 : 24;
        p.kstar = 1 + seed % 2;
        p.t = 1 + seed % 3;
        p.colors = 2 + seed % 3;
        p.target = p.size;  // exhaust
        RamInput in = make_ram_input(seed, p);
        RamTree tree = build_tree(in);
        for (const auto& nd : tree.nodes) {
            INFO("seed=" << seed << " level=" << nd.level << " children=" << nd.children.size());
            REQUIRE(BigNat(nd.children.size()) <=
                    successor_bound(nd.level, in.arity, in.kstar(), in.t));
        }
    }
}

TEST_CASE("successful extractions verify") {
    int successes = 0;
    for (uint64_t seed = 0; seed < 40; ++seed) {
        RamGenParams p;
        p.nstar = 2 + seed % 2;
        p.size = p.nstar == 2 ? 36 : 20;
        p.kstar = 1 + seed % 2;
        p.t = 1 + seed % 2;
        p.colors = seed % 3 == 0 ? 1 : 2;
        p.target = 2 + seed % 3;
        RamInput in = make_ram_input(seed, p);
        RamTree tree = build_tree(in);
        auto ext = extract(tree, in.target);
        if (!ext.out) continue;
        ++successes;
        std::string diag;
        INFO("seed=" << seed << " diag=" << diag);
        REQUIRE(verify_ram_output(in, *ext.out, &diag));
    }
    CHECK(successes >= 10);  // the generator must actually exercise the verifier
}

TEST_CASE("mutating f on an extracted tuple breaks verification") {
    RamInput in = constant_input(7, 4);
    RamTree tree = build_tree(in);
    auto ext = extract(tree, 4);
    REQUIRE(ext.out);
    // flip f on {1, j*}: clause (beta) at u = {1} now disagrees with j*
    Subset bad{1, ext.out->jstar};
    RamInput mutated = in;
    mutated.fs[0] = [bad](std::span<const Elem> u) -> uint64_t {
        return Subset(u.begin(), u.end()) == bad ? 99 : 0;
    };
    CHECK(verify_ram_output(in, *ext.out));
    CHECK(!verify_ram_output(mutated, *ext.out));
}

TEST_CASE("tree dump carries levels and class sizes") {
    RamInput in = constant_input(5, 3);
    RamTree tree = build_tree(in);
    auto j = ram_tree_json(tree);
    CHECK(j["node_count"] == 5);
    CHECK(j["levels"].size() == 5);
    CHECK(j["levels"][0][0]["class_size"] == 5);
}

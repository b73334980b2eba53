#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "canon/rng.hpp"
#include "canon/subset.hpp"

using namespace canon;

TEST_CASE("colex rank of the first few pairs") {
    CHECK(rank_colex(Subset{1, 2}) == 0);
    CHECK(rank_colex(Subset{1, 3}) == 1);
    CHECK(rank_colex(Subset{2, 3}) == 2);
    CHECK(rank_colex(Subset{1, 4}) == 3);
}

TEST_CASE("rank and unrank invert each other exhaustively") {
    for (uint32_t n = 1; n <= 4; ++n) {
        for (uint32_t N = n; N <= 20; ++N) {
            uint64_t count = *binom64(N, n);
            Subset u = first_subset(n);
            for (uint64_t r = 0; r < count; ++r) {
                REQUIRE(rank_colex(u) == r);
                REQUIRE(unrank_colex(r, n) == u);
                if (r + 1 < count) REQUIRE(next_colex(u, N));
            }
            CHECK(!next_colex(u, N));
        }
    }
}

TEST_CASE("growing the ground set preserves colex ranks") {
    Subset u{2, 5, 7};
    uint64_t r = rank_colex(u);
    // rank is independent of any N, so nothing to recompute; unrank agrees
    CHECK(unrank_colex(r, 3) == u);
}

// literal definition: |u|=|v|, |u\v|=1, and the exchanged elements compare
// the same way against every common element
static bool neighbors_literal(const Subset& u, const Subset& v) {
    if (u.size() != v.size()) return false;
    Subset udiff, vdiff, common;
    for (Elem e : u)
        if (std::find(v.begin(), v.end(), e) == v.end()) udiff.push_back(e);
        else common.push_back(e);
    for (Elem e : v)
        if (std::find(u.begin(), u.end(), e) == u.end()) vdiff.push_back(e);
    if (udiff.size() != 1 || vdiff.size() != 1) return false;
    for (Elem m : common)
        if ((udiff[0] < m) != (vdiff[0] < m)) return false;
    return true;
}

TEST_CASE("neighbors matches the literal definition") {
    CHECK(neighbors(Subset{1, 3}, Subset{2, 3}));
    CHECK(!neighbors(Subset{3, 4}, Subset{1, 3}));
    CHECK(!neighbors(Subset{1, 4}, Subset{2, 3}));
    CHECK(!neighbors(Subset{1, 3}, Subset{1, 3}));

    // exhaustive cross-check on all pairs of 3-subsets of [7]
    std::vector<Subset> all;
    Subset u = first_subset(3);
    do {
        all.push_back(u);
    } while (next_colex(u, 7));
    for (const auto& a : all)
        for (const auto& b : all) {
            INFO("a=" << a[0] << a[1] << a[2] << " b=" << b[0] << b[1] << b[2]);
            CHECK(neighbors(a, b) == neighbors_literal(a, b));
        }
}

TEST_CASE("neighbors is symmetric and irreflexive with one differing index") {
    std::vector<Subset> all;
    Subset u = first_subset(2);
    do {
        all.push_back(u);
    } while (next_colex(u, 8));
    for (const auto& a : all) {
        CHECK(!neighbors(a, a));
        for (const auto& b : all) {
            CHECK(neighbors(a, b) == neighbors(b, a));
            if (neighbors(a, b)) {
                int diffs = 0;
                for (size_t i = 0; i < a.size(); ++i) diffs += a[i] != b[i];
                CHECK(diffs == 1);
            }
        }
    }
}

TEST_CASE("binomials") {
    CHECK(*binom64(1, 1) == 1);
    CHECK(*binom64(5, 2) == 10);
    CHECK(*binom64(1, 2) == 0);
    CHECK(*binom64(2 * 2 - 3, 2 - 1) == 1);  // C(2n-3, n-1) at n=2
    CHECK(binom_big(64, 32).to_string() == "1832624140942590534");
    CHECK(binom_big(200, 100) == binom_big(199, 99) + binom_big(199, 100));
    CHECK(!binom64(200, 100).has_value());
}

TEST_CASE("bell numbers") {
    CHECK(bell_big(0) == BigNat(1));
    CHECK(bell_big(1) == BigNat(1));
    CHECK(bell_big(2) == BigNat(2));
    CHECK(bell_big(3) == BigNat(5));
    CHECK(bell_big(4) == BigNat(15));
    CHECK(bell_big(5) == BigNat(52));
    CHECK(bell_big(10) == BigNat(115975));
}

TEST_CASE("subset iteration covers everything in colex order") {
    Subset pool{2, 4, 5, 9};
    std::vector<Subset> seen;
    for_each_subset(pool, 2, [&](std::span<const Elem> s) {
        seen.emplace_back(s.begin(), s.end());
        return true;
    });
    REQUIRE(seen.size() == 6);
    CHECK(seen[0] == Subset{2, 4});
    CHECK(seen[1] == Subset{2, 5});
    CHECK(seen[2] == Subset{4, 5});
    CHECK(seen[3] == Subset{2, 9});
    CHECK(seen.back() == Subset{5, 9});
    // n = 0 visits the empty subset exactly once
    int visits = 0;
    for_each_subset(pool, 0, [&](std::span<const Elem>) {
        ++visits;
        return true;
    });
    CHECK(visits == 1);
}

TEST_CASE("set helpers") {
    CHECK(set_union(Subset{1, 4}, Subset{2, 4, 7}) == Subset{1, 2, 4, 7});
    CHECK(with_elem(Subset{1, 4}, 3) == Subset{1, 3, 4});
    CHECK(without_elem(Subset{1, 3, 4}, 3) == Subset{1, 4});
}

TEST_CASE("rng determinism and sampling") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.u64() == b.u64());
    Rng c(7);
    Subset pool;
    for (Elem e = 1; e <= 50; ++e) pool.push_back(e);
    auto s = c.sample_sorted(std::span<const Elem>(pool), 10);
    CHECK(s.size() == 10);
    CHECK(std::set<Elem>(s.begin(), s.end()).size() == 10);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
}

#pragma once

// Ground-set elements are positive naturals; [m] = {1,...,m}. Subsets are
// strictly increasing vectors. Ranking is colexicographic so that growing
// the ground set never renumbers existing subsets.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "canon/bignat.hpp"

namespace canon {

using Elem = uint32_t;
using Subset = std::vector<Elem>;

inline bool strictly_increasing(std::span<const Elem> v) {
    for (size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i] >= v[i + 1]) return false;
    return v.empty() || v[0] >= 1;
}

inline void check_subset(std::span<const Elem> v) {
    if (!strictly_increasing(v) || (!v.empty() && v[0] < 1))
        throw std::invalid_argument("subset must be strictly increasing with elements >= 1");
}

// C(n, k) as u64; nullopt on overflow.
inline std::optional<uint64_t> binom64(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (uint64_t i = 1; i <= k; ++i) {
        uint64_t mult = n - k + i;
        if (r > ~(unsigned __int128)0 / mult) return std::nullopt;
        r = r * mult / i;  // exact: r is C(n-k+i, i) after this step
        if (r > ~uint64_t(0)) return std::nullopt;
    }
    return uint64_t(r);
}

inline BigNat binom_big(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigNat r = 1;
    for (uint64_t i = 1; i <= k; ++i) {
        r = r.mul_small(n - k + i);
        auto [q, rem] = r.divmod_small(i);
        r = std::move(q);  // division is exact at every step
    }
    return r;
}

// Colexicographic rank of an n-subset of positive naturals:
// rank(u) = sum_i C(u_i - 1, i + 1); compares by largest differing element.
inline uint64_t rank_colex(std::span<const Elem> u) {
    uint64_t r = 0;
    for (size_t i = 0; i < u.size(); ++i) {
        auto b = binom64(u[i] - 1, i + 1);
        if (!b) throw std::overflow_error("rank_colex: overflow");
        r += *b;
    }
    return r;
}

inline Subset unrank_colex(uint64_t rank, uint32_t n) {
    Subset u(n);
    for (uint32_t i = n; i-- > 0;) {
        // largest c with C(c, i+1) <= rank
        uint64_t c = i;  // C(i, i+1) = 0
        while (binom64(c + 1, i + 1).value_or(~uint64_t(0)) <= rank) ++c;
        u[i] = Elem(c + 1);
        rank -= *binom64(c, i + 1);
    }
    return u;
}

// Neighbor relation on finite sets: equal size, one exchanged element, and
// the exchanged pair sits at the same sorted position. For strictly
// increasing vectors that is exactly "equal except at one index".
inline bool neighbors(std::span<const Elem> u, std::span<const Elem> v) {
    if (u.size() != v.size()) return false;
    size_t diff = 0;
    for (size_t i = 0; i < u.size(); ++i)
        if (u[i] != v[i] && ++diff > 1) return false;
    return diff == 1;
}

// Advance an n-subset of [1..max_elem] in colex order; false when exhausted.
inline bool next_colex(Subset& c, Elem max_elem) {
    const size_t n = c.size();
    for (size_t i = 0; i < n; ++i) {
        Elem limit = (i + 1 < n) ? c[i + 1] - 1 : max_elem;
        if (c[i] < limit) {
            ++c[i];
            for (size_t j = 0; j < i; ++j) c[j] = Elem(j + 1);
            return true;
        }
    }
    return false;
}

inline Subset first_subset(uint32_t n) {
    Subset c(n);
    for (uint32_t i = 0; i < n; ++i) c[i] = i + 1;
    return c;
}

// Visit all n-subsets of the given sorted pool, in colex order over
// positions. Callback gets the materialized subset; return false to stop.
inline void for_each_subset(std::span<const Elem> pool, uint32_t n,
                            const std::function<bool(std::span<const Elem>)>& fn) {
    if (n > pool.size()) return;
    std::vector<uint32_t> idx(n);
    for (uint32_t i = 0; i < n; ++i) idx[i] = i;
    Subset buf(n);
    while (true) {
        for (uint32_t i = 0; i < n; ++i) buf[i] = pool[idx[i]];
        if (!fn(buf)) return;
        // advance idx in colex
        size_t i = 0;
        for (; i < n; ++i) {
            uint32_t limit = (i + 1 < n) ? idx[i + 1] - 1 : uint32_t(pool.size()) - 1;
            if (idx[i] < limit) break;
        }
        if (i == n) return;
        ++idx[i];
        for (size_t j = 0; j < i; ++j) idx[j] = uint32_t(j);
    }
}

inline BigNat bell_big(uint32_t n) {
    // Bell triangle
    std::vector<BigNat> row = {BigNat(1)};
    for (uint32_t i = 1; i <= n; ++i) {
        std::vector<BigNat> next(i + 1);
        next[0] = row.back();
        for (uint32_t j = 1; j <= i; ++j) next[j] = next[j - 1] + row[j - 1];
        row = std::move(next);
    }
    return row[0];
}

inline Subset set_union(std::span<const Elem> a, std::span<const Elem> b) {
    Subset r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i] < b[j])) r.push_back(a[i++]);
        else if (i == a.size() || b[j] < a[i]) r.push_back(b[j++]);
        else { r.push_back(a[i]); ++i; ++j; }
    }
    return r;
}

inline Subset with_elem(std::span<const Elem> a, Elem x) {
    Elem arr[1] = {x};
    return set_union(a, std::span<const Elem>(arr, 1));
}

inline Subset without_elem(std::span<const Elem> a, Elem x) {
    Subset r;
    r.reserve(a.size());
    for (Elem e : a)
        if (e != x) r.push_back(e);
    return r;
}

}  // namespace canon

#pragma once

// Beth towers: beta_0(m) = m, beta_{n+1}(m) = 2^{beta_n(m)}.
//
// Values are expanded exactly up to a configurable bit cap; beyond it they
// are kept symbolic as beta_height(top). Comparisons between symbolic towers
// reduce height by taking log2 (exact on towers: log2 beta_h = beta_{h-1})
// and bottom out in exact rational comparisons, falling back to certified
// dyadic brackets of log2 only where an irrational log appears. A bracket
// that fails to separate at the highest precision rung raises an error
// rather than guessing.

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "canon/bignat.hpp"
#include "canon/rational.hpp"

namespace canon {

inline constexpr uint64_t kDefaultBethCapBits = uint64_t(1) << 24;

struct BethValue {
    bool exact = false;
    BigNat value;     // set when exact
    uint32_t height = 0;  // symbolic form beta_height(top); height 0 <=> exact
    BigNat top;       // largest tower prefix that still fit under the cap

    std::string str() const {
        if (exact) return value.str_brief();
        std::string s = top.str_brief();
        for (uint32_t i = 0; i < height; ++i) s = "2^(" + s + ")";
        return s;
    }
};

inline BethValue beth(uint32_t level, BigNat m, uint64_t cap_bits = kDefaultBethCapBits) {
    BigNat v = std::move(m);
    for (uint32_t i = 0; i < level; ++i) {
        if (v > BigNat(cap_bits)) {
            BethValue r;
            r.exact = false;
            r.height = level - i;
            r.top = std::move(v);
            return r;
        }
        v = BigNat::pow2(v.to_u64());
    }
    BethValue r;
    r.exact = true;
    r.value = std::move(v);
    return r;
}

enum class Tri { yes, no, unknown };

namespace tower_detail {

inline const unsigned kPrecLadder[] = {4, 8, 12};

// is beta_g(y) >= s, where s is only known to lie in [s_lo, s_hi]?
inline Tri ge_scalar(uint32_t g, const Rat& y, const Rat& s_lo, const Rat& s_hi,
                     unsigned prec) {
    if (g == 0) {
        if (y >= s_hi) return Tri::yes;
        if (y < s_lo) return Tri::no;
        return Tri::unknown;
    }
    if (s_hi <= Rat(1)) return Tri::yes;  // beta_g(y) >= 1 for y >= 0
    if (s_lo <= Rat(1)) return Tri::unknown;
    auto [alo, ahi] = log2_bounds(s_lo, prec);
    auto [blo, bhi] = log2_bounds(s_hi, prec);
    return ge_scalar(g - 1, y, alo, bhi, prec);
}

Tri ge_affine(uint32_t g, const Rat& y, const Rat& a, const Rat& z, Rat r,
              Rat q, unsigned prec);

// is beta_g(y) >= c * beta_g(z)?  (c > 0)
inline Tri ge_pure(uint32_t g, const Rat& y, const Rat& c, const Rat& z, unsigned prec) {
    if (g == 0) return y >= c * z ? Tri::yes : Tri::no;
    return ge_affine(g - 1, y, Rat(1), z, Rat(0), c, prec);
}

// is beta_g(y) >= a * beta_g(z) + r + log2(q)?  (a >= 0, q > 0, y,z >= 0)
inline Tri ge_affine(uint32_t g, const Rat& y, const Rat& a, const Rat& z, Rat r,
                     Rat q, unsigned prec) {
    if (y.negative() || z.negative() || a.negative() || q.is_zero() || q.negative())
        throw std::domain_error("ge_affine: arguments out of range");
    int64_t j;
    if (q.is_pow2(&j)) {  // fold an exact log into r
        r = r + Rat(j);
        q = Rat(1);
    }
    bool q_one = (q == Rat(1));
    if (g == 0) {
        Rat d = y - a * z - r;
        if (q_one) return d >= Rat(0) ? Tri::yes : Tri::no;
        auto [lo, hi] = log2_bounds(q, prec);
        if (d >= hi) return Tri::yes;
        if (d <= lo) return Tri::no;  // strict: log2 q is irrational here
        return Tri::unknown;
    }
    if (a.is_zero()) {
        Rat s_lo = r, s_hi = r;
        if (!q_one) {
            auto [lo, hi] = log2_bounds(q, prec);
            s_lo = r + lo;
            s_hi = r + hi;
        }
        return ge_scalar(g, y, s_lo, s_hi, prec);
    }
    Rat b_lo = r, b_hi = r;
    if (!q_one) {
        auto [lo, hi] = log2_bounds(q, prec);
        b_lo = r + lo;
        b_hi = r + hi;
    }
    // certify >=: RHS <= (a + max(b,0)) * beta_g(z)   (beta_g(z) >= 1)
    Rat ub = b_hi > Rat(0) ? a + b_hi : a;
    if (ge_pure(g, y, ub, z, prec) == Tri::yes) return Tri::yes;
    // certify <: RHS >= (a + min(b,0)) * beta_g(z)
    Rat lb = b_lo < Rat(0) ? a + b_lo : a;
    if (!lb.negative() && !lb.is_zero() && ge_pure(g, y, lb, z, prec) == Tri::no)
        return Tri::no;
    return Tri::unknown;
}

// exact equality beta_g(x1) == x2 (x2 scalar), by peeling exact log2s
inline bool eq_tower_scalar(uint32_t g, const Rat& x1, Rat x2) {
    for (uint32_t i = 0; i < g; ++i) {
        int64_t j;
        if (!x2.is_pow2(&j)) return false;
        x2 = Rat(j);
    }
    return x1 == x2;
}

}  // namespace tower_detail

// beta_g(y) >= a*beta_g(z) + r + log2(q), resolved over the precision ladder.
inline bool beth_ge_affine(uint32_t g, const Rat& y, const Rat& a, const Rat& z,
                           const Rat& r, const Rat& q) {
    for (unsigned prec : tower_detail::kPrecLadder) {
        Tri t = tower_detail::ge_affine(g, y, a, z, r, q, prec);
        if (t != Tri::unknown) return t == Tri::yes;
    }
    throw std::runtime_error("tower comparison unresolved at max precision");
}

// beta_g(y) >= c * (beta_g(z))^p
inline bool beth_ge_scaled_pow(uint32_t g, const Rat& y, const Rat& c, const Rat& z,
                               uint64_t p) {
    if (g == 0) return y >= c * z.pow(p);
    return beth_ge_affine(g - 1, y, Rat(int64_t(p)), z, Rat(0), c);
}

// Observation: beta_l(kx) >= k * beta_l(x).
inline bool beth_scale_law(uint32_t level, uint64_t k, uint64_t x) {
    Rat kx(BigNat(k * x));
    if (level == 0) return true;  // kx >= k*x with equality
    return beth_ge_affine(level - 1, kx, Rat(1), Rat(BigNat(x)), Rat(0), Rat(BigNat(k)));
}

// Observation: beta_l(kx) >= (beta_l(x))^k.
inline bool beth_power_law(uint32_t level, uint64_t k, uint64_t x) {
    return beth_ge_scaled_pow(level, Rat(BigNat(k * x)), Rat(1), Rat(BigNat(x)), k);
}

// Exact comparison of symbolic towers beta_h1(x1) vs beta_h2(x2); tops must
// be >= 1 so that log2-stripping stays monotone and well-defined.
inline std::strong_ordering cmp_tower(uint32_t h1, Rat x1, uint32_t h2, Rat x2) {
    if (x1 < Rat(1) || x2 < Rat(1)) throw std::domain_error("cmp_tower: tops must be >= 1");
    uint32_t strip = std::min(h1, h2);
    h1 -= strip;
    h2 -= strip;
    if (h1 == 0 && h2 == 0) return x1 <=> x2;
    bool flipped = false;
    if (h1 == 0) {  // normalize to tower-vs-scalar
        std::swap(h1, h2);
        std::swap(x1, x2);
        flipped = true;
    }
    auto flip = [&](std::strong_ordering o) {
        if (!flipped) return o;
        if (o == std::strong_ordering::less) return std::strong_ordering::greater;
        if (o == std::strong_ordering::greater) return std::strong_ordering::less;
        return o;
    };
    if (tower_detail::eq_tower_scalar(h1, x1, x2)) return std::strong_ordering::equal;
    for (unsigned prec : tower_detail::kPrecLadder) {
        Tri t = tower_detail::ge_scalar(h1, x1, x2, x2, prec);
        if (t == Tri::yes) return flip(std::strong_ordering::greater);
        if (t == Tri::no) return flip(std::strong_ordering::less);
    }
    throw std::runtime_error("tower comparison unresolved at max precision");
}

}  // namespace canon

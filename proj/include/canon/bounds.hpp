#pragma once

// Exact evaluation of the size bounds: the m(.) schedules, the scale/power
// laws for beth, the headline canonization threshold, the per-node successor
// bound of the ramification tree, and the displayed failure-probability
// bound of the randomized repair step. All arithmetic is exact rational /
// big-integer; the only transcendental, log2, enters through certified
// dyadic brackets (see rational.hpp) or frozen upper bounds.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "canon/bignat.hpp"
#include "canon/rational.hpp"
#include "canon/subset.hpp"
#include "canon/tower.hpp"

namespace canon {

inline uint64_t factorial(uint32_t n) {
    uint64_t r = 1;
    for (uint32_t i = 2; i <= n; ++i) r *= i;
    return r;
}

// Constants of the ramification counting argument. nstar here is the arity
// the ramification claim is invoked at, hence >= 2. The level-dependent log
// term of c0 is frozen at ell_ref via a certified dyadic upper bound.
struct BoundConstants {
    Rat eps = Rat(1);
    uint32_t kstar = 1;
    uint32_t nstar = 2;
    uint32_t t = 1;
    uint32_t ell_ref = 8;
    unsigned log_prec = 8;

    void validate() const {
        if (nstar < 2) throw std::invalid_argument("BoundConstants: nstar must be >= 2");
        if (eps <= Rat(0)) throw std::invalid_argument("BoundConstants: eps must be positive");
        if (kstar < 1 || t < 1 || ell_ref < 2)
            throw std::invalid_argument("BoundConstants: kstar, t >= 1 and ell_ref >= 2");
    }

    // c0 = k/(n*-2)! + k/(n*-1)! + log2(ell^{n*-1} k)/ell^{n*-1}
    Rat c0() const {
        validate();
        Rat base = Rat(BigNat(kstar)) / Rat(BigNat(factorial(nstar - 2))) +
                   Rat(BigNat(kstar)) / Rat(BigNat(factorial(nstar - 1)));
        uint64_t ellp = 1;
        for (uint32_t i = 0; i + 1 < nstar; ++i) ellp *= ell_ref;
        Rat log_ub = log2_bounds(Rat(BigNat(ellp * kstar)), log_prec).second;
        return base + log_ub / Rat(BigNat(ellp));
    }
    Rat c1() const { return c0() / Rat(BigNat(nstar)); }
    Rat c2() const { return Rat::max((Rat(1) + eps) * c1(), Rat(2)); }
    Rat c3(uint32_t ntensor) const { return Rat(BigNat(ntensor)) * c2() * c2(); }
};

struct ScheduleEntry {
    uint32_t level = 0;   // the n of m(n)
    uint32_t height = 0;  // beth height
    Rat top;              // tower content (exact rational)
    std::optional<BigNat> exact;

    std::string str() const {
        if (exact) return exact->str_brief();
        if (height == 0) return top.to_string();
        std::string s = top.to_string();
        for (uint32_t i = 0; i < height; ++i) s = "2^(" + s + ")";
        return s;
    }
};

struct Schedule17 {
    uint32_t nstar = 1, ntensor = 1;
    uint64_t m = 0;
    std::vector<ScheduleEntry> entries;  // m(n), n in [nstar, ntensor]
    std::vector<bool> star9b;            // the growth inequality per n in [nstar, ntensor)
    bool star9b_all = true;
};

// m(n*) = m and m(n) = beth_{n-n*}(m^{n*+1} c3^{n-n*}) for n > n*; the
// returned schedule also carries the result of the growth check
// m(n+1) >= 2^{(1+eps) c1 m(n)^{n+1}} at every level, decided by tower-aware
// exact comparison.
inline Schedule17 schedule_17(uint32_t nstar, uint32_t ntensor, uint64_t m,
                              const BoundConstants& consts) {
    if (nstar < 1 || ntensor < nstar) throw std::invalid_argument("schedule_17: bad arities");
    Schedule17 s;
    s.nstar = nstar;
    s.ntensor = ntensor;
    s.m = m;
    Rat c3 = consts.c3(ntensor);
    Rat base = Rat(BigNat(m)).pow(nstar + 1);
    for (uint32_t n = nstar; n <= ntensor; ++n) {
        ScheduleEntry e;
        e.level = n;
        e.height = n - nstar;
        e.top = n == nstar ? Rat(BigNat(m)) : base * c3.pow(n - nstar);
        if (e.height == 0 && e.top.is_integer()) e.exact = e.top.num();
        s.entries.push_back(std::move(e));
    }
    Rat c1e = (Rat(1) + consts.eps) * consts.c1();
    for (uint32_t n = nstar; n < ntensor; ++n) {
        uint32_t g = n - nstar;
        // log2 m(n+1) = beth_g(top_{n+1}) >= (1+eps) c1 (beth_g(top_n))^{n+1}
        bool ok = beth_ge_scaled_pow(g, s.entries[n + 1 - nstar].top, c1e,
                                     s.entries[n - nstar].top, n + 1);
        s.star9b.push_back(ok);
        s.star9b_all = s.star9b_all && ok;
    }
    return s;
}

struct Schedule18 {
    uint32_t n = 2;
    uint64_t m = 2;
    BigNat m1, m2, m3;
    std::vector<ScheduleEntry> entries;  // m(l), l in [1, n]
};

// The assembled schedule: m1 = (2n-1) C(2n-3, n-1) m^{2n-1}, m2 = m1^2,
// m3 = 2 m1^2, m(1) = m3 and m(l) = beth_{l-1}(c3^{l-1} m3^2) for l > 1.
inline Schedule18 schedule_18(uint32_t n, uint64_t m, const BoundConstants& consts) {
    if (n < 2 || m < 2) throw std::invalid_argument("schedule_18: need n >= 2, m >= 2");
    Schedule18 s;
    s.n = n;
    s.m = m;
    s.m1 = binom_big(2 * n - 3, n - 1).mul_small(2 * n - 1) * BigNat(m).pow(2 * n - 1);
    s.m2 = s.m1 * s.m1;
    s.m3 = s.m2.mul_small(2);
    Rat c3 = consts.c3(n);
    Rat m3sq = Rat(s.m3) * Rat(s.m3);
    for (uint32_t l = 1; l <= n; ++l) {
        ScheduleEntry e;
        e.level = l;
        if (l == 1) {
            e.height = 0;
            e.top = Rat(s.m3);
            e.exact = s.m3;
        } else {
            e.height = l - 1;
            e.top = c3.pow(l - 1) * m3sq;
        }
        s.entries.push_back(std::move(e));
    }
    return s;
}

// beth_l(kx) >= k beth_l(x) and beth_l(kx) >= beth_l(x)^k, evaluated exactly.
inline std::pair<bool, bool> check_obs16(uint32_t level, uint64_t k, uint64_t x) {
    return {beth_scale_law(level, k, x), beth_power_law(level, k, x)};
}

struct LemmaBound {
    uint32_t height = 0;            // n-1
    BigNat content;                 // c * m^{8(2n-1)}
    BethValue value;                // expanded or symbolic
    uint32_t lemma_m_degree = 0;    // 8(2n-1)
    uint32_t derived_m_degree = 0;  // 4(2n-1), from m3^2
    std::optional<Rat> derived_content;  // c3^{n-1} m3^2 (n >= 2)
    std::optional<std::strong_ordering> content_vs_derived;
};

// The headline threshold beth_{n-1}(c m^{8(2n-1)}), next to the top tower
// content the assembled schedule actually produces; the two m-exponents are
// reported side by side (the slack is not reconciled, only displayed).
inline LemmaBound lemma_bound(uint32_t n, uint64_t m, const BigNat& c,
                              const BoundConstants& consts,
                              uint64_t cap_bits = kDefaultBethCapBits) {
    if (n < 1) throw std::invalid_argument("lemma_bound: n >= 1");
    LemmaBound lb;
    lb.height = n - 1;
    lb.content = c * BigNat(m).pow(8 * (2 * n - 1));
    lb.value = beth(n - 1, lb.content, cap_bits);
    lb.lemma_m_degree = 8 * (2 * n - 1);
    lb.derived_m_degree = 4 * (2 * n - 1);
    if (n >= 2 && m >= 2) {
        Schedule18 s = schedule_18(n, m, consts);
        lb.derived_content = consts.c3(n).pow(n - 1) * Rat(s.m3) * Rat(s.m3);
        lb.content_vs_derived = Rat(lb.content) <=> *lb.derived_content;
    }
    return lb;
}

// Per-node successor bound of the ramification tree at level l:
// (2^{C(l,n*-1)(n*-1)})^k * (2^{C(l,n*-1)})^k * t^{C(l,n*-2)} * (C(l,n*-2) k + 1)
inline BigNat successor_bound(uint32_t level, uint32_t nstar, uint32_t k, uint32_t t) {
    if (nstar < 2) throw std::invalid_argument("successor_bound: nstar >= 2");
    auto c1 = binom64(level, nstar - 1), c2 = binom64(level, nstar - 2);
    if (!c1 || !c2) throw std::overflow_error("successor_bound: binomial overflow");
    BigNat r = BigNat::pow2(*c1 * nstar * k);  // the two 2^... factors combined
    r = r * BigNat(t).pow(*c2);
    r = r.mul_small(*c2 * k + 1);
    return r;
}

struct FailureBound {
    Rat value;
    bool strict = false;  // value < 1, the strict reading of the size condition
};

// m^{2nt-n*} k (2nt-n*) C(2(nt-n*)-1, nt-n*) / |A''|
inline FailureBound failure_prob_bound(uint32_t ntensor, uint32_t nstar, uint32_t k,
                                       uint64_t m, uint64_t a_size) {
    if (a_size == 0) throw std::invalid_argument("failure_prob_bound: |A''| >= 1");
    if (ntensor < nstar) throw std::invalid_argument("failure_prob_bound: ntensor >= nstar");
    uint32_t d = ntensor - nstar;
    BigNat num = BigNat(m).pow(2 * ntensor - nstar);
    num = num.mul_small(k);
    num = num.mul_small(2 * ntensor - nstar);
    if (d > 0) num = num * binom_big(2 * d - 1, d);
    FailureBound fb;
    fb.value = Rat(num) / Rat(BigNat(a_size));
    fb.strict = fb.value < Rat(1);
    return fb;
}

// ---- survey-bound comparison table ------------------------------------------

struct ComparisonConstants {
    uint64_t c = 1;     // 2^{c m^2} lower bound
    uint64_t c1 = 1;    // 2^{2^{c1 m^3}} upper bound
    uint64_t c2 = 1;    // 2^{c2 m^2} lower bound
    uint64_t c2s = 1;   // 2^{c2* m^2 log m} upper bound
    uint64_t ck = 1;    // beth_{n-1}(ck m^2) lower bound
    uint64_t cks = 1;   // beth_n(ck* m^{2k-1}/log m) upper bound
};

struct ComparisonRow {
    uint64_t m = 0;
    std::vector<std::pair<std::string, std::string>> columns;  // name -> rendering
};

struct ComparisonTable {
    uint32_t n = 2;
    std::vector<ComparisonRow> rows;
};

inline ComparisonTable comparison_table(uint32_t n, uint64_t m_lo, uint64_t m_hi,
                                        const ComparisonConstants& cc,
                                        const BoundConstants& consts,
                                        uint64_t cap_bits = kDefaultBethCapBits) {
    if (n < 1 || m_lo > m_hi) throw std::invalid_argument("comparison_table: bad range");
    ComparisonTable table;
    table.n = n;
    for (uint64_t m = m_lo; m <= m_hi; ++m) {
        ComparisonRow row;
        row.m = m;
        if (n == 2) {
            row.columns.emplace_back("galvin_lower~m^m", BigNat(m).pow(m).str_brief());
            row.columns.emplace_back(
                "lero93", beth(1, BigNat(cc.c) * BigNat(m).pow(2), cap_bits).str() + " < ER <= " +
                              beth(2, BigNat(cc.c1) * BigNat(m).pow(3), cap_bits).str());
            row.columns.emplace_back(
                "lero94_i", beth(1, BigNat(cc.c2) * BigNat(m).pow(2), cap_bits).str() +
                                " <= ER <= 2^(" + std::to_string(cc.c2s) + "*" +
                                std::to_string(m * m) + "*lg " + std::to_string(m) + ")");
        }
        if (n >= 2) {
            uint32_t kk = n - 1;
            row.columns.emplace_back(
                "lero94_ii", beth(n - 1, BigNat(cc.ck) * BigNat(m).pow(2), cap_bits).str() +
                                 " <= ER <= beth_" + std::to_string(n) + "(" +
                                 std::to_string(cc.cks) + "*m^" + std::to_string(2 * kk - 1) +
                                 "/lg m)");
        }
        LemmaBound lb = lemma_bound(n, m, 1, consts, cap_bits);
        row.columns.emplace_back("this_bound", lb.value.str());
        row.columns.emplace_back("beth_height", std::to_string(n - 1));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace canon

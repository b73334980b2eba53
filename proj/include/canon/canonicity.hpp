#pragma once

// The canonicity predicate: f is canonical on A' with pattern v when
// f(i_1..i_n) = f(j_1..j_n) holds exactly iff the tuples agree on every
// position in v. Plus pattern discovery, a brute-force witness oracle over
// m-subsets, and exact ER search by enumerating colorings as set partitions.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "canon/coloring.hpp"
#include "canon/subset.hpp"

namespace canon {

// v as a bitmask: bit (l-1) set <=> position l (1-based) belongs to v.
struct Pattern {
    uint32_t mask = 0;

    bool contains(uint32_t pos1based) const { return (mask >> (pos1based - 1)) & 1; }
    std::string str(uint32_t n) const {
        std::string s = "{";
        bool first = true;
        for (uint32_t p = 1; p <= n; ++p)
            if (contains(p)) {
                if (!first) s += ",";
                s += std::to_string(p);
                first = false;
            }
        return s + "}";
    }
    friend bool operator==(Pattern a, Pattern b) { return a.mask == b.mask; }
};

struct CanonicalWitness {
    Subset subset;
    Pattern pattern;
};

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(const std::string& what, std::string qty)
        : std::runtime_error(what), quantity(std::move(qty)) {}
    std::string quantity;
};

// Single pass over [A']^n: canonical iff the v-projection determines the
// color (map proj -> color is a function) and vice versa (color -> proj).
inline bool is_canonical(const Coloring& f, std::span<const Elem> aprime, Pattern v) {
    check_subset(aprime);
    if (aprime.size() < f.arity) throw std::invalid_argument("is_canonical: |A'| < arity");
    std::map<Subset, uint32_t> proj_to_color;
    std::map<uint32_t, Subset> color_to_proj;
    bool ok = true;
    for_each_subset(aprime, f.arity, [&](std::span<const Elem> u) {
        Subset proj;
        for (uint32_t i = 0; i < f.arity; ++i)
            if (v.contains(i + 1)) proj.push_back(u[i]);
        uint32_t c = f.eval(u);
        auto [it1, fresh1] = proj_to_color.try_emplace(proj, c);
        if (!fresh1 && it1->second != c) { ok = false; return false; }
        auto [it2, fresh2] = color_to_proj.try_emplace(c, proj);
        if (!fresh2 && it2->second != proj) { ok = false; return false; }
        return true;
    });
    return ok;
}

// Exactly { v : is_canonical(f, A', v) }, ascending by mask.
inline std::vector<Pattern> find_patterns(const Coloring& f, std::span<const Elem> aprime) {
    std::vector<Pattern> out;
    for (uint32_t mask = 0; mask < (uint32_t(1) << f.arity); ++mask)
        if (is_canonical(f, aprime, Pattern{mask})) out.push_back(Pattern{mask});
    return out;
}

// First (colex order of A', then smallest v) canonical m-subset, if any.
// Scans m-subsets of [N] depth-first from the largest element down, keeping
// the set of patterns still feasible on the chosen top segment; canonicity
// is inherited by subsets, so an empty feasible set prunes the branch.
inline std::optional<CanonicalWitness> oracle_find(const Coloring& f, uint32_t m,
                                                   uint64_t budget = 10000000,
                                                   bool force = false) {
    if (m < f.arity) throw std::invalid_argument("oracle_find: m < arity");
    uint32_t N = f.domain;
    if (m > N) return std::nullopt;
    auto total = binom64(N, m);
    if (!force && (!total || *total > budget))
        throw BudgetExceeded("oracle_find: C(N,m) exceeds budget",
                             total ? std::to_string(*total) : binom_big(N, m).str_brief());

    Subset chosen;  // kept descending while building, largest first
    std::optional<CanonicalWitness> found;

    auto feasible_patterns = [&](const Subset& desc) {
        Subset asc(desc.rbegin(), desc.rend());
        return find_patterns(f, asc);
    };

    std::vector<uint32_t> all_masks;
    for (uint32_t mask = 0; mask < (uint32_t(1) << f.arity); ++mask) all_masks.push_back(mask);

    // returns true when a witness was found (stop everything)
    std::function<bool(uint32_t, const std::vector<uint32_t>&)> dfs =
        [&](uint32_t slots_left, const std::vector<uint32_t>& feasible) -> bool {
        if (slots_left == 0) {
            Subset asc(chosen.rbegin(), chosen.rend());
            found = CanonicalWitness{asc, Pattern{feasible.front()}};
            return true;
        }
        Elem hi = chosen.empty() ? N : chosen.back() - 1;
        for (Elem e = slots_left; e <= hi; ++e) {
            chosen.push_back(e);
            std::vector<uint32_t> next;
            if (chosen.size() >= f.arity) {
                Subset asc(chosen.rbegin(), chosen.rend());
                for (uint32_t mask : feasible)
                    if (is_canonical(f, asc, Pattern{mask})) next.push_back(mask);
            } else {
                next = feasible;
            }
            if (!next.empty() && dfs(slots_left - 1, next)) return true;
            chosen.pop_back();
        }
        return false;
    };

    // colex order: enumerate by the largest element ascending, recursing on
    // the remaining (smaller) positions, also ascending.
    dfs(m, all_masks);
    return found;
}

// Exhaustive scan without pruning; test oracle for oracle_find.
inline std::optional<CanonicalWitness> oracle_find_noprune(const Coloring& f, uint32_t m) {
    if (m > f.domain) return std::nullopt;
    Subset ground(f.domain);
    for (uint32_t i = 0; i < f.domain; ++i) ground[i] = i + 1;
    std::optional<CanonicalWitness> best;
    for_each_subset(ground, m, [&](std::span<const Elem> s) {
        auto pats = find_patterns(f, s);
        if (!pats.empty()) {
            best = CanonicalWitness{Subset(s.begin(), s.end()), pats.front()};
            return false;
        }
        return true;
    });
    return best;
}

struct ErResult {
    bool all_ok = false;
    std::optional<Coloring> counterexample;  // first in enumeration order
    BigNat colorings_checked;
};

// Decides whether every coloring of [N]^n (up to color renaming) admits a
// canonical m-subset. Colorings are enumerated as restricted-growth strings
// over the colex-ordered tuples, i.e. set partitions of [N]^n.
inline ErResult er_search(uint32_t n, uint32_t m, uint32_t N, uint64_t budget = 100000000,
                          bool force = false) {
    if (m < n) throw std::invalid_argument("er_search: m < n");
    auto tuples = binom64(N, n);
    if (!tuples) throw BudgetExceeded("er_search: C(N,n) overflow", "C(N,n)");
    uint32_t K = uint32_t(*tuples);
    if (!force) {
        // Bell(14) > 1e8, so anything beyond a few dozen tuples is hopeless.
        BigNat bell = K <= 512 ? bell_big(K) : BigNat();
        if (K > 512 || bell > BigNat(budget))
            throw BudgetExceeded("er_search: Bell(C(N,n)) exceeds budget",
                                 K <= 512 ? bell.str_brief() : "Bell(" + std::to_string(K) + ")");
    }
    if (m > N) {
        // no m-subsets at all: vacuously a counterexample unless no colorings
        ErResult r;
        r.all_ok = false;
        r.counterexample = gen_constant(n, N);
        r.colorings_checked = 1;
        return r;
    }

    Subset ground(N);
    for (uint32_t i = 0; i < N; ++i) ground[i] = i + 1;

    std::vector<uint32_t> rgs(K, 0), mx(K, 0);
    uint64_t checked = 0;
    Coloring c{n, N, {}, 0};
    while (true) {
        ++checked;
        c.values = rgs;
        c.color_count = *std::max_element(rgs.begin(), rgs.end()) + 1;
        bool has_witness = false;
        for_each_subset(ground, m, [&](std::span<const Elem> s) {
            for (uint32_t mask = 0; mask < (uint32_t(1) << n); ++mask)
                if (is_canonical(c, s, Pattern{mask})) {
                    has_witness = true;
                    return false;
                }
            return true;
        });
        if (!has_witness) {
            ErResult r;
            r.all_ok = false;
            r.counterexample = c;
            r.colorings_checked = checked;
            return r;
        }
        // next restricted-growth string
        bool advanced = false;
        for (size_t i = K; i-- > 1;) {
            if (rgs[i] <= mx[i]) {
                ++rgs[i];
                for (size_t j = i + 1; j < K; ++j) {
                    mx[j] = std::max(mx[j - 1], rgs[j - 1]);
                    rgs[j] = 0;
                }
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    ErResult r;
    r.all_ok = true;
    r.colorings_checked = checked;
    return r;
}

}  // namespace canon

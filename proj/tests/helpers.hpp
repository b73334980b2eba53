#pragma once

// Shared test utilities: hash-backed random instances (no dense storage) and
// the unrestricted E_B equivalence straight from its definition, used as an
// independent oracle against the restricted signature computation.

#include <cstdint>
#include <span>

#include "canon/coloring.hpp"
#include "canon/ramify.hpp"
#include "canon/rng.hpp"
#include "canon/subset.hpp"

namespace canon_test {

using namespace canon;

inline uint64_t tuple_hash(uint64_t seed, std::span<const Elem> u) {
    uint64_t h = seed * 0x9E3779B97F4A7C15ULL + 0x2545F4914F6CDD1DULL;
    for (Elem e : u) {
        h ^= e + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        h *= 0xFF51AFD7ED558CCDULL;
    }
    return h;
}

inline TupleFn hash_fn(uint64_t seed, uint64_t values) {
    return [seed, values](std::span<const Elem> u) { return tuple_hash(seed, u) % values; };
}

struct RamGenParams {
    uint32_t nstar = 2;
    uint32_t size = 40;
    uint32_t kstar = 1;
    uint32_t t = 1;
    uint32_t colors = 2;     // few colors collapse classes and deepen trees
    uint32_t target = 4;
    uint32_t universe = 600;
};

inline RamInput make_ram_input(uint64_t seed, const RamGenParams& p) {
    Rng rng(derive_seed(seed, "ram_input"));
    Subset universe(p.universe);
    for (uint32_t i = 0; i < p.universe; ++i) universe[i] = i + 1;
    RamInput in;
    in.ground = rng.sample_sorted(std::span<const Elem>(universe), p.size);
    in.arity = p.nstar;
    in.t = p.t;
    in.target = p.target;
    for (uint32_t k = 0; k < p.kstar; ++k) {
        in.fs.push_back(hash_fn(derive_seed(seed, "f" + std::to_string(k)), p.colors));
        uint64_t hrange = uint64_t(in.ground.back()) + 2;
        in.hs.push_back(hash_fn(derive_seed(seed, "h" + std::to_string(k)), hrange));
    }
    in.g = hash_fn(derive_seed(seed, "g"), p.t);
    return in;
}

// Unrestricted E_B from the definition: candidates agree on every clause over
// all u, v in [B]^{n*-1}, w in [B]^{n*}, every k and every g-value.
inline bool full_eb_equal(std::span<const Elem> branch, Elem i0, Elem i1, const RamInput& in) {
    if (branch.empty()) return i0 == i1;  // E_{} is equality
    const uint32_t n = in.arity;
    bool equal = true;
    std::vector<Subset> um1, un;
    for_each_subset(branch, n - 1, [&](std::span<const Elem> u) {
        um1.emplace_back(u.begin(), u.end());
        return true;
    });
    for_each_subset(branch, n, [&](std::span<const Elem> w) {
        un.emplace_back(w.begin(), w.end());
        return true;
    });
    for (uint32_t k = 0; k < in.kstar() && equal; ++k) {
        for (const auto& u : um1) {
            // (gamma) and (delta)
            if (in.g(with_elem(u, i0)) != in.g(with_elem(u, i1))) { equal = false; break; }
            if ((in.hs[k](u) >= i0) != (in.hs[k](u) >= i1)) { equal = false; break; }
            // (alpha)
            for (const auto& v : um1) {
                if (!neighbors(u, v)) continue;
                bool b0 = in.fs[k](with_elem(u, i0)) == in.fs[k](with_elem(v, i0));
                bool b1 = in.fs[k](with_elem(u, i1)) == in.fs[k](with_elem(v, i1));
                if (b0 != b1) { equal = false; break; }
            }
            if (!equal) break;
            // (beta)
            for (const auto& w : un) {
                if (without_elem(w, w.back()) != u) continue;
                bool b0 = in.fs[k](with_elem(u, i0)) == in.fs[k](w);
                bool b1 = in.fs[k](with_elem(u, i1)) == in.fs[k](w);
                if (b0 != b1) { equal = false; break; }
            }
            if (!equal) break;
        }
    }
    return equal;
}

}  // namespace canon_test

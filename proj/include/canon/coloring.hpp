#pragma once

// Colorings: total n-place symmetric functions on increasing n-tuples from
// [N], stored densely by colex rank. Color ids are normalized to
// 0..(#distinct-1) in order of first appearance (colex order), so two
// colorings equal up to renaming have identical storage.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "canon/rng.hpp"
#include "canon/subset.hpp"

namespace canon {

struct Coloring {
    uint32_t arity = 0;
    uint32_t domain = 0;              // N; tuples come from [1..N]
    std::vector<uint32_t> values;     // indexed by colex rank, size C(N, arity)
    uint32_t color_count = 0;         // after normalization

    uint64_t tuple_count() const {
        auto c = binom64(domain, arity);
        if (!c) throw std::overflow_error("coloring too large");
        return *c;
    }

    uint32_t eval(std::span<const Elem> u) const {
        if (u.size() != arity) throw std::invalid_argument("eval: wrong arity");
        if (!strictly_increasing(u)) throw std::invalid_argument("eval: tuple not increasing");
        if (u.back() > domain) throw std::invalid_argument("eval: element outside domain");
        return values[rank_colex(u)];
    }

    void normalize() {
        std::unordered_map<uint32_t, uint32_t> remap;
        uint32_t next = 0;
        for (auto& v : values) {
            auto [it, fresh] = remap.try_emplace(v, next);
            if (fresh) ++next;
            v = it->second;
        }
        color_count = next;
    }

    friend bool operator==(const Coloring& a, const Coloring& b) = default;
};

// Function view over increasing tuples; the pipeline composes these instead
// of materializing derived colorings.
using TupleFn = std::function<uint64_t(std::span<const Elem>)>;

inline TupleFn as_fn(const Coloring& c) {
    return [&c](std::span<const Elem> u) -> uint64_t { return c.eval(u); };
}

// f(u) = base(u ∪ anchors); anchors must lie above every u this is used on.
inline TupleFn anchored_fn(const Coloring& base, Subset anchors) {
    return [&base, anchors = std::move(anchors)](std::span<const Elem> u) -> uint64_t {
        Subset t(u.begin(), u.end());
        t.insert(t.end(), anchors.begin(), anchors.end());
        return base.eval(t);
    };
}

inline TupleFn constant_fn(uint64_t v = 0) {
    return [v](std::span<const Elem>) { return v; };
}

// A coloring together with a declared codomain bound t (|range| <= t).
struct ValueMap {
    Coloring map;
    uint32_t bound = 1;
};

// ---- generators -----------------------------------------------------------

inline Coloring gen_constant(uint32_t n, uint32_t N) {
    Coloring c{n, N, {}, 0};
    c.values.assign(c.tuple_count(), 0);
    c.color_count = c.values.empty() ? 0 : 1;
    return c;
}

inline Coloring gen_injective(uint32_t n, uint32_t N) {
    Coloring c{n, N, {}, 0};
    uint64_t m = c.tuple_count();
    c.values.resize(m);
    for (uint64_t r = 0; r < m; ++r) c.values[r] = uint32_t(r);
    c.color_count = uint32_t(m);
    return c;
}

// Color = the v-projection of the tuple (v a 1-based position mask), so the
// output is canonical with pattern v on the whole domain by construction.
inline Coloring gen_canonical(uint32_t n, uint32_t N, uint32_t vmask) {
    if (vmask >= (uint32_t(1) << n)) throw std::invalid_argument("pattern mask out of range");
    Coloring c{n, N, {}, 0};
    uint64_t m = c.tuple_count();
    c.values.resize(m);
    std::map<Subset, uint32_t> proj_ids;
    Subset u = first_subset(n);
    for (uint64_t r = 0; r < m; ++r) {
        Subset proj;
        for (uint32_t i = 0; i < n; ++i)
            if (vmask & (uint32_t(1) << i)) proj.push_back(u[i]);
        auto [it, fresh] = proj_ids.try_emplace(proj, uint32_t(proj_ids.size()));
        c.values[r] = it->second;
        if (r + 1 < m) next_colex(u, N);
    }
    c.normalize();
    return c;
}

// f(i1,...,in) = i_p (1-based position p)
inline Coloring gen_min_position(uint32_t n, uint32_t N, uint32_t p) {
    if (p < 1 || p > n) throw std::invalid_argument("position out of range");
    return gen_canonical(n, N, uint32_t(1) << (p - 1));
}

inline Coloring gen_random(uint32_t n, uint32_t N, uint32_t colors, uint64_t seed) {
    if (colors == 0) throw std::invalid_argument("need at least one color");
    Coloring c{n, N, {}, 0};
    uint64_t m = c.tuple_count();
    c.values.resize(m);
    Rng rng(derive_seed(seed, "coloring.random"));
    for (uint64_t r = 0; r < m; ++r) c.values[r] = uint32_t(rng.below(colors));
    c.normalize();
    return c;
}

// ---- file format -----------------------------------------------------------
//
//   CANON v1 <n> <N>
//   i1 i2 ... in c        (one line per tuple, any order; '#' comments)
//
// The writer emits colex order with normalized colors.

inline void write_coloring(std::ostream& os, const Coloring& c) {
    os << "CANON v1 " << c.arity << " " << c.domain << "\n";
    if (c.arity == 0 || c.domain < c.arity) return;
    Subset u = first_subset(c.arity);
    uint64_t m = c.tuple_count();
    for (uint64_t r = 0; r < m; ++r) {
        for (uint32_t i = 0; i < c.arity; ++i) os << u[i] << " ";
        os << c.values[r] << "\n";
        if (r + 1 < m) next_colex(u, c.domain);
    }
}

inline void write_coloring(const std::string& path, const Coloring& c) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_coloring(f, c);
}

struct ParseError : std::runtime_error {
    explicit ParseError(size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_no(line) {}
    size_t line_no;
};

inline Coloring read_coloring(std::istream& is) {
    std::string line;
    size_t line_no = 0;
    auto next_content_line = [&]() -> std::optional<std::string> {
        while (std::getline(is, line)) {
            ++line_no;
            size_t h = line.find('#');
            if (h != std::string::npos) line.resize(h);
            size_t a = line.find_first_not_of(" \t\r");
            if (a == std::string::npos) continue;
            return line;
        }
        return std::nullopt;
    };

    auto header = next_content_line();
    if (!header) throw ParseError(line_no, "missing header");
    std::istringstream hs(*header);
    std::string magic, version;
    uint32_t n = 0, N = 0;
    hs >> magic >> version >> n >> N;
    if (magic != "CANON" || version != "v1" || hs.fail())
        throw ParseError(line_no, "bad header (expected 'CANON v1 n N')");
    if (n == 0) throw ParseError(line_no, "arity must be >= 1");
    auto count = binom64(N, n);
    if (!count) throw ParseError(line_no, "domain too large");

    Coloring c{n, N, {}, 0};
    c.values.assign(*count, 0);
    std::vector<bool> seen(*count, false);
    uint64_t filled = 0;
    while (auto content = next_content_line()) {
        std::istringstream ls(*content);
        Subset u(n);
        for (auto& e : u)
            if (!(ls >> e)) throw ParseError(line_no, "expected " + std::to_string(n) + " elements and a color");
        uint32_t col;
        if (!(ls >> col)) throw ParseError(line_no, "missing color");
        std::string trail;
        if (ls >> trail) throw ParseError(line_no, "trailing tokens");
        if (!strictly_increasing(u) || u[0] < 1)
            throw ParseError(line_no, "tuple not strictly increasing");
        if (u.back() > N) throw ParseError(line_no, "element outside domain");
        uint64_t r = rank_colex(u);
        if (seen[r]) throw ParseError(line_no, "duplicate tuple");
        seen[r] = true;
        c.values[r] = col;
        ++filled;
    }
    if (filled != *count)
        throw ParseError(line_no, "incomplete coloring: " + std::to_string(filled) + " of " +
                                      std::to_string(*count) + " tuples");
    c.normalize();
    return c;
}

inline Coloring read_coloring(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_coloring(f);
}

}  // namespace canon

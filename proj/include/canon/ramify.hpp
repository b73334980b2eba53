#pragma once

// Ramification: a levelled tree over a ground set A whose branches consist
// of elements pairwise indistinguishable under progressively finer
// equivalence relations E_B. Candidates i, i' above sup(B) are E_B-equivalent
// when they answer every clause the same way:
//
//   (alpha)  f_k(u + i) = f_k(v + i)        for neighbor pairs u, v
//   (beta)   f_k(u + i) = f_k(w)            for w = u + max(w)
//   (gamma)  the value g(u + i)
//   (delta)  h_k(u) >= i
//
// restricted to tuples whose maximum is the branch tip (earlier clauses are
// already settled by the ancestors' classes). Threshold functions h_k are
// queried on (n*-1)-subsets, exactly the shape the (delta) clause uses; a
// fixed h-value against a growing candidate makes the joint (delta) answers
// a chain, which is what keeps the successor-count bound tight.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "canon/coloring.hpp"
#include "canon/subset.hpp"

namespace canon {

struct RamInput {
    Subset ground;              // A, ascending
    uint32_t arity = 2;         // n* > 1
    std::vector<TupleFn> fs;    // f_k on [A]^{n*}
    std::vector<TupleFn> hs;    // h_k, queried on (n*-1)-subsets
    TupleFn g;                  // value map on [A]^{n*}
    uint32_t t = 1;             // |range(g)| bound
    uint32_t target = 0;        // m*

    uint32_t kstar() const { return uint32_t(fs.size()); }
    void validate() const {
        check_subset(ground);
        if (arity < 2) throw std::invalid_argument("RamInput: arity must be > 1");
        if (fs.empty() || fs.size() != hs.size())
            throw std::invalid_argument("RamInput: need k(*) >= 1 with matching h list");
        if (t < 1) throw std::invalid_argument("RamInput: t must be >= 1");
    }
};

struct EBSignature {
    std::vector<uint64_t> words;
    friend bool operator==(const EBSignature& a, const EBSignature& b) = default;
    friend auto operator<=>(const EBSignature& a, const EBSignature& b) = default;
};

namespace ram_detail {

class BitPacker {
public:
    explicit BitPacker(std::vector<uint64_t>& words) : words_(words) {}
    void push(bool b) {
        if (used_ == 0) words_.push_back(0);
        if (b) words_.back() |= uint64_t(1) << used_;
        used_ = (used_ + 1) % 64;
    }
    void push_value(uint64_t v) {
        words_.push_back(v);
        used_ = 0;
    }

private:
    std::vector<uint64_t>& words_;
    unsigned used_ = 0;
};

}  // namespace ram_detail

// Signature of candidate i against branch B (restricted clause set; the
// enumeration order k -> clause -> u-in-colex is fixed so equal signatures
// mean E_B-equivalent). For B = {} the signature carries the element itself:
// E_{} is equality.
inline EBSignature eb_signature(std::span<const Elem> branch, Elem i, const RamInput& in) {
    if (!branch.empty() && i <= branch.back())
        throw std::invalid_argument("eb_signature: candidate must exceed sup(branch)");
    EBSignature sig;
    ram_detail::BitPacker bits(sig.words);
    if (branch.empty()) {
        bits.push_value(i);
        return sig;
    }
    const Elem tip = branch.back();
    std::span<const Elem> below = branch.subspan(0, branch.size() - 1);
    const uint32_t n = in.arity;
    Subset buf;
    for (uint32_t k = 0; k < in.kstar(); ++k) {
        // (alpha): s = u ∪ v with |s| = n*, max(s) = tip; neighbor pairs drop
        // adjacent members of s.
        for_each_subset(below, n - 1, [&](std::span<const Elem> rest) {
            Subset s(rest.begin(), rest.end());
            s.push_back(tip);
            for (uint32_t p = 0; p + 1 < n; ++p) {
                Subset u = without_elem(s, s[p]);
                Subset v = without_elem(s, s[p + 1]);
                u.push_back(i);
                v.push_back(i);
                bits.push(in.fs[k](u) == in.fs[k](v));
            }
            return true;
        });
        // (beta): w with max(w) = tip, u = w \ {tip}
        for_each_subset(below, n - 1, [&](std::span<const Elem> rest) {
            Subset w(rest.begin(), rest.end());
            w.push_back(tip);
            Subset u(rest.begin(), rest.end());
            u.push_back(i);
            bits.push(in.fs[k](u) == in.fs[k](w));
            return true;
        });
        // (delta): u with |u| = n*-1, max(u) = tip
        for_each_subset(below, n - 2, [&](std::span<const Elem> rest) {
            Subset u(rest.begin(), rest.end());
            u.push_back(tip);
            bits.push(in.hs[k](u) >= i);
            return true;
        });
    }
    // (gamma): g-values, appended whole
    for_each_subset(below, n - 2, [&](std::span<const Elem> rest) {
        Subset u(rest.begin(), rest.end());
        u.push_back(tip);
        u.push_back(i);
        bits.push_value(in.g(u));
        return true;
    });
    return sig;
}

struct RamNode {
    Elem elem = 0;
    int32_t parent = -1;
    uint32_t level = 0;
    Subset candidates;  // residual class minus the node itself
    std::vector<uint32_t> children;
};

struct RamTree {
    std::vector<RamNode> nodes;
    std::vector<std::vector<uint32_t>> levels;

    Subset branch_of(uint32_t idx) const {  // ancestors + the node, ascending
        Subset b;
        for (int32_t cur = int32_t(idx); cur >= 0; cur = nodes[cur].parent)
            b.push_back(nodes[cur].elem);
        std::reverse(b.begin(), b.end());
        return b;
    }

    Subset covered() const {
        Subset all;
        for (const auto& nd : nodes) all.push_back(nd.elem);
        std::sort(all.begin(), all.end());
        return all;
    }
};

// Level-by-level construction: the root is min(A) with residual A_{>min};
// each node's successors are the minima of the E_{branch}-classes of its
// residual set. Building stops once level target+1 is populated or the
// ground set is exhausted.
inline RamTree build_tree(const RamInput& in) {
    in.validate();
    RamTree tree;
    if (in.ground.empty()) return tree;
    RamNode root;
    root.elem = in.ground[0];
    root.candidates.assign(in.ground.begin() + 1, in.ground.end());
    tree.nodes.push_back(root);
    tree.levels.push_back({0});

    while (tree.levels.back().size() > 0 && tree.levels.size() <= in.target + 1) {
        std::vector<uint32_t> next_level;
        for (uint32_t idx : tree.levels.back()) {
            Subset branch = tree.branch_of(idx);
            std::map<EBSignature, Subset> classes;
            for (Elem j : tree.nodes[idx].candidates)
                classes[eb_signature(branch, j, in)].push_back(j);
            std::vector<Subset> ordered;
            ordered.reserve(classes.size());
            for (auto& [sig, cls] : classes) ordered.push_back(std::move(cls));
            std::sort(ordered.begin(), ordered.end(),
                      [](const Subset& a, const Subset& b) { return a.front() < b.front(); });
            for (auto& cls : ordered) {
                RamNode child;
                child.elem = cls.front();
                child.parent = int32_t(idx);
                child.level = tree.nodes[idx].level + 1;
                child.candidates.assign(cls.begin() + 1, cls.end());
                uint32_t cidx = uint32_t(tree.nodes.size());
                tree.nodes[idx].children.push_back(cidx);
                tree.nodes.push_back(std::move(child));
                next_level.push_back(cidx);
            }
        }
        if (next_level.empty()) break;
        tree.levels.push_back(std::move(next_level));
    }
    return tree;
}

struct RamOutput {
    Subset astar;  // |A*| = m*+1
    Elem jstar = 0;
};

struct RamExtract {
    std::optional<RamOutput> out;
    uint32_t deepest_level = 0;
};

// A node at level m*+1 yields A* = its strict ancestors and j* = the node.
inline RamExtract extract(const RamTree& tree, uint32_t mstar) {
    RamExtract r;
    r.deepest_level = tree.levels.empty() ? 0 : uint32_t(tree.levels.size() - 1);
    if (tree.levels.size() <= mstar + 1 || tree.levels[mstar + 1].empty()) return r;
    uint32_t best = tree.levels[mstar + 1].front();
    for (uint32_t idx : tree.levels[mstar + 1])
        if (tree.nodes[idx].elem < tree.nodes[best].elem) best = idx;
    Subset b = tree.branch_of(best);
    RamOutput out;
    out.jstar = b.back();
    b.pop_back();
    out.astar = std::move(b);
    r.out = std::move(out);
    return r;
}

// Exhaustive check of the output contract, independent of tree internals:
// for u, v in [A*]^{n*-1} and every i in A* above them,
//   (alpha) neighbors u,v:  f_k(u+i) = f_k(v+i)  <=>  f_k(u+j*) = f_k(v+j*)
//   (beta)  i_0 < i_1:      f_k(u+i0) = f_k(u+i1) <=> f_k(u+i0) = f_k(u+j*)
//   (gamma) g(u+i) = g(u+j*)
//   (delta) h_k(u) >= i answered uniformly over A*_{>sup u} and j*.
inline bool verify_ram_output(const RamInput& in, const RamOutput& out,
                              std::string* diag = nullptr) {
    const uint32_t n = in.arity;
    const Subset& astar = out.astar;
    auto fail = [&](const std::string& msg) {
        if (diag) *diag = msg;
        return false;
    };
    std::vector<Subset> usets;
    for_each_subset(astar, n - 1, [&](std::span<const Elem> u) {
        usets.emplace_back(u.begin(), u.end());
        return true;
    });
    for (uint32_t k = 0; k < in.kstar(); ++k) {
        for (const auto& u : usets) {
            Elem supu = u.empty() ? 0 : u.back();
            Subset above;
            for (Elem a : astar)
                if (a > supu) above.push_back(a);
            // (beta)
            for (size_t x = 0; x < above.size(); ++x)
                for (size_t y = x + 1; y < above.size(); ++y) {
                    bool lhs = in.fs[k](with_elem(u, above[x])) == in.fs[k](with_elem(u, above[y]));
                    bool rhs = in.fs[k](with_elem(u, above[x])) == in.fs[k](with_elem(u, out.jstar));
                    if (lhs != rhs) return fail("(beta) fails at k=" + std::to_string(k));
                }
            // (gamma)
            for (Elem a : above)
                if (in.g(with_elem(u, a)) != in.g(with_elem(u, out.jstar)))
                    return fail("(gamma) fails");
            // (delta)
            if (!above.empty()) {
                uint64_t hv = in.hs[k](u);
                bool first = hv >= above.front();
                for (Elem a : above)
                    if ((hv >= a) != first) return fail("(delta) fails at k=" + std::to_string(k));
                if ((hv >= out.jstar) != first) return fail("(delta) fails at j*");
            }
            // (alpha): v neighbors of u
            for (const auto& v : usets) {
                if (!neighbors(u, v)) continue;
                Elem supuv = std::max(supu, v.empty() ? 0 : v.back());
                bool rhs = in.fs[k](with_elem(u, out.jstar)) == in.fs[k](with_elem(v, out.jstar));
                for (Elem a : astar) {
                    if (a <= supuv) continue;
                    bool lhs = in.fs[k](with_elem(u, a)) == in.fs[k](with_elem(v, a));
                    if (lhs != rhs) return fail("(alpha) fails at k=" + std::to_string(k));
                }
            }
        }
    }
    return true;
}

inline nlohmann::json ram_tree_json(const RamTree& tree) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& lvl : tree.levels) {
        nlohmann::json nodes = nlohmann::json::array();
        for (uint32_t idx : lvl) {
            const auto& nd = tree.nodes[idx];
            nodes.push_back({{"elem", nd.elem},
                             {"class_size", nd.candidates.size() + 1},
                             {"children", nd.children.size()}});
        }
        levels.push_back(nodes);
    }
    return {{"levels", levels}, {"node_count", tree.nodes.size()}};
}

}  // namespace canon

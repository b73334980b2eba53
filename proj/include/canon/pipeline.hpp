#pragma once

// The canonization pipeline: arity step-down through repeated ramification,
// threshold cleanup, constant-or-injective extraction, and randomized repair,
// ending in a verified canonical subset. Every stage runs on any input size
// ("opportunistic"): it either returns an output that passes its own
// contract checks or a structured failure naming the stage. Witnesses are
// verified, never trusted.
//
// Position bookkeeping: g-sets store 0-based coordinate positions p in
// {n*, ..., ntensor-1}; an element i inside a tail w occupies position
// |u| + |{x in w : x < i}|. Conversion to the 1-based pattern of the
// canonicity predicate happens only at the canonize boundary.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "canon/bounds.hpp"
#include "canon/canonicity.hpp"
#include "canon/coloring.hpp"
#include "canon/ramify.hpp"
#include "canon/rng.hpp"
#include "canon/subset.hpp"

namespace canon {

using UnaryFn = std::function<uint64_t(Elem)>;

struct StepDownState {
    Subset aprime;
    Subset anchors;  // w* = {j*_l : l in [nstar, ntensor)}, ascending
    uint32_t nstar = 1;
    uint32_t ntensor = 1;
    std::map<Subset, uint64_t> gprime;
    std::vector<std::map<Subset, uint32_t>> gsets;  // position bitmask per u
    std::vector<std::map<Subset, uint64_t>> hmaps;

    uint32_t kstar() const { return uint32_t(gsets.size()); }

    void restrict_to(const Subset& sub) {
        auto keep = [&](const Subset& key) {
            return std::includes(sub.begin(), sub.end(), key.begin(), key.end());
        };
        auto filter = [&](auto& m) {
            for (auto it = m.begin(); it != m.end();)
                it = keep(it->first) ? std::next(it) : m.erase(it);
        };
        filter(gprime);
        for (auto& m : gsets) filter(m);
        for (auto& m : hmaps) filter(m);
        aprime = sub;
    }
};

struct StageFailure {
    std::string stage;
    std::string detail;
};

struct StepDownTarget {
    std::optional<BigNat> value;  // nullopt: symbolic (always beyond desk scale)
    std::string display;

    static StepDownTarget exact(BigNat v) {
        StepDownTarget t;
        t.display = v.str_brief();
        t.value = std::move(v);
        return t;
    }
    static StepDownTarget symbolic(std::string s) { return {std::nullopt, std::move(s)}; }
};

struct StepDownOptions {
    bool auto_targets = true;               // extract the deepest level reached
    std::vector<StepDownTarget> targets;    // per level nstar..ntensor-1, ascending
};

struct StepDownResult {
    std::optional<StepDownState> state;
    std::optional<StageFailure> failure;
    std::vector<std::string> notes;
};

namespace pipe_detail {

inline TupleFn anchored_view(TupleFn f, Subset anchors) {
    return [f = std::move(f), anchors = std::move(anchors)](std::span<const Elem> u) {
        Subset t(u.begin(), u.end());
        t.insert(t.end(), anchors.begin(), anchors.end());
        return f(t);
    };
}

}  // namespace pipe_detail

// Claim-1.3 step-down. Starts from the trivial state at level ntensor and
// pulls the arity down one level at a time: one ramification call at arity
// lvl+1 plus the h/g bookkeeping (B^k_u initial segments, threshold h_k(u) =
// max(B^k_u)+1, and g-set lifting through the anchored value g(u + {j*})).
inline StepDownResult step_down(const Subset& ground, const std::vector<TupleFn>& fs,
                                const TupleFn& g, uint32_t ntensor, uint32_t nstar,
                                const StepDownOptions& opt = {}) {
    StepDownResult res;
    if (nstar < 1 || ntensor < nstar) {
        res.failure = StageFailure{"stepdown", "need ntensor >= nstar >= 1"};
        return res;
    }
    const uint32_t K = uint32_t(fs.size());

    StepDownState st;
    st.aprime = ground;
    st.nstar = st.ntensor = ntensor;
    st.gsets.assign(K, {});
    st.hmaps.assign(K, {});
    st.ntensor = ntensor;
    for_each_subset(ground, ntensor, [&](std::span<const Elem> u) {
        Subset key(u.begin(), u.end());
        st.gprime[key] = g(key);
        for (uint32_t k = 0; k < K; ++k) {
            st.gsets[k][key] = 0;
            st.hmaps[k][key] = 0;
        }
        return true;
    });

    for (uint32_t lvl = ntensor; lvl-- > nstar;) {
        const std::string stage = "ramify@" + std::to_string(lvl);
        const Subset& A = st.aprime;

        // target for this level's extraction
        uint64_t target;
        if (opt.auto_targets) {
            target = A.size();  // build to exhaustion, take the deepest branch
        } else {
            const auto& tg = opt.targets.at(lvl - nstar);
            if (!tg.value || !(*tg.value < BigNat(A.size()))) {
                res.failure = StageFailure{
                    stage, "target m* = " + tg.display + " requires |A| > m*; have |A| = " +
                               std::to_string(A.size())};
                return res;
            }
            target = tg.value->to_u64();
        }

        // derived inputs for the ramification call at arity lvl+1
        std::vector<TupleFn> fx;
        for (uint32_t k = 0; k < K; ++k)
            fx.push_back(pipe_detail::anchored_view(fs[k], st.anchors));

        std::map<Subset, uint64_t> gx;
        {
            std::map<std::vector<uint64_t>, uint64_t> intern;
            for (const auto& [key, gv] : st.gprime) {
                std::vector<uint64_t> tup{gv};
                for (uint32_t k = 0; k < K; ++k) tup.push_back(st.gsets[k].at(key));
                auto [it, fresh] = intern.try_emplace(tup, intern.size());
                gx[key] = it->second;
            }
        }
        uint32_t tx = 0;
        for (const auto& [k, v] : gx) tx = std::max<uint32_t>(tx, uint32_t(v) + 1);

        RamInput rin;
        rin.ground = A;
        rin.arity = lvl + 1;
        rin.fs = fx;
        for (uint32_t k = 0; k < K; ++k) {
            const auto& hm = st.hmaps[k];
            rin.hs.push_back([&hm](std::span<const Elem> u) -> uint64_t {
                auto it = hm.find(Subset(u.begin(), u.end()));
                return it == hm.end() ? 0 : it->second;
            });
        }
        rin.g = [&gx](std::span<const Elem> u) -> uint64_t {
            return gx.at(Subset(u.begin(), u.end()));
        };
        rin.t = std::max(tx, 1u);
        rin.target = uint32_t(std::min<uint64_t>(target, A.size()));

        RamTree tree = build_tree(rin);
        uint32_t deepest = tree.levels.empty() ? 0 : uint32_t(tree.levels.size() - 1);
        uint64_t mstar = target;
        if (opt.auto_targets) {
            if (deepest < 1) {
                res.failure = StageFailure{stage, "tree depth " + std::to_string(deepest) +
                                                      " admits no extraction"};
                return res;
            }
            mstar = deepest - 1;
        }
        RamExtract ext = extract(tree, uint32_t(mstar));
        if (!ext.out) {
            res.failure = StageFailure{stage, "reached level " + std::to_string(ext.deepest_level) +
                                                  ", needed " + std::to_string(mstar + 1)};
            return res;
        }
        const Subset& astar = ext.out->astar;
        const Elem jstar = ext.out->jstar;
        res.notes.push_back("level " + std::to_string(lvl) + ": |A|=" + std::to_string(A.size()) +
                            " depth=" + std::to_string(deepest) + " m*=" + std::to_string(mstar) +
                            " t=" + std::to_string(rin.t) + " j*=" + std::to_string(jstar));

        // uniform dichotomy of the previous h-thresholds over [A*]^{lvl+1}:
        // decides whether tail position lvl+1 is alive on A* (goes into the
        // g-sets) or dead (dropped). A mixed answer cannot be represented.
        std::vector<bool> add_tail(K, false);
        for (uint32_t k = 0; k < K; ++k) {
            bool any = false, all_dead = true, all_alive = true;
            bool paper_any = false, paper_uniform = true, paper_first = false;
            bool bad = false;
            for_each_subset(astar, lvl + 1, [&](std::span<const Elem> w) {
                uint64_t hv = st.hmaps[k].at(Subset(w.begin(), w.end()));
                bool below = hv < jstar;
                if (!paper_any) { paper_first = below; paper_any = true; }
                else if (below != paper_first) paper_uniform = false;
                Elem top = w.back();
                Elem min_above = 0;
                for (Elem a : astar)
                    if (a > top) { min_above = a; break; }
                if (min_above == 0) return true;  // nothing above: no constraint
                any = true;
                if (!(hv <= min_above)) all_dead = false;
                if (!(hv > astar.back())) all_alive = false;
                if (!all_dead && !all_alive) { bad = true; return false; }
                return true;
            });
            if (bad || (any && !all_dead && !all_alive)) {
                res.failure = StageFailure{"stepdown@" + std::to_string(lvl),
                                           "tail position " + std::to_string(lvl + 1) +
                                               " dependence not uniform on A* (k=" + std::to_string(k) + ")"};
                return res;
            }
            add_tail[k] = any && all_alive;
            if (!paper_uniform)
                res.notes.push_back("level " + std::to_string(lvl) +
                                    ": split condition h(u+{j}) < j* not uniform (diagnostic), k=" +
                                    std::to_string(k));
            if (add_tail[k] && lvl + 1 > ntensor - 1) {
                res.failure = StageFailure{"stepdown@" + std::to_string(lvl),
                                           "internal: live tail position out of range"};
                return res;
            }
        }

        // new state over [A*]^{lvl}
        StepDownState ns;
        ns.aprime = astar;
        ns.anchors = with_elem(st.anchors, jstar);
        ns.nstar = lvl;
        ns.ntensor = ntensor;
        ns.gsets.assign(K, {});
        ns.hmaps.assign(K, {});
        bool seg_ok = true;
        for_each_subset(astar, lvl, [&](std::span<const Elem> uu) {
            Subset u(uu.begin(), uu.end());
            Subset anchor_key = with_elem(u, jstar);
            ns.gprime[u] = st.gprime.at(anchor_key);
            for (uint32_t k = 0; k < K; ++k) {
                // B^k_u = { i in A*_{>sup u} : fx_k(u+i) != fx_k(u+j*) },
                // an initial segment by the (beta) clause of the tree.
                uint64_t fx_anchor = fx[k](anchor_key);
                Elem maxdiff = 0;
                bool in_segment = true;
                for (Elem a : astar) {
                    if (a <= u.back()) continue;
                    bool diff = fx[k](with_elem(u, a)) != fx_anchor;
                    if (diff) {
                        if (!in_segment) { seg_ok = false; return false; }
                        maxdiff = a;
                    } else {
                        in_segment = false;
                    }
                }
                uint64_t hnew = maxdiff == 0 ? 0 : uint64_t(maxdiff) + 1;
                ns.hmaps[k][u] = hnew;
                uint32_t mask = st.gsets[k].at(anchor_key);
                if (add_tail[k]) mask |= uint32_t(1) << (lvl + 1);
                if (hnew > astar.back()) mask |= uint32_t(1) << lvl;
                ns.gsets[k][u] = mask;
            }
            return true;
        });
        if (!seg_ok) {
            res.failure = StageFailure{"stepdown@" + std::to_string(lvl),
                                       "B^k_u is not an initial segment ((beta) violated)"};
            return res;
        }
        st = std::move(ns);
    }
    res.state = std::move(st);
    return res;
}

struct VerifyReport {
    bool ok = true;
    std::string violated;
    uint64_t checked = 0;
    bool sampled = false;
};

namespace pipe_detail {

// v_l = { i in w : |u| + |i ∩ w| in gset }, as a subset of w
inline Subset marked_positions(std::span<const Elem> w, uint32_t nstar, uint32_t mask) {
    Subset v;
    for (size_t idx = 0; idx < w.size(); ++idx)
        if (mask & (uint32_t(1) << (nstar + idx))) v.push_back(w[idx]);
    return v;
}

}  // namespace pipe_detail

// Exhaustive (budgeted) check of the step-down contract clauses (a)-(e).
inline VerifyReport verify_stepdown(const StepDownState& st, const std::vector<TupleFn>& fs,
                                    const TupleFn& g, uint64_t budget = 2000000,
                                    uint64_t seed = 1) {
    VerifyReport rep;
    const uint32_t K = st.kstar();
    const uint32_t p = st.ntensor - st.nstar;
    const Subset& A = st.aprime;
    auto fail = [&](const std::string& msg) {
        rep.ok = false;
        rep.violated = msg;
    };

    std::vector<Subset> us;
    for_each_subset(A, st.nstar, [&](std::span<const Elem> u) {
        us.emplace_back(u.begin(), u.end());
        return true;
    });

    // (b): g-set masks stay inside {nstar..ntensor-1}
    uint32_t allowed = 0;
    for (uint32_t q = st.nstar; q < st.ntensor; ++q) allowed |= uint32_t(1) << q;
    for (uint32_t k = 0; k < K && rep.ok; ++k)
        for (const auto& u : us) {
            ++rep.checked;
            if (st.gsets[k].at(u) & ~allowed) {
                fail("(b): g-set positions out of range");
                break;
            }
        }
    if (!rep.ok) return rep;

    // estimated full instance count for (a), (c), (d), (e)
    auto est = [&](uint64_t per_u) -> uint64_t {
        unsigned __int128 total = 0;
        for (const auto& u : us) {
            (void)u;
            total += per_u;
            if (total > ~uint64_t(0)) return ~uint64_t(0);
        }
        return uint64_t(total);
    };
    uint64_t tails = binom64(A.size(), p).value_or(~uint64_t(0));
    uint64_t full = est(tails + tails * tails);
    bool exhaustive = full <= budget;
    rep.sampled = !exhaustive;
    Rng rng(derive_seed(seed, "verify_stepdown"));

    auto above_of = [&](const Subset& u) {
        Subset ab;
        for (Elem a : A)
            if (a > u.back()) ab.push_back(a);
        return ab;
    };

    // (a) and (c)/(e) exhaustive sweep, or uniform sampled probes
    auto check_a = [&](const Subset& u, std::span<const Elem> w) {
        ++rep.checked;
        uint64_t g1 = g(set_union(u, w));
        uint64_t gp = st.gprime.at(u);
        uint64_t g2 = g(set_union(u, st.anchors));
        if (g1 != gp || gp != g2) fail("(a): g(u+w) != g'(u) or g'(u) != g(u+w*)");
        return rep.ok;
    };
    auto check_c = [&](const Subset& u, std::span<const Elem> w1, std::span<const Elem> w2) {
        for (uint32_t k = 0; k < K && rep.ok; ++k) {
            ++rep.checked;
            uint32_t mask = st.gsets[k].at(u);
            Subset v1 = pipe_detail::marked_positions(w1, st.nstar, mask);
            Subset v2 = pipe_detail::marked_positions(w2, st.nstar, mask);
            if (v1 != v2) continue;
            uint64_t h = st.hmaps[k].at(u);
            Elem minw = std::min(w1.empty() ? ~Elem(0) : w1.front(),
                                 w2.empty() ? ~Elem(0) : w2.front());
            if (!w1.empty() && uint64_t(minw) < h && w1.front() != w2.front()) continue;
            if (fs[k](set_union(u, w1)) != fs[k](set_union(u, w2)))
                fail("(c): marked tails agree but f values differ");
        }
        return rep.ok;
    };
    auto check_e = [&](const Subset& u0, const Subset& u1, std::span<const Elem> w) {
        for (uint32_t k = 0; k < K && rep.ok; ++k) {
            ++rep.checked;
            bool lhs = fs[k](set_union(u0, w)) == fs[k](set_union(u1, w));
            bool rhs = fs[k](set_union(u0, st.anchors)) == fs[k](set_union(u1, st.anchors));
            if (lhs != rhs) fail("(e): neighbor agreement differs between w and w*");
        }
        return rep.ok;
    };

    if (exhaustive) {
        for (const auto& u : us) {
            if (!rep.ok) break;
            Subset ab = above_of(u);
            std::vector<Subset> ws;
            for_each_subset(ab, p, [&](std::span<const Elem> w) {
                ws.emplace_back(w.begin(), w.end());
                return true;
            });
            for (const auto& w : ws)
                if (!check_a(u, w)) break;
            for (size_t x = 0; x < ws.size() && rep.ok; ++x)
                for (size_t y = 0; y < ws.size() && rep.ok; ++y)
                    check_c(u, ws[x], ws[y]);
        }
        // (e): neighbor pairs
        for (size_t i = 0; i < us.size() && rep.ok; ++i)
            for (size_t j = i + 1; j < us.size() && rep.ok; ++j) {
                if (!neighbors(us[i], us[j])) continue;
                Elem top = std::max(us[i].back(), us[j].back());
                Subset ab;
                for (Elem a : A)
                    if (a > top) ab.push_back(a);
                for_each_subset(ab, p, [&](std::span<const Elem> w) {
                    return check_e(us[i], us[j], w);
                });
            }
    } else {
        uint64_t probes = budget / 3 + 1;
        for (uint64_t it = 0; it < probes && rep.ok; ++it) {
            const Subset& u = us[rng.below(us.size())];
            Subset ab = above_of(u);
            if (ab.size() < p) continue;
            Subset w1 = rng.sample_sorted(std::span<const Elem>(ab), p);
            Subset w2 = rng.sample_sorted(std::span<const Elem>(ab), p);
            if (!check_a(u, w1)) break;
            check_c(u, w1, w2);
        }
        for (uint64_t it = 0; it < probes && rep.ok; ++it) {
            const Subset& u0 = us[rng.below(us.size())];
            // mutate one coordinate to get a neighbor inside A
            Subset u1 = u0;
            size_t pos = size_t(rng.below(u0.size()));
            Subset choices;
            for (Elem a : A) {
                Elem lo = pos > 0 ? u0[pos - 1] : 0;
                Elem hi = pos + 1 < u0.size() ? u0[pos + 1] : ~Elem(0);
                if (a > lo && a < hi && a != u0[pos]) choices.push_back(a);
            }
            if (choices.empty()) continue;
            u1[pos] = choices[rng.below(choices.size())];
            Elem top = std::max(u0.back(), u1.back());
            Subset ab;
            for (Elem a : A)
                if (a > top) ab.push_back(a);
            if (ab.size() < p) continue;
            Subset w = rng.sample_sorted(std::span<const Elem>(ab), p);
            check_e(u0, u1, w);
        }
    }
    if (!rep.ok) return rep;

    // (d): positional splits, exhaustive over the same budget philosophy
    uint64_t d_budget = exhaustive ? ~uint64_t(0) : budget / 3 + 1;
    uint64_t d_done = 0;
    for (const auto& u : us) {
        if (!rep.ok || d_done > d_budget) break;
        Subset ab = above_of(u);
        if (p < 1) break;
        for (uint32_t s = 0; s + 1 <= p && rep.ok; ++s) {
            // w1 of size s, then i < j, then w2 of size p-1-s above j
            for_each_subset(ab, s, [&](std::span<const Elem> w1) {
                Subset rest;
                for (Elem a : ab)
                    if (w1.empty() || a > w1.back()) rest.push_back(a);
                for (size_t xi = 0; xi < rest.size() && rep.ok; ++xi)
                    for (size_t xj = xi + 1; xj < rest.size() && rep.ok; ++xj) {
                        Elem i = rest[xi], j = rest[xj];
                        Subset tail_pool;
                        for (Elem a : rest)
                            if (a > j) tail_pool.push_back(a);
                        for_each_subset(tail_pool, p - 1 - s, [&](std::span<const Elem> w2) {
                            ++rep.checked;
                            ++d_done;
                            for (uint32_t k = 0; k < K; ++k) {
                                Subset base(u);
                                base.insert(base.end(), w1.begin(), w1.end());
                                Subset ti = base, tj = base;
                                ti.push_back(i);
                                tj.push_back(j);
                                ti.insert(ti.end(), w2.begin(), w2.end());
                                tj.insert(tj.end(), w2.begin(), w2.end());
                                bool eq = fs[k](ti) == fs[k](tj);
                                if (s >= 1) {
                                    bool expect = !(st.gsets[k].at(u) >> (st.nstar + s) & 1);
                                    if (eq != expect) {
                                        fail("(d)(i): equality does not match g-set at position " +
                                             std::to_string(st.nstar + s));
                                        return false;
                                    }
                                } else {
                                    bool expect = st.hmaps[k].at(u) <= uint64_t(i);
                                    if (eq != expect) {
                                        fail("(d)(ii): equality does not match h threshold");
                                        return false;
                                    }
                                }
                            }
                            return d_done <= d_budget;
                        });
                    }
                return rep.ok && d_done <= d_budget;
            });
        }
    }
    return rep;
}

// ---- Claim 1.4(1): threshold cleanup ---------------------------------------

struct CleanupResult {
    std::optional<Subset> out;
    // per k (in processing order): true if settled by the "h stays >= "
    // alternative (window), false for the "h falls below" alternative
    std::vector<std::string> notes;
};

// Finds A'' of size >= m0 on which every h_k answers i < j => h_k(i) >= j
// uniformly, or i < j => h_k(i) < j uniformly. Deterministic.
inline CleanupResult cleanup_h(const Subset& ground, const std::vector<UnaryFn>& hs,
                               uint64_t m0) {
    CleanupResult res;
    const uint32_t K = uint32_t(hs.size());
    if (ground.size() < m0 || m0 == 0) return res;

    // comparison-pattern pigeonhole so the h_k become pointwise ordered
    std::map<uint64_t, Subset> groups;
    for (Elem i : ground) {
        uint64_t key = 0;
        for (uint32_t a = 0; a < K; ++a)
            for (uint32_t b = 0; b < K; ++b)
                key = (key << 1) | (hs[a](i) <= hs[b](i) ? 1 : 0);
        groups[key].push_back(i);
    }
    uint64_t best_key = 0;
    size_t best = 0;
    for (const auto& [key, members] : groups)
        if (members.size() > best) { best = members.size(); best_key = key; }
    Subset S = groups[best_key];
    if (S.size() < m0) return res;

    // ascending pointwise order of the h's inside the chosen group
    std::vector<uint32_t> order(K);
    for (uint32_t k = 0; k < K; ++k) order[k] = k;
    Elem probe = S.front();
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        uint64_t ca = 0, cb = 0;
        for (uint32_t l = 0; l < K; ++l) {
            ca += hs[l](probe) <= hs[a](probe) ? 1 : 0;
            cb += hs[l](probe) <= hs[b](probe) ? 1 : 0;
        }
        return ca < cb;
    });

    for (uint32_t step = 0; step < K; ++step) {
        uint32_t k = order[step];
        // window where h_k stays above the window top: the first alternative,
        // and every not-yet-processed h dominates h_k pointwise.
        for (size_t pos = 0; pos + m0 <= S.size(); ++pos) {
            bool ok = true;
            for (size_t q = pos; q + 1 < pos + m0; ++q)
                if (hs[k](S[q]) < uint64_t(S[pos + m0 - 1])) { ok = false; break; }
            if (ok) {
                res.notes.push_back("h[" + std::to_string(k) + "]: window (first alternative)");
                res.out = Subset(S.begin() + pos, S.begin() + pos + m0);
                return res;
            }
        }
        // otherwise: greedy chain realizing the second alternative
        Subset chain{S.front()};
        for (Elem x : S)
            if (uint64_t(x) > hs[k](chain.back())) chain.push_back(x);
        res.notes.push_back("h[" + std::to_string(k) + "]: chain of " +
                            std::to_string(chain.size()) + " (second alternative)");
        if (chain.size() < m0) return res;
        S = std::move(chain);
    }
    res.out = std::move(S);
    return res;
}

// ---- Claim 1.4(2): constant or one-to-one ----------------------------------

struct CteInjResult {
    std::optional<Subset> out;
    std::vector<bool> injective;  // route taken per k
};

// A' on which every f_k is constant or injective and every g_k constant.
// Greedy: per k, majority g-class, then the larger of (largest f-class,
// one representative per f-class); ties prefer the constant route.
inline CteInjResult constant_or_injective(const Subset& ground, const std::vector<UnaryFn>& fs,
                                          const std::vector<UnaryFn>& gs, uint64_t d,
                                          uint64_t m0) {
    CteInjResult res;
    res.injective.assign(fs.size(), false);
    Subset S = ground;
    for (size_t k = 0; k < fs.size(); ++k) {
        {
            std::map<uint64_t, Subset> by_g;
            for (Elem i : S) by_g[gs[k](i)].push_back(i);
            if (by_g.size() > d) return res;  // precondition |range| <= d violated
            size_t best = 0;
            uint64_t best_v = 0;
            for (const auto& [v, members] : by_g)
                if (members.size() > best) { best = members.size(); best_v = v; }
            S = by_g[best_v];
        }
        {
            std::map<uint64_t, Subset> by_f;
            for (Elem i : S) by_f[fs[k](i)].push_back(i);
            Subset reps;
            size_t best = 0;
            uint64_t best_v = by_f.begin()->first;
            for (const auto& [v, members] : by_f) {
                reps.push_back(members.front());
                if (members.size() > best) { best = members.size(); best_v = v; }
            }
            std::sort(reps.begin(), reps.end());
            if (best >= reps.size()) {
                S = by_f[best_v];
            } else {
                S = std::move(reps);
                res.injective[k] = true;
            }
        }
    }
    if (S.size() <= m0) return res;
    res.out = std::move(S);
    return res;
}

// ---- Claim 1.5: randomized repair -------------------------------------------

struct RandomFixResult {
    std::optional<Subset> astar;
    uint32_t tries = 0;
    uint32_t failures = 0;
    bool regimes_ok = true;    // every h resolved to <= min-above or > max
    Rat bound;                 // the displayed failure-probability bound
    bool bound_strict = false; // bound < 1
    std::vector<uint32_t> gtilde_mask;  // effective per-k masks when uniform, else per-u
};

namespace pipe_detail {

// effective g-set at u: the stored mask plus position nstar when the
// threshold stays above everything in the sampling ground set
inline uint32_t effective_mask(const StepDownState& st, uint32_t k, const Subset& u,
                               const Subset& ground, bool* mid) {
    uint32_t mask = st.gsets[k].at(u);
    uint64_t h = st.hmaps[k].at(u);
    Elem min_above = 0;
    for (Elem a : ground)
        if (a > u.back()) { min_above = a; break; }
    if (min_above == 0) return mask;  // no instances to govern
    if (h > uint64_t(ground.back())) return mask | (uint32_t(1) << st.nstar);
    if (h <= uint64_t(min_above)) return mask;
    if (mid) *mid = true;
    return mask;
}

// clause (f): equality of f_k on shared-head tuples iff the marked subsets
// agree; `forward_only` checks just the => direction
inline bool fclause_ok(const Subset& cand, const StepDownState& st,
                       const std::vector<TupleFn>& fs,
                       const std::map<Subset, std::vector<uint32_t>>& masks,
                       bool backward_only = false) {
    const uint32_t p = st.ntensor - st.nstar;
    bool ok = true;
    for_each_subset(cand, st.nstar, [&](std::span<const Elem> uu) {
        Subset u(uu.begin(), uu.end());
        Subset ab;
        for (Elem a : cand)
            if (a > u.back()) ab.push_back(a);
        std::vector<Subset> ws;
        for_each_subset(ab, p, [&](std::span<const Elem> w) {
            ws.emplace_back(w.begin(), w.end());
            return true;
        });
        const auto& km = masks.at(u);
        for (size_t k = 0; k < fs.size() && ok; ++k) {
            std::vector<Subset> marked;
            marked.reserve(ws.size());
            for (const auto& w : ws) marked.push_back(marked_positions(w, st.nstar, km[k]));
            for (size_t x = 0; x < ws.size() && ok; ++x)
                for (size_t y = x + 1; y < ws.size() && ok; ++y) {
                    bool eq = fs[k](set_union(u, ws[x])) == fs[k](set_union(u, ws[y]));
                    bool veq = marked[x] == marked[y];
                    if (backward_only ? (veq && !eq) : (eq != veq)) ok = false;
                }
        }
        return ok;
    });
    return ok;
}

}  // namespace pipe_detail

// Draws m-subsets of the ground set until one satisfies clause (f) with the
// effective (threshold-resolved) g-sets, verified exhaustively; or scans
// [ground]^m in colex order when exhaustive = true.
inline RandomFixResult random_fix(const Subset& ground, const StepDownState& st,
                                  const std::vector<TupleFn>& fs, uint32_t m, uint64_t seed,
                                  uint32_t retry_budget = 64, bool exhaustive = false) {
    RandomFixResult res;
    const uint32_t K = st.kstar();
    const uint32_t p = st.ntensor - st.nstar;
    res.bound = failure_prob_bound(st.ntensor, st.nstar, K, m, ground.size()).value;
    res.bound_strict = res.bound < Rat(1);
    if (ground.size() < m) return res;

    std::map<Subset, std::vector<uint32_t>> masks;
    for_each_subset(ground, st.nstar, [&](std::span<const Elem> uu) {
        Subset u(uu.begin(), uu.end());
        std::vector<uint32_t> km(K);
        for (uint32_t k = 0; k < K; ++k) {
            bool mid = false;
            km[k] = pipe_detail::effective_mask(st, k, u, ground, &mid);
            if (mid) res.regimes_ok = false;
        }
        masks[u] = std::move(km);
        return true;
    });
    (void)p;

    if (exhaustive) {
        for_each_subset(ground, m, [&](std::span<const Elem> cand) {
            ++res.tries;
            Subset c(cand.begin(), cand.end());
            if (pipe_detail::fclause_ok(c, st, fs, masks)) {
                res.astar = c;
                return false;
            }
            ++res.failures;
            return true;
        });
        return res;
    }
    Rng rng(derive_seed(seed, "random_fix"));
    for (uint32_t t = 0; t < retry_budget; ++t) {
        ++res.tries;
        Subset cand = rng.sample_sorted(std::span<const Elem>(ground), m);
        if (pipe_detail::fclause_ok(cand, st, fs, masks)) {
            res.astar = std::move(cand);
            return res;
        }
        ++res.failures;
    }
    return res;
}

// Test hook: the backward implication of clause (f) on the ground set itself.
inline bool fclause_backward_holds(const Subset& ground, const StepDownState& st,
                                   const std::vector<TupleFn>& fs) {
    std::map<Subset, std::vector<uint32_t>> masks;
    bool mid = false;
    for_each_subset(ground, st.nstar, [&](std::span<const Elem> uu) {
        Subset u(uu.begin(), uu.end());
        std::vector<uint32_t> km(st.kstar());
        for (uint32_t k = 0; k < st.kstar(); ++k)
            km[k] = pipe_detail::effective_mask(st, k, u, ground, &mid);
        masks[u] = std::move(km);
        return true;
    });
    return pipe_detail::fclause_ok(ground, st, fs, masks, /*backward_only=*/true);
}

}  // namespace canon

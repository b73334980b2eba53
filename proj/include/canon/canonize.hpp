#pragma once

// End-to-end canonization: step-down to unary bookkeeping, constant-or-
// injective extraction, threshold cleanup, randomized repair, then pattern
// extraction. The returned pattern always comes from find_patterns on the
// final subset (robust against bookkeeping convention drift); the pattern
// the bookkeeping predicts is recorded alongside and a mismatch is a
// diagnostic, not an error. Every run yields a trace that replays
// bit-for-bit from its recorded config and seed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "canon/bounds.hpp"
#include "canon/canonicity.hpp"
#include "canon/coloring.hpp"
#include "canon/pipeline.hpp"

namespace canon {

struct CanonizeConfig {
    enum class Schedule { auto_max, paper, custom };
    Schedule schedule = Schedule::auto_max;
    // custom mode: one ramification target per level 1..n-1 (ascending),
    // then the constant-or-injective target, then the cleanup target
    std::vector<uint64_t> custom_sizes;
    uint64_t seed = 0;
    uint32_t retry_budget = 64;
    bool exhaustive = false;
    bool verify_stages = true;
    uint64_t verify_budget = 2000000;
    BoundConstants consts;

    std::string schedule_name() const {
        switch (schedule) {
            case Schedule::auto_max: return "auto";
            case Schedule::paper: return "paper";
            case Schedule::custom: return "custom";
        }
        return "?";
    }
    static std::optional<Schedule> schedule_from_name(const std::string& s) {
        if (s == "auto") return Schedule::auto_max;
        if (s == "paper") return Schedule::paper;
        if (s == "custom") return Schedule::custom;
        return std::nullopt;
    }
};

struct CanonizeResult {
    bool success = false;
    std::optional<CanonicalWitness> witness;
    std::optional<StageFailure> failure;
    nlohmann::json trace;
};

inline uint64_t coloring_fingerprint(const Coloring& f) {
    uint64_t h = 14695981039346656037ULL;
    auto mix = [&](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 1099511628211ULL;
        }
    };
    mix(f.arity);
    mix(f.domain);
    for (uint32_t v : f.values) mix(v);
    return h;
}

inline nlohmann::json config_json(const CanonizeConfig& cfg) {
    return {{"schedule", cfg.schedule_name()},
            {"custom_sizes", cfg.custom_sizes},
            {"seed", cfg.seed},
            {"retry_budget", cfg.retry_budget},
            {"exhaustive", cfg.exhaustive},
            {"verify_stages", cfg.verify_stages},
            {"verify_budget", cfg.verify_budget}};
}

inline CanonizeResult canonize(const Coloring& f, uint32_t m, const CanonizeConfig& cfg) {
    CanonizeResult res;
    nlohmann::json& tr = res.trace;
    const uint32_t n = f.arity;
    const uint32_t N = f.domain;
    tr["config"] = config_json(cfg);
    tr["input"] = {{"arity", n}, {"domain", N}, {"fingerprint", coloring_fingerprint(f)}, {"m", m}};
    tr["stages"] = nlohmann::json::array();

    auto fail_stage = [&](const std::string& stage, const std::string& detail) {
        res.failure = StageFailure{stage, detail};
        tr["stages"].push_back({{"name", stage}, {"outcome", detail}});
        tr["success"] = false;
        tr["failure"] = {{"stage", stage}, {"detail", detail}};
        return res;
    };
    if (m < n) return fail_stage("setup", "need m >= n");
    if (N < n) return fail_stage("setup", "need domain >= n");

    Subset ground(N);
    for (uint32_t i = 0; i < N; ++i) ground[i] = i + 1;
    std::vector<TupleFn> fs{as_fn(f)};
    TupleFn g = constant_fn(0);

    // --- targets per schedule mode
    StepDownOptions sd_opt;
    std::optional<BigNat> cte_target_big, cleanup_target_big;  // thresholds to report
    uint64_t cte_target = m, cleanup_target = m;
    if (cfg.schedule == CanonizeConfig::Schedule::paper) {
        if (n < 2 || m < 2) return fail_stage("setup", "paper schedule needs n >= 2, m >= 2");
        Schedule18 sched = schedule_18(n, m, cfg.consts);
        sd_opt.auto_targets = false;
        for (uint32_t l = 1; l < n; ++l) {
            const ScheduleEntry& e = sched.entries[l - 1];
            if (e.exact) sd_opt.targets.push_back(StepDownTarget::exact(*e.exact));
            else sd_opt.targets.push_back(StepDownTarget::symbolic("m(" + std::to_string(l) + ") = " + e.str()));
        }
        cte_target_big = sched.m2;
        cleanup_target_big = sched.m1;
        tr["schedule"] = {{"m1", sched.m1.str_brief()},
                          {"m2", sched.m2.str_brief()},
                          {"m3", sched.m3.str_brief()}};
    } else if (cfg.schedule == CanonizeConfig::Schedule::custom) {
        if (cfg.custom_sizes.size() != size_t(n) + 1)
            return fail_stage("setup", "custom schedule needs n+1 sizes (levels 1..n-1, then two stage targets)");
        sd_opt.auto_targets = false;
        for (uint32_t l = 1; l < n; ++l)
            sd_opt.targets.push_back(StepDownTarget::exact(BigNat(cfg.custom_sizes[l - 1])));
        cte_target = cfg.custom_sizes[n - 1];
        cleanup_target = cfg.custom_sizes[n];
    }

    // --- stage 1: step-down
    StepDownResult sd = step_down(ground, fs, g, n, 1, sd_opt);
    {
        nlohmann::json rec = {{"name", "stepdown"},
                              {"input_size", N},
                              {"notes", sd.notes}};
        if (sd.failure) {
            rec["outcome"] = sd.failure->detail;
            tr["stages"].push_back(rec);
            res.failure = sd.failure;
            tr["success"] = false;
            tr["failure"] = {{"stage", sd.failure->stage}, {"detail", sd.failure->detail}};
            return res;
        }
        rec["outcome"] = "ok";
        rec["output_size"] = sd.state->aprime.size();
        tr["stages"].push_back(rec);
    }
    StepDownState st = std::move(*sd.state);

    if (cfg.verify_stages) {
        VerifyReport vr = verify_stepdown(st, fs, g, cfg.verify_budget,
                                          derive_seed(cfg.seed, "verify"));
        tr["stages"].push_back({{"name", "stepdown-verify"},
                                {"checked", vr.checked},
                                {"sampled", vr.sampled},
                                {"outcome", vr.ok ? "ok" : vr.violated}});
        if (!vr.ok) {
            res.failure = StageFailure{"stepdown-verify", vr.violated};
            tr["success"] = false;
            tr["failure"] = {{"stage", "stepdown-verify"}, {"detail", vr.violated}};
            return res;
        }
    }

    // --- stage 2: constant-or-injective on the anchored unary projections
    std::vector<UnaryFn> fstar, gstar;
    fstar.push_back([&f, &st](Elem i) -> uint64_t {
        Subset t{i};
        t.insert(t.end(), st.anchors.begin(), st.anchors.end());
        return f.eval(t);
    });
    gstar.push_back([&st](Elem i) -> uint64_t { return st.gsets[0].at(Subset{i}); });
    std::map<uint64_t, bool> distinct_g;
    for (Elem i : st.aprime) distinct_g[gstar[0](i)] = true;
    uint64_t d = distinct_g.size();

    if (cte_target_big && !(*cte_target_big < BigNat(st.aprime.size())))
        return fail_stage("constant-or-injective",
                          "target m(0) = " + cte_target_big->str_brief() +
                              " requires |A| > m(0); have |A| = " + std::to_string(st.aprime.size()));
    if (cte_target_big) cte_target = cte_target_big->to_u64();

    CteInjResult ci = constant_or_injective(st.aprime, fstar, gstar, d, cte_target);
    if (!ci.out)
        return fail_stage("constant-or-injective",
                          "no subset larger than " + std::to_string(cte_target) +
                              " with f constant-or-injective and g constant");
    bool injective_route = ci.injective[0];
    tr["stages"].push_back({{"name", "constant-or-injective"},
                            {"input_size", st.aprime.size()},
                            {"target", cte_target},
                            {"output_size", ci.out->size()},
                            {"route", injective_route ? "injective" : "constant"},
                            {"outcome", "ok"}});
    st.restrict_to(*ci.out);

    // --- stage 3: threshold cleanup on the clamped unary h
    if (cleanup_target_big && !(*cleanup_target_big < BigNat(st.aprime.size()) + BigNat(1)))
        return fail_stage("cleanup",
                          "target m(0) = " + cleanup_target_big->str_brief() +
                              " requires |A'| >= m(0); have |A'| = " + std::to_string(st.aprime.size()));
    if (cleanup_target_big) cleanup_target = cleanup_target_big->to_u64();

    const Subset pre_cleanup = st.aprime;
    std::vector<UnaryFn> hclamped;
    hclamped.push_back([&st, pre_cleanup](Elem i) -> uint64_t {
        uint64_t h = st.hmaps[0].at(Subset{i});
        uint64_t floor_v = i;  // clamp target: min of the set above i, or i itself
        for (Elem a : pre_cleanup)
            if (a > i) { floor_v = a; break; }
        return std::max(h, floor_v);
    });
    CleanupResult cl = cleanup_h(st.aprime, hclamped, cleanup_target);
    if (!cl.out)
        return fail_stage("cleanup", "no subset of size " + std::to_string(cleanup_target) +
                                         " with uniform threshold behavior");
    tr["stages"].push_back({{"name", "cleanup"},
                            {"input_size", st.aprime.size()},
                            {"target", cleanup_target},
                            {"output_size", cl.out->size()},
                            {"notes", cl.notes},
                            {"outcome", "ok"}});
    st.restrict_to(*cl.out);

    // --- stage 4: randomized repair
    uint64_t rf_seed = derive_seed(cfg.seed, "random_fix");
    RandomFixResult rf = random_fix(st.aprime, st, fs, m, rf_seed, cfg.retry_budget,
                                    cfg.exhaustive);
    {
        nlohmann::json rec = {{"name", "random-fix"},
                              {"input_size", st.aprime.size()},
                              {"target", m},
                              {"seed", rf_seed},
                              {"tries", rf.tries},
                              {"failures", rf.failures},
                              {"regimes_resolved", rf.regimes_ok},
                              {"bound", rf.bound.to_string()},
                              {"bound_strict", rf.bound_strict}};
        if (!rf.astar) {
            rec["outcome"] = "retries exhausted";
            tr["stages"].push_back(rec);
            std::string detail = "no valid subset after " + std::to_string(rf.tries) +
                                 " draws (bound " + rf.bound.to_string() + ")";
            res.failure = StageFailure{"random-fix", detail};
            tr["success"] = false;
            tr["failure"] = {{"stage", "random-fix"}, {"detail", detail}};
            return res;
        }
        rec["outcome"] = "ok";
        rec["output"] = *rf.astar;
        tr["stages"].push_back(rec);
    }

    // --- pattern extraction (and the bookkeeping cross-check)
    std::vector<Pattern> pats = find_patterns(f, *rf.astar);
    if (pats.empty())
        return fail_stage("pattern", "returned subset satisfies the repair clause but no canonical pattern");
    Pattern v = pats.front();

    uint32_t book = injective_route ? 1u : 0u;
    bool book_uniform = true;
    std::optional<uint32_t> book_tail;
    for (Elem i : *rf.astar) {
        bool mid = false;
        uint32_t em = pipe_detail::effective_mask(st, 0, Subset{i}, st.aprime, &mid);
        if (!book_tail) book_tail = em;
        else if (*book_tail != em) book_uniform = false;
    }
    if (book_tail) book |= *book_tail;  // 0-based tail position p maps to mask bit p
    bool mismatch = !book_uniform || book != v.mask;

    res.success = true;
    res.witness = CanonicalWitness{*rf.astar, v};
    tr["witness"] = {{"subset", *rf.astar}, {"pattern_mask", v.mask}, {"pattern", v.str(n)}};
    tr["bookkeeping"] = {{"pattern_mask", book}, {"uniform", book_uniform}, {"mismatch", mismatch}};
    tr["success"] = true;
    return res;
}

}  // namespace canon

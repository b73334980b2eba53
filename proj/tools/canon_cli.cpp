// canon: exact canonical-Ramsey workbench.
//
// Subcommands: gen, verify, oracle, er-search, canonize, replay, bound.
// Exit codes: 0 success / predicate true; 1 predicate false / nothing found;
// 2 stage failure; 64 usage or refused budget.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "canon/bounds.hpp"
#include "canon/canonicity.hpp"
#include "canon/canonize.hpp"
#include "canon/coloring.hpp"
#include "canon/ramify.hpp"

using nlohmann::json;
using namespace canon;

namespace {

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitStageFailure = 2;
constexpr int kExitUsage = 64;

uint64_t env_budget(const char* name, uint64_t fallback) {
    const char* v = std::getenv(name);
    if (!v) return fallback;
    try {
        return std::stoull(v);
    } catch (...) {
        return fallback;
    }
}

Subset parse_subset(const std::string& text) {
    Subset out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(Elem(std::stoul(item)));
    }
    check_subset(out);
    return out;
}

uint32_t parse_pattern_mask(const std::string& text, uint32_t n) {
    uint32_t mask = 0;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        uint32_t pos = uint32_t(std::stoul(item));
        if (pos < 1 || pos > n) throw std::invalid_argument("pattern position out of 1..n");
        mask |= uint32_t(1) << (pos - 1);
    }
    return mask;
}

std::string subset_str(const Subset& s) {
    std::string out = "{";
    for (size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
    return out + "}";
}

struct GenArgs {
    uint32_t n = 2, domain = 8;
    std::string kind = "random";
    uint32_t colors = 2;
    std::string vspec;
    uint32_t pos = 1;
    uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    Coloring c;
    if (a.kind == "constant") c = gen_constant(a.n, a.domain);
    else if (a.kind == "injective") c = gen_injective(a.n, a.domain);
    else if (a.kind == "random") c = gen_random(a.n, a.domain, a.colors, a.seed);
    else if (a.kind == "canonical") c = gen_canonical(a.n, a.domain, parse_pattern_mask(a.vspec, a.n));
    else if (a.kind == "minpos") c = gen_min_position(a.n, a.domain, a.pos);
    else {
        std::cerr << "unknown kind: " << a.kind << "\n";
        return kExitUsage;
    }
    if (a.out.empty()) write_coloring(std::cout, c);
    else write_coloring(a.out, c);
    return kExitTrue;
}

int cmd_verify(const std::string& in, const std::string& subset, const std::string& vspec,
               const std::string& format) {
    Coloring f = read_coloring(in);
    Subset aprime = parse_subset(subset);
    Pattern v{parse_pattern_mask(vspec, f.arity)};
    bool ok = is_canonical(f, aprime, v);
    if (format == "json") {
        std::cout << json{{"canonical", ok}, {"subset", aprime}, {"pattern_mask", v.mask}}.dump()
                  << "\n";
    } else {
        std::cout << (ok ? "canonical" : "not canonical") << " on " << subset_str(aprime)
                  << " with v = " << v.str(f.arity) << "\n";
    }
    return ok ? kExitTrue : kExitFalse;
}

int cmd_oracle(const std::string& in, uint32_t m, uint64_t budget, bool force,
               const std::string& format) {
    Coloring f = read_coloring(in);
    auto w = oracle_find(f, m, budget, force);
    if (format == "json") {
        json j{{"found", w.has_value()}};
        if (w) {
            j["subset"] = w->subset;
            j["pattern_mask"] = w->pattern.mask;
            j["pattern"] = w->pattern.str(f.arity);
        }
        std::cout << j.dump() << "\n";
    } else if (w) {
        std::cout << "A' = " << subset_str(w->subset) << ", v = " << w->pattern.str(f.arity)
                  << "\n";
    } else {
        std::cout << "no canonical subset of size " << m << "\n";
    }
    return w ? kExitTrue : kExitFalse;
}

int cmd_er_search(uint32_t n, uint32_t m, uint32_t N, uint64_t budget, bool force,
                  const std::string& format) {
    ErResult r = er_search(n, m, N, budget, force);
    if (format == "json") {
        json j{{"all_ok", r.all_ok}, {"colorings_checked", r.colorings_checked.to_string()}};
        if (r.counterexample) j["counterexample_values"] = r.counterexample->values;
        std::cout << j.dump() << "\n";
    } else if (r.all_ok) {
        std::cout << "all " << r.colorings_checked.to_string() << " colorings of [" << N << "]^"
                  << n << " admit a canonical " << m << "-subset\n";
    } else {
        std::cout << "counterexample coloring found:\n";
        write_coloring(std::cout, *r.counterexample);
    }
    return r.all_ok ? kExitTrue : kExitFalse;
}

struct CanonizeArgs {
    std::string in;
    uint32_t m = 3;
    std::string schedule = "auto";
    std::string sizes;
    uint64_t seed = 0;
    uint32_t retries = 64;
    bool exhaustive = false;
    bool no_verify = false;
    std::string trace_path;
    std::string format = "text";
};

CanonizeConfig make_config(const CanonizeArgs& a) {
    CanonizeConfig cfg;
    auto sched = CanonizeConfig::schedule_from_name(a.schedule);
    if (!sched) throw std::invalid_argument("schedule must be auto, paper, or custom");
    cfg.schedule = *sched;
    if (!a.sizes.empty()) {
        std::stringstream ss(a.sizes);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) cfg.custom_sizes.push_back(std::stoull(item));
    }
    cfg.seed = a.seed;
    cfg.retry_budget = a.retries;
    cfg.exhaustive = a.exhaustive;
    cfg.verify_stages = !a.no_verify;
    return cfg;
}

int report_canonize(const Coloring& f, const CanonizeResult& res, const CanonizeArgs& a) {
    if (!a.trace_path.empty()) {
        std::ofstream t(a.trace_path, std::ios::binary);
        t << res.trace.dump(2) << "\n";
    }
    if (a.format == "json") {
        std::cout << res.trace.dump() << "\n";
    } else if (res.success) {
        std::cout << "A* = " << subset_str(res.witness->subset) << ", v = "
                  << res.witness->pattern.str(f.arity) << "\n";
    } else {
        std::cout << "stage failure [" << res.failure->stage << "]: " << res.failure->detail
                  << "\n";
    }
    return res.success ? kExitTrue : kExitStageFailure;
}

int cmd_canonize(const CanonizeArgs& a) {
    Coloring f = read_coloring(a.in);
    CanonizeResult res = canonize(f, a.m, make_config(a));
    return report_canonize(f, res, a);
}

int cmd_replay(const std::string& trace_path, const std::string& in, const std::string& format) {
    std::ifstream tf(trace_path);
    if (!tf) {
        std::cerr << "cannot open trace " << trace_path << "\n";
        return kExitUsage;
    }
    json trace = json::parse(tf);
    Coloring f = read_coloring(in);
    if (trace["input"]["fingerprint"] != coloring_fingerprint(f)) {
        std::cerr << "input coloring does not match the trace fingerprint\n";
        return kExitUsage;
    }
    CanonizeConfig cfg;
    auto sched = CanonizeConfig::schedule_from_name(trace["config"]["schedule"]);
    if (!sched) return kExitUsage;
    cfg.schedule = *sched;
    cfg.custom_sizes = trace["config"]["custom_sizes"].get<std::vector<uint64_t>>();
    cfg.seed = trace["config"]["seed"];
    cfg.retry_budget = trace["config"]["retry_budget"];
    cfg.exhaustive = trace["config"]["exhaustive"];
    cfg.verify_stages = trace["config"]["verify_stages"];
    cfg.verify_budget = trace["config"]["verify_budget"];
    CanonizeResult res = canonize(f, trace["input"]["m"], cfg);
    bool identical = res.trace == trace;
    if (format == "json") {
        std::cout << json{{"identical", identical}, {"success", res.success}}.dump() << "\n";
    } else {
        std::cout << (identical ? "replay identical" : "replay DIVERGED") << "\n";
        if (res.success)
            std::cout << "A* = " << subset_str(res.witness->subset) << ", v = "
                      << res.witness->pattern.str(f.arity) << "\n";
    }
    return identical ? kExitTrue : kExitFalse;
}

struct BoundArgs {
    uint32_t n = 2;
    uint64_t m = 2;
    int64_t eps_num = 1, eps_den = 1;
    uint32_t kstar = 1, nstar = 2, t = 1, ell_ref = 8;
    bool obs16 = false;
    bool table = false;
    uint64_t m_hi = 0;
    std::string format = "text";
};

int cmd_bound(const BoundArgs& a) {
    BoundConstants consts;
    consts.eps = Rat::frac(a.eps_num, a.eps_den);
    consts.kstar = a.kstar;
    consts.nstar = a.nstar;
    consts.t = a.t;
    consts.ell_ref = a.ell_ref;
    consts.validate();

    json out;
    out["constants"] = {{"c0", consts.c0().to_string()},
                        {"c1", consts.c1().to_string()},
                        {"c2", consts.c2().to_string()},
                        {"c3", consts.c3(std::max(a.n, 2u)).to_string()}};

    if (a.n >= 2 && a.m >= 2) {
        Schedule18 s18 = schedule_18(a.n, a.m, consts);
        json entries = json::array();
        for (const auto& e : s18.entries)
            entries.push_back({{"level", e.level}, {"value", e.str()}});
        out["schedule_18"] = {{"m0", a.m},
                              {"m1", s18.m1.str_brief()},
                              {"m2", s18.m2.str_brief()},
                              {"m3", s18.m3.str_brief()},
                              {"m_of", entries}};
    }
    {
        Schedule17 s17 = schedule_17(1, std::max(a.n, 1u), std::max<uint64_t>(a.m, 2), consts);
        json levels = json::array();
        for (const auto& e : s17.entries)
            levels.push_back({{"level", e.level}, {"value", e.str()}});
        out["schedule_17"] = {{"entries", levels}, {"growth_ok", s17.star9b_all}};
    }
    {
        LemmaBound lb = lemma_bound(a.n, a.m, 1, consts);
        json j{{"height", lb.height},
               {"content", lb.content.str_brief()},
               {"value", lb.value.str()},
               {"lemma_m_degree", lb.lemma_m_degree},
               {"derived_m_degree", lb.derived_m_degree}};
        if (lb.content_vs_derived)
            j["content_vs_derived"] =
                *lb.content_vs_derived == std::strong_ordering::greater ? "lemma larger"
                : *lb.content_vs_derived == std::strong_ordering::less  ? "derived larger"
                                                                        : "equal";
        out["lemma_bound"] = j;
    }
    if (a.obs16) {
        json grid = json::array();
        bool all = true;
        for (uint32_t l = 1; l <= 4; ++l)
            for (uint64_t k = 2; k <= 5; ++k)
                for (uint64_t x = 2; x <= 5; ++x) {
                    auto [scale, power] = check_obs16(l, k, x);
                    all = all && scale && power;
                    grid.push_back({{"l", l}, {"k", k}, {"x", x}, {"scale", scale}, {"power", power}});
                }
        out["obs16"] = {{"all_true", all}, {"grid", grid}};
    }
    if (a.table) {
        uint64_t hi = a.m_hi ? a.m_hi : a.m;
        ComparisonTable t = comparison_table(a.n, a.m, hi, ComparisonConstants{}, consts);
        json rows = json::array();
        for (const auto& row : t.rows) {
            json r{{"m", row.m}};
            for (const auto& [k, v] : row.columns) r[k] = v;
            rows.push_back(r);
        }
        out["comparison_table"] = rows;
    }

    if (a.format == "json") {
        std::cout << out.dump() << "\n";
        return kExitTrue;
    }
    if (out.contains("schedule_18")) {
        const auto& s = out["schedule_18"];
        std::cout << "m_0 = " << a.m << "  m_1 = " << s["m1"].get<std::string>()
                  << "  m_2 = " << s["m2"].get<std::string>()
                  << "  m_3 = " << s["m3"].get<std::string>() << "\n";
        for (const auto& e : s["m_of"])
            std::cout << "  m(" << e["level"] << ") = " << e["value"].get<std::string>() << "\n";
    }
    std::cout << "growth check (*)9(b): "
              << (out["schedule_17"]["growth_ok"].get<bool>() ? "ok" : "FAILED") << "\n";
    std::cout << "headline threshold: beth_" << out["lemma_bound"]["height"] << "("
              << out["lemma_bound"]["content"].get<std::string>() << ")"
              << "  [m-degree " << out["lemma_bound"]["lemma_m_degree"] << " vs derived "
              << out["lemma_bound"]["derived_m_degree"] << "]\n";
    if (out.contains("obs16"))
        std::cout << "beth scale/power laws on the grid: "
                  << (out["obs16"]["all_true"].get<bool>() ? "all true" : "VIOLATION") << "\n";
    if (out.contains("comparison_table"))
        for (const auto& row : out["comparison_table"]) {
            std::cout << "m = " << row["m"] << ":";
            for (auto it = row.begin(); it != row.end(); ++it)
                if (it.key() != "m") std::cout << "  " << it.key() << " = " << it.value();
            std::cout << "\n";
        }
    return kExitTrue;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact canonical-Ramsey workbench"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "generate a coloring file");
    g->add_option("--n", gen.n, "arity")->required();
    g->add_option("--N", gen.domain, "domain size")->required();
    g->add_option("--kind", gen.kind, "constant|injective|random|canonical|minpos");
    g->add_option("--colors", gen.colors, "color budget for random");
    g->add_option("--v", gen.vspec, "pattern positions for canonical, e.g. 1,2");
    g->add_option("--p", gen.pos, "position for minpos");
    g->add_option("--seed", gen.seed, "seed for random");
    g->add_option("--out", gen.out, "output path (stdout if omitted)");

    std::string v_in, v_subset, v_v, v_format = "text";
    auto* v = app.add_subcommand("verify", "check canonicity of a subset under a pattern");
    v->add_option("--in", v_in)->required();
    v->add_option("--subset", v_subset)->required();
    v->add_option("--v", v_v, "pattern positions, e.g. 1,2 (empty = constant)");
    v->add_option("--format", v_format);

    std::string o_in, o_format = "text";
    uint32_t o_m = 3;
    uint64_t o_budget = env_budget("CANON_ORACLE_BUDGET", 10000000);
    bool o_force = false;
    auto* o = app.add_subcommand("oracle", "exhaustive canonical-subset search");
    o->add_option("--in", o_in)->required();
    o->add_option("--m", o_m)->required();
    o->add_option("--budget", o_budget);
    o->add_flag("--force", o_force);
    o->add_option("--format", o_format);

    uint32_t e_n = 1, e_m = 2, e_N = 2;
    uint64_t e_budget = env_budget("CANON_ER_BUDGET", 100000000);
    bool e_force = false;
    std::string e_format = "text";
    auto* e = app.add_subcommand("er-search", "exact ER search over all colorings");
    e->add_option("--n", e_n)->required();
    e->add_option("--m", e_m)->required();
    e->add_option("--N", e_N)->required();
    e->add_option("--budget", e_budget);
    e->add_flag("--force", e_force);
    e->add_option("--format", e_format);

    CanonizeArgs ca;
    auto* c = app.add_subcommand("canonize", "run the canonization pipeline");
    c->add_option("--in", ca.in)->required();
    c->add_option("--m", ca.m)->required();
    c->add_option("--schedule", ca.schedule, "auto|paper|custom");
    c->add_option("--sizes", ca.sizes, "custom stage sizes, comma separated");
    c->add_option("--seed", ca.seed);
    c->add_option("--retries", ca.retries);
    c->add_flag("--exhaustive", ca.exhaustive);
    c->add_flag("--no-verify", ca.no_verify, "skip the stage contract verification");
    c->add_option("--trace", ca.trace_path, "write the replayable JSON trace here");
    c->add_option("--format", ca.format);

    std::string r_trace, r_in, r_format = "text";
    auto* r = app.add_subcommand("replay", "re-run a canonize trace and compare");
    r->add_option("--trace", r_trace)->required();
    r->add_option("--in", r_in)->required();
    r->add_option("--format", r_format);

    BoundArgs ba;
    auto* b = app.add_subcommand("bound", "exact bound calculators");
    b->add_option("--n", ba.n)->required();
    b->add_option("--m", ba.m)->required();
    b->add_option("--eps-num", ba.eps_num);
    b->add_option("--eps-den", ba.eps_den);
    b->add_option("--kstar", ba.kstar);
    b->add_option("--nstar", ba.nstar);
    b->add_option("--t", ba.t);
    b->add_option("--ell-ref", ba.ell_ref);
    b->add_flag("--check-obs16", ba.obs16);
    b->add_flag("--table", ba.table);
    b->add_option("--m-hi", ba.m_hi);
    b->add_option("--format", ba.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*g) return cmd_gen(gen);
        if (*v) return cmd_verify(v_in, v_subset, v_v, v_format);
        if (*o) return cmd_oracle(o_in, o_m, o_budget, o_force, o_format);
        if (*e) return cmd_er_search(e_n, e_m, e_N, e_budget, e_force, e_format);
        if (*c) return cmd_canonize(ca);
        if (*r) return cmd_replay(r_trace, r_in, r_format);
        if (*b) return cmd_bound(ba);
    } catch (const BudgetExceeded& ex) {
        std::cerr << ex.what() << " (" << ex.quantity << "); use --force or raise --budget\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

#pragma once

// Shared drivers for the unit tests and the acceptance binary.

#include <chrono>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "explic/benchmarks.hpp"
#include "explic/checker.hpp"
#include "explic/complement.hpp"
#include "explic/ltl.hpp"
#include "explic/oracle.hpp"
#include "explic/random.hpp"
#include "expected_verdicts.hpp"

namespace explic::testing {

// Pure formula over sys propositions; proposition k is BDD variable k.
inline int to_arena(LtlArena& ar, const Formula& f, const System& sys) {
    auto k = [&](std::size_t i) { return to_arena(ar, *f.kids[i], sys); };
    switch (f.op) {
    case Op::True: return ar.tt();
    case Op::False: return ar.ff();
    case Op::Atom: return ar.var(sys.prop_index(f.name));
    case Op::Not: return ar.lnot(k(0));
    case Op::And: return ar.land(k(0), k(1));
    case Op::Or: return ar.lor(k(0), k(1));
    case Op::Implies: return ar.implies(k(0), k(1));
    case Op::Iff: return ar.iff(k(0), k(1));
    case Op::Next: return ar.next(k(0));
    case Op::Prev: return ar.prev(k(0));
    case Op::Until: return ar.until(k(0), k(1));
    case Op::Since: return ar.since(k(0), k(1));
    case Op::Eventually: return ar.eventually(k(0));
    case Op::Globally: return ar.globally(k(0));
    case Op::Once: return ar.once(k(0));
    case Op::Historically: return ar.historically(k(0));
    default: throw Error("not a pure formula");
    }
}

inline bdd minterm(BddManager& m, MaskLetter l, int nvars) {
    bdd r = BddManager::True;
    for (int v = 0; v < nvars; ++v) r = m.land(r, m.lit(v, (l >> v) & 1));
    return r;
}

inline MaskLasso random_mask_lasso(std::mt19937& rng, int nvars, int max_prefix, int max_loop) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    MaskLasso t;
    int p = pick(0, max_prefix), l = pick(1, max_loop);
    for (int i = 0; i < p; ++i) t.prefix.push_back(static_cast<MaskLetter>(pick(0, (1 << nvars) - 1)));
    for (int i = 0; i < l; ++i) t.loop.push_back(static_cast<MaskLetter>(pick(0, (1 << nvars) - 1)));
    return t;
}

inline bool nba_accepts(const Nba& a, const MaskLasso& t, int nvars) {
    std::vector<bdd> pre, loop;
    for (auto l : t.prefix) pre.push_back(minterm(*a.mgr, l, nvars));
    for (auto l : t.loop) loop.push_back(minterm(*a.mgr, l, nvars));
    return accepts(a, pre, loop);
}

struct PairReport {
    int pairs = 0;
    std::vector<std::string> mismatches;
};

// Random (formula, lasso) pairs: tableau automaton membership vs direct
// evaluation at position 0.
inline PairReport ltl_vs_lasso(int formulas, int lassos_per_formula, unsigned seed) {
    PairReport r;
    std::mt19937 rng(seed);
    for (int k = 0; k < formulas; ++k) {
        RandomSystemConfig rc;
        rc.max_actions = 0;
        System sys = random_system(rng, rc);
        int nv = static_cast<int>(sys.props().size());
        FormulaPtr f = random_ltl(rng, sys, 3);
        BddManager mgr;
        LtlArena ar;
        Nba a = ltl_to_nba(ar, to_arena(ar, *f, sys), mgr);
        for (int j = 0; j < lassos_per_formula; ++j) {
            MaskLasso t = random_mask_lasso(rng, nv, 3, 3);
            ++r.pairs;
            bool direct = eval_ltl_on_lasso(t, 0, f, sys);
            if (direct != nba_accepts(a, t, nv))
                r.mismatches.push_back(to_string(*f) + " on " + to_string(from_mask(t, sys)));
        }
    }
    return r;
}

inline Nba random_nba(std::mt19937& rng, BddManager& m, int nvars, int max_states) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Nba a;
    a.mgr = &m;
    a.nsets = 1;
    int n = pick(1, max_states);
    for (int q = 0; q < n; ++q) a.add_state(pick(0, 2) == 0 ? 1 : 0);
    a.init.push_back(0);
    for (int q = 0; q < n; ++q) {
        int edges = pick(1, 3);
        for (int e = 0; e < edges; ++e) {
            bdd g = BddManager::False;
            for (MaskLetter l = 0; l < (1u << nvars); ++l)
                if (pick(0, 1)) g = m.lor(g, minterm(m, l, nvars));
            if (g == BddManager::False) g = BddManager::True;
            a.add_edge(q, g, pick(0, n - 1));
        }
    }
    return a;
}

struct ComplementReport {
    int automata = 0;
    std::vector<std::string> failures;
};

// L(A) ∩ L(¬A) = ∅, ¬¬A ≡ A, and sampled membership is exclusive.
inline ComplementReport complement_metamorphic(int count, unsigned seed) {
    ComplementReport r;
    std::mt19937 rng(seed);
    const int nv = 2;
    for (int k = 0; k < count; ++k) {
        BddManager m;
        Nba a = random_nba(rng, m, nv, 4);
        Nba c = complement(a);
        ++r.automata;
        std::string tag = "automaton " + std::to_string(k);
        if (!intersection_empty(a, c)) r.failures.push_back(tag + ": L(A) and L(not A) intersect");
        if (!language_equiv(complement(c), a)) r.failures.push_back(tag + ": double complement differs");
        for (int j = 0; j < 8; ++j) {
            MaskLasso t = random_mask_lasso(rng, nv, 2, 3);
            if (nba_accepts(a, t, nv) == nba_accepts(c, t, nv)) {
                r.failures.push_back(tag + ": membership not exclusive");
                break;
            }
        }
    }
    return r;
}

// Oracle bounds for a cross-check: at least (2,2), enlarged to fit every
// counterexample track of the checker.
inline BoundedConfig bounds_for(const Verdict& v) {
    BoundedConfig b{2, 2};
    for (auto& [k, t] : v.counterexample) {
        auto c = canonicalize(t);
        b.prefix_bound = std::max(b.prefix_bound, c.prefix.size());
        b.loop_bound = std::max(b.loop_bound, c.loop.size());
    }
    return b;
}

struct AgreementReport {
    int instances = 0;
    std::vector<std::string> disagreements;
};

// Even seeds: explainability-shaped formula; odd seeds: KLTL of depth <= 3.
inline AgreementReport oracle_agreement(int first_seed, int count) {
    AgreementReport r;
    for (int seed = first_seed; seed < first_seed + count; ++seed) {
        std::mt19937 rng(static_cast<unsigned>(seed));
        System sys = random_system(rng);
        FormulaPtr f = seed % 2 ? random_ltl(rng, sys, 3, true) : random_explainability(rng, sys);
        Verdict v = check(sys, f);
        BoundedConfig b = bounds_for(v);
        Verdict o = oracle_check(sys, f, b);
        ++r.instances;
        if (v.holds != o.holds) {
            std::ostringstream os;
            os << "seed " << seed << ": " << to_string(*f) << " checker=" << v.holds << " oracle=" << o.holds
               << " bounds=" << b.prefix_bound << "," << b.loop_bound;
            r.disagreements.push_back(os.str());
        }
    }
    return r;
}

struct BenchRow {
    Instance inst;
    bool holds = false;
    std::optional<bool> expected;
    double seconds = 0;
    Verdict verdict;
};

inline BenchRow run_instance(const Instance& inst, const ExpectedTable& table, const CheckOptions& opt = {}) {
    BenchRow r;
    r.inst = inst;
    r.expected = table.lookup(inst);
    auto t0 = std::chrono::steady_clock::now();
    System sys = generate_from_spec(inst.spec());
    r.verdict = check(sys, instance_formula(sys, inst), opt);
    r.holds = r.verdict.holds;
    r.seconds = detail::millis_since(t0) / 1000.0;
    return r;
}

inline const ExpectedTable& expected_table() {
    static const ExpectedTable t = ExpectedTable::parse(expected_verdicts_csv);
    return t;
}

// FCE => ICE and ECE, per (family, params).
inline std::vector<std::string> monotonicity_violations(const std::vector<BenchRow>& rows) {
    std::map<std::string, std::map<std::string, bool>> by;
    for (auto& r : rows) by[r.inst.family + ":" + r.inst.params][r.inst.requirement] = r.holds;
    std::vector<std::string> bad;
    for (auto& [k, m] : by) {
        if (!m.count("fce") || !m.at("fce")) continue;
        if ((m.count("ice") && !m.at("ice")) || (m.count("ece") && !m.at("ece"))) bad.push_back(k);
    }
    return bad;
}

// Every system-constrained counterexample track replays in the model.
inline std::vector<std::string> replay_failures(const BenchRow& r) {
    std::vector<std::string> bad;
    if (r.holds) return bad;
    if (!r.verdict.has_counterexample) return {r.inst.key() + ": no counterexample"};
    System sys = generate_from_spec(r.inst.spec());
    for (auto& [k, t] : r.verdict.counterexample) {
        if (k.empty() || k[0] == 'x') continue;  // cause candidates range over all words
        if (!replays(to_mask(t, sys), sys)) bad.push_back(r.inst.key() + ": track " + k + " does not replay");
    }
    if (!r.verdict.counterexample.count("alpha")) bad.push_back(r.inst.key() + ": no root track");
    return bad;
}

// Effect with the known cause implies knowledge of the effect, at every
// explored anchor of a deterministic system.
inline std::vector<std::string> determinism_knowledge_violations(const System& sys, const std::string& agent,
                                                                 const FormulaPtr& effect, const BoundedConfig& b) {
    std::vector<std::string> bad;
    OracleModel om(sys, b, 2);
    const auto& k_eff = om.eval(fm::know(agent, effect));
    for (auto mode : {ExplainMode::ICE, ExplainMode::ECE, ExplainMode::FCE}) {
        NameSet A = explain_action_set(sys, agent, mode);
        auto lhs = fm::land(effect, fm::exists("X", fm::know(agent, fm::cause("X", A, effect))));
        const auto& l = om.eval(lhs);
        for (std::size_t t = 0; t < l.size(); ++t)
            for (std::size_t j = 0; j < l[t].size(); ++j)
                if (l[t][j] && !k_eff[t][j])
                    bad.push_back(sys.name + " " + to_string(mode) + ": " +
                                  to_string(from_mask(om.traces()[t], sys)) + " at " + std::to_string(j));
    }
    return bad;
}

// K[a] f true implies f true, over every position of every bounded trace.
inline std::vector<std::string> veridicality_violations(const System& sys, const FormulaPtr& f, const std::string& agent,
                                                        const BoundedConfig& b) {
    std::vector<std::string> bad;
    OracleModel om(sys, b, 3);
    const auto& k = om.eval(fm::know(agent, f));
    const auto& plain = om.eval(f);
    for (std::size_t t = 0; t < k.size(); ++t)
        for (std::size_t j = 0; j < k[t].size(); ++j)
            if (k[t][j] && !plain[t][j])
                bad.push_back(to_string(*f) + " on " + to_string(from_mask(om.traces()[t], sys)) + " at " +
                              std::to_string(j));
    return bad;
}

struct CauseCase {
    std::string spec, trace;
    std::size_t anchor;
    std::string effect;
    NameSet actions;
    std::string candidate;
};

// The three cause examples with their expected descriptions.
inline const std::vector<CauseCase>& cause_cases() {
    static const std::vector<CauseCase> c{
        {"auction:3:explain", "{o,b1,e} {o} {o,b1} {w1} ({})^w", 0, "F w1", {"b1"}, "b1 | X X b1"},
        {"auction:3:blind", "{o} {o,b2} {o,b1,b3} {w2} ({})^w", 3, "!w1", {"b1"}, "Y Y (!b1 & Y !b1)"},
        {"auction:3:blind", "{o,b2} {o} {o,b1,b3} {w2} ({})^w", 3, "!w1", {"b1"}, "Y Y Y !b1"},
    };
    return c;
}

inline EquivResult run_cause_case(const CauseCase& c, const std::string& candidate) {
    System sys = generate_from_spec(c.spec);
    auto cl = compute_cause(sys, parse_trace(c.trace), c.anchor, parse_formula(c.effect), c.actions);
    return cause_formula_equiv(cl, parse_formula(candidate), c.anchor);
}

// Bounded candidates over 2^A: automaton membership vs the oracle's
// definition-level set.
inline std::vector<std::string> cause_biconditional_mismatches(const CauseCase& c, const BoundedConfig& b) {
    System sys = generate_from_spec(c.spec);
    LassoTrace t = parse_trace(c.trace);
    auto eff = parse_formula(c.effect);
    auto cl = compute_cause(sys, t, c.anchor, eff, c.actions);
    auto members = oracle_cause(sys, Anchor{t, c.anchor}, eff, c.actions, b);
    std::set<LassoTrace> in(members.begin(), members.end());
    std::vector<std::string> bad;
    for (auto& w : enumerate_words(sys.mask(c.actions), b)) {
        LassoTrace lw = from_mask(w, sys);
        if (cause_contains(cl, lw) != (in.count(lw) > 0)) bad.push_back(to_string(lw));
    }
    return bad;
}

}  // namespace explic::testing

#pragma once

// Model checking of the epistemic temporal logic with causal predicates.
//
// Every quantified trace gets its own copy of the propositions (a track);
// evaluation points are single-position marker variables. A formula under
// a polarity compiles to a conjunction of automata over tracks and markers;
// universal parts become complemented projections ("sites").

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bdd.hpp"
#include "complement.hpp"
#include "errors.hpp"
#include "formula.hpp"
#include "ltl.hpp"
#include "nba.hpp"
#include "system.hpp"
#include "trace.hpp"

namespace explic {

struct CheckOptions {
    double timeout_seconds = 300;
    std::size_t state_cap = 1000000;
    bool want_dot = false;  // fill Verdict::product_dot with the final product
};

struct PhaseStat {
    std::string phase;
    std::size_t states = 0;
    double millis = 0;
};

struct Verdict {
    bool holds = true;
    bool has_counterexample = false;
    std::map<std::string, LassoTrace> counterexample;  // track name -> trace
    std::map<std::string, std::size_t> markers;        // evaluation points on the counterexample
    std::vector<PhaseStat> stats;
    int alternation_depth = 0;
    std::vector<std::string> warnings;
    std::size_t peak_states = 0;
    std::string model;
    std::string formula;
    std::string product_dot;
};

// (track, in-cause branch) per bound variable
struct VarBinding {
    int track;
    bool in_cause;
};
using VarMapping = std::map<std::string, VarBinding>;

namespace detail {

inline double millis_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Builds the automata of one check. Owns the BDD manager.
class Encoder {
public:
    using Conj = std::vector<Nba>;

    Encoder(const System& sys, Budget& budget)
        : sys_(sys), mgr_(std::make_shared<BddManager>()), voc_(sys.props()), budget_(budget) {}

    BddManager& mgr() { return *mgr_; }
    std::shared_ptr<BddManager> mgr_ptr() { return mgr_; }
    Vocabulary& voc() { return voc_; }
    const System& sys() const { return sys_; }
    std::vector<PhaseStat>& stats() { return stats_; }
    const std::vector<std::pair<std::string, int>>& named_markers() const { return marker_names_; }

    int new_track(const std::string& base) {
        int n = ++counters_[base];
        return voc_.new_track(base == "alpha" ? base : base + std::to_string(n));
    }
    int new_marker(const std::string& base = "m") {
        int n = counters_[base]++;
        int m = voc_.new_marker(base + std::to_string(n));
        marker_names_.emplace_back(voc_.var_name(m), m);
        return m;
    }

    bdd prop(int track, const std::string& p) {
        int s = sys_.prop_index(p);
        if (s < 0) throw ValidationError("unknown proposition '" + p + "'");
        return mgr_->var(voc_.var(track, s));
    }
    bdd marker(int m) { return mgr_->var(voc_.marker_var(m)); }

    std::vector<int> track_vars(int t) const { return voc_.track_vars(t); }

    // ----- building blocks

    Nba system_nba(int track) {
        Nba a;
        a.mgr = mgr_.get();
        for (std::size_t i = 0; i < sys_.states.size(); ++i) a.add_state();
        for (int s : sys_.initial_indices()) a.init.push_back(s);
        for (auto& e : sys_.edges) {
            bdd g = guard_bdd(*e.guard, track);
            for (auto& p : sys_.props())
                if (!sys_.actions.count(p)) g = mgr_->land(g, e.out.count(p) ? prop(track, p) : mgr_->lnot(prop(track, p)));
            a.add_edge(sys_.state_index(e.from), g, sys_.state_index(e.to));
        }
        return a;
    }

    // m holds exactly at position 0
    Nba at_zero_once(int m) {
        bdd x = marker(m);
        return small(2, {{0, x, 1}, {1, mgr_->lnot(x), 1}}, {}, 0);
    }
    // m holds at position 0 (other positions unconstrained)
    Nba at_zero(int m) {
        bdd x = marker(m);
        return small(2, {{0, x, 1}, {1, BddManager::True, 1}}, {}, 0);
    }
    // m and m2 once each, m2 right after m
    Nba next_rel(int m, int m2) {
        bdd a = marker(m), b = marker(m2), na = mgr_->lnot(a), nb = mgr_->lnot(b);
        return small(3, {{0, mgr_->land(na, nb), 0}, {0, mgr_->land(a, nb), 1}, {1, mgr_->land(na, b), 2},
                         {2, mgr_->land(na, nb), 2}},
                     {2}, 1);
    }
    // m and m2 once each, m2 right before m
    Nba prev_rel(int m, int m2) {
        bdd a = marker(m), b = marker(m2), na = mgr_->lnot(a), nb = mgr_->lnot(b);
        return small(3, {{0, mgr_->land(na, nb), 0}, {0, mgr_->land(na, b), 1}, {1, mgr_->land(a, nb), 2},
                         {2, mgr_->land(na, nb), 2}},
                     {2}, 1);
    }
    // first and second once each, first at or before second
    Nba ordered(int first, int second) {
        bdd a = marker(first), b = marker(second), na = mgr_->lnot(a), nb = mgr_->lnot(b);
        return small(3, {{0, mgr_->land(na, nb), 0}, {0, mgr_->land(a, b), 2}, {0, mgr_->land(a, nb), 1},
                         {1, mgr_->land(na, nb), 1}, {1, mgr_->land(na, b), 2}, {2, mgr_->land(na, nb), 2}},
                     {2}, 1);
    }
    // lo, mid, hi once each with lo <= mid < hi (strict_low: lo < mid <= hi)
    Nba between(int lo, int mid, int hi, bool strict_low) {
        bdd a = marker(lo), b = marker(mid), c = marker(hi);
        auto L = [&](bool x, bool y, bool z) {
            return mgr_->land(mgr_->land(x ? a : mgr_->lnot(a), y ? b : mgr_->lnot(b)), z ? c : mgr_->lnot(c));
        };
        if (!strict_low)
            return small(4, {{0, L(0, 0, 0), 0}, {0, L(1, 1, 0), 2}, {0, L(1, 0, 0), 1}, {1, L(0, 0, 0), 1},
                             {1, L(0, 1, 0), 2}, {2, L(0, 0, 1), 3}, {2, L(0, 0, 0), 2}, {3, L(0, 0, 0), 3}},
                         {3}, 1);
        return small(4, {{0, L(0, 0, 0), 0}, {0, L(1, 0, 0), 1}, {1, L(0, 0, 0), 1}, {1, L(0, 1, 1), 3},
                         {1, L(0, 1, 0), 2}, {2, L(0, 0, 1), 3}, {2, L(0, 0, 0), 2}, {3, L(0, 0, 0), 3}},
                     {3}, 1);
    }
    // agent observations agree on tracks t1, t2 at every position up to m
    Nba obs_eq(const std::string& agent, int t1, int t2, int m) {
        bdd eq = BddManager::True;
        for (auto& p : sys_.agent_or_throw(agent).obs) eq = mgr_->land(eq, mgr_->liff(prop(t1, p), prop(t2, p)));
        bdd x = marker(m);
        return small(2, {{0, mgr_->land(eq, mgr_->lnot(x)), 0}, {0, mgr_->land(eq, x), 1}, {1, BddManager::True, 1}},
                     {}, 0);
    }
    // letterwise: (p_s != p_ref) -> (p_cand != p_ref) for p in A
    Nba similar(const NameSet& A, int s, int ref, int cand) {
        bdd g = BddManager::True;
        for (auto& p : A)
            g = mgr_->land(g, mgr_->limp(mgr_->lxor(prop(s, p), prop(ref, p)), mgr_->lxor(prop(cand, p), prop(ref, p))));
        return small(1, {{0, g, 0}}, {}, 0);
    }
    Nba equal_on(const NameSet& props, int t1, int t2) {
        bdd g = BddManager::True;
        for (auto& p : props) g = mgr_->land(g, mgr_->liff(prop(t1, p), prop(t2, p)));
        return small(1, {{0, g, 0}}, {}, 0);
    }

    // F(m & f) or F(m & !f) for a formula without K, quantifiers or causes;
    // extra markers may appear as atoms through `marker_atoms`.
    Nba pure(const FormulaPtr& f, int track, int m, bool positive, const std::map<std::string, int>& marker_atoms = {}) {
        auto t0 = std::chrono::steady_clock::now();
        LtlArena ar;
        int body = to_arena(ar, *f, track, marker_atoms);
        if (!positive) body = ar.lnot(body);
        int root = ar.eventually(ar.land(ar.var(voc_.marker_var(m)), body));
        Nba a = ltl_to_nba(ar, root, *mgr_, &budget_);
        note("translate", a.size(), detail::millis_since(t0));
        return a;
    }

    int to_arena(LtlArena& ar, const Formula& f, int track, const std::map<std::string, int>& marker_atoms = {}) {
        auto k = [&](std::size_t i) { return to_arena(ar, *f.kids[i], track, marker_atoms); };
        switch (f.op) {
        case Op::True: return ar.tt();
        case Op::False: return ar.ff();
        case Op::Atom: {
            auto it = marker_atoms.find(f.name);
            if (it != marker_atoms.end()) return ar.var(voc_.marker_var(it->second));
            int s = sys_.prop_index(f.name);
            if (s < 0) throw ValidationError("unknown proposition '" + f.name + "'");
            return ar.var(voc_.var(track, s));
        }
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
        default: throw Error("internal: non-temporal operator in pure formula");
        }
    }

    Nba materialize(const Conj& c, const std::string& phase) {
        auto t0 = std::chrono::steady_clock::now();
        if (c.empty()) return universal_nba(*mgr_);
        if (c.size() == 1) return trim(c[0]);
        std::vector<const Nba*> ps;
        for (auto& a : c) ps.push_back(&a);
        Nba r = trim(product(ps, &budget_));
        note(phase, r.size(), detail::millis_since(t0));
        return r;
    }

    // complement of (exists hidden vars . conj), keeping only `keep`
    Nba site(const Conj& c, const std::vector<int>& keep) {
        Nba inner = materialize(c, "site-product");
        auto t0 = std::chrono::steady_clock::now();
        std::vector<int> sup = support(inner), hide;
        std::vector<int> k = keep;
        std::sort(k.begin(), k.end());
        for (int v : sup)
            if (!std::binary_search(k.begin(), k.end(), v)) hide.push_back(v);
        Nba proj = project(inner, hide);
        Nba r = trim(complement(proj, &budget_));
        note("complement", r.size(), detail::millis_since(t0));
        return r;
    }

    void note(const std::string& phase, std::size_t states, double ms) {
        budget_.note(0);
        for (auto& s : stats_)
            if (s.phase == phase) {
                s.states = std::max(s.states, states);
                s.millis += ms;
                return;
            }
        stats_.push_back({phase, states, ms});
    }

    Budget& budget() { return budget_; }

private:
    struct E3 {
        int from;
        bdd g;
        int to;
    };
    Nba small(int n, const std::vector<E3>& es, const std::vector<int>& acc, int nsets) {
        Nba a;
        a.mgr = mgr_.get();
        a.nsets = nsets;
        for (int i = 0; i < n; ++i) a.add_state(0);
        for (int q : acc) a.acc[q] = 1;
        for (auto& e : es) a.add_edge(e.from, e.g, e.to);
        a.init = {0};
        return a;
    }

    bdd guard_bdd(const Guard& g, int track) {
        switch (g.kind) {
        case Guard::True: return BddManager::True;
        case Guard::False: return BddManager::False;
        case Guard::Var: return prop(track, g.var);
        case Guard::Not: return mgr_->lnot(guard_bdd(*g.kids[0], track));
        case Guard::And: return mgr_->land(guard_bdd(*g.kids[0], track), guard_bdd(*g.kids[1], track));
        case Guard::Or: return mgr_->lor(guard_bdd(*g.kids[0], track), guard_bdd(*g.kids[1], track));
        case Guard::Implies: return mgr_->limp(guard_bdd(*g.kids[0], track), guard_bdd(*g.kids[1], track));
        }
        return BddManager::False;
    }

    const System& sys_;
    std::shared_ptr<BddManager> mgr_;
    Vocabulary voc_;
    Budget& budget_;
    std::vector<PhaseStat> stats_;
    std::map<std::string, int> counters_;
    std::vector<std::pair<std::string, int>> marker_names_;
};

// Compiles core formulas (output of desugar) to automata conjunctions.
class Compiler {
public:
    using Conj = Encoder::Conj;

    explicit Compiler(Encoder& enc) : enc_(enc) {}

    // Words (over the tracks and markers in scope) on which f has truth
    // value `pos` at the unique position of marker m on track `track`.
    Conj compile(const FormulaPtr& f, bool pos, int track, const VarMapping& v, int m) {
        enc_.budget().tick();
        if (is_pure_ltl(*f)) {
            if (f->op == Op::True) return pos ? Conj{} : Conj{empty_nba(enc_.mgr())};
            if (f->op == Op::False) return pos ? Conj{empty_nba(enc_.mgr())} : Conj{};
            return {enc_.pure(f, track, m, pos)};
        }
        const auto& k = f->kids;
        switch (f->op) {
        case Op::Not: return compile(k[0], !pos, track, v, m);
        case Op::And:
        case Op::Or: {
            bool conj = (f->op == Op::And) == pos;
            if (conj) {
                Conj a = compile(k[0], pos, track, v, m);
                Conj b = compile(k[1], pos, track, v, m);
                a.insert(a.end(), b.begin(), b.end());
                return a;
            }
            Nba a = enc_.materialize(compile(k[0], pos, track, v, m), "branch");
            Nba b = enc_.materialize(compile(k[1], pos, track, v, m), "branch");
            return {union_nba(a, b)};
        }
        case Op::Next: {
            int m2 = enc_.new_marker();
            Conj c{enc_.next_rel(m, m2)};
            append(c, compile(k[0], pos, track, v, m2));
            return c;
        }
        case Op::Prev: {
            int m2 = enc_.new_marker();
            Conj c{enc_.prev_rel(m, m2)};
            append(c, compile(k[0], pos, track, v, m2));
            if (pos) return c;
            // false at position 0, or the argument fails one step earlier
            Nba a = enc_.at_zero(m);
            Nba b = enc_.materialize(c, "branch");
            return {union_nba(a, b)};
        }
        case Op::Until:
        case Op::Since: {
            bool fut = f->op == Op::Until;
            if (!pos) return {enc_.site(compile(f, true, track, v, m), keep(track, v, {m}))};
            int mk = enc_.new_marker();
            Conj c{fut ? enc_.ordered(m, mk) : enc_.ordered(mk, m)};
            append(c, compile(k[1], true, track, v, mk));
            if (is_pure_ltl(*k[0])) {
                // F(m & (a U mk)) resp. F(m & (a S mk)) over the track and mk
                std::string mk_name = "__mk";
                FormulaPtr hold = fut ? fm::until(k[0], fm::atom(mk_name)) : fm::since(k[0], fm::atom(mk_name));
                c.push_back(enc_.pure(hold, track, m, true, {{mk_name, mk}}));
            } else {
                // no position strictly between (resp. after mk up to m) fails k[0]
                int mj = enc_.new_marker();
                Conj bad{fut ? enc_.between(m, mj, mk, false) : enc_.between(mk, mj, m, true)};
                append(bad, compile(k[0], false, track, v, mj));
                c.push_back(enc_.site(bad, keep(track, v, {m, mk})));
            }
            return c;
        }
        case Op::Know: {
            if (pos) return {enc_.site(compile(f, false, track, v, m), keep(track, v, {m}))};
            int rho = enc_.new_track("k");
            Conj c{enc_.system_nba(rho), enc_.obs_eq(f->name, track, rho, m)};
            append(c, compile(k[0], false, rho, v, m));
            return c;
        }
        case Op::Exists: {
            if (pos) return {enc_.site(compile(f, false, track, v, m), keep(track, v, {m}))};
            int rho = enc_.new_track("x");
            VarMapping v1 = v, v2 = v;
            v1[f->name] = {rho, true};
            v2[f->name] = {rho, false};
            Conj c = compile(k[0], false, track, v1, m);
            append(c, compile(k[0], false, track, v2, m));
            return c;
        }
        case Op::Cause: {
            auto it = v.find(f->name);
            if (it == v.end()) throw ValidationError("free variable " + f->name);
            bool in = pos == it->second.in_cause;
            Conj out = not_in_cause(*f, track, it->second.track, v, m);
            if (!in) return out;
            return {enc_.site(out, keep(track, v, {m}))};
        }
        default: throw Error("internal: unexpected operator after desugaring");
        }
    }

    // candidate track `cand` lies outside Cause(effect, track, m, A)
    Conj not_in_cause(const Formula& f, int track, int cand, const VarMapping& v, int m) {
        NameSet A = action_names(f);
        NameSet others;
        for (auto& x : enc_.sys().actions)
            if (!A.count(x)) others.insert(x);
        int sigma = enc_.new_track("s");
        Conj c{enc_.system_nba(sigma), enc_.similar(A, sigma, track, cand), enc_.equal_on(others, sigma, track)};
        append(c, compile(f.kids[0], false, sigma, v, m));
        return c;
    }

private:
    Encoder& enc_;

    static void append(Conj& a, Conj b) {
        for (auto& x : b) a.push_back(std::move(x));
    }

    std::vector<int> keep(int track, const VarMapping& v, const std::vector<int>& markers) {
        std::vector<int> r = enc_.track_vars(track);
        for (auto& [name, b] : v) {
            auto tv = enc_.track_vars(b.track);
            r.insert(r.end(), tv.begin(), tv.end());
        }
        for (int m : markers) r.push_back(enc_.voc().marker_var(m));
        return r;
    }
};

// Number of nested complementations the compilation performs.
inline int alternation_depth(const FormulaPtr& f0) {
    FormulaPtr f = desugar(f0);
    std::function<int(const FormulaPtr&, bool, const std::map<std::string, bool>&)> d =
        [&](const FormulaPtr& g, bool pos, const std::map<std::string, bool>& v) -> int {
        if (is_pure_ltl(*g)) return 0;
        const auto& k = g->kids;
        switch (g->op) {
        case Op::Not: return d(k[0], !pos, v);
        case Op::And:
        case Op::Or: return std::max(d(k[0], pos, v), d(k[1], pos, v));
        case Op::Next: return d(k[0], pos, v);
        case Op::Prev: return d(k[0], pos, v);
        case Op::Until:
        case Op::Since: {
            if (!pos) return 1 + d(g, true, v);
            int r = d(k[1], true, v);
            if (!is_pure_ltl(*k[0])) r = std::max(r, 1 + d(k[0], false, v));
            return r;
        }
        case Op::Know:
            if (pos) return 1 + d(g, false, v);
            return d(k[0], false, v);
        case Op::Exists: {
            if (pos) return 1 + d(g, false, v);
            auto v1 = v, v2 = v;
            v1[g->name] = true;
            v2[g->name] = false;
            return std::max(d(k[0], false, v1), d(k[0], false, v2));
        }
        case Op::Cause: {
            auto it = v.find(g->name);
            bool in = it != v.end() && pos == it->second;
            int e = d(k[0], false, v);
            return in ? 1 + e : e;
        }
        default: return 0;
        }
    };
    return d(f, false, {});
}

namespace detail {

inline std::vector<std::pair<int, bool>> pick_letter(BddManager& m, bdd g) { return m.min_sat(g); }

// Concrete letters along a lasso of the product, one assignment per step.
inline void concretize(BddManager& mgr, const Lasso& l, std::vector<std::map<int, bool>>& prefix,
                       std::vector<std::map<int, bool>>& loop) {
    for (bdd g : l.prefix) {
        std::map<int, bool> a;
        for (auto [v, b] : mgr.min_sat(g)) a[v] = b;
        prefix.push_back(a);
    }
    for (bdd g : l.loop) {
        std::map<int, bool> a;
        for (auto [v, b] : mgr.min_sat(g)) a[v] = b;
        loop.push_back(a);
    }
}

inline LassoTrace track_trace(const Vocabulary& voc, int track, const std::vector<std::map<int, bool>>& prefix,
                              const std::vector<std::map<int, bool>>& loop) {
    auto letter = [&](const std::map<int, bool>& a) {
        Letter l;
        for (int s = 0; s < voc.slot_count(); ++s) {
            auto it = a.find(voc.var(track, s));
            if (it != a.end() && it->second) l.insert(voc.slots()[s]);
        }
        return l;
    };
    LassoTrace t;
    for (auto& a : prefix) t.prefix.push_back(letter(a));
    for (auto& a : loop) t.loop.push_back(letter(a));
    return t;
}

}  // namespace detail

// Decides whether every initial trace of sys satisfies f at position 0.
inline Verdict check(const System& sys, const FormulaPtr& f0, const CheckOptions& opt = {}) {
    auto wf = check_well_formed(f0, sys);
    if (!wf.empty()) throw ValidationError(wf.front().message);
    FormulaPtr f = desugar(resolve_macros(f0, sys));
    Verdict v;
    v.model = sys.name;
    v.formula = to_string(*f0);
    v.alternation_depth = alternation_depth(f);
    if (v.alternation_depth > 1)
        v.warnings.push_back("quantifier alternation depth " + std::to_string(v.alternation_depth) +
                             ": automata may grow non-elementarily");

    Budget budget;
    budget.state_cap = opt.state_cap;
    budget.deadline = std::chrono::steady_clock::now() +
                      std::chrono::milliseconds(static_cast<long long>(opt.timeout_seconds * 1000));
    Encoder enc(sys, budget);
    Compiler comp(enc);
    int alpha = enc.new_track("alpha");
    int m0 = enc.new_marker();
    Encoder::Conj c{enc.system_nba(alpha), enc.at_zero_once(m0)};
    auto body = comp.compile(f, false, alpha, {}, m0);
    for (auto& a : body) c.push_back(std::move(a));

    auto t0 = std::chrono::steady_clock::now();
    std::vector<const Nba*> ps;
    for (auto& a : c) ps.push_back(&a);
    ProductExplorer px(ps, &budget);
    Lasso l;
    bool found = find_accepting_lasso(px, l);
    enc.note("emptiness", px.size(), detail::millis_since(t0));
    v.holds = !found;
    if (opt.want_dot) {
        ProductExplorer full(ps, &budget);
        v.product_dot = to_dot(materialize(full), enc.voc(), "product");
    }
    if (found) {
        v.has_counterexample = true;
        std::vector<std::map<int, bool>> pre, loop;
        detail::concretize(enc.mgr(), l, pre, loop);
        // tracks quantified away inside a sub-automaton carry no witness
        std::set<int> live;
        for (auto& a : c)
            for (int var : support(a))
                if (!enc.voc().is_marker(var)) live.insert(enc.voc().track_of(var));
        for (int t = 0; t < enc.voc().track_count(); ++t)
            if (t == alpha || live.count(t))
                v.counterexample[enc.voc().track_name(t)] =
                    canonicalize(detail::track_trace(enc.voc(), t, pre, loop));
        for (auto& [name, m] : enc.named_markers()) {
            for (std::size_t i = 0; i < pre.size() + loop.size(); ++i) {
                const auto& a = i < pre.size() ? pre[i] : loop[i - pre.size()];
                auto it = a.find(enc.voc().marker_var(m));
                if (it != a.end() && it->second) {
                    v.markers[name] = i;
                    break;
                }
            }
        }
    }
    v.stats = enc.stats();
    v.peak_states = budget.peak_states;
    return v;
}

// ---------------------------------------------------------------- causes

struct CauseLanguage {
    std::shared_ptr<BddManager> mgr;
    std::shared_ptr<Vocabulary> voc;
    Nba automaton;  // over the A-propositions of track `track`
    int track = 0;
    std::size_t anchor = 0;
    NameSet action_set;
    std::vector<std::string> slots;  // slot names of the vocabulary
};

namespace detail {

// Lasso automaton pinning track `track` to t and marker m to position i.
inline Nba pinned_trace(Encoder& enc, int track, const LassoTrace& t, int m, std::size_t i) {
    std::size_t p = std::max(t.prefix.size(), i + 1);
    std::vector<bdd> pre, loop;
    BddManager& mgr = enc.mgr();
    auto letter = [&](const Letter& l, bool mark) {
        bdd g = BddManager::True;
        for (auto& q : enc.sys().props()) g = mgr.land(g, l.count(q) ? enc.prop(track, q) : mgr.lnot(enc.prop(track, q)));
        return mgr.land(g, mark ? enc.marker(m) : mgr.lnot(enc.marker(m)));
    };
    for (std::size_t k = 0; k < p; ++k) pre.push_back(letter(t.at(k), k == i));
    for (std::size_t k = 0; k < t.loop.size(); ++k) loop.push_back(letter(t.at(p + k), false));
    return lasso_nba(mgr, pre, loop);
}

}  // namespace detail

// Cause(effect, t, i, A): the candidates (over 2^A) all of whose at least as
// similar system traces, with the other actions fixed, satisfy effect at i.
inline CauseLanguage compute_cause(const System& sys, const LassoTrace& t, std::size_t i, const FormulaPtr& effect,
                                   const NameSet& A, const CheckOptions& opt = {}) {
    if (!replays(to_mask(t, sys), sys)) throw ValidationError("trace " + to_string(t) + " is not a trace of the system");
    if (!is_pure_ltl(*effect)) throw ValidationError("effect must not contain knowledge, quantifiers or causes");
    for (auto& a : A)
        if (!sys.aps.count(a)) throw ValidationError("unknown proposition '" + a + "' in action set");
    Budget budget;
    budget.state_cap = opt.state_cap;
    budget.deadline = std::chrono::steady_clock::now() +
                      std::chrono::milliseconds(static_cast<long long>(opt.timeout_seconds * 1000));
    Encoder enc(sys, budget);
    int pi = enc.new_track("pi");
    int rho = enc.new_track("rho");
    int m = enc.new_marker();
    Compiler comp(enc);
    Formula pred{Op::Cause, "X", {}, {effect}};
    for (auto& a : A) pred.actions.push_back({ActionItem::Name, a});
    Encoder::Conj c{detail::pinned_trace(enc, pi, t, m, i)};
    auto rest = comp.not_in_cause(pred, pi, rho, {}, m);
    for (auto& a : rest) c.push_back(std::move(a));
    std::vector<int> keep;
    for (auto& a : A) keep.push_back(enc.voc().var(rho, sys.prop_index(a)));
    CauseLanguage cl;
    cl.automaton = enc.site(c, keep);
    cl.mgr = enc.mgr_ptr();
    cl.voc = std::make_shared<Vocabulary>(enc.voc());
    cl.track = rho;
    cl.anchor = i;
    cl.action_set = A;
    cl.slots = sys.props();
    return cl;
}

namespace detail {

inline int slot_of(const CauseLanguage& c, const std::string& p) {
    for (std::size_t s = 0; s < c.slots.size(); ++s)
        if (c.slots[s] == p) return static_cast<int>(s);
    return -1;
}

inline bdd cause_letter(const CauseLanguage& c, const Letter& l) {
    BddManager& m = *c.mgr;
    bdd g = BddManager::True;
    for (auto& p : c.action_set) {
        bdd x = m.var(c.voc->var(c.track, slot_of(c, p)));
        g = m.land(g, l.count(p) ? x : m.lnot(x));
    }
    return g;
}

inline LassoTrace cause_word(const CauseLanguage& c, const Lasso& l) {
    auto letter = [&](bdd g) {
        Letter r;
        auto sat = c.mgr->min_sat(g);
        for (auto [v, b] : sat) {
            if (!b || c.voc->is_marker(v) || c.voc->track_of(v) != c.track) continue;
            std::string p = c.slots[c.voc->slot_of(v)];
            if (c.action_set.count(p)) r.insert(p);
        }
        return r;
    };
    LassoTrace t;
    for (bdd g : l.prefix) t.prefix.push_back(letter(g));
    for (bdd g : l.loop) t.loop.push_back(letter(g));
    return canonicalize(t);
}

}  // namespace detail

// Membership of a candidate (only its A-part matters).
inline bool cause_contains(const CauseLanguage& c, const LassoTrace& w) {
    std::vector<bdd> pre, loop;
    for (auto& l : w.prefix) pre.push_back(detail::cause_letter(c, letter_meet(l, c.action_set)));
    for (auto& l : w.loop) loop.push_back(detail::cause_letter(c, letter_meet(l, c.action_set)));
    return accepts(c.automaton, pre, loop);
}

inline Nba anchored_formula_nba(const CauseLanguage& c, const FormulaPtr& candidate, std::size_t anchor) {
    NameSet atoms;
    collect_atoms(*candidate, atoms);
    for (auto& a : atoms)
        if (!c.action_set.count(a))
            throw ValidationError("candidate mentions '" + a + "' which is not in the causal action set");
    if (!is_pure_ltl(*candidate)) throw ValidationError("candidate must be a temporal formula over the action set");
    LtlArena ar;
    std::function<int(const Formula&)> tr = [&](const Formula& f) -> int {
        auto k = [&](std::size_t i) { return tr(*f.kids[i]); };
        switch (f.op) {
        case Op::True: return ar.tt();
        case Op::False: return ar.ff();
        case Op::Atom: return ar.var(c.voc->var(c.track, detail::slot_of(c, f.name)));
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
        default: throw ValidationError("unsupported operator in candidate");
        }
    };
    int root = ar.nexts(static_cast<int>(anchor), tr(*candidate));
    return ltl_to_nba(ar, root, *c.mgr);
}

struct EquivResult {
    bool equivalent = true;
    std::optional<LassoTrace> witness;  // in exactly one of the two languages
    bool witness_in_cause = false;
};

inline EquivResult cause_formula_equiv(const CauseLanguage& c, const FormulaPtr& candidate, std::size_t anchor) {
    Nba cand = anchored_formula_nba(c, candidate, anchor);
    EquivResult r;
    Lasso l;
    if (!language_included(c.automaton, cand, &l)) {
        r.equivalent = false;
        r.witness = detail::cause_word(c, l);
        r.witness_in_cause = true;
        return r;
    }
    if (!language_included(cand, c.automaton, &l)) {
        r.equivalent = false;
        r.witness = detail::cause_word(c, l);
        r.witness_in_cause = false;
    }
    return r;
}

namespace detail {

// Rebuilds guard f of `src` in `dst`, renaming variables through `rename`.
inline bdd transfer(BddManager& dst, const BddManager& src, bdd f, const std::function<int(int)>& rename,
                    std::map<bdd, bdd>& memo) {
    if (src.is_const(f)) return f;
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    bdd v = dst.var(rename(src.var_of(f)));
    bdd hi = transfer(dst, src, src.high(f), rename, memo), lo = transfer(dst, src, src.low(f), rename, memo);
    bdd r = dst.lor(dst.land(v, hi), dst.land(dst.lnot(v), lo));
    memo[f] = r;
    return r;
}

}  // namespace detail

inline bool cause_language_equiv(const CauseLanguage& a, const CauseLanguage& b) {
    if (a.mgr == b.mgr) return language_equiv(a.automaton, b.automaton);
    if (a.action_set != b.action_set) return false;
    // same action set: move b's automaton into a's manager, matching slots by name
    auto rename = [&](int v) {
        int s = b.voc->slot_of(v);
        auto it = std::find(a.slots.begin(), a.slots.end(), b.slots.at(s));
        if (it == a.slots.end()) throw Error("internal: slot missing in cause vocabulary");
        return a.voc->var(a.track, static_cast<int>(it - a.slots.begin()));
    };
    Nba moved;
    moved.mgr = a.mgr.get();
    moved.init = b.automaton.init;
    moved.acc = b.automaton.acc;
    moved.nsets = b.automaton.nsets;
    moved.out.resize(b.automaton.out.size());
    std::map<bdd, bdd> memo;
    for (std::size_t q = 0; q < b.automaton.out.size(); ++q)
        for (auto& e : b.automaton.out[q])
            moved.out[q].push_back({detail::transfer(*a.mgr, *b.mgr, e.guard, rename, memo), e.to});
    return language_equiv(a.automaton, moved);
}

// ---------------------------------------------------------------- reports

inline std::string explain_verdict(const Verdict& v, const System& sys) {
    std::ostringstream os;
    if (v.holds) {
        os << "property holds on " << (v.model.empty() ? sys.name : v.model) << ": no counterexample\n";
        return os.str();
    }
    os << "property violated on " << (v.model.empty() ? sys.name : v.model) << "\n";
    auto it = v.counterexample.find("alpha");
    if (it != v.counterexample.end()) os << "  falsifying trace alpha = " << to_string(it->second) << "\n";
    for (auto& [name, pos] : v.markers)
        if (name != "m0") os << "  evaluation point " << name << " at time " << pos << "\n";
    for (auto& [name, t] : v.counterexample) {
        if (name == "alpha") continue;
        std::string role = "auxiliary trace";
        if (name.rfind("k", 0) == 0) role = "trace indistinguishable for the agent up to the evaluation point";
        else if (name.rfind("x", 0) == 0) role = "cause candidate";
        else if (name.rfind("s", 0) == 0) role = "more similar system trace violating the effect";
        os << "  " << name << " (" << role << ") = " << to_string(t) << "\n";
    }
    if (it != v.counterexample.end()) {
        for (auto& [name, t] : v.counterexample) {
            if (name.rfind("k", 0) != 0) continue;
            Letter diff;
            auto a = it->second;
            std::size_t p = std::max(a.prefix.size(), t.prefix.size()) + std::lcm(a.loop.size(), t.loop.size());
            for (std::size_t i = 0; i < p; ++i) {
                Letter d = letter_xor(a.at(i), t.at(i));
                diff.insert(d.begin(), d.end());
            }
            os << "  alpha and " << name << " differ on {" << join(diff) << "}\n";
        }
    }
    return os.str();
}

}  // namespace explic

#pragma once

// Extended transition systems: states, symbolic edge guards over actions,
// per-edge output sets, and agents with observation and action sets.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lexer.hpp"

namespace explic {

using NameSet = std::set<std::string>;

inline std::string join(const NameSet& s, const std::string& sep = ",") {
    std::string out;
    for (auto& x : s) {
        if (!out.empty()) out += sep;
        out += x;
    }
    return out;
}

// ---------------------------------------------------------------- guards

struct Guard;
using GuardPtr = std::shared_ptr<const Guard>;

struct Guard {
    enum Kind { True, False, Var, Not, And, Or, Implies } kind;
    std::string var;
    std::vector<GuardPtr> kids;

    static GuardPtr t() { return std::make_shared<Guard>(Guard{True, {}, {}}); }
    static GuardPtr f() { return std::make_shared<Guard>(Guard{False, {}, {}}); }
    static GuardPtr v(std::string name) { return std::make_shared<Guard>(Guard{Var, std::move(name), {}}); }
    static GuardPtr neg(GuardPtr a) { return std::make_shared<Guard>(Guard{Not, {}, {std::move(a)}}); }
    static GuardPtr conj(GuardPtr a, GuardPtr b) { return std::make_shared<Guard>(Guard{And, {}, {std::move(a), std::move(b)}}); }
    static GuardPtr disj(GuardPtr a, GuardPtr b) { return std::make_shared<Guard>(Guard{Or, {}, {std::move(a), std::move(b)}}); }
    static GuardPtr imp(GuardPtr a, GuardPtr b) { return std::make_shared<Guard>(Guard{Implies, {}, {std::move(a), std::move(b)}}); }

    static GuardPtr conj(const std::vector<GuardPtr>& xs) {
        if (xs.empty()) return t();
        GuardPtr r = xs[0];
        for (std::size_t i = 1; i < xs.size(); ++i) r = conj(r, xs[i]);
        return r;
    }
    static GuardPtr disj(const std::vector<GuardPtr>& xs) {
        if (xs.empty()) return f();
        GuardPtr r = xs[0];
        for (std::size_t i = 1; i < xs.size(); ++i) r = disj(r, xs[i]);
        return r;
    }

    template <class F>
    bool eval(const F& value) const {
        switch (kind) {
        case True: return true;
        case False: return false;
        case Var: return value(var);
        case Not: return !kids[0]->eval(value);
        case And: return kids[0]->eval(value) && kids[1]->eval(value);
        case Or: return kids[0]->eval(value) || kids[1]->eval(value);
        case Implies: return !kids[0]->eval(value) || kids[1]->eval(value);
        }
        return false;
    }

    void vars(NameSet& out) const {
        if (kind == Var) out.insert(var);
        for (auto& k : kids) k->vars(out);
    }
};

namespace detail {

inline int guard_prec(Guard::Kind k) {
    switch (k) {
    case Guard::Implies: return 1;
    case Guard::Or: return 2;
    case Guard::And: return 3;
    case Guard::Not: return 4;
    default: return 5;
    }
}

inline void print_guard(const Guard& g, int ctx, std::string& out) {
    int p = guard_prec(g.kind);
    bool paren = p < ctx;
    if (paren) out += "(";
    switch (g.kind) {
    case Guard::True: out += "true"; break;
    case Guard::False: out += "false"; break;
    case Guard::Var: out += g.var; break;
    case Guard::Not:
        out += "!";
        print_guard(*g.kids[0], 4, out);
        break;
    case Guard::And:
        print_guard(*g.kids[0], 3, out);
        out += " & ";
        print_guard(*g.kids[1], 4, out);
        break;
    case Guard::Or:
        print_guard(*g.kids[0], 2, out);
        out += " | ";
        print_guard(*g.kids[1], 3, out);
        break;
    case Guard::Implies:
        print_guard(*g.kids[0], 2, out);
        out += " -> ";
        print_guard(*g.kids[1], 1, out);
        break;
    }
    if (paren) out += ")";
}

inline GuardPtr parse_guard_imp(TokenStream& ts);

inline GuardPtr parse_guard_atom(TokenStream& ts) {
    if (ts.accept("!")) return Guard::neg(parse_guard_atom(ts));
    if (ts.accept("(")) {
        GuardPtr g = parse_guard_imp(ts);
        ts.expect(")");
        return g;
    }
    std::string id = ts.ident();
    if (id == "true") return Guard::t();
    if (id == "false") return Guard::f();
    return Guard::v(id);
}

inline GuardPtr parse_guard_and(TokenStream& ts) {
    GuardPtr g = parse_guard_atom(ts);
    while (ts.accept("&")) g = Guard::conj(g, parse_guard_atom(ts));
    return g;
}

inline GuardPtr parse_guard_or(TokenStream& ts) {
    GuardPtr g = parse_guard_and(ts);
    while (ts.accept("|")) g = Guard::disj(g, parse_guard_and(ts));
    return g;
}

inline GuardPtr parse_guard_imp(TokenStream& ts) {
    GuardPtr g = parse_guard_or(ts);
    if (ts.accept("->")) return Guard::imp(g, parse_guard_imp(ts));
    return g;
}

}  // namespace detail

inline std::string to_string(const Guard& g) {
    std::string s;
    detail::print_guard(g, 0, s);
    return s;
}

inline GuardPtr parse_guard(const std::string& text) {
    detail::TokenStream ts(detail::tokenize(text, {"->"}));
    GuardPtr g = detail::parse_guard_imp(ts);
    if (!ts.at_end()) ts.fail("trailing input in guard");
    return g;
}

// ---------------------------------------------------------------- system

struct AgentView {
    std::string agent;
    NameSet obs;
    NameSet acts;
};

struct EdgeDef {
    std::string from, to;
    GuardPtr guard;
    NameSet out;
};

class System {
public:
    std::string name;
    NameSet aps;
    NameSet actions;
    std::vector<AgentView> agents;
    std::vector<std::string> states;
    NameSet initial;
    std::vector<EdgeDef> edges;

    // Checks all structural invariants and builds lookup tables. Must be
    // called before the system is used.
    void finalize() {
        if (aps.size() > 62) throw ValidationError("at most 62 atomic propositions are supported");
        if (states.empty()) throw ValidationError("system has no states");
        if (initial.empty()) throw ValidationError("empty initial state set");
        prop_list_.assign(aps.begin(), aps.end());
        prop_idx_.clear();
        for (std::size_t i = 0; i < prop_list_.size(); ++i) prop_idx_[prop_list_[i]] = static_cast<int>(i);
        act_list_.assign(actions.begin(), actions.end());
        act_bit_.clear();
        act_mask_ = 0;
        for (std::size_t i = 0; i < act_list_.size(); ++i) {
            if (!aps.count(act_list_[i])) throw ValidationError("unknown proposition '" + act_list_[i] + "' in actions");
            act_bit_[act_list_[i]] = static_cast<int>(i);
            act_mask_ |= bit(act_list_[i]);
        }
        if (act_list_.size() > 20) throw ValidationError("at most 20 actions are supported");
        state_idx_.clear();
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (state_idx_.count(states[i])) throw ValidationError("duplicate state '" + states[i] + "'");
            state_idx_[states[i]] = static_cast<int>(i);
        }
        for (auto& s : initial)
            if (!state_idx_.count(s)) throw ValidationError("unknown initial state '" + s + "'");
        std::set<std::string> agent_names;
        for (auto& a : agents) {
            if (!agent_names.insert(a.agent).second) throw ValidationError("duplicate agent '" + a.agent + "'");
            for (auto& p : a.obs)
                if (!aps.count(p)) throw ValidationError("unknown proposition '" + p + "' in obs of agent " + a.agent);
            for (auto& p : a.acts) {
                if (!actions.count(p)) throw ValidationError("'" + p + "' in acts of agent " + a.agent + " is not an action");
                if (!a.obs.count(p)) throw ValidationError("action '" + p + "' of agent " + a.agent + " is not observed by it");
            }
        }
        cedges_.clear();
        for (auto& e : edges) {
            if (!state_idx_.count(e.from)) throw ValidationError("unknown state '" + e.from + "'");
            if (!state_idx_.count(e.to)) throw ValidationError("unknown state '" + e.to + "'");
            NameSet gv;
            e.guard->vars(gv);
            for (auto& v : gv) {
                if (!aps.count(v)) throw ValidationError("unknown proposition '" + v + "' in guard");
                if (!actions.count(v)) throw ValidationError("guard mentions non-action proposition '" + v + "'");
            }
            std::uint64_t out = 0;
            for (auto& o : e.out) {
                if (!aps.count(o)) throw ValidationError("unknown proposition '" + o + "' in outputs");
                if (actions.count(o)) throw ValidationError("output proposition '" + o + "' is listed as an action");
                out |= bit(o);
            }
            CEdge ce{state_idx_[e.from], state_idx_[e.to], out, {}};
            std::size_t n = std::size_t{1} << act_list_.size();
            ce.table.resize(n);
            for (std::size_t m = 0; m < n; ++m)
                ce.table[m] = e.guard->eval([&](const std::string& v) { return (m >> act_bit_.at(v)) & 1; });
            cedges_.push_back(std::move(ce));
        }
        out_by_state_.assign(states.size(), {});
        for (std::size_t i = 0; i < cedges_.size(); ++i) out_by_state_[cedges_[i].from].push_back(static_cast<int>(i));
        std::size_t n = std::size_t{1} << act_list_.size();
        for (std::size_t s = 0; s < states.size(); ++s) {
            for (std::size_t m = 0; m < n; ++m) {
                bool any = false;
                for (int ei : out_by_state_[s]) any = any || cedges_[ei].table[m];
                if (!any) {
                    NameSet sub;
                    for (std::size_t k = 0; k < act_list_.size(); ++k)
                        if ((m >> k) & 1) sub.insert(act_list_[k]);
                    throw ValidationError("completeness violation: state " + states[s] +
                                          " has no enabled edge for action subset {" + join(sub) + "}");
                }
            }
        }
        finalized_ = true;
    }

    bool finalized() const { return finalized_; }

    // ----- lookups
    const std::vector<std::string>& props() const { return prop_list_; }
    int prop_index(const std::string& p) const {
        auto it = prop_idx_.find(p);
        return it == prop_idx_.end() ? -1 : it->second;
    }
    std::uint64_t bit(const std::string& p) const {
        int i = prop_index(p);
        if (i < 0) throw ValidationError("unknown proposition '" + p + "'");
        return std::uint64_t{1} << i;
    }
    std::uint64_t mask(const NameSet& ps) const {
        std::uint64_t m = 0;
        for (auto& p : ps) m |= bit(p);
        return m;
    }
    NameSet names(std::uint64_t m) const {
        NameSet out;
        for (std::size_t i = 0; i < prop_list_.size(); ++i)
            if ((m >> i) & 1) out.insert(prop_list_[i]);
        return out;
    }
    std::uint64_t action_mask() const { return act_mask_; }
    std::uint64_t all_mask() const {
        return prop_list_.empty() ? 0 : (prop_list_.size() == 64 ? ~0ull : ((std::uint64_t{1} << prop_list_.size()) - 1));
    }
    const std::vector<std::string>& action_list() const { return act_list_; }
    int state_index(const std::string& s) const {
        auto it = state_idx_.find(s);
        return it == state_idx_.end() ? -1 : it->second;
    }
    std::vector<int> initial_indices() const {
        std::vector<int> r;
        for (auto& s : initial) r.push_back(state_idx_.at(s));
        std::sort(r.begin(), r.end());
        return r;
    }
    const AgentView* agent(const std::string& a) const {
        for (auto& x : agents)
            if (x.agent == a) return &x;
        return nullptr;
    }
    const AgentView& agent_or_throw(const std::string& a) const {
        auto p = agent(a);
        if (!p) throw ValidationError("unknown agent '" + a + "'");
        return *p;
    }

    // Converts a full-letter action part (prop mask) into the compact action index used by guard tables.
    std::size_t action_index(std::uint64_t letter) const {
        std::size_t m = 0;
        for (std::size_t k = 0; k < act_list_.size(); ++k)
            if (letter & (std::uint64_t{1} << prop_idx_.at(act_list_[k]))) m |= std::size_t{1} << k;
        return m;
    }
    std::uint64_t action_letter(std::size_t idx) const {
        std::uint64_t l = 0;
        for (std::size_t k = 0; k < act_list_.size(); ++k)
            if ((idx >> k) & 1) l |= std::uint64_t{1} << prop_idx_.at(act_list_[k]);
        return l;
    }
    std::size_t action_subsets() const { return std::size_t{1} << act_list_.size(); }

    struct CEdge {
        int from, to;
        std::uint64_t out;
        std::vector<bool> table;
    };
    const std::vector<CEdge>& compiled_edges() const { return cedges_; }
    const std::vector<int>& edges_from(int s) const { return out_by_state_[s]; }

    // Successor pairs (target index, output mask) for a state and an action subset given as index.
    std::vector<std::pair<int, std::uint64_t>> succ(int s, std::size_t act_idx) const {
        std::vector<std::pair<int, std::uint64_t>> r;
        for (int ei : out_by_state_[s]) {
            auto& e = cedges_[ei];
            if (e.table[act_idx]) r.emplace_back(e.to, e.out);
        }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }

private:
    bool finalized_ = false;
    std::vector<std::string> prop_list_;
    std::map<std::string, int> prop_idx_;
    std::vector<std::string> act_list_;
    std::map<std::string, int> act_bit_;
    std::uint64_t act_mask_ = 0;
    std::map<std::string, int> state_idx_;
    std::vector<CEdge> cedges_;
    std::vector<std::vector<int>> out_by_state_;
};

// ---------------------------------------------------------------- operations

inline std::set<std::pair<std::string, NameSet>> successors(const System& sys, const std::string& state,
                                                            const NameSet& action_subset) {
    int s = sys.state_index(state);
    if (s < 0) throw ValidationError("unknown state '" + state + "'");
    for (auto& a : action_subset)
        if (!sys.actions.count(a)) throw ValidationError("'" + a + "' is not an action");
    auto r = sys.succ(s, sys.action_index(sys.mask(action_subset)));
    if (r.empty()) throw ValidationError("completeness violation at state " + state);
    std::set<std::pair<std::string, NameSet>> out;
    for (auto& [t, o] : r) out.emplace(sys.states[t], sys.names(o));
    return out;
}

inline bool is_deterministic(const System& sys) {
    for (std::size_t s = 0; s < sys.states.size(); ++s)
        for (std::size_t m = 0; m < sys.action_subsets(); ++m)
            if (sys.succ(static_cast<int>(s), m).size() != 1) return false;
    return true;
}

namespace detail {

inline NameSet parse_name_list(TokenStream& ts, const std::string& terminator) {
    NameSet out;
    if (ts.is(terminator)) return out;
    out.insert(ts.ident());
    while (ts.accept(",")) out.insert(ts.ident());
    return out;
}

}  // namespace detail

inline System parse_model(const std::string& text) {
    using namespace detail;
    TokenStream ts(tokenize(text, {"->"}));
    System sys;
    ts.expect("system");
    sys.name = ts.ident();
    ts.expect("{");
    bool seen_states = false;
    while (!ts.accept("}")) {
        std::string key = ts.ident();
        if (key == "aps") {
            ts.expect(":");
            sys.aps = parse_name_list(ts, ";");
            ts.expect(";");
        } else if (key == "actions") {
            ts.expect(":");
            sys.actions = parse_name_list(ts, ";");
            ts.expect(";");
        } else if (key == "agents") {
            ts.expect("{");
            while (!ts.accept("}")) {
                AgentView a;
                a.agent = ts.ident();
                ts.expect("{");
                while (!ts.accept("}")) {
                    std::string k = ts.ident();
                    ts.expect(":");
                    NameSet v = parse_name_list(ts, ";");
                    ts.expect(";");
                    if (k == "acts") a.acts = v;
                    else if (k == "obs") a.obs = v;
                    else ts.fail("unknown agent field '" + k + "'");
                }
                sys.agents.push_back(std::move(a));
            }
        } else if (key == "states") {
            ts.expect(":");
            seen_states = true;
            do {
                std::string s = ts.ident();
                if (ts.accept("*")) sys.initial.insert(s);
                sys.states.push_back(s);
            } while (ts.accept(","));
            ts.expect(";");
        } else if (key == "edges") {
            ts.expect("{");
            while (!ts.accept("}")) {
                EdgeDef e;
                e.from = ts.ident();
                ts.expect("->");
                e.to = ts.ident();
                ts.expect("[");
                e.guard = Guard::t();
                while (!ts.accept("]")) {
                    std::string k = ts.ident();
                    ts.expect(":");
                    if (k == "guard") {
                        e.guard = parse_guard_imp(ts);
                    } else if (k == "out") {
                        ts.expect("{");
                        e.out = parse_name_list(ts, "}");
                        ts.expect("}");
                    } else {
                        ts.fail("unknown edge field '" + k + "'");
                    }
                    if (!ts.is("]")) ts.expect(";");
                }
                ts.expect(";");
                sys.edges.push_back(std::move(e));
            }
        } else {
            ts.fail("unknown section '" + key + "'");
        }
    }
    if (!ts.at_end()) ts.fail("trailing input after system");
    if (!seen_states) throw ValidationError("model declares no states");
    sys.finalize();
    return sys;
}

// Canonical text: every list sorted lexicographically.
inline std::string serialize_model(const System& sys) {
    std::ostringstream os;
    os << "system " << sys.name << " {\n";
    os << "  aps: " << join(sys.aps, ", ") << ";\n";
    os << "  actions: " << join(sys.actions, ", ") << ";\n";
    os << "  agents {\n";
    std::vector<AgentView> ags(sys.agents);
    std::sort(ags.begin(), ags.end(), [](auto& a, auto& b) { return a.agent < b.agent; });
    for (auto& a : ags)
        os << "    " << a.agent << " { acts: " << join(a.acts, ", ") << "; obs: " << join(a.obs, ", ") << "; }\n";
    os << "  }\n";
    std::vector<std::string> st(sys.states);
    std::sort(st.begin(), st.end());
    os << "  states: ";
    for (std::size_t i = 0; i < st.size(); ++i) {
        if (i) os << ", ";
        os << st[i] << (sys.initial.count(st[i]) ? "*" : "");
    }
    os << ";\n  edges {\n";
    std::vector<std::tuple<std::string, std::string, std::string, std::string>> es;
    for (auto& e : sys.edges) es.emplace_back(e.from, e.to, to_string(*e.guard), join(e.out, ", "));
    std::sort(es.begin(), es.end());
    for (auto& [f, t, g, o] : es) os << "    " << f << " -> " << t << " [guard: " << g << "; out: {" << o << "}];\n";
    os << "  }\n}\n";
    return os.str();
}

}  // namespace explic

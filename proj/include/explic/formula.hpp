#pragma once

// Formulas of the epistemic/causal temporal logic: boolean and temporal
// operators (future and past), knowledge K[a], second-order quantifiers
// over cause variables and the causal predicate  X ~>[A] effect.

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lexer.hpp"
#include "system.hpp"

namespace explic {

enum class Op {
    True, False, Atom, Not, And, Or, Implies, Iff,
    Next, Prev, Until, Since, Eventually, Globally, Once, Historically,
    Know, Exists, Forall, Cause
};

// An entry of the action set of a causal predicate: a proposition or one
// of the macros acts(agent), otheracts(agent), allacts.
struct ActionItem {
    enum Kind { Name, Acts, OtherActs, AllActs } kind = Name;
    std::string arg;
    bool operator==(const ActionItem& o) const { return kind == o.kind && arg == o.arg; }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Op op;
    std::string name;  // proposition, agent or variable
    std::vector<ActionItem> actions;
    std::vector<FormulaPtr> kids;
    std::size_t line = 0, col = 0;
};

namespace fm {

inline FormulaPtr make(Op op, std::string name = {}, std::vector<FormulaPtr> kids = {},
                       std::vector<ActionItem> acts = {}) {
    return std::make_shared<Formula>(Formula{op, std::move(name), std::move(acts), std::move(kids)});
}
inline FormulaPtr tt() { return make(Op::True); }
inline FormulaPtr ff() { return make(Op::False); }
inline FormulaPtr atom(const std::string& p) { return make(Op::Atom, p); }
inline FormulaPtr lnot(FormulaPtr a) { return make(Op::Not, {}, {std::move(a)}); }
inline FormulaPtr land(FormulaPtr a, FormulaPtr b) { return make(Op::And, {}, {std::move(a), std::move(b)}); }
inline FormulaPtr lor(FormulaPtr a, FormulaPtr b) { return make(Op::Or, {}, {std::move(a), std::move(b)}); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return make(Op::Implies, {}, {std::move(a), std::move(b)}); }
inline FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return make(Op::Iff, {}, {std::move(a), std::move(b)}); }
inline FormulaPtr next(FormulaPtr a) { return make(Op::Next, {}, {std::move(a)}); }
inline FormulaPtr prev(FormulaPtr a) { return make(Op::Prev, {}, {std::move(a)}); }
inline FormulaPtr until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, {}, {std::move(a), std::move(b)}); }
inline FormulaPtr since(FormulaPtr a, FormulaPtr b) { return make(Op::Since, {}, {std::move(a), std::move(b)}); }
inline FormulaPtr eventually(FormulaPtr a) { return make(Op::Eventually, {}, {std::move(a)}); }
inline FormulaPtr globally(FormulaPtr a) { return make(Op::Globally, {}, {std::move(a)}); }
inline FormulaPtr once(FormulaPtr a) { return make(Op::Once, {}, {std::move(a)}); }
inline FormulaPtr historically(FormulaPtr a) { return make(Op::Historically, {}, {std::move(a)}); }
inline FormulaPtr know(const std::string& agent, FormulaPtr a) { return make(Op::Know, agent, {std::move(a)}); }
inline FormulaPtr exists(const std::string& var, FormulaPtr a) { return make(Op::Exists, var, {std::move(a)}); }
inline FormulaPtr forall(const std::string& var, FormulaPtr a) { return make(Op::Forall, var, {std::move(a)}); }
inline FormulaPtr cause(const std::string& var, const NameSet& acts, FormulaPtr effect) {
    std::vector<ActionItem> items;
    for (auto& a : acts) items.push_back({ActionItem::Name, a});
    return make(Op::Cause, var, {std::move(effect)}, std::move(items));
}
inline FormulaPtr cause(const std::string& var, std::vector<ActionItem> items, FormulaPtr effect) {
    return make(Op::Cause, var, {std::move(effect)}, std::move(items));
}
inline FormulaPtr nexts(int k, FormulaPtr a) {
    for (int i = 0; i < k; ++i) a = next(a);
    return a;
}

}  // namespace fm

inline int arity(Op op) {
    switch (op) {
    case Op::True: case Op::False: case Op::Atom: return 0;
    case Op::And: case Op::Or: case Op::Implies: case Op::Iff: case Op::Until: case Op::Since: return 2;
    default: return 1;
    }
}

inline bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.op != b.op || a.name != b.name || a.actions != b.actions || a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------- printing

inline std::string to_string(const ActionItem& it) {
    switch (it.kind) {
    case ActionItem::Name: return it.arg;
    case ActionItem::Acts: return "acts(" + it.arg + ")";
    case ActionItem::OtherActs: return "otheracts(" + it.arg + ")";
    case ActionItem::AllActs: return "allacts";
    }
    return "?";
}

// Fully parenthesized canonical form.
inline std::string to_string(const Formula& f) {
    auto k = [&](std::size_t i) { return to_string(*f.kids[i]); };
    auto un = [&](const std::string& o) { return "(" + o + " " + k(0) + ")"; };
    auto bin = [&](const std::string& o) { return "(" + k(0) + " " + o + " " + k(1) + ")"; };
    switch (f.op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return f.name;
    case Op::Not: return "(!" + k(0) + ")";
    case Op::And: return bin("&");
    case Op::Or: return bin("|");
    case Op::Implies: return bin("->");
    case Op::Iff: return bin("<->");
    case Op::Next: return un("X");
    case Op::Prev: return un("Y");
    case Op::Until: return bin("U");
    case Op::Since: return bin("S");
    case Op::Eventually: return un("F");
    case Op::Globally: return un("G");
    case Op::Once: return un("O");
    case Op::Historically: return un("H");
    case Op::Know: return "(K[" + f.name + "] " + k(0) + ")";
    case Op::Exists: return "(exists " + f.name + " . " + k(0) + ")";
    case Op::Forall: return "(forall " + f.name + " . " + k(0) + ")";
    case Op::Cause: {
        std::string s = "(" + f.name + " ~>[";
        for (std::size_t i = 0; i < f.actions.size(); ++i) s += (i ? "," : "") + to_string(f.actions[i]);
        return s + "] " + k(0) + ")";
    }
    }
    return "?";
}

// ---------------------------------------------------------------- parsing

namespace detail {

class FormulaParser {
public:
    explicit FormulaParser(const std::string& text)
        : ts_(tokenize(text, {"->", "<->", "~>"})) {}

    FormulaPtr parse() {
        FormulaPtr f = iff();
        if (!ts_.at_end()) ts_.fail("unexpected '" + ts_.peek().text + "'");
        return f;
    }

private:
    TokenStream ts_;

    FormulaPtr at(FormulaPtr f, const Token& t) {
        auto g = std::make_shared<Formula>(*f);
        g->line = t.line;
        g->col = t.col;
        return g;
    }

    FormulaPtr iff() {
        FormulaPtr a = imp();
        while (ts_.is("<->")) {
            Token t = ts_.next();
            a = at(fm::iff(a, imp()), t);
        }
        return a;
    }
    FormulaPtr imp() {
        FormulaPtr a = disj();
        if (ts_.is("->")) {
            Token t = ts_.next();
            return at(fm::implies(a, imp()), t);
        }
        return a;
    }
    FormulaPtr disj() {
        FormulaPtr a = conj();
        while (ts_.is("|")) {
            Token t = ts_.next();
            a = at(fm::lor(a, conj()), t);
        }
        return a;
    }
    FormulaPtr conj() {
        FormulaPtr a = binary_temporal();
        while (ts_.is("&")) {
            Token t = ts_.next();
            a = at(fm::land(a, binary_temporal()), t);
        }
        return a;
    }
    FormulaPtr binary_temporal() {
        FormulaPtr a = unary();
        if (ts_.peek().kind == Token::Ident && (ts_.peek().text == "U" || ts_.peek().text == "S")) {
            Token t = ts_.next();
            FormulaPtr b = binary_temporal();
            return at(t.text == "U" ? fm::until(a, b) : fm::since(a, b), t);
        }
        return a;
    }

    static bool is_unary_kw(const std::string& s) {
        return s == "X" || s == "Y" || s == "F" || s == "G" || s == "O" || s == "H";
    }
    static bool reserved(const std::string& s) {
        return is_unary_kw(s) || s == "U" || s == "S" || s == "K" || s == "exists" || s == "forall" ||
               s == "true" || s == "false";
    }

    FormulaPtr unary() {
        const Token t = ts_.peek();
        if (t.kind == Token::Sym) {
            if (ts_.accept("!")) return at(fm::lnot(unary()), t);
            if (ts_.accept("(")) {
                FormulaPtr f = iff();
                ts_.expect(")");
                return f;
            }
            ts_.fail("unexpected '" + t.text + "'");
        }
        if (t.kind == Token::End) ts_.fail("unexpected end of formula");
        // causal predicate: identifier followed by ~>
        if (ts_.peek(1).kind == Token::Sym && ts_.peek(1).text == "~>") {
            std::string var = ts_.ident();
            ts_.expect("~>");
            ts_.expect("[");
            std::vector<ActionItem> items;
            if (!ts_.is("]")) {
                do items.push_back(action_item());
                while (ts_.accept(","));
            }
            ts_.expect("]");
            return at(fm::cause(var, std::move(items), unary()), t);
        }
        std::string id = ts_.ident();
        if (id == "true") return at(fm::tt(), t);
        if (id == "false") return at(fm::ff(), t);
        if (id == "X") return at(fm::next(unary()), t);
        if (id == "Y") return at(fm::prev(unary()), t);
        if (id == "F") return at(fm::eventually(unary()), t);
        if (id == "G") return at(fm::globally(unary()), t);
        if (id == "O") return at(fm::once(unary()), t);
        if (id == "H") return at(fm::historically(unary()), t);
        if (id == "K") {
            ts_.expect("[");
            std::string agent = ts_.ident();
            ts_.expect("]");
            return at(fm::know(agent, unary()), t);
        }
        if (id == "exists" || id == "forall") {
            std::string var = ts_.ident();
            // operator letters are fine here: a variable only occurs before ~>
            if (var == "exists" || var == "forall" || var == "true" || var == "false")
                ts_.fail("reserved word '" + var + "' used as variable");
            ts_.expect(".");
            FormulaPtr body = unary();
            return at(id == "exists" ? fm::exists(var, body) : fm::forall(var, body), t);
        }
        if (reserved(id)) ts_.fail("misplaced operator '" + id + "'");
        return at(fm::atom(id), t);
    }

    ActionItem action_item() {
        std::string id = ts_.ident();
        if (id == "allacts") return {ActionItem::AllActs, ""};
        if ((id == "acts" || id == "otheracts") && ts_.is("(")) {
            ts_.expect("(");
            std::string agent = ts_.ident();
            ts_.expect(")");
            return {id == "acts" ? ActionItem::Acts : ActionItem::OtherActs, agent};
        }
        return {ActionItem::Name, id};
    }
};

}  // namespace detail

struct ParseWarning {
    std::string message;
    std::size_t line, col;
};

// Parses a formula; unbound cause variables are rejected. Empty causal
// action sets are accepted and reported through `warnings`.
inline FormulaPtr parse_formula(const std::string& text, std::vector<ParseWarning>* warnings = nullptr) {
    FormulaPtr f = detail::FormulaParser(text).parse();
    std::function<void(const Formula&, std::vector<std::string>&)> walk =
        [&](const Formula& g, std::vector<std::string>& bound) {
            if (g.op == Op::Cause) {
                if (std::find(bound.begin(), bound.end(), g.name) == bound.end())
                    throw SyntaxError("unbound second-order variable '" + g.name + "'", g.line, g.col);
                if (g.actions.empty() && warnings)
                    warnings->push_back({"empty action set in causal predicate", g.line, g.col});
            }
            bool binds = g.op == Op::Exists || g.op == Op::Forall;
            if (binds) bound.push_back(g.name);
            for (auto& k : g.kids) walk(*k, bound);
            if (binds) bound.pop_back();
        };
    std::vector<std::string> bound;
    walk(*f, bound);
    return f;
}

// ---------------------------------------------------------------- transforms

inline bool is_core(const Formula& f) {
    switch (f.op) {
    case Op::Implies: case Op::Iff: case Op::Eventually: case Op::Globally: case Op::Once:
    case Op::Historically: case Op::Forall:
        return false;
    default: break;
    }
    for (auto& k : f.kids)
        if (!is_core(*k)) return false;
    return true;
}

// Rewrites derived operators into True/False/Atom/Not/And/Or/Next/Prev/
// Until/Since/Know/Exists/Cause. Core subtrees are shared, not copied.
inline FormulaPtr desugar(const FormulaPtr& f) {
    if (is_core(*f)) return f;
    std::vector<FormulaPtr> k;
    for (auto& c : f->kids) k.push_back(desugar(c));
    FormulaPtr r;
    switch (f->op) {
    case Op::Implies: r = fm::lor(fm::lnot(k[0]), k[1]); break;
    case Op::Iff: r = fm::lor(fm::land(k[0], k[1]), fm::land(fm::lnot(k[0]), fm::lnot(k[1]))); break;
    case Op::Eventually: r = fm::until(fm::tt(), k[0]); break;
    case Op::Globally: r = fm::lnot(fm::until(fm::tt(), fm::lnot(k[0]))); break;
    case Op::Once: r = fm::since(fm::tt(), k[0]); break;
    case Op::Historically: r = fm::lnot(fm::since(fm::tt(), fm::lnot(k[0]))); break;
    case Op::Forall: r = fm::lnot(fm::exists(f->name, fm::lnot(k[0]))); break;
    default: r = fm::make(f->op, f->name, k, f->actions); break;
    }
    return r;
}

// Replaces action-set macros with explicit proposition names.
inline FormulaPtr resolve_macros(const FormulaPtr& f, const System& sys) {
    std::vector<FormulaPtr> k;
    bool changed = false;
    for (auto& c : f->kids) {
        k.push_back(resolve_macros(c, sys));
        changed = changed || k.back() != c;
    }
    std::vector<ActionItem> items = f->actions;
    if (f->op == Op::Cause) {
        NameSet names;
        for (auto& it : f->actions) {
            switch (it.kind) {
            case ActionItem::Name: names.insert(it.arg); break;
            case ActionItem::Acts: {
                auto& a = sys.agent_or_throw(it.arg);
                names.insert(a.acts.begin(), a.acts.end());
                changed = true;
                break;
            }
            case ActionItem::OtherActs: {
                auto& a = sys.agent_or_throw(it.arg);
                for (auto& x : sys.actions)
                    if (!a.acts.count(x)) names.insert(x);
                changed = true;
                break;
            }
            case ActionItem::AllActs:
                names.insert(sys.actions.begin(), sys.actions.end());
                changed = true;
                break;
            }
        }
        items.clear();
        for (auto& n : names) items.push_back({ActionItem::Name, n});
        if (items != f->actions) changed = true;
    }
    if (!changed) return f;
    auto g = std::make_shared<Formula>(Formula{f->op, f->name, items, k, f->line, f->col});
    return g;
}

inline NameSet action_names(const Formula& f) {
    NameSet s;
    for (auto& it : f.actions)
        if (it.kind == ActionItem::Name) s.insert(it.arg);
    return s;
}

// No K, no quantifier, no causal predicate.
inline bool is_pure_ltl(const Formula& f) {
    if (f.op == Op::Know || f.op == Op::Exists || f.op == Op::Forall || f.op == Op::Cause) return false;
    for (auto& k : f.kids)
        if (!is_pure_ltl(*k)) return false;
    return true;
}

inline bool has_future(const Formula& f) {
    if (f.op == Op::Next || f.op == Op::Until || f.op == Op::Eventually || f.op == Op::Globally) return true;
    for (auto& k : f.kids)
        if (has_future(*k)) return true;
    return false;
}

inline void collect_atoms(const Formula& f, NameSet& out) {
    if (f.op == Op::Atom) out.insert(f.name);
    for (auto& k : f.kids) collect_atoms(*k, out);
}

inline std::size_t formula_depth(const Formula& f) {
    std::size_t d = 0;
    for (auto& k : f.kids) d = std::max(d, formula_depth(*k));
    return d + (f.kids.empty() ? 0 : 1);
}

struct Violation {
    std::string kind;  // free-variable, unknown-agent, unknown-prop, bad-action-set
    std::string message;
};

inline std::vector<Violation> check_well_formed(const FormulaPtr& f, const System& sys) {
    std::vector<Violation> out;
    std::vector<std::string> bound;
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        switch (g.op) {
        case Op::Atom:
            if (!sys.aps.count(g.name)) out.push_back({"unknown-prop", "unknown proposition '" + g.name + "'"});
            break;
        case Op::Know:
            if (!sys.agent(g.name)) out.push_back({"unknown-agent", "unknown agent '" + g.name + "'"});
            break;
        case Op::Cause:
            if (std::find(bound.begin(), bound.end(), g.name) == bound.end())
                out.push_back({"free-variable", "free variable " + g.name});
            for (auto& it : g.actions) {
                if (it.kind == ActionItem::Name && !sys.aps.count(it.arg))
                    out.push_back({"bad-action-set", "causal action set mentions '" + it.arg + "' which is not in AP"});
                if ((it.kind == ActionItem::Acts || it.kind == ActionItem::OtherActs) && !sys.agent(it.arg))
                    out.push_back({"unknown-agent", "unknown agent '" + it.arg + "'"});
            }
            break;
        default: break;
        }
        bool binds = g.op == Op::Exists || g.op == Op::Forall;
        if (binds) bound.push_back(g.name);
        for (auto& k : g.kids) walk(*k);
        if (binds) bound.pop_back();
    };
    walk(*f);
    return out;
}

// ---------------------------------------------------------------- requirements

enum class ExplainMode { ICE, ECE, FCE };

inline std::string to_string(ExplainMode m) {
    switch (m) {
    case ExplainMode::ICE: return "ice";
    case ExplainMode::ECE: return "ece";
    case ExplainMode::FCE: return "fce";
    }
    return "?";
}

inline NameSet explain_action_set(const System& sys, const std::string& agent, ExplainMode mode) {
    const AgentView& a = sys.agent_or_throw(agent);
    switch (mode) {
    case ExplainMode::ICE: return a.acts;
    case ExplainMode::ECE: {
        NameSet r;
        for (auto& x : sys.actions)
            if (!a.acts.count(x)) r.insert(x);
        return r;
    }
    case ExplainMode::FCE: return sys.actions;
    }
    return {};
}

// G (trigger -> exists X . K[agent] (X ~>[A] effect))
inline FormulaPtr mk_explainability(const System& sys, const std::string& agent, const FormulaPtr& trigger,
                                    const FormulaPtr& effect, ExplainMode mode) {
    NameSet A = explain_action_set(sys, agent, mode);
    return fm::globally(fm::implies(trigger, fm::exists("X", fm::know(agent, fm::cause("X", A, effect)))));
}

// G (condition -> !K[agent] secret); an unconditional requirement uses G !K[agent] secret.
inline FormulaPtr mk_privacy(const std::string& agent, const FormulaPtr& secret, const FormulaPtr& condition) {
    FormulaPtr nk = fm::lnot(fm::know(agent, secret));
    if (condition->op == Op::True) return fm::globally(nk);
    return fm::globally(fm::implies(condition, nk));
}

}  // namespace explic

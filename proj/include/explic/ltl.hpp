#pragma once

// LTL with past over BDD variables, and its translation to a generalized
// Büchi automaton. Past subformulas are tracked deterministically inside
// the tableau states: the value of every Y-subformula at the next position
// is a function of the current state and letter.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "bdd.hpp"
#include "errors.hpp"
#include "nba.hpp"

namespace explic {

// Hash-consed formula arena; node ids are stable within one arena.
class LtlArena {
public:
    enum Kind { True, False, Var, Not, And, Or, Next, Prev, Until, Since, Release };
    struct Node {
        Kind k;
        int var;
        int a, b;
    };

    LtlArena() {
        mk(True, 0, -1, -1);
        mk(False, 0, -1, -1);
    }

    const Node& node(int id) const { return nodes_[id]; }
    int tt() const { return 0; }
    int ff() const { return 1; }
    int var(int v) { return mk(Var, v, -1, -1); }
    int lnot(int a) {
        if (a == 0) return 1;
        if (a == 1) return 0;
        if (nodes_[a].k == Not) return nodes_[a].a;
        return mk(Not, 0, a, -1);
    }
    int land(int a, int b) {
        if (a == 1 || b == 1) return 1;
        if (a == 0) return b;
        if (b == 0 || a == b) return a;
        if (a > b) std::swap(a, b);
        return mk(And, 0, a, b);
    }
    int lor(int a, int b) {
        if (a == 0 || b == 0) return 0;
        if (a == 1) return b;
        if (b == 1 || a == b) return a;
        if (a > b) std::swap(a, b);
        return mk(Or, 0, a, b);
    }
    int implies(int a, int b) { return lor(lnot(a), b); }
    int iff(int a, int b) { return lor(land(a, b), land(lnot(a), lnot(b))); }
    int next(int a) { return mk(Next, 0, a, -1); }
    int prev(int a) { return mk(Prev, 0, a, -1); }
    int until(int a, int b) {
        if (b == 0 || b == 1) return b;
        return mk(Until, 0, a, b);
    }
    int release(int a, int b) {
        if (b == 0 || b == 1) return b;
        return mk(Release, 0, a, b);
    }
    int since(int a, int b) {
        if (b == 1) return 1;
        return mk(Since, 0, a, b);
    }
    int eventually(int a) { return until(tt(), a); }
    int globally(int a) { return lnot(eventually(lnot(a))); }
    int once(int a) { return since(tt(), a); }
    int historically(int a) { return lnot(once(lnot(a))); }
    int nexts(int k, int a) {
        for (int i = 0; i < k; ++i) a = next(a);
        return a;
    }

    std::string to_string(int id, const std::function<std::string(int)>& name) const {
        const Node& n = nodes_[id];
        switch (n.k) {
        case True: return "true";
        case False: return "false";
        case Var: return name(n.var);
        case Not: return "!" + to_string(n.a, name);
        case And: return "(" + to_string(n.a, name) + " & " + to_string(n.b, name) + ")";
        case Or: return "(" + to_string(n.a, name) + " | " + to_string(n.b, name) + ")";
        case Next: return "X " + to_string(n.a, name);
        case Prev: return "Y " + to_string(n.a, name);
        case Until: return "(" + to_string(n.a, name) + " U " + to_string(n.b, name) + ")";
        case Since: return "(" + to_string(n.a, name) + " S " + to_string(n.b, name) + ")";
        case Release: return "(" + to_string(n.a, name) + " R " + to_string(n.b, name) + ")";
        }
        return "?";
    }

    // no Next, Until or Release below id
    bool past_only(int id) {
        if (static_cast<int>(past_.size()) <= id) past_.resize(nodes_.size(), -1);
        if (past_[id] >= 0) return past_[id];
        const Node n = nodes_[id];
        bool r = n.k != Next && n.k != Until && n.k != Release;
        if (r && n.a >= 0) r = past_only(n.a);
        if (r && n.b >= 0) r = past_only(n.b);
        past_[id] = r;
        return r;
    }

    // Negation normal form for the future part; past-only subformulas stay
    // as they are and are treated as atoms.
    int nnf(int id, bool neg) {
        if (past_only(id)) return neg ? lnot(id) : id;
        const Node n = nodes_[id];
        if (n.k == Not) return nnf(n.a, !neg);
        if (n.k == Next) {
            int a = nnf(n.a, neg);
            return a < 0 ? -1 : next(a);
        }
        if (n.k == And || n.k == Or || n.k == Until || n.k == Release) {
            int a = nnf(n.a, neg), b = nnf(n.b, neg);
            if (a < 0 || b < 0) return -1;
            switch (n.k) {
            case And: return neg ? lor(a, b) : land(a, b);
            case Or: return neg ? land(a, b) : lor(a, b);
            case Until: return neg ? release(a, b) : until(a, b);
            default: return neg ? until(a, b) : release(a, b);
            }
        }
        // past operator over a future argument: no normal form
        return -1;
    }

private:
    std::vector<Node> nodes_;
    std::vector<signed char> past_;
    std::map<std::tuple<int, int, int, int>, int> ids_;

    int mk(Kind k, int v, int a, int b) {
        auto key = std::make_tuple(static_cast<int>(k), v, a, b);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back({k, v, a, b});
        ids_.emplace(key, id);
        return id;
    }
};

namespace detail {

// Shared tableau driver. In the exact mode every state bit is the truth value
// of its elementary subformula, so the automaton is unambiguous. In the
// obligation mode (formula in negation normal form, past only under past
// operators) bits are requirements and only minimal requirement sets are
// generated; co-safety and safety formulas then give weak automata.
inline Nba tableau(LtlArena& ar, int root, BddManager& mgr, bool exact, Budget* budget) {
    using K = LtlArena::Kind;
    std::vector<int> xel, yel, untils;
    std::map<int, int> xpos, ypos;
    std::vector<char> seen;
    auto addx = [&](int f) {
        if (!xpos.count(f)) {
            xpos[f] = static_cast<int>(xel.size());
            xel.push_back(f);
        }
    };
    auto addy = [&](int f) {
        if (!ypos.count(f)) {
            ypos[f] = static_cast<int>(yel.size());
            yel.push_back(f);
        }
    };
    std::function<void(int)> walk = [&](int id) {
        if (static_cast<int>(seen.size()) <= id) seen.resize(id + 1, 0);
        if (seen[id]) return;
        seen[id] = 1;
        const auto n = ar.node(id);
        if (n.a >= 0) walk(n.a);
        if (n.b >= 0) walk(n.b);
        switch (n.k) {
        case K::Next: addx(n.a); break;
        case K::Prev: addy(n.a); break;
        case K::Until:
            addx(id);
            untils.push_back(id);
            break;
        case K::Release: addx(id); break;
        case K::Since: addy(id); break;
        default: break;
        }
    };
    walk(root);
    if (xel.size() > 16 || yel.size() + untils.size() > 60)
        throw ResourceError("formula too large for the tableau translation");
    const std::size_t nx = xel.size(), ny = yel.size(), nu = untils.size();
    std::vector<int> upos_x(nu);
    for (std::size_t i = 0; i < nu; ++i) upos_x[i] = xpos.at(untils[i]);

    struct St {
        std::uint64_t y, ob, ac;
        bool initial;
        bool operator<(const St& o) const {
            return std::tie(initial, y, ob, ac) < std::tie(o.initial, o.y, o.ob, o.ac);
        }
    };

    Nba a;
    a.mgr = &mgr;
    a.nsets = static_cast<int>(nu);
    std::map<St, int> ids;
    std::vector<St> states;
    auto intern = [&](const St& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        int id = a.add_state(s.ac);
        ids.emplace(s, id);
        states.push_back(s);
        if (budget) budget->note(states.size());
        return id;
    };
    std::uint64_t full_acc = nu == 0 ? 0 : ((1ull << nu) - 1);
    a.init = {intern({0, 0, full_acc, true})};
    const bdd T = BddManager::True, F = BddManager::False;
    const std::uint64_t nxc = 1ull << nx;

    for (std::size_t si = 0; si < states.size(); ++si) {
        if (budget) budget->tick();
        const St s = states[si];
        std::unordered_map<int, bdd> pmemo;  // letter-only values (past and atoms)
        std::uint64_t xc = 0;
        std::unordered_map<int, bdd> memo;
        std::function<bdd(int)> ev = [&](int id) -> bdd {
            auto pit = pmemo.find(id);
            if (pit != pmemo.end()) return pit->second;
            auto it = memo.find(id);
            if (it != memo.end()) return it->second;
            const auto n = ar.node(id);
            bdd r = F;
            bool letter_only = false;
            switch (n.k) {
            case K::True: r = T; letter_only = true; break;
            case K::False: r = F; letter_only = true; break;
            case K::Var: r = mgr.var(n.var); letter_only = true; break;
            case K::Not: r = mgr.lnot(ev(n.a)); break;
            case K::And: r = mgr.land(ev(n.a), ev(n.b)); break;
            case K::Or: r = mgr.lor(ev(n.a), ev(n.b)); break;
            case K::Next: r = ((xc >> xpos.at(n.a)) & 1) ? T : F; break;
            case K::Prev: r = ((s.y >> ypos.at(n.a)) & 1) ? T : F; letter_only = true; break;
            case K::Until: {
                bdd nxt = ((xc >> xpos.at(id)) & 1) ? T : F;
                r = mgr.lor(ev(n.b), mgr.land(ev(n.a), nxt));
                break;
            }
            case K::Release: {
                bdd nxt = ((xc >> xpos.at(id)) & 1) ? T : F;
                r = mgr.land(ev(n.b), mgr.lor(ev(n.a), nxt));
                break;
            }
            case K::Since: {
                bdd py = ((s.y >> ypos.at(id)) & 1) ? T : F;
                r = mgr.lor(ev(n.b), mgr.land(ev(n.a), py));
                break;
            }
            }
            if (letter_only || ar.past_only(id)) pmemo.emplace(id, r);
            else memo.emplace(id, r);
            return r;
        };
        std::vector<bdd> cons(nxc, F);
        for (xc = 0; xc < nxc; ++xc) {
            memo.clear();
            bdd c = T;
            if (s.initial) {
                c = ev(root);
            } else {
                for (std::size_t i = 0; i < nx && c != F; ++i) {
                    if ((s.ob >> i) & 1) c = mgr.land(c, ev(xel[i]));
                    else if (exact) c = mgr.land(c, mgr.lnot(ev(xel[i])));
                }
            }
            cons[xc] = c;
        }
        for (xc = 0; xc < nxc; ++xc) {
            bdd c = cons[xc];
            if (c == F) continue;
            if (!exact)
                for (std::size_t j = 0; j < nx && c != F; ++j)
                    if ((xc >> j) & 1) c = mgr.land(c, mgr.lnot(cons[xc ^ (1ull << j)]));
            if (c == F) continue;
            memo.clear();
            std::vector<bdd> bits;
            for (std::size_t i = 0; i < ny; ++i) bits.push_back(ev(yel[i]));
            for (std::size_t i = 0; i < nu; ++i) {
                const auto n = ar.node(untils[i]);
                bool req = exact || s.initial || ((s.ob >> upos_x[i]) & 1);
                if (!req) {
                    bits.push_back(T);
                } else if (exact) {
                    bits.push_back(mgr.lor(mgr.lnot(ev(untils[i])), ev(n.b)));
                } else {
                    bits.push_back(ev(n.b));
                }
            }
            std::function<void(std::size_t, bdd, std::uint64_t)> split = [&](std::size_t i, bdd g,
                                                                            std::uint64_t val) {
                if (g == F) return;
                if (i == bits.size()) {
                    std::uint64_t ymask = ny == 0 ? 0 : ((1ull << ny) - 1);
                    St t{val & ymask, xc, val >> ny, false};
                    int to = intern(t);
                    a.add_edge(static_cast<int>(si), g, to);
                    return;
                }
                if (bits[i] == T) return split(i + 1, g, val | (1ull << i));
                if (bits[i] == F) return split(i + 1, g, val);
                split(i + 1, mgr.land(g, bits[i]), val | (1ull << i));
                split(i + 1, mgr.land(g, mgr.lnot(bits[i])), val);
            };
            split(0, c, 0);
        }
    }
    return trim(a);
}

}  // namespace detail

// Automaton accepting exactly the words that satisfy `root` at position 0.
// One acceptance set per Until subformula.
inline Nba ltl_to_nba(LtlArena& ar, int root, BddManager& mgr, Budget* budget = nullptr) {
    int n = ar.nnf(root, false);
    if (n >= 0) return detail::tableau(ar, n, mgr, false, budget);
    return detail::tableau(ar, root, mgr, true, budget);
}

inline Nba ltl_to_nba_exact(LtlArena& ar, int root, BddManager& mgr, Budget* budget = nullptr) {
    return detail::tableau(ar, root, mgr, true, budget);
}

}  // namespace explic

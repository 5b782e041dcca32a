#pragma once

// Büchi complementation. Weak automata (every cycle either always or never
// accepting) use the breakpoint construction; everything else goes through
// Safra trees with compact names (a deterministic parity automaton) whose
// dual is turned back into a Büchi automaton.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "bdd.hpp"
#include "errors.hpp"
#include "nba.hpp"

namespace explic {

namespace detail {

using StateSet = std::vector<int>;  // sorted

// Partition of the alphabet such that every letter class moves each state
// in `from` to a fixed set of successors.
inline std::vector<bdd> letter_classes(const Nba& a, const StateSet& from, Budget* budget) {
    BddManager& m = *a.mgr;
    std::vector<bdd> guards;
    for (int q : from)
        for (auto& e : a.out[q]) guards.push_back(e.guard);
    std::sort(guards.begin(), guards.end());
    guards.erase(std::unique(guards.begin(), guards.end()), guards.end());
    std::vector<bdd> classes{BddManager::True};
    for (bdd g : guards) {
        if (g == BddManager::True) continue;
        std::vector<bdd> next;
        for (bdd c : classes) {
            bdd x = m.land(c, g);
            if (x == BddManager::False) {
                next.push_back(c);
                continue;
            }
            bdd y = m.land(c, m.lnot(g));
            next.push_back(x);
            if (y != BddManager::False) next.push_back(y);
        }
        classes = std::move(next);
        if (budget) {
            budget->tick();
            if (classes.size() > 1u << 16) throw ResourceError("too many letter classes in complementation");
        }
    }
    return classes;
}

inline StateSet post(const Nba& a, const StateSet& S, bdd letter) {
    StateSet r;
    for (int q : S)
        for (auto& e : a.out[q])
            if (!a.mgr->disjoint(e.guard, letter)) r.push_back(e.to);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

// States of nontrivial SCCs in which every run that stays accepts. Returns
// false when some SCC admits both accepting and rejecting cycles.
inline bool weak_partition(const Nba& a, std::vector<char>& good) {
    SccInfo info = sccs(a);
    std::uint64_t full = a.full();
    std::vector<char> all_full(info.count, 1);
    for (int q = 0; q < a.size(); ++q) {
        int c = info.comp[q];
        if (c >= 0 && (a.acc[q] & full) != full) all_full[c] = 0;
    }
    good.assign(a.size(), 0);
    for (int c = 0; c < info.count; ++c)
        if (info.nontrivial[c] && !all_full[c] && (info.mask[c] & full) == full) return false;
    for (int q = 0; q < a.size(); ++q) {
        int c = info.comp[q];
        good[q] = c >= 0 && info.nontrivial[c] && all_full[c];
    }
    return true;
}

inline Nba complement_weak(const Nba& a, const std::vector<char>& good, Budget* budget) {
    Nba r;
    r.mgr = a.mgr;
    r.nsets = 1;
    std::map<std::pair<StateSet, StateSet>, int> ids;
    std::vector<std::pair<StateSet, StateSet>> states;
    auto intern = [&](const StateSet& S, const StateSet& O) {
        auto key = std::make_pair(S, O);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = r.add_state(O.empty() ? 1 : 0);
        ids.emplace(key, id);
        states.push_back(key);
        if (budget) budget->note(states.size());
        return id;
    };
    StateSet init = a.init;
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    r.init = {intern(init, {})};
    auto only_good = [&](const StateSet& S) {
        StateSet o;
        for (int q : S)
            if (good[q]) o.push_back(q);
        return o;
    };
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (budget) budget->tick();
        auto [S, O] = states[i];
        for (bdd cls : letter_classes(a, S, budget)) {
            StateSet S2 = post(a, S, cls);
            StateSet O2 = O.empty() ? only_good(S2) : only_good(post(a, O, cls));
            r.add_edge(static_cast<int>(i), cls, intern(S2, O2));
        }
    }
    return r;
}

// ---------------------------------------------------------------- Safra

struct SafraTree {
    // nodes in preorder, children ordered oldest first
    std::vector<int> name;
    std::vector<int> parent;
    std::vector<StateSet> label;

    std::vector<int> key() const {
        std::vector<int> k;
        for (std::size_t i = 0; i < name.size(); ++i) {
            k.push_back(name[i]);
            k.push_back(parent[i]);
            k.push_back(static_cast<int>(label[i].size()));
            k.insert(k.end(), label[i].begin(), label[i].end());
        }
        return k;
    }
};

inline StateSet set_minus(const StateSet& a, const StateSet& b) {
    StateSet r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}
inline StateSet set_meet(const StateSet& a, const StateSet& b) {
    StateSet r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

// One Safra step; returns the successor tree and the transition priority
// (min even = some node marked, odd = some node removed; 2n+1 neutral).
inline std::pair<SafraTree, int> safra_step(const Nba& a, const SafraTree& t, bdd letter, int n) {
    struct Node {
        int name;
        StateSet label;
        std::vector<int> kids;
        bool alive = true;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < t.name.size(); ++i) {
        nodes.push_back({t.name[i], t.label[i], {}, true});
        if (t.parent[i] >= 0) nodes[t.parent[i]].kids.push_back(static_cast<int>(i));
    }
    int next_name = static_cast<int>(t.name.size()) + 1;
    // branch off accepting states
    std::size_t existing = nodes.size();
    for (std::size_t i = 0; i < existing; ++i) {
        StateSet f;
        for (int q : nodes[i].label)
            if (a.accepting(q)) f.push_back(q);
        if (!f.empty()) {
            nodes.push_back({next_name++, f, {}, true});
            nodes[i].kids.push_back(static_cast<int>(nodes.size()) - 1);
        }
    }
    for (auto& nd : nodes) nd.label = post(a, nd.label, letter);
    // horizontal merge: a state stays only in the oldest branch
    std::function<void(int, const StateSet&)> hmerge = [&](int v, const StateSet& allowed) {
        nodes[v].label = set_meet(nodes[v].label, allowed);
        StateSet rem = nodes[v].label;
        for (int c : nodes[v].kids) {
            hmerge(c, rem);
            rem = set_minus(rem, nodes[c].label);
        }
    };
    int red = n + 1, green = n + 1;
    if (!nodes.empty()) {
        StateSet all;
        for (auto& nd : nodes) all.insert(all.end(), nd.label.begin(), nd.label.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        hmerge(0, all);
    }
    std::function<void(int)> kill = [&](int v) {
        if (nodes[v].alive && nodes[v].name <= n) red = std::min(red, nodes[v].name);
        nodes[v].alive = false;
        for (int c : nodes[v].kids) kill(c);
    };
    std::function<void(int)> prune = [&](int v) {
        if (nodes[v].label.empty()) {
            kill(v);
            return;
        }
        for (int c : nodes[v].kids) prune(c);
    };
    if (!nodes.empty()) prune(0);
    std::function<void(int)> vmerge = [&](int v) {
        if (!nodes[v].alive) return;
        StateSet u;
        bool any = false;
        for (int c : nodes[v].kids)
            if (nodes[c].alive) {
                any = true;
                u.insert(u.end(), nodes[c].label.begin(), nodes[c].label.end());
            }
        std::sort(u.begin(), u.end());
        if (any && u == nodes[v].label) {
            green = std::min(green, nodes[v].name);
            for (int c : nodes[v].kids) kill(c);
            return;
        }
        for (int c : nodes[v].kids) vmerge(c);
    };
    if (!nodes.empty()) vmerge(0);

    // compact names, preserving their order
    std::vector<int> names;
    for (auto& nd : nodes)
        if (nd.alive) names.push_back(nd.name);
    std::sort(names.begin(), names.end());
    std::map<int, int> rename;
    for (std::size_t i = 0; i < names.size(); ++i) rename[names[i]] = static_cast<int>(i) + 1;
    SafraTree r;
    std::function<void(int, int)> emit = [&](int v, int par) {
        int me = static_cast<int>(r.name.size());
        r.name.push_back(rename.at(nodes[v].name));
        r.parent.push_back(par);
        r.label.push_back(nodes[v].label);
        for (int c : nodes[v].kids)
            if (nodes[c].alive) emit(c, me);
    };
    if (!nodes.empty() && nodes[0].alive) emit(0, -1);
    int pr = 2 * n + 1;
    if (red <= n && red <= green) pr = 2 * red - 1;
    else if (green <= n) pr = 2 * green;
    return {r, pr};
}

// Complement of a single-set Büchi automaton via Safra trees: accepts the
// words on which the least priority seen infinitely often is odd.
inline Nba complement_safra(const Nba& a, Budget* budget) {
    int n = std::max(1, a.size());
    std::map<std::vector<int>, int> ids;
    std::vector<SafraTree> trees;
    auto intern = [&](const SafraTree& t) {
        auto k = t.key();
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(trees.size());
        ids.emplace(k, id);
        trees.push_back(t);
        if (budget) budget->note(trees.size());
        return id;
    };
    SafraTree t0;
    StateSet init = a.init;
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    if (!init.empty()) {
        t0.name = {1};
        t0.parent = {-1};
        t0.label = {init};
    }
    intern(t0);
    struct Tr {
        bdd letter;
        int to, pr;
    };
    std::vector<std::vector<Tr>> delta;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (budget) budget->tick();
        SafraTree t = trees[i];
        StateSet root = t.label.empty() ? StateSet{} : t.label[0];
        std::vector<Tr> out;
        for (bdd cls : letter_classes(a, root, budget)) {
            auto [t2, pr] = safra_step(a, t, cls, n);
            out.push_back({cls, intern(t2), pr});
        }
        delta.push_back(std::move(out));
    }
    // dual parity to Büchi: phase 0 waits, phase k (odd) forbids priorities
    // below k and accepts on k. Only odd priorities that occur are useful.
    std::vector<int> odds;
    for (auto& o : delta)
        for (auto& tr : o)
            if (tr.pr % 2 == 1) odds.push_back(tr.pr);
    odds.push_back(2 * n + 1);
    std::sort(odds.begin(), odds.end());
    odds.erase(std::unique(odds.begin(), odds.end()), odds.end());
    const int nodd = static_cast<int>(odds.size());
    Nba r;
    r.mgr = a.mgr;
    r.nsets = 1;
    int nt = static_cast<int>(trees.size());
    auto wid = [&](int t) { return t; };
    auto pid = [&](int t, int j, int hit) { return nt + (t * nodd + j) * 2 + hit; };
    std::size_t total = static_cast<std::size_t>(nt) * (1 + 2 * nodd);
    if (budget) budget->note(total);
    for (std::size_t i = 0; i < total; ++i) r.add_state(0);
    for (int t = 0; t < nt; ++t)
        for (int j = 0; j < nodd; ++j) r.acc[pid(t, j, 1)] = 1;
    for (int t = 0; t < nt; ++t) {
        for (auto& tr : delta[t]) {
            r.add_edge(wid(t), tr.letter, wid(tr.to));
            for (int j = 0; j < nodd; ++j) {
                int k = odds[j];
                r.add_edge(wid(t), tr.letter, pid(tr.to, j, 0));
                if (tr.pr < k) continue;
                int hit = tr.pr == k ? 1 : 0;
                r.add_edge(pid(t, j, 0), tr.letter, pid(tr.to, j, hit));
                r.add_edge(pid(t, j, 1), tr.letter, pid(tr.to, j, hit));
            }
        }
    }
    r.init = {wid(0)};
    return trim(r);
}

}  // namespace detail

// Automaton for the complement language, over the same variables.
inline Nba complement(const Nba& in, Budget* budget = nullptr) {
    Nba a = trim(in);
    BddManager& m = *a.mgr;
    if (a.size() == 1 && a.out[0].empty()) return universal_nba(m);
    std::vector<char> good;
    if (detail::weak_partition(a, good)) return trim(detail::complement_weak(a, good, budget));
    return detail::complement_safra(degeneralize(a), budget);
}

inline bool intersection_empty(const Nba& a, const Nba& b, Lasso* witness = nullptr, Budget* budget = nullptr) {
    ProductExplorer px({&a, &b}, budget);
    Lasso l;
    bool found = find_accepting_lasso(px, l);
    if (found && witness) *witness = l;
    return !found;
}

// L(a) ⊆ L(b); on failure `witness` is a word of L(a) \ L(b).
inline bool language_included(const Nba& a, const Nba& b, Lasso* witness = nullptr, Budget* budget = nullptr) {
    Nba nb = complement(b, budget);
    return intersection_empty(a, nb, witness, budget);
}

inline bool language_equiv(const Nba& a, const Nba& b, Lasso* witness = nullptr, Budget* budget = nullptr) {
    return language_included(a, b, witness, budget) && language_included(b, a, witness, budget);
}

// Deterministic automaton for the single word prefix·loop^ω given as
// letters (BDD cubes or any guards).
inline Nba lasso_nba(BddManager& m, const std::vector<bdd>& prefix, const std::vector<bdd>& loop) {
    if (loop.empty()) throw Error("lasso with empty loop");
    Nba a;
    a.mgr = &m;
    int n = static_cast<int>(prefix.size() + loop.size());
    for (int i = 0; i < n; ++i) a.add_state();
    for (int i = 0; i < n; ++i) {
        bdd g = i < static_cast<int>(prefix.size()) ? prefix[i] : loop[i - prefix.size()];
        int to = i + 1 < n ? i + 1 : static_cast<int>(prefix.size());
        a.add_edge(i, g, to);
    }
    a.init = {0};
    return a;
}

inline bool accepts(const Nba& a, const std::vector<bdd>& prefix, const std::vector<bdd>& loop) {
    Nba w = lasso_nba(*a.mgr, prefix, loop);
    return !intersection_empty(a, w);
}

}  // namespace explic

#pragma once

// Ultimately periodic traces and the trace relations used by causes:
// projection, observation equivalence, symmetric difference and the
// "at least as similar" order. Letters are either sets of names or
// bit masks over an indexed proposition universe.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lexer.hpp"
#include "system.hpp"

namespace explic {

using Letter = NameSet;
using MaskLetter = std::uint64_t;

inline Letter letter_meet(const Letter& a, const Letter& b) {
    Letter r;
    for (auto& x : a)
        if (b.count(x)) r.insert(x);
    return r;
}
inline Letter letter_xor(const Letter& a, const Letter& b) {
    Letter r;
    for (auto& x : a)
        if (!b.count(x)) r.insert(x);
    for (auto& x : b)
        if (!a.count(x)) r.insert(x);
    return r;
}
inline bool letter_subset(const Letter& a, const Letter& b) {
    for (auto& x : a)
        if (!b.count(x)) return false;
    return true;
}
inline MaskLetter letter_meet(MaskLetter a, MaskLetter b) { return a & b; }
inline MaskLetter letter_xor(MaskLetter a, MaskLetter b) { return a ^ b; }
inline bool letter_subset(MaskLetter a, MaskLetter b) { return (a & ~b) == 0; }

template <class L>
struct BasicLasso {
    std::vector<L> prefix;
    std::vector<L> loop;

    const L& at(std::size_t i) const {
        if (loop.empty()) throw Error("lasso with empty loop");
        if (i < prefix.size()) return prefix[i];
        return loop[(i - prefix.size()) % loop.size()];
    }
    std::size_t size() const { return prefix.size() + loop.size(); }
    bool operator==(const BasicLasso& o) const { return prefix == o.prefix && loop == o.loop; }
    bool operator<(const BasicLasso& o) const {
        return std::tie(prefix, loop) < std::tie(o.prefix, o.loop);
    }
};

using LassoTrace = BasicLasso<Letter>;
using MaskLasso = BasicLasso<MaskLetter>;

// Shortest loop, then earliest loop start.
template <class L>
BasicLasso<L> canonicalize(const BasicLasso<L>& t) {
    std::vector<L> loop = t.loop;
    std::size_t n = loop.size();
    for (std::size_t p = 1; p <= n; ++p) {
        if (n % p) continue;
        bool ok = true;
        for (std::size_t i = p; i < n && ok; ++i) ok = loop[i] == loop[i - p];
        if (ok) {
            loop.resize(p);
            break;
        }
    }
    std::vector<L> prefix = t.prefix;
    while (!prefix.empty() && prefix.back() == loop.back()) {
        loop.insert(loop.begin(), loop.back());
        loop.pop_back();
        prefix.pop_back();
    }
    return {prefix, loop};
}

template <class L>
L letter_at(const BasicLasso<L>& t, std::size_t i) {
    return t.at(i);
}

template <class L>
BasicLasso<L> project(const BasicLasso<L>& t, const L& props) {
    BasicLasso<L> r;
    for (auto& l : t.prefix) r.prefix.push_back(letter_meet(l, props));
    for (auto& l : t.loop) r.loop.push_back(letter_meet(l, props));
    return canonicalize(r);
}

// Common alignment: prefix = max prefix length, loop = lcm of loop lengths.
template <class L>
std::pair<std::size_t, std::size_t> alignment(const BasicLasso<L>& a, const BasicLasso<L>& b) {
    return {std::max(a.prefix.size(), b.prefix.size()), std::lcm(a.loop.size(), b.loop.size())};
}

template <class L>
bool obs_equiv_prefix(const BasicLasso<L>& a, const BasicLasso<L>& b, const L& props, std::size_t i) {
    for (std::size_t k = 0; k <= i; ++k)
        if (letter_meet(a.at(k), props) != letter_meet(b.at(k), props)) return false;
    return true;
}

template <class L>
bool equal_on(const BasicLasso<L>& a, const BasicLasso<L>& b, const L& props) {
    auto [p, l] = alignment(a, b);
    return obs_equiv_prefix(a, b, props, p + l - 1);
}

// a ⊕_A b, stored per aligned position as the set of differing propositions.
template <class L>
struct BasicDiffSet {
    std::vector<L> prefix_diffs;
    std::vector<L> loop_diffs;
    std::size_t prefix_len = 0, loop_len = 1;

    bool empty() const {
        for (auto& l : prefix_diffs)
            if (l != L{}) return false;
        for (auto& l : loop_diffs)
            if (l != L{}) return false;
        return true;
    }
    const L& at(std::size_t i) const {
        if (i < prefix_len) return prefix_diffs[i];
        return loop_diffs[(i - prefix_len) % loop_len];
    }
    // (prop, time) pairs of the prefix part and (prop, offset) pairs of the loop part
    template <class Names>
    std::pair<std::vector<std::pair<std::string, std::size_t>>, std::vector<std::pair<std::string, std::size_t>>>
    pairs(const Names& names) const {
        std::pair<std::vector<std::pair<std::string, std::size_t>>, std::vector<std::pair<std::string, std::size_t>>> r;
        for (std::size_t i = 0; i < prefix_diffs.size(); ++i)
            for (auto& n : names(prefix_diffs[i])) r.first.emplace_back(n, i);
        for (std::size_t i = 0; i < loop_diffs.size(); ++i)
            for (auto& n : names(loop_diffs[i])) r.second.emplace_back(n, i);
        return r;
    }
};

using DiffSet = BasicDiffSet<Letter>;

template <class L>
BasicDiffSet<L> sym_diff(const BasicLasso<L>& a, const BasicLasso<L>& b, const L& props) {
    auto [p, l] = alignment(a, b);
    BasicDiffSet<L> d;
    d.prefix_len = p;
    d.loop_len = l;
    for (std::size_t i = 0; i < p; ++i) d.prefix_diffs.push_back(letter_meet(letter_xor(a.at(i), b.at(i)), props));
    for (std::size_t i = 0; i < l; ++i)
        d.loop_diffs.push_back(letter_meet(letter_xor(a.at(p + i), b.at(p + i)), props));
    return d;
}

// Subset test between two diff sets with possibly different alignments.
template <class L>
bool diff_subset(const BasicDiffSet<L>& x, const BasicDiffSet<L>& y) {
    std::size_t p = std::max(x.prefix_len, y.prefix_len);
    std::size_t l = std::lcm(x.loop_len, y.loop_len);
    for (std::size_t i = 0; i < p + l; ++i)
        if (!letter_subset(x.at(i), y.at(i))) return false;
    return true;
}

// t ≤^A_tp tpp :  (t ⊕_A tp) ⊆ (tpp ⊕_A tp)
template <class L>
bool at_least_as_similar(const BasicLasso<L>& t, const BasicLasso<L>& tp, const BasicLasso<L>& tpp, const L& A) {
    std::size_t p = std::max({t.prefix.size(), tp.prefix.size(), tpp.prefix.size()});
    std::size_t l = std::lcm(std::lcm(t.loop.size(), tp.loop.size()), tpp.loop.size());
    for (std::size_t i = 0; i < p + l; ++i) {
        L d1 = letter_meet(letter_xor(t.at(i), tp.at(i)), A);
        L d2 = letter_meet(letter_xor(tpp.at(i), tp.at(i)), A);
        if (!letter_subset(d1, d2)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- literals

inline std::string to_string(const Letter& l) { return "{" + join(l) + "}"; }

inline std::string to_string(const LassoTrace& t) {
    std::string s;
    for (auto& l : t.prefix) s += to_string(l) + " ";
    s += "(";
    for (std::size_t i = 0; i < t.loop.size(); ++i) s += (i ? " " : "") + to_string(t.loop[i]);
    return s + ")^w";
}

// "{o,b1,e} {o} {o,b1} {w1} ({})^w"
inline LassoTrace parse_trace(const std::string& text) {
    detail::TokenStream ts(detail::tokenize(text, {}));
    auto letter = [&]() {
        Letter l;
        ts.expect("{");
        if (!ts.is("}")) {
            l.insert(ts.ident());
            while (ts.accept(",")) l.insert(ts.ident());
        }
        ts.expect("}");
        return l;
    };
    LassoTrace t;
    while (ts.is("{")) t.prefix.push_back(letter());
    ts.expect("(");
    while (ts.is("{")) t.loop.push_back(letter());
    if (t.loop.empty()) ts.fail("loop must contain at least one letter");
    ts.expect(")");
    ts.expect("^");
    if (ts.ident() != "w") ts.fail("expected ^w");
    if (!ts.at_end()) ts.fail("trailing input after trace");
    return t;
}

inline MaskLasso to_mask(const LassoTrace& t, const System& sys) {
    MaskLasso m;
    for (auto& l : t.prefix) m.prefix.push_back(sys.mask(l));
    for (auto& l : t.loop) m.loop.push_back(sys.mask(l));
    return m;
}

inline LassoTrace from_mask(const MaskLasso& t, const System& sys) {
    LassoTrace m;
    for (auto l : t.prefix) m.prefix.push_back(sys.names(l));
    for (auto l : t.loop) m.loop.push_back(sys.names(l));
    return m;
}

// Replays t as an initial path of sys. Returns false if no path exists.
inline bool replays(const MaskLasso& t, const System& sys) {
    std::uint64_t act = sys.action_mask();
    std::vector<int> init = sys.initial_indices();
    std::set<int> cur(init.begin(), init.end());
    std::size_t p = t.prefix.size(), l = t.loop.size();
    auto step = [&](const std::set<int>& S, MaskLetter letter) {
        std::set<int> R;
        if (letter & ~sys.all_mask()) return R;
        std::size_t ai = sys.action_index(letter & act);
        for (int s : S)
            for (auto& [to, out] : sys.succ(s, ai))
                if (out == (letter & ~act)) R.insert(to);
        return R;
    };
    for (std::size_t i = 0; i < p; ++i) {
        cur = step(cur, t.prefix[i]);
        if (cur.empty()) return false;
    }
    // the loop part replays from s iff (s, 0) can continue forever in the
    // graph of (state, loop offset) pairs
    std::size_t ns = sys.states.size();
    std::vector<std::vector<int>> succ(ns * l);
    for (std::size_t k = 0; k < l; ++k)
        for (std::size_t s = 0; s < ns; ++s)
            for (int to : step({static_cast<int>(s)}, t.loop[k]))
                succ[s * l + k].push_back(static_cast<int>(to * l + (k + 1) % l));
    // nodes that can continue forever: greatest fixpoint of "has successor in set"
    std::vector<char> alive(ns * l, 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t v = 0; v < ns * l; ++v) {
            if (!alive[v]) continue;
            bool any = false;
            for (int w : succ[v]) any = any || alive[w];
            if (!any) {
                alive[v] = 0;
                changed = true;
            }
        }
    }
    for (int s : cur)
        if (alive[s * l]) return true;
    return false;
}

}  // namespace explic

#pragma once

// Bounded reference semantics: LTL evaluation on lassos, enumeration of
// system lassos, the cause set taken literally from its definition, and a
// direct evaluator for formulas whose knowledge operators apply either to
// cause-free formulas or to a single causal predicate under one quantifier.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "checker.hpp"
#include "errors.hpp"
#include "formula.hpp"
#include "system.hpp"
#include "trace.hpp"

namespace explic {

struct BoundedConfig {
    std::size_t prefix_bound = 6;
    std::size_t loop_bound = 3;
};

struct Anchor {
    LassoTrace trace;
    std::size_t time = 0;
};

class OracleFragmentError : public Error {
public:
    explicit OracleFragmentError(const std::string& m) : Error("outside the oracle fragment: " + m) {}
};

namespace detail {

inline std::size_t past_depth(const Formula& f) {
    std::size_t d = 0;
    for (auto& k : f.kids) d = std::max(d, past_depth(*k));
    bool past = f.op == Op::Prev || f.op == Op::Since || f.op == Op::Once || f.op == Op::Historically;
    return d + (past ? 1 : 0);
}

// A word unrolled to `n` positions whose last `loop` positions repeat.
struct Shape {
    std::size_t n = 1, loop = 1;
    std::size_t succ(std::size_t j) const { return j + 1 < n ? j + 1 : n - loop; }
    std::size_t fold(std::size_t i) const { return i < n ? i : n - loop + (i - (n - loop)) % loop; }
};

// Truth values of f at every position of the shape; `atom` gives the
// letter-level values, `other` handles non-temporal extensions.
template <class AtomFn, class OtherFn>
std::vector<char> eval_shape(const Formula& f, const Shape& sh, const AtomFn& atom, const OtherFn& other) {
    const std::size_t n = sh.n;
    auto k = [&](std::size_t i) { return eval_shape(*f.kids[i], sh, atom, other); };
    std::vector<char> r(n, 0);
    switch (f.op) {
    case Op::True: std::fill(r.begin(), r.end(), 1); break;
    case Op::False: break;
    case Op::Atom:
        for (std::size_t j = 0; j < n; ++j) r[j] = atom(f.name, j);
        break;
    case Op::Not: {
        auto a = k(0);
        for (std::size_t j = 0; j < n; ++j) r[j] = !a[j];
        break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Iff: {
        auto a = k(0), b = k(1);
        for (std::size_t j = 0; j < n; ++j) {
            switch (f.op) {
            case Op::And: r[j] = a[j] && b[j]; break;
            case Op::Or: r[j] = a[j] || b[j]; break;
            case Op::Implies: r[j] = !a[j] || b[j]; break;
            default: r[j] = a[j] == b[j]; break;
            }
        }
        break;
    }
    case Op::Next: {
        auto a = k(0);
        for (std::size_t j = 0; j < n; ++j) r[j] = a[sh.succ(j)];
        break;
    }
    case Op::Prev: {
        auto a = k(0);
        for (std::size_t j = 1; j < n; ++j) r[j] = a[j - 1];
        break;
    }
    case Op::Until:
    case Op::Eventually:
    case Op::Globally: {
        std::vector<char> a(n, 1), b;
        if (f.op == Op::Until) {
            a = k(0);
            b = k(1);
        } else if (f.op == Op::Eventually) {
            b = k(0);
        } else {
            b = k(0);
            for (auto& x : b) x = !x;
        }
        // least fixpoint of u = b | (a & X u)
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t jj = n; jj-- > 0;) {
                char v = b[jj] || (a[jj] && r[sh.succ(jj)]);
                if (v != r[jj]) {
                    r[jj] = v;
                    changed = true;
                }
            }
        }
        if (f.op == Op::Globally)
            for (auto& x : r) x = !x;
        break;
    }
    case Op::Since:
    case Op::Once:
    case Op::Historically: {
        std::vector<char> a(n, 1), b;
        if (f.op == Op::Since) {
            a = k(0);
            b = k(1);
        } else if (f.op == Op::Once) {
            b = k(0);
        } else {
            b = k(0);
            for (auto& x : b) x = !x;
        }
        for (std::size_t j = 0; j < n; ++j) r[j] = b[j] || (j > 0 && a[j] && r[j - 1]);
        if (f.op == Op::Historically)
            for (auto& x : r) x = !x;
        break;
    }
    default: r = other(f); break;
    }
    return r;
}

inline Shape shape_for(std::size_t prefix, std::size_t loop, std::size_t depth) {
    Shape sh;
    sh.loop = loop;
    sh.n = prefix + loop * (depth + 1);
    return sh;
}

}  // namespace detail

// Truth of a K-free, quantifier-free formula at position i of t.
inline bool eval_ltl_on_lasso(const LassoTrace& t, std::size_t i, const FormulaPtr& f) {
    if (!is_pure_ltl(*f)) throw ValidationError("formula must not contain knowledge, quantifiers or causes");
    auto sh = detail::shape_for(t.prefix.size(), t.loop.size(), detail::past_depth(*f));
    auto atom = [&](const std::string& p, std::size_t j) -> char { return t.at(j).count(p) ? 1 : 0; };
    auto other = [&](const Formula&) -> std::vector<char> { throw Error("internal: unexpected operator"); };
    auto v = detail::eval_shape(*f, sh, atom, other);
    return v[sh.fold(i)];
}

inline bool eval_ltl_on_lasso(const MaskLasso& t, std::size_t i, const FormulaPtr& f, const System& sys) {
    return eval_ltl_on_lasso(from_mask(t, sys), i, f);
}

// All canonical initial-path lassos with prefix <= P and loop <= L, sorted.
inline std::vector<MaskLasso> enumerate_system_mask_lassos(const System& sys, const BoundedConfig& cfg) {
    if (cfg.loop_bound < 1) throw ValidationError("loop bound must be at least 1");
    std::uint64_t act = sys.action_mask();
    std::size_t na = std::size_t{1} << sys.action_list().size();
    // letters enabled from a state set, with successor sets
    auto step = [&](const std::set<int>& S) {
        std::map<MaskLetter, std::set<int>> r;
        for (int s : S)
            for (std::size_t ai = 0; ai < na; ++ai)
                for (auto& [to, out] : sys.succ(s, ai)) r[sys.action_letter(ai) | (out & ~act)].insert(to);
        return r;
    };
    std::set<MaskLasso> out;
    std::vector<MaskLetter> word;
    auto init = sys.initial_indices();
    std::set<int> S0(init.begin(), init.end());
    std::function<void(const std::set<int>&, std::size_t)> loops = [&](const std::set<int>& S, std::size_t p) {
        std::size_t l = word.size() - p;
        if (l >= 1) {
            MaskLasso t;
            t.prefix.assign(word.begin(), word.begin() + p);
            t.loop.assign(word.begin() + p, word.end());
            MaskLasso c = canonicalize(t);
            if (c.prefix.size() <= cfg.prefix_bound && c.loop.size() <= cfg.loop_bound && !out.count(c) && replays(c, sys))
                out.insert(c);
        }
        if (l == cfg.loop_bound) return;
        for (auto& [letter, T] : step(S)) {
            word.push_back(letter);
            loops(T, p);
            word.pop_back();
        }
    };
    std::function<void(const std::set<int>&)> prefixes = [&](const std::set<int>& S) {
        loops(S, word.size());
        if (word.size() == cfg.prefix_bound) return;
        for (auto& [letter, T] : step(S)) {
            word.push_back(letter);
            prefixes(T);
            word.pop_back();
        }
    };
    prefixes(S0);
    return {out.begin(), out.end()};
}

inline std::vector<LassoTrace> enumerate_system_lassos(const System& sys, const BoundedConfig& cfg) {
    std::vector<LassoTrace> r;
    for (auto& m : enumerate_system_mask_lassos(sys, cfg)) r.push_back(from_mask(m, sys));
    return r;
}

// All canonical lassos over the letters 2^mask with the given bounds.
inline std::vector<MaskLasso> enumerate_words(std::uint64_t mask, const BoundedConfig& cfg) {
    std::vector<MaskLetter> letters;
    for (std::uint64_t s = mask;; s = (s - 1) & mask) {
        letters.push_back(s);
        if (s == 0) break;
    }
    std::sort(letters.begin(), letters.end());
    std::set<MaskLasso> out;
    std::vector<MaskLetter> word;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t p, std::size_t total) {
        if (word.size() == total) {
            MaskLasso t;
            t.prefix.assign(word.begin(), word.begin() + p);
            t.loop.assign(word.begin() + p, word.end());
            out.insert(canonicalize(t));
            return;
        }
        for (auto l : letters) {
            word.push_back(l);
            rec(p, total);
            word.pop_back();
        }
    };
    for (std::size_t p = 0; p <= cfg.prefix_bound; ++p)
        for (std::size_t l = 1; l <= cfg.loop_bound; ++l) rec(p, p + l);
    std::vector<MaskLasso> r;
    for (auto& t : out)
        if (t.prefix.size() <= cfg.prefix_bound && t.loop.size() <= cfg.loop_bound) r.push_back(t);
    return r;
}

namespace detail {

// Bounded cause: candidates over 2^A excluded by a "bad" system trace.
inline std::vector<char> cause_members(const MaskLasso& pi, std::size_t i, const std::vector<MaskLasso>& traces,
                                       const std::vector<char>& effect_at_i, std::uint64_t A, std::uint64_t others,
                                       const std::vector<MaskLasso>& candidates) {
    std::vector<const MaskLasso*> bad;
    for (std::size_t s = 0; s < traces.size(); ++s)
        if (!effect_at_i[s] && equal_on(traces[s], pi, others)) bad.push_back(&traces[s]);
    std::vector<char> in(candidates.size(), 1);
    for (std::size_t c = 0; c < candidates.size(); ++c)
        for (auto* s : bad)
            if (at_least_as_similar(*s, pi, candidates[c], A)) {
                in[c] = 0;
                break;
            }
    (void)i;
    return in;
}

}  // namespace detail

inline std::vector<LassoTrace> oracle_cause(const System& sys, const Anchor& anchor, const FormulaPtr& effect,
                                            const NameSet& A, const BoundedConfig& cfg) {
    MaskLasso pi = to_mask(anchor.trace, sys);
    if (!replays(pi, sys)) throw ValidationError("anchor trace is not a trace of the system");
    if (!is_pure_ltl(*effect)) throw ValidationError("effect must not contain knowledge, quantifiers or causes");
    std::uint64_t Am = sys.mask(A);
    std::uint64_t others = sys.action_mask() & ~Am;
    auto traces = enumerate_system_mask_lassos(sys, cfg);
    std::vector<char> eff;
    for (auto& s : traces) eff.push_back(eval_ltl_on_lasso(s, anchor.time, effect, sys));
    auto cands = enumerate_words(Am, cfg);
    auto in = detail::cause_members(pi, anchor.time, traces, eff, Am, others, cands);
    std::vector<LassoTrace> r;
    for (std::size_t c = 0; c < cands.size(); ++c)
        if (in[c]) r.push_back(from_mask(cands[c], sys));
    return r;
}

// Throws OracleFragmentError unless every K applies to a cause-free
// formula and every quantifier has the shape  exists X . K[a] (X ~>[A] psi).
inline void require_oracle_fragment(const Formula& g) {
    if (g.op == Op::Exists) {
        const Formula& b = *g.kids[0];
        if (b.op != Op::Know || b.kids[0]->op != Op::Cause || b.kids[0]->name != g.name ||
            !is_pure_ltl(*b.kids[0]->kids[0]))
            throw OracleFragmentError("quantifier must have the shape exists X . K[a] (X ~> psi)");
        return;
    }
    if (g.op == Op::Know && !is_pure_ltl(*g.kids[0]))
        throw OracleFragmentError("knowledge operator applied to a formula with knowledge or causes");
    if (g.op == Op::Forall) throw OracleFragmentError("universal second-order quantifier");
    if (g.op == Op::Cause) throw OracleFragmentError("causal predicate outside exists X . K[a] (...)");
    for (auto& k : g.kids) require_oracle_fragment(*k);
}

// The bounded trace set, unrolled to a common lasso shape, with per-trace
// truth vectors of fragment formulas over that shape.
class OracleModel {
public:
    using Table = std::vector<std::vector<char>>;  // [trace][position]

    OracleModel(const System& sys, const BoundedConfig& cfg, std::size_t depth) : sys_(sys), cfg_(cfg) {
        traces_ = enumerate_system_mask_lassos(sys, cfg);
        std::size_t lc = 1;
        for (std::size_t l = 2; l <= cfg.loop_bound; ++l) lc = std::lcm(lc, l);
        shape_.loop = lc;
        shape_.n = cfg.prefix_bound + lc * (depth + 2);
        unrolled_.assign(traces_.size(), std::vector<MaskLetter>(shape_.n));
        for (std::size_t t = 0; t < traces_.size(); ++t)
            for (std::size_t j = 0; j < shape_.n; ++j) unrolled_[t][j] = traces_[t].at(j);
    }

    const std::vector<MaskLasso>& traces() const { return traces_; }
    std::size_t horizon() const { return shape_.n; }
    // position in the table holding the value at time i
    std::size_t fold(std::size_t i) const { return shape_.fold(i); }

    // f must be macro-resolved and inside the fragment; the returned table
    // stays valid as long as the model does.
    const Table& eval(const FormulaPtr& f) {
        keep_.push_back(f);
        return all(*f);
    }

private:
    const System& sys_;
    BoundedConfig cfg_;
    std::vector<MaskLasso> traces_;
    detail::Shape shape_;
    std::vector<std::vector<MaskLetter>> unrolled_;
    std::vector<FormulaPtr> keep_;
    std::map<const Formula*, Table> memo_;
    std::map<std::string, std::vector<std::vector<int>>> classes_;

    // prefix-observation classes per position: [position][trace]
    const std::vector<std::vector<int>>& classes_of(const std::string& agent) {
        auto it = classes_.find(agent);
        if (it != classes_.end()) return it->second;
        std::uint64_t obs = sys_.mask(sys_.agent_or_throw(agent).obs);
        const std::size_t n = shape_.n, T = traces_.size();
        std::vector<std::vector<int>> c(n, std::vector<int>(T));
        std::vector<int> prev(T, 0);
        for (std::size_t j = 0; j < n; ++j) {
            std::map<std::pair<int, MaskLetter>, int> ids;
            for (std::size_t t = 0; t < T; ++t)
                c[j][t] = ids.emplace(std::make_pair(prev[t], unrolled_[t][j] & obs), static_cast<int>(ids.size()))
                              .first->second;
            prev = c[j];
        }
        return classes_.emplace(agent, std::move(c)).first->second;
    }

    template <class Key>
    static std::vector<int> intern(const std::vector<Key>& keys) {
        std::map<Key, int> ids;
        std::vector<int> r;
        for (auto& k : keys) r.push_back(ids.emplace(k, static_cast<int>(ids.size())).first->second);
        return r;
    }

    std::vector<std::vector<MaskLetter>> masked(std::uint64_t m) const {
        std::vector<std::vector<MaskLetter>> r = unrolled_;
        for (auto& v : r)
            for (auto& x : v) x &= m;
        return r;
    }

    // Cause identity per (trace, position): equal ids iff equal causes.
    // The complement of a cause is the union, over bad witnesses s, of the
    // words that copy s wherever s differs from the anchor on A. Two such
    // unions coincide iff their minimal generators, written as absolute
    // (difference, values) pairs, coincide; comparing those is exact over
    // all omega-words and needs no candidate enumeration.
    std::vector<std::vector<int>> cause_ids(const Formula& cz) {
        const std::size_t n = shape_.n, T = traces_.size();
        std::uint64_t Am = sys_.mask(action_names(cz));
        std::uint64_t others = sys_.action_mask() & ~Am;
        const Table& eff = all(*cz.kids[0]);
        auto akey = intern(masked(sys_.action_mask() | Am));
        auto okey = intern(masked(others));
        auto apart = intern(masked(Am));
        // group by other-action part, then by A-part
        std::map<int, std::map<int, std::vector<std::size_t>>> group;
        for (std::size_t t = 0; t < T; ++t) group[okey[t]][apart[t]].push_back(t);
        using Pattern = std::vector<MaskLetter>;
        std::map<std::vector<std::pair<Pattern, Pattern>>, int> ids;
        std::map<std::pair<int, std::size_t>, int> done;
        std::vector<std::vector<int>> cid(T, std::vector<int>(n));
        for (std::size_t t = 0; t < T; ++t) {
            const auto& pi = unrolled_[t];
            for (std::size_t j = 0; j < n; ++j) {
                auto [it, fresh] = done.emplace(std::make_pair(akey[t], j), 0);
                if (!fresh) {
                    cid[t][j] = it->second;
                    continue;
                }
                std::vector<std::pair<std::size_t, Pattern>> diffs;  // (popcount, pattern)
                for (auto& [a, members] : group[okey[t]]) {
                    bool bad = false;
                    for (std::size_t s : members) bad = bad || !eff[s][j];
                    if (!bad) continue;
                    Pattern d(n);
                    std::size_t pc = 0;
                    for (std::size_t k = 0; k < n; ++k) {
                        d[k] = (unrolled_[members[0]][k] ^ pi[k]) & Am;
                        pc += static_cast<std::size_t>(std::popcount(d[k]));
                    }
                    diffs.emplace_back(pc, std::move(d));
                }
                std::sort(diffs.begin(), diffs.end());
                std::vector<Pattern> minimal;
                for (auto& [pc, d] : diffs) {
                    bool covered = false;
                    for (auto& m : minimal) {
                        bool sub = true;
                        for (std::size_t k = 0; k < n && sub; ++k) sub = (m[k] & ~d[k]) == 0;
                        if (sub) {
                            covered = true;
                            break;
                        }
                    }
                    if (!covered) minimal.push_back(d);
                }
                std::vector<std::pair<Pattern, Pattern>> gens;
                for (auto& m : minimal) {
                    Pattern v(n);
                    for (std::size_t k = 0; k < n; ++k) v[k] = ~pi[k] & m[k];
                    gens.emplace_back(m, std::move(v));
                }
                std::sort(gens.begin(), gens.end());
                int id = ids.emplace(std::move(gens), static_cast<int>(ids.size())).first->second;
                it->second = id;
                cid[t][j] = id;
            }
        }
        return cid;
    }

    // Value at (t, j) is true iff `key` agrees across the observation class of t at j.
    Table uniform_over_classes(const std::string& agent, const std::function<int(std::size_t, std::size_t)>& key) {
        const auto& cls = classes_of(agent);
        const std::size_t n = shape_.n, T = traces_.size();
        Table res(T, std::vector<char>(n, 1));
        for (std::size_t j = 0; j < n; ++j) {
            std::map<int, std::pair<int, bool>> seen;  // class -> (first key, uniform)
            for (std::size_t t = 0; t < T; ++t) {
                int k = key(t, j);
                auto [it, fresh] = seen.emplace(cls[j][t], std::make_pair(k, true));
                if (!fresh && it->second.first != k) it->second.second = false;
            }
            for (std::size_t t = 0; t < T; ++t) res[t][j] = seen[cls[j][t]].second;
        }
        return res;
    }

    const Table& all(const Formula& g) {
        auto it = memo_.find(&g);
        if (it != memo_.end()) return it->second;
        const std::size_t T = traces_.size();
        Table res(T);
        if (g.op == Op::Know) {
            const Table& inner = all(*g.kids[0]);
            // K holds iff the inner formula is true on the whole class
            res = uniform_over_classes(g.name, [&](std::size_t t, std::size_t j) { return inner[t][j] ? 1 : 0; });
            Table fixed = res;
            for (std::size_t t = 0; t < T; ++t)
                for (std::size_t j = 0; j < shape_.n; ++j) fixed[t][j] = res[t][j] && inner[t][j];
            res = std::move(fixed);
        } else if (g.op == Op::Exists) {
            const Formula& kn = *g.kids[0];
            auto cid = cause_ids(*kn.kids[0]);
            res = uniform_over_classes(kn.name, [&](std::size_t t, std::size_t j) { return cid[t][j]; });
        } else {
            for (std::size_t t = 0; t < T; ++t) {
                auto atom = [&](const std::string& p, std::size_t j) -> char {
                    return (unrolled_[t][j] & sys_.bit(p)) ? 1 : 0;
                };
                auto other = [&](const Formula& h) -> std::vector<char> { return all(h)[t]; };
                res[t] = detail::eval_shape(g, shape_, atom, other);
            }
        }
        return memo_.emplace(&g, std::move(res)).first->second;
    }
};

// Direct evaluation over the bounded trace set.
inline Verdict oracle_check(const System& sys, const FormulaPtr& f0, const BoundedConfig& cfg) {
    if (cfg.prefix_bound < 1 || cfg.loop_bound < 1) throw ValidationError("oracle bounds must be at least 1");
    auto wf = check_well_formed(f0, sys);
    if (!wf.empty()) throw ValidationError(wf.front().message);
    FormulaPtr f = resolve_macros(f0, sys);
    require_oracle_fragment(*f);
    OracleModel om(sys, cfg, formula_depth(*f));
    Verdict v;
    v.model = sys.name;
    v.formula = to_string(*f0);
    const auto& top = om.eval(f);
    for (std::size_t t = 0; t < om.traces().size(); ++t)
        if (!top[t][0]) {
            v.holds = false;
            v.has_counterexample = true;
            v.counterexample["alpha"] = from_mask(om.traces()[t], sys);
            break;
        }
    v.peak_states = om.traces().size();
    return v;
}

}  // namespace explic

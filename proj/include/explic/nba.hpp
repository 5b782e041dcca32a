#pragma once

// Nondeterministic Büchi automata with BDD guards and generalized
// state-based acceptance, plus the on-the-fly product used for emptiness.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bdd.hpp"
#include "errors.hpp"

namespace explic {

// BDD variables are either markers (ids below TrackStride) or tagged copies
// of a proposition: id = (slot + 1) * TrackStride + track. Interleaving the
// tracks per proposition keeps guards that relate tracks small.
class Vocabulary {
public:
    static constexpr int TrackStride = 128;

    explicit Vocabulary(std::vector<std::string> slot_names = {}) : slots_(std::move(slot_names)) {}

    const std::vector<std::string>& slots() const { return slots_; }
    int slot_count() const { return static_cast<int>(slots_.size()); }

    int new_track(const std::string& name) {
        if (tracks_.size() + 1 >= TrackStride) throw ResourceError("too many path variables");
        tracks_.push_back(name);
        return static_cast<int>(tracks_.size()) - 1;
    }
    int new_marker(const std::string& name) {
        if (markers_.size() + 1 >= TrackStride) throw ResourceError("too many position markers");
        markers_.push_back(name);
        return static_cast<int>(markers_.size()) - 1;
    }
    int track_count() const { return static_cast<int>(tracks_.size()); }
    const std::string& track_name(int t) const { return tracks_.at(t); }

    int var(int track, int slot) const { return (slot + 1) * TrackStride + track; }
    int marker_var(int m) const { return m; }
    bool is_marker(int v) const { return v < TrackStride; }
    int track_of(int v) const { return v % TrackStride; }
    int slot_of(int v) const { return v / TrackStride - 1; }

    std::vector<int> track_vars(int track) const {
        std::vector<int> r;
        for (int s = 0; s < slot_count(); ++s) r.push_back(var(track, s));
        return r;
    }

    std::string var_name(int v) const {
        if (is_marker(v)) return v < static_cast<int>(markers_.size()) ? markers_[v] : "m" + std::to_string(v);
        int t = track_of(v), s = slot_of(v);
        std::string p = s < slot_count() ? slots_[s] : "p" + std::to_string(s);
        std::string tn = t < track_count() ? tracks_[t] : "t" + std::to_string(t);
        return p + "_" + tn;
    }

private:
    std::vector<std::string> slots_;
    std::vector<std::string> tracks_;
    std::vector<std::string> markers_;
};

struct NbaEdge {
    bdd guard;
    int to;
};

struct Nba {
    BddManager* mgr = nullptr;
    std::vector<std::vector<NbaEdge>> out;
    std::vector<int> init;
    std::vector<std::uint64_t> acc;
    int nsets = 0;  // generalized Büchi sets; 0 means every infinite run accepts

    int size() const { return static_cast<int>(out.size()); }
    int add_state(std::uint64_t mask = 0) {
        out.emplace_back();
        acc.push_back(mask);
        return size() - 1;
    }
    void add_edge(int from, bdd g, int to) {
        if (g == BddManager::False) return;
        for (auto& e : out[from])
            if (e.to == to) {
                e.guard = mgr->lor(e.guard, g);
                return;
            }
        out[from].push_back({g, to});
    }
    std::uint64_t full() const { return nsets == 0 ? 0 : (nsets >= 64 ? ~0ull : ((1ull << nsets) - 1)); }
    bool accepting(int q) const { return (acc[q] & full()) == full(); }
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (auto& o : out) n += o.size();
        return n;
    }
};

// Deadline and size cap shared by the expensive operations of one check.
struct Budget {
    std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
    std::size_t state_cap = 1000000;
    std::size_t peak_states = 0;
    std::size_t ticks = 0;

    void tick() {
        if ((++ticks & 0xff) == 0 && std::chrono::steady_clock::now() > deadline)
            throw ResourceError("timeout");
    }
    void note(std::size_t states) {
        peak_states = std::max(peak_states, states);
        if (states > state_cap) throw ResourceError("state cap of " + std::to_string(state_cap) + " exceeded");
    }
};

inline Nba universal_nba(BddManager& m) {
    Nba a;
    a.mgr = &m;
    int q = a.add_state();
    a.init = {q};
    a.add_edge(q, BddManager::True, q);
    return a;
}

inline Nba empty_nba(BddManager& m) {
    Nba a;
    a.mgr = &m;
    a.add_state();
    a.init = {0};
    return a;
}

// ---------------------------------------------------------------- product

// Lazily explores the synchronous product of a list of automata.
class ProductExplorer {
public:
    ProductExplorer(std::vector<const Nba*> comps, Budget* budget = nullptr)
        : comps_(std::move(comps)), budget_(budget) {
        if (comps_.empty()) throw Error("empty product");
        mgr_ = comps_[0]->mgr;
        int off = 0;
        for (auto* c : comps_) {
            offsets_.push_back(off);
            off += c->nsets;
        }
        nsets_ = off;
        if (nsets_ > 64) throw ResourceError("too many acceptance sets in product");
    }

    BddManager& mgr() const { return *mgr_; }
    int nsets() const { return nsets_; }
    std::uint64_t full() const { return nsets_ == 0 ? 0 : (nsets_ == 64 ? ~0ull : ((1ull << nsets_) - 1)); }
    std::size_t size() const { return tuples_.size(); }
    const std::vector<int>& tuple(int id) const { return tuples_[id]; }

    std::vector<int> initial() {
        std::vector<int> r;
        std::vector<int> cur(comps_.size());
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == comps_.size()) {
                r.push_back(intern(cur));
                return;
            }
            for (int q : comps_[i]->init) {
                cur[i] = q;
                rec(i + 1);
            }
        };
        rec(0);
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }

    std::uint64_t acc(int id) const { return acc_[id]; }

    const std::vector<NbaEdge>& successors(int id) {
        if (done_[id]) return succ_[id];
        std::vector<int> src = tuples_[id];
        std::map<std::vector<int>, bdd> targets;
        std::vector<int> cur(comps_.size());
        std::function<void(std::size_t, bdd)> rec = [&](std::size_t i, bdd g) {
            if (i == comps_.size()) {
                auto [it, fresh] = targets.emplace(cur, g);
                if (!fresh) it->second = mgr_->lor(it->second, g);
                return;
            }
            for (auto& e : comps_[i]->out[src[i]]) {
                bdd h = mgr_->land(g, e.guard);
                if (h == BddManager::False) continue;
                cur[i] = e.to;
                rec(i + 1, h);
            }
        };
        rec(0, BddManager::True);
        std::vector<NbaEdge> out;
        for (auto& [t, g] : targets) out.push_back({g, intern(t)});
        succ_[id] = std::move(out);
        done_[id] = 1;
        if (budget_) budget_->tick();
        return succ_[id];
    }

private:
    std::vector<const Nba*> comps_;
    Budget* budget_;
    BddManager* mgr_;
    std::vector<int> offsets_;
    int nsets_ = 0;
    std::map<std::vector<int>, int> ids_;
    std::vector<std::vector<int>> tuples_;
    std::vector<std::uint64_t> acc_;
    std::deque<std::vector<NbaEdge>> succ_;
    std::vector<char> done_;

    int intern(const std::vector<int>& t) {
        auto it = ids_.find(t);
        if (it != ids_.end()) return it->second;
        int id = static_cast<int>(tuples_.size());
        ids_.emplace(t, id);
        tuples_.push_back(t);
        std::uint64_t a = 0;
        for (std::size_t i = 0; i < comps_.size(); ++i)
            if (comps_[i]->nsets) a |= comps_[i]->acc[t[i]] << offsets_[i];
        acc_.push_back(a);
        succ_.emplace_back();
        done_.push_back(0);
        if (budget_) budget_->note(tuples_.size());
        return id;
    }
};

inline Nba materialize(ProductExplorer& px) {
    Nba r;
    r.mgr = &px.mgr();
    r.nsets = px.nsets();
    std::vector<int> init = px.initial();
    std::deque<int> work(init.begin(), init.end());
    std::vector<char> seen;
    auto mark = [&](int id) {
        if (static_cast<int>(seen.size()) <= id) seen.resize(id + 1, 0);
        if (seen[id]) return false;
        seen[id] = 1;
        return true;
    };
    for (int i : init) mark(i);
    while (!work.empty()) {
        int id = work.front();
        work.pop_front();
        for (auto& e : px.successors(id))
            if (mark(e.to)) work.push_back(e.to);
    }
    int n = static_cast<int>(px.size());
    for (int i = 0; i < n; ++i) r.add_state(px.acc(i));
    for (int i = 0; i < n; ++i)
        if (i < static_cast<int>(seen.size()) && seen[i])
            for (auto& e : px.successors(i)) r.out[i].push_back(e);
    r.init = init;
    return r;
}

inline Nba product(const std::vector<const Nba*>& comps, Budget* budget = nullptr) {
    ProductExplorer px(comps, budget);
    return materialize(px);
}

inline Nba product(const Nba& a, const Nba& b, Budget* budget = nullptr) { return product({&a, &b}, budget); }

// Disjoint union; each side counts as satisfying the other side's sets.
inline Nba union_nba(const Nba& a, const Nba& b) {
    Nba r;
    r.mgr = a.mgr;
    r.nsets = a.nsets + b.nsets;
    if (r.nsets > 64) throw ResourceError("too many acceptance sets in union");
    std::uint64_t fa = a.full(), fb = b.full();
    for (int q = 0; q < a.size(); ++q) r.add_state(a.acc[q] | (fb << a.nsets));
    for (int q = 0; q < b.size(); ++q) r.add_state(fa | (b.acc[q] << a.nsets));
    for (int q = 0; q < a.size(); ++q)
        for (auto& e : a.out[q]) r.out[q].push_back(e);
    for (int q = 0; q < b.size(); ++q)
        for (auto& e : b.out[q]) r.out[a.size() + q].push_back({e.guard, e.to + a.size()});
    r.init = a.init;
    for (int i : b.init) r.init.push_back(i + a.size());
    return r;
}

// Existential projection of the variables in `vars`.
inline Nba project(const Nba& a, const std::vector<int>& vars) {
    Nba r = a;
    if (vars.empty()) return r;
    bdd cube = a.mgr->cube(vars);
    for (auto& o : r.out) {
        std::vector<NbaEdge> ne;
        for (auto& e : o) {
            bdd g = a.mgr->exists(e.guard, cube);
            bool merged = false;
            for (auto& x : ne)
                if (x.to == e.to) {
                    x.guard = a.mgr->lor(x.guard, g);
                    merged = true;
                }
            if (!merged) ne.push_back({g, e.to});
        }
        o = std::move(ne);
    }
    return r;
}

inline std::vector<int> support(const Nba& a) {
    std::vector<int> vs;
    for (auto& o : a.out)
        for (auto& e : o) {
            auto s = a.mgr->support(e.guard);
            vs.insert(vs.end(), s.begin(), s.end());
        }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

// ---------------------------------------------------------------- SCCs

struct SccInfo {
    std::vector<int> comp;          // component id per state (-1 if unreachable)
    std::vector<char> nontrivial;   // per component: contains a cycle
    std::vector<std::uint64_t> mask;  // per component: union of acceptance masks
    int count = 0;
};

// Iterative Tarjan over the states reachable from the initial states.
inline SccInfo sccs(const Nba& a) {
    int n = a.size();
    SccInfo info;
    info.comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on(n, 0);
    std::vector<int> stack;
    int counter = 0;
    struct Frame {
        int v;
        std::size_t i;
    };
    for (int root : a.init) {
        if (index[root] >= 0) continue;
        std::vector<Frame> cs{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = 1;
        while (!cs.empty()) {
            Frame& f = cs.back();
            int v = f.v;
            if (f.i < a.out[v].size()) {
                int w = a.out[v][f.i++].to;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = 1;
                    cs.push_back({w, 0});
                } else if (on[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int c = info.count++;
                bool self = false;
                std::uint64_t m = 0;
                int members = 0;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    info.comp[w] = c;
                    m |= a.acc[w];
                    ++members;
                    if (w == v) break;
                }
                for (auto& e : a.out[v]) self = self || e.to == v;
                info.nontrivial.push_back(members > 1 || self);
                info.mask.push_back(m);
            }
            cs.pop_back();
            if (!cs.empty()) low[cs.back().v] = std::min(low[cs.back().v], low[v]);
        }
    }
    return info;
}

// Removes states that are unreachable or cannot reach an accepting cycle.
inline Nba trim(const Nba& a) {
    SccInfo info = sccs(a);
    int n = a.size();
    std::uint64_t full = a.full();
    std::vector<char> good(n, 0);
    std::vector<std::vector<int>> pred(n);
    for (int q = 0; q < n; ++q)
        for (auto& e : a.out[q]) pred[e.to].push_back(q);
    std::deque<int> work;
    for (int q = 0; q < n; ++q) {
        int c = info.comp[q];
        if (c >= 0 && info.nontrivial[c] && (info.mask[c] & full) == full) {
            good[q] = 1;
            work.push_back(q);
        }
    }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int p : pred[q])
            if (!good[p] && info.comp[p] >= 0) {
                good[p] = 1;
                work.push_back(p);
            }
    }
    std::vector<int> idx(n, -1);
    Nba r;
    r.mgr = a.mgr;
    r.nsets = a.nsets;
    for (int q = 0; q < n; ++q)
        if (good[q]) idx[q] = r.add_state(a.acc[q]);
    for (int q = 0; q < n; ++q) {
        if (!good[q]) continue;
        for (auto& e : a.out[q])
            if (good[e.to]) r.out[idx[q]].push_back({e.guard, idx[e.to]});
    }
    for (int i : a.init)
        if (good[i]) r.init.push_back(idx[i]);
    if (r.init.empty()) return empty_nba(*a.mgr);
    return r;
}

// Counter construction to a single acceptance set.
inline Nba degeneralize(const Nba& a) {
    if (a.nsets == 1) return a;
    Nba r;
    r.mgr = a.mgr;
    r.nsets = 1;
    if (a.nsets == 0) {
        r = a;
        r.nsets = 1;
        for (auto& m : r.acc) m = 1;
        return r;
    }
    int k = a.nsets, n = a.size();
    // state (q, c): waiting for set c; accepting when the counter wraps
    auto id = [&](int q, int c) { return q * k + c; };
    for (int q = 0; q < n; ++q)
        for (int c = 0; c < k; ++c) r.add_state(0);
    for (int q = 0; q < n; ++q)
        for (int c = 0; c < k; ++c) {
            int d = c;
            while (d < k && ((a.acc[q] >> d) & 1)) ++d;
            if (d == k) r.acc[id(q, c)] = 1;
            int nc = d == k ? 0 : d;
            for (auto& e : a.out[q]) r.out[id(q, c)].push_back({e.guard, id(e.to, nc)});
        }
    for (int i : a.init) r.init.push_back(id(i, 0));
    return trim(r);
}

// ---------------------------------------------------------------- emptiness

struct Lasso {
    std::vector<bdd> prefix;  // guards along the stem
    std::vector<bdd> loop;    // guards along the cycle
};

// Searches for an accepting lasso in the product; nullopt-like empty result
// is reported through the boolean.
inline bool find_accepting_lasso(ProductExplorer& px, Lasso& out) {
    std::vector<int> init = px.initial();
    std::uint64_t full = px.full();
    std::vector<int> index, low;
    std::vector<char> on;
    std::vector<int> stack;
    int counter = 0;
    auto ensure = [&](int v) {
        if (static_cast<int>(index.size()) <= v) {
            index.resize(v + 1, -1);
            low.resize(v + 1, 0);
            on.resize(v + 1, 0);
        }
    };
    struct Frame {
        int v;
        std::size_t i;
    };
    std::vector<int> found;
    for (int root : init) {
        ensure(root);
        if (index[root] >= 0) continue;
        std::vector<Frame> cs{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = 1;
        while (!cs.empty() && found.empty()) {
            int v = cs.back().v;
            const auto& succ = px.successors(v);
            if (cs.back().i < succ.size()) {
                int w = succ[cs.back().i++].to;
                ensure(w);
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = 1;
                    cs.push_back({w, 0});
                } else if (on[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<int> members;
                std::uint64_t m = 0;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on[w] = 0;
                    members.push_back(w);
                    m |= px.acc(w);
                    if (w == v) break;
                }
                bool cyc = members.size() > 1;
                for (auto& e : px.successors(v)) cyc = cyc || e.to == v;
                if (cyc && (m & full) == full) found = members;
            }
            cs.pop_back();
            if (!cs.empty()) low[cs.back().v] = std::min(low[cs.back().v], low[v]);
        }
        if (!found.empty()) break;
    }
    if (found.empty()) return false;

    std::vector<char> in_scc;
    for (int v : found) {
        if (static_cast<int>(in_scc.size()) <= v) in_scc.resize(v + 1, 0);
        in_scc[v] = 1;
    }
    auto member = [&](int v) { return v < static_cast<int>(in_scc.size()) && in_scc[v]; };

    // stem: shortest path from an initial state into the SCC
    int entry = -1;
    {
        std::map<int, std::pair<int, bdd>> parent;
        std::deque<int> q;
        for (int s : init)
            if (!parent.count(s)) {
                parent[s] = {-1, BddManager::True};
                q.push_back(s);
            }
        int hit = -1;
        while (!q.empty() && hit < 0) {
            int v = q.front();
            q.pop_front();
            if (member(v)) {
                hit = v;
                break;
            }
            for (auto& e : px.successors(v))
                if (!parent.count(e.to)) {
                    parent[e.to] = {v, e.guard};
                    q.push_back(e.to);
                }
        }
        std::vector<bdd> rev;
        for (int x = hit; parent[x].first != -1; x = parent[x].first) rev.push_back(parent[x].second);
        out.prefix.assign(rev.rbegin(), rev.rend());
        entry = hit;
    }

    // path inside the SCC from `from` to a node satisfying `goal`; with
    // `step` the path has at least one edge
    auto path = [&](int from, const std::function<bool(int)>& goal, bool step) {
        std::vector<std::pair<int, bdd>> res;
        if (!step && goal(from)) return std::make_pair(from, res);
        std::map<int, std::pair<int, bdd>> parent;
        std::deque<int> q;
        auto expand = [&](int v) {
            for (auto& e : px.successors(v))
                if (member(e.to) && !parent.count(e.to)) {
                    parent[e.to] = {v, e.guard};
                    q.push_back(e.to);
                }
        };
        expand(from);
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            if (goal(v)) {
                int x = v;
                do {
                    res.push_back({x, parent[x].second});
                    x = parent[x].first;
                } while (x != from);
                std::reverse(res.begin(), res.end());
                return std::make_pair(v, res);
            }
            expand(v);
        }
        throw Error("internal: no path inside accepting component");
    };

    int cur = entry;
    std::uint64_t covered = px.acc(entry);
    for (int s = 0; s < px.nsets(); ++s) {
        if ((covered >> s) & 1) continue;
        auto seg = path(cur, [&](int v) { return ((px.acc(v) >> s) & 1) != 0; }, false);
        for (auto& [v, g] : seg.second) {
            out.loop.push_back(g);
            covered |= px.acc(v);
        }
        cur = seg.first;
    }
    auto back = path(cur, [&](int v) { return v == entry; }, out.loop.empty());
    for (auto& [v, g] : back.second) out.loop.push_back(g);
    return true;
}

inline bool is_empty(const Nba& a, Lasso* witness = nullptr, Budget* budget = nullptr) {
    ProductExplorer px({&a}, budget);
    Lasso l;
    bool found = find_accepting_lasso(px, l);
    if (found && witness) *witness = l;
    return !found;
}

// ---------------------------------------------------------------- output

inline std::string to_dot(const Nba& a, const Vocabulary& voc, const std::string& name = "A") {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (int q = 0; q < a.size(); ++q)
        os << "  q" << q << " [label=\"" << q << "\"" << (a.accepting(q) && a.nsets <= 1 ? ", shape=doublecircle" : "")
           << "];\n";
    for (std::size_t i = 0; i < a.init.size(); ++i)
        os << "  init" << i << " [shape=point];\n  init" << i << " -> q" << a.init[i] << ";\n";
    for (int q = 0; q < a.size(); ++q)
        for (auto& e : a.out[q])
            os << "  q" << q << " -> q" << e.to << " [label=\""
               << a.mgr->to_string(e.guard, [&](int v) { return voc.var_name(v); }) << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace explic

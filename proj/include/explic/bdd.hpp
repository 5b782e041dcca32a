#pragma once

// Reduced ordered BDDs used for edge guards. Variable ids double as levels:
// a smaller id is closer to the root. Nodes are never freed; one manager is
// meant to live for the duration of a single check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace explic {

using bdd = std::uint32_t;

class BddManager {
public:
    static constexpr bdd False = 0;
    static constexpr bdd True = 1;
    static constexpr int TermVar = 0x7fffffff;

    BddManager() : buckets_(1u << 16, Nil), cache_(1u << 18) {
        nodes_.push_back({TermVar, 0, 0, Nil});
        nodes_.push_back({TermVar, 1, 1, Nil});
    }
    BddManager(const BddManager&) = delete;
    BddManager& operator=(const BddManager&) = delete;

    std::size_t size() const { return nodes_.size(); }

    int var_of(bdd f) const { return nodes_[f].var; }
    bdd low(bdd f) const { return nodes_[f].lo; }
    bdd high(bdd f) const { return nodes_[f].hi; }
    bool is_const(bdd f) const { return f <= 1; }

    bdd var(int v) { return mk(v, False, True); }
    bdd nvar(int v) { return mk(v, True, False); }
    bdd lit(int v, bool positive) { return positive ? var(v) : nvar(v); }

    bdd lnot(bdd f) { return apply(OpXor, f, True); }
    bdd land(bdd a, bdd b) { return apply(OpAnd, a, b); }
    bdd lor(bdd a, bdd b) { return apply(OpOr, a, b); }
    bdd lxor(bdd a, bdd b) { return apply(OpXor, a, b); }
    bdd limp(bdd a, bdd b) { return lor(lnot(a), b); }
    bdd liff(bdd a, bdd b) { return lnot(lxor(a, b)); }
    bool implies(bdd a, bdd b) { return land(a, lnot(b)) == False; }
    bool disjoint(bdd a, bdd b) { return land(a, b) == False; }

    // cube of positive literals, used as a variable set
    bdd cube(const std::vector<int>& vars) {
        std::vector<int> vs(vars);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        bdd r = True;
        for (auto it = vs.rbegin(); it != vs.rend(); ++it) r = mk(*it, False, r);
        return r;
    }

    bdd exists(bdd f, bdd vars) {
        if (is_const(f) || vars == True) return f;
        int fv = var_of(f);
        while (vars != True && var_of(vars) < fv) vars = high(vars);
        if (vars == True) return f;
        bdd cached;
        if (lookup(OpExists, f, vars, cached)) return cached;
        bdd r;
        if (var_of(vars) == fv) {
            r = lor(exists(low(f), high(vars)), exists(high(f), high(vars)));
        } else {
            r = mk(fv, exists(low(f), vars), exists(high(f), vars));
        }
        store(OpExists, f, vars, r);
        return r;
    }

    bdd forall(bdd f, bdd vars) { return lnot(exists(lnot(f), vars)); }

    // positive/negative cofactor on one variable
    bdd cofactor(bdd f, int v, bool value) {
        if (is_const(f) || var_of(f) > v) return f;
        if (var_of(f) == v) return value ? high(f) : low(f);
        bdd cached;
        bdd key = value ? True : False;
        if (lookup(OpCofactor + (static_cast<std::uint32_t>(v) << 4), f, key, cached)) return cached;
        bdd r = mk(var_of(f), cofactor(low(f), v, value), cofactor(high(f), v, value));
        store(OpCofactor + (static_cast<std::uint32_t>(v) << 4), f, key, r);
        return r;
    }

    // rename variables through a monotone-agnostic map (rebuilds bottom-up)
    bdd rename(bdd f, const std::map<int, int>& m) {
        std::map<bdd, bdd> memo;
        return rename_rec(f, m, memo);
    }

    std::vector<int> support(bdd f) const {
        std::vector<int> out;
        std::vector<bdd> stack{f};
        std::vector<char> seen(nodes_.size(), 0);
        while (!stack.empty()) {
            bdd g = stack.back();
            stack.pop_back();
            if (g <= 1 || seen[g]) continue;
            seen[g] = 1;
            out.push_back(var_of(g));
            stack.push_back(low(g));
            stack.push_back(high(g));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Smallest satisfying partial assignment in the order "false before true"
    // along increasing variable ids. Unmentioned variables are false.
    std::vector<std::pair<int, bool>> min_sat(bdd f) const {
        if (f == False) throw std::logic_error("min_sat of false");
        std::vector<std::pair<int, bool>> out;
        while (f != True) {
            if (low(f) != False) {
                out.emplace_back(var_of(f), false);
                f = low(f);
            } else {
                out.emplace_back(var_of(f), true);
                f = high(f);
            }
        }
        return out;
    }

    bool eval(bdd f, const std::function<bool(int)>& value) const {
        while (f > 1) f = value(var_of(f)) ? high(f) : low(f);
        return f == True;
    }

    // Disjoint cubes covering f; each cube is a list of (var, polarity).
    std::vector<std::vector<std::pair<int, bool>>> cubes(bdd f) const {
        std::vector<std::vector<std::pair<int, bool>>> out;
        std::vector<std::pair<int, bool>> cur;
        cubes_rec(f, cur, out);
        return out;
    }

    std::string to_string(bdd f, const std::function<std::string(int)>& name) const {
        if (f == True) return "true";
        if (f == False) return "false";
        std::string s;
        for (auto& c : cubes(f)) {
            if (!s.empty()) s += " | ";
            std::string t;
            for (auto [v, pos] : c) {
                if (!t.empty()) t += "&";
                t += (pos ? "" : "!") + name(v);
            }
            s += t;
        }
        return s;
    }

private:
    static constexpr std::uint32_t Nil = 0xffffffffu;
    enum : std::uint32_t { OpAnd = 1, OpOr = 2, OpXor = 3, OpExists = 4, OpCofactor = 5 };

    struct Node {
        int var;
        bdd lo, hi;
        std::uint32_t next;
    };
    struct CacheEntry {
        std::uint32_t op = 0;
        bdd a = 0, b = 0, r = 0;
    };

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> buckets_;
    std::vector<CacheEntry> cache_;

    static std::size_t hash3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        std::uint64_t h = a * 0x9E3779B97F4A7C15ull ^ (b + 0x632BE59BD9B4E019ull) * 0xC2B2AE3D27D4EB4Full;
        h ^= c * 0x165667B19E3779F9ull;
        h ^= h >> 29;
        return static_cast<std::size_t>(h);
    }

    bdd mk(int v, bdd lo, bdd hi) {
        if (lo == hi) return lo;
        std::size_t mask = buckets_.size() - 1;
        std::size_t h = hash3(static_cast<std::uint64_t>(v), lo, hi) & mask;
        for (std::uint32_t i = buckets_[h]; i != Nil; i = nodes_[i].next) {
            const Node& n = nodes_[i];
            if (n.var == v && n.lo == lo && n.hi == hi) return i;
        }
        if (nodes_.size() >= 0xfffffff0u) throw std::length_error("bdd node table exhausted");
        bdd id = static_cast<bdd>(nodes_.size());
        nodes_.push_back({v, lo, hi, buckets_[h]});
        buckets_[h] = id;
        if (nodes_.size() > buckets_.size()) grow();
        return id;
    }

    void grow() {
        std::vector<std::uint32_t> nb(buckets_.size() * 2, Nil);
        std::size_t mask = nb.size() - 1;
        for (std::uint32_t i = 2; i < nodes_.size(); ++i) {
            Node& n = nodes_[i];
            std::size_t h = hash3(static_cast<std::uint64_t>(n.var), n.lo, n.hi) & mask;
            n.next = nb[h];
            nb[h] = i;
        }
        buckets_.swap(nb);
        if (cache_.size() < buckets_.size()) cache_.assign(buckets_.size(), CacheEntry{});
    }

    bool lookup(std::uint32_t op, bdd a, bdd b, bdd& r) const {
        const CacheEntry& e = cache_[hash3(op, a, b) & (cache_.size() - 1)];
        if (e.op == op && e.a == a && e.b == b) {
            r = e.r;
            return true;
        }
        return false;
    }
    void store(std::uint32_t op, bdd a, bdd b, bdd r) {
        cache_[hash3(op, a, b) & (cache_.size() - 1)] = {op, a, b, r};
    }

    bdd apply(std::uint32_t op, bdd a, bdd b) {
        switch (op) {
        case OpAnd:
            if (a == False || b == False) return False;
            if (a == True) return b;
            if (b == True || a == b) return a;
            break;
        case OpOr:
            if (a == True || b == True) return True;
            if (a == False) return b;
            if (b == False || a == b) return a;
            break;
        case OpXor:
            if (a == b) return False;
            if (a == False) return b;
            if (b == False) return a;
            if (a == True && b == True) return False;
            break;
        }
        if (a > b) std::swap(a, b);
        bdd r;
        if (lookup(op, a, b, r)) return r;
        int va = var_of(a), vb = var_of(b);
        int v = std::min(va, vb);
        bdd a0 = va == v ? low(a) : a, a1 = va == v ? high(a) : a;
        bdd b0 = vb == v ? low(b) : b, b1 = vb == v ? high(b) : b;
        bdd lo = apply(op, a0, b0);
        bdd hi = apply(op, a1, b1);
        r = mk(v, lo, hi);
        store(op, a, b, r);
        return r;
    }

    bdd rename_rec(bdd f, const std::map<int, int>& m, std::map<bdd, bdd>& memo) {
        if (is_const(f)) return f;
        auto it = memo.find(f);
        if (it != memo.end()) return it->second;
        bdd lo = rename_rec(low(f), m, memo);
        bdd hi = rename_rec(high(f), m, memo);
        auto mv = m.find(var_of(f));
        int v = mv == m.end() ? var_of(f) : mv->second;
        bdd x = var(v);
        bdd r = lor(land(x, hi), land(lnot(x), lo));
        memo.emplace(f, r);
        return r;
    }

    void cubes_rec(bdd f, std::vector<std::pair<int, bool>>& cur,
                   std::vector<std::vector<std::pair<int, bool>>>& out) const {
        if (f == False) return;
        if (f == True) {
            out.push_back(cur);
            return;
        }
        cur.emplace_back(var_of(f), false);
        cubes_rec(low(f), cur, out);
        cur.back().second = true;
        cubes_rec(high(f), cur, out);
        cur.pop_back();
    }
};

}  // namespace explic

#pragma once

// Named requirements for the benchmark families and the expected-verdict
// table used by `bench`.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "formula.hpp"
#include "generators.hpp"
#include "system.hpp"

namespace explic {

// Default agent, trigger, effect and privacy secret per family.
struct FamilyDefaults {
    std::string agent;
    std::string trigger, effect;
    std::string secret, condition;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::optional<FamilyDefaults> family_defaults(const std::string& family) {
    if (family == "auction") return FamilyDefaults{"bidder1", "!w1 & !o & Y o", "!w1", "b2", "true"};
    if (family == "rps") return FamilyDefaults{"player1", "l1", "l1", "p2", "!d"};
    if (family == "pennies") return FamilyDefaults{"player1", "!w", "!w", "c2", "!w"};
    return std::nullopt;
}

// ice|ece|fce[:AGENT[:TRIGGER:EFFECT]]   priv[:AGENT[:SECRET[:CONDITION]]]
inline FormulaPtr named_requirement(const System& sys, const std::string& text, const FamilyDefaults* d) {
    auto parts = split(text, ':');
    const std::string& kind = parts[0];
    auto arg = [&](std::size_t i, const std::string& fallback, const char* what) {
        if (i < parts.size() && !parts[i].empty()) return parts[i];
        if (!d) throw ValidationError(std::string("requirement '") + text + "' needs " + what +
                                      " (no family defaults for a model file)");
        return fallback;
    };
    if (kind == "ice" || kind == "ece" || kind == "fce") {
        if (parts.size() > 4 || parts.size() == 3) throw ValidationError("expected " + kind + ":AGENT[:TRIGGER:EFFECT]");
        ExplainMode m = kind == "ice" ? ExplainMode::ICE : kind == "ece" ? ExplainMode::ECE : ExplainMode::FCE;
        std::string agent = arg(1, d ? d->agent : "", "an agent");
        auto trig = parse_formula(arg(2, d ? d->trigger : "", "a trigger"));
        auto eff = parse_formula(arg(3, d ? d->effect : "", "an effect"));
        return mk_explainability(sys, agent, trig, eff, m);
    }
    if (kind == "priv") {
        if (parts.size() > 4) throw ValidationError("expected priv:AGENT[:SECRET[:CONDITION]]");
        std::string agent = arg(1, d ? d->agent : "", "an agent");
        auto secret = parse_formula(arg(2, d ? d->secret : "", "a secret"));
        std::string cond = parts.size() > 3 ? parts[3] : (parts.size() > 2 || !d ? "true" : d->condition);
        return mk_privacy(agent, secret, parse_formula(cond));
    }
    throw ValidationError("unknown requirement '" + kind + "' (ice, ece, fce, priv)");
}

// One benchmark instance: generator spec plus requirement name.
struct Instance {
    std::string family, params, requirement;
    std::string spec() const { return params.empty() ? family : family + ":" + params; }
    std::string key() const { return family + "," + params + "," + requirement; }
    bool operator<(const Instance& o) const { return key() < o.key(); }
};

// Rows "family,params,requirement,verdict" with verdict holds|fails.
class ExpectedTable {
public:
    static ExpectedTable parse(const std::string& csv) {
        ExpectedTable t;
        std::istringstream in(csv);
        std::string line;
        bool header = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            if (header) {
                header = false;
                continue;
            }
            auto f = split(line, ',');
            if (f.size() != 4 || (f[3] != "holds" && f[3] != "fails"))
                throw ValidationError("bad expected-verdict row: " + line);
            t.rows_[f[0] + "," + f[1] + "," + f[2]] = f[3] == "holds";
        }
        return t;
    }
    std::optional<bool> lookup(const Instance& i) const {
        auto it = rows_.find(i.key());
        if (it == rows_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t size() const { return rows_.size(); }

private:
    std::map<std::string, bool> rows_;
};

inline const std::vector<std::string>& requirement_names() {
    static const std::vector<std::string> r{"ice", "ece", "fce", "priv"};
    return r;
}

inline std::vector<Instance> auction_suite(int min_bidders, int max_bidders) {
    std::vector<Instance> r;
    for (int n = min_bidders; n <= max_bidders; ++n)
        for (const char* v : {"blind", "public", "explain"})
            for (auto& q : requirement_names()) r.push_back({"auction", std::to_string(n) + ":" + v, q});
    return r;
}

inline std::vector<Instance> rps_suite() {
    std::vector<Instance> r;
    for (const char* v : {"standard", "well"})
        for (auto& q : requirement_names()) r.push_back({"rps", v, q});
    return r;
}

// blaming: "yes", "no" or "both"
inline std::vector<Instance> pennies_suite(int min_players, int max_players, const std::string& blaming) {
    std::vector<std::string> vs;
    if (blaming == "yes" || blaming == "both") vs.push_back("blaming");
    if (blaming == "no" || blaming == "both") vs.push_back("plain");
    if (vs.empty()) throw ValidationError("--blaming must be yes, no or both");
    std::vector<Instance> r;
    for (int n = min_players; n <= max_players; ++n)
        for (auto& v : vs)
            for (auto& q : requirement_names()) r.push_back({"pennies", std::to_string(n) + ":" + v, q});
    return r;
}

inline FormulaPtr instance_formula(const System& sys, const Instance& i) {
    auto d = family_defaults(i.family);
    return named_requirement(sys, i.requirement, d ? &*d : nullptr);
}

}  // namespace explic

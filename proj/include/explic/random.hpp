#pragma once

// Random small systems and fragment formulas for cross-validation.

#include <random>
#include <string>
#include <vector>

#include "formula.hpp"
#include "system.hpp"

namespace explic {

struct RandomSystemConfig {
    int max_states = 4;
    int max_props = 3;
    int max_actions = 2;
    bool allow_nondeterminism = true;
};

// Action-complete by construction: every (state, action subset) gets at
// least one edge whose guard is the full action minterm.
inline System random_system(std::mt19937& rng, const RandomSystemConfig& cfg = {}) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    System sys;
    sys.name = "random";
    int nprops = pick(1, cfg.max_props);
    int nacts = pick(0, std::min(cfg.max_actions, nprops));
    std::vector<std::string> acts, outs;
    for (int i = 0; i < nacts; ++i) acts.push_back(std::string(1, static_cast<char>('a' + i)));
    for (int i = 0; i < nprops - nacts; ++i) outs.push_back(std::string(1, static_cast<char>('p' + i)));
    for (auto& a : acts) {
        sys.aps.insert(a);
        sys.actions.insert(a);
    }
    for (auto& o : outs) sys.aps.insert(o);

    // agent i controls the first action, agent j the rest; both see their own actions
    AgentView ai{"i", {}, {}}, aj{"j", {}, {}};
    for (int k = 0; k < nacts; ++k) (k == 0 ? ai : aj).acts.insert(acts[k]);
    for (auto& p : sys.aps) {
        if (ai.acts.count(p) || coin(0.5)) ai.obs.insert(p);
        if (aj.acts.count(p) || coin(0.5)) aj.obs.insert(p);
    }
    sys.agents = {ai, aj};

    int ns = pick(1, cfg.max_states);
    for (int s = 0; s < ns; ++s) sys.states.push_back("s" + std::to_string(s));
    sys.initial.insert("s0");
    if (ns > 1 && coin(0.3)) sys.initial.insert(sys.states[pick(1, ns - 1)]);

    auto random_outs = [&]() {
        NameSet o;
        for (auto& p : outs)
            if (coin(0.5)) o.insert(p);
        return o;
    };
    for (int s = 0; s < ns; ++s) {
        for (int m = 0; m < (1 << nacts); ++m) {
            std::vector<GuardPtr> lits;
            for (int k = 0; k < nacts; ++k)
                lits.push_back((m >> k) & 1 ? Guard::v(acts[k]) : Guard::neg(Guard::v(acts[k])));
            GuardPtr g = Guard::conj(lits);
            int branches = cfg.allow_nondeterminism && coin(0.25) ? 2 : 1;
            for (int b = 0; b < branches; ++b)
                sys.edges.push_back({sys.states[s], sys.states[pick(0, ns - 1)], g, random_outs()});
        }
    }
    sys.finalize();
    return sys;
}

// Random formula over the system's propositions. depth bounds the nesting
// of operators; knowledge only appears when with_knowledge is set and is
// only applied to knowledge-free arguments.
inline FormulaPtr random_ltl(std::mt19937& rng, const System& sys, int depth, bool with_knowledge = false) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const auto& props = sys.props();
    if (depth <= 0 || pick(0, 5) == 0) {
        int k = pick(0, static_cast<int>(props.size()));
        return k == static_cast<int>(props.size()) ? fm::tt() : fm::atom(props[k]);
    }
    auto sub = [&]() { return random_ltl(rng, sys, depth - 1, with_knowledge); };
    auto pure = [&]() { return random_ltl(rng, sys, depth - 1, false); };
    int op = pick(0, with_knowledge ? 13 : 11);
    switch (op) {
    case 0: return fm::lnot(sub());
    case 1: return fm::land(sub(), sub());
    case 2: return fm::lor(sub(), sub());
    case 3: return fm::next(sub());
    case 4: return fm::prev(sub());
    case 5: return fm::until(sub(), sub());
    case 6: return fm::since(sub(), sub());
    case 7: return fm::eventually(sub());
    case 8: return fm::globally(sub());
    case 9: return fm::once(sub());
    case 10: return fm::implies(sub(), sub());
    case 11: return fm::historically(sub());
    default: return fm::know(sys.agents[pick(0, static_cast<int>(sys.agents.size()) - 1)].agent, pure());
    }
}

// G (trigger -> exists X . K[a] (X ~>[A] effect)) with small random parts.
inline FormulaPtr random_explainability(std::mt19937& rng, const System& sys) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const auto& agent = sys.agents[pick(0, static_cast<int>(sys.agents.size()) - 1)].agent;
    NameSet A;
    switch (pick(0, 2)) {
    case 0: A = sys.agent_or_throw(agent).acts; break;
    case 1: A = sys.actions; break;
    default:
        for (auto& a : sys.actions)
            if (!sys.agent_or_throw(agent).acts.count(a)) A.insert(a);
        break;
    }
    auto trig = random_ltl(rng, sys, 1);
    auto eff = random_ltl(rng, sys, 2);
    return fm::globally(fm::implies(trig, fm::exists("X", fm::know(agent, fm::cause("X", A, eff)))));
}

}  // namespace explic

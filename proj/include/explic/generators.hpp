#pragma once

// The three benchmark families: Dutch auction, rock-paper-scissors and
// collaborative matching pennies.

#include <string>
#include <vector>

#include "system.hpp"

namespace explic {

enum class AuctionVariant { Blind, Public, Explain };
enum class RpsVariant { Standard, Well };

inline std::string to_string(AuctionVariant v) {
    switch (v) {
    case AuctionVariant::Blind: return "blind";
    case AuctionVariant::Public: return "public";
    case AuctionVariant::Explain: return "explain";
    }
    return "?";
}
inline std::string to_string(RpsVariant v) { return v == RpsVariant::Standard ? "standard" : "well"; }

inline System generate_dutch_auction(int n, AuctionVariant variant) {
    if (n < 2) throw ValidationError("auction needs at least 2 bidders");
    System sys;
    sys.name = "auction_" + std::to_string(n) + "_" + to_string(variant);
    auto b = [](int i) { return "b" + std::to_string(i); };
    auto w = [](int i) { return "w" + std::to_string(i); };
    sys.aps.insert("o");
    sys.actions.insert("o");
    for (int i = 1; i <= n; ++i) {
        sys.aps.insert(b(i));
        sys.aps.insert(w(i));
        sys.actions.insert(b(i));
    }
    NameSet E;
    if (variant == AuctionVariant::Explain) {
        sys.aps.insert("e");
        E.insert("e");
    }
    NameSet extra;
    if (variant == AuctionVariant::Public) extra = sys.actions;
    if (variant == AuctionVariant::Explain) extra = E;

    AgentView auctioneer{"auctioneer", {"o"}, {"o"}};
    auctioneer.obs.insert(extra.begin(), extra.end());
    sys.agents.push_back(auctioneer);
    for (int i = 1; i <= n; ++i) {
        AgentView a{"bidder" + std::to_string(i), {b(i), w(i), "o"}, {b(i)}};
        a.obs.insert(extra.begin(), extra.end());
        sys.agents.push_back(a);
    }

    sys.states.push_back("init");
    sys.initial.insert("init");
    for (int i = 1; i <= n; ++i) sys.states.push_back("win" + std::to_string(i));

    std::vector<GuardPtr> nobids;
    for (int i = 1; i <= n; ++i) nobids.push_back(Guard::neg(Guard::v(b(i))));
    sys.edges.push_back({"init", "init", Guard::disj(Guard::neg(Guard::v("o")), Guard::conj(nobids)), {}});
    for (int i = 1; i <= n; ++i) {
        std::string wi = "win" + std::to_string(i);
        sys.edges.push_back({"init", wi, Guard::conj(Guard::v("o"), Guard::v(b(i))), E});
        sys.edges.push_back({wi, "init", Guard::neg(Guard::v("o")), {w(i)}});
        sys.edges.push_back({wi, wi, Guard::v("o"), {}});
    }
    sys.finalize();
    return sys;
}

// One round per step. Each player picks by raising exactly one object
// action; a malformed pick (none or several) ends the round without outcome.
inline System generate_rps(RpsVariant variant) {
    std::vector<std::string> objs{"r", "p", "s"};
    if (variant == RpsVariant::Well) objs.push_back("w");
    auto beats = [&](const std::string& x, const std::string& y) {
        if (x == "p" && y == "r") return true;
        if (x == "s" && y == "p") return true;
        if (x == "r" && y == "s") return true;
        if (x == "w" && (y == "s" || y == "r")) return true;
        if (x == "p" && y == "w") return true;
        return false;
    };
    System sys;
    sys.name = std::string("rps_") + to_string(variant);
    for (int pl = 1; pl <= 2; ++pl)
        for (auto& o : objs) {
            sys.aps.insert(o + std::to_string(pl));
            sys.actions.insert(o + std::to_string(pl));
        }
    for (auto o : {"d", "l1", "l2"}) sys.aps.insert(o);
    for (int pl = 1; pl <= 2; ++pl) {
        AgentView a{"player" + std::to_string(pl), {"d", "l1", "l2"}, {}};
        for (auto& o : objs) {
            a.acts.insert(o + std::to_string(pl));
            a.obs.insert(o + std::to_string(pl));
        }
        sys.agents.push_back(a);
    }
    sys.states = {"round"};
    sys.initial = {"round"};

    auto pick = [&](int pl, const std::string& x) {
        std::vector<GuardPtr> lits;
        for (auto& o : objs) {
            auto v = Guard::v(o + std::to_string(pl));
            lits.push_back(o == x ? v : Guard::neg(v));
        }
        return Guard::conj(lits);
    };
    std::vector<GuardPtr> draw, loss1, loss2, valid1, valid2;
    for (auto& x : objs) {
        valid1.push_back(pick(1, x));
        valid2.push_back(pick(2, x));
        for (auto& y : objs) {
            auto g = Guard::conj(pick(1, x), pick(2, y));
            if (x == y) draw.push_back(g);
            else if (beats(y, x)) loss1.push_back(g);
            else loss2.push_back(g);
        }
    }
    sys.edges.push_back({"round", "round", Guard::disj(draw), {"d"}});
    sys.edges.push_back({"round", "round", Guard::disj(loss1), {"l1"}});
    sys.edges.push_back({"round", "round", Guard::disj(loss2), {"l2"}});
    sys.edges.push_back({"round", "round", Guard::neg(Guard::conj(Guard::disj(valid1), Guard::disj(valid2))), {}});
    sys.finalize();
    return sys;
}

// Every player sets coin c_i (heads iff present). w iff all coins are
// equal; with blaming, b_i iff player i is the unique player whose coin
// differs from all others.
inline System generate_matching_pennies(int n, bool blaming) {
    if (n < 2) throw ValidationError("matching pennies needs at least 2 players");
    System sys;
    sys.name = "pennies_" + std::to_string(n) + (blaming ? "_blaming" : "_plain");
    auto c = [](int i) { return "c" + std::to_string(i); };
    auto bl = [](int i) { return "b" + std::to_string(i); };
    sys.aps.insert("w");
    for (int i = 1; i <= n; ++i) {
        sys.aps.insert(c(i));
        sys.actions.insert(c(i));
        if (blaming) sys.aps.insert(bl(i));
    }
    for (int i = 1; i <= n; ++i) {
        AgentView a{"player" + std::to_string(i), {c(i), "w"}, {c(i)}};
        if (blaming) a.obs.insert(bl(i));
        sys.agents.push_back(a);
    }
    sys.states = {"round"};
    sys.initial = {"round"};

    std::vector<GuardPtr> heads, tails;
    for (int i = 1; i <= n; ++i) {
        heads.push_back(Guard::v(c(i)));
        tails.push_back(Guard::neg(Guard::v(c(i))));
    }
    GuardPtr all_equal = Guard::disj(Guard::conj(heads), Guard::conj(tails));
    sys.edges.push_back({"round", "round", all_equal, {"w"}});
    std::vector<GuardPtr> covered{all_equal};
    if (blaming && n >= 3) {
        for (int i = 1; i <= n; ++i) {
            std::vector<GuardPtr> up{Guard::v(c(i))}, down{Guard::neg(Guard::v(c(i)))};
            for (int j = 1; j <= n; ++j) {
                if (j == i) continue;
                up.push_back(Guard::neg(Guard::v(c(j))));
                down.push_back(Guard::v(c(j)));
            }
            GuardPtr g = Guard::disj(Guard::conj(up), Guard::conj(down));
            sys.edges.push_back({"round", "round", g, {bl(i)}});
            covered.push_back(g);
        }
    }
    sys.edges.push_back({"round", "round", Guard::neg(Guard::disj(covered)), {}});
    sys.finalize();
    return sys;
}

// "auction:3:blind", "rps:well", "pennies:4:blaming"
inline System generate_from_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    auto num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            int v = std::stoi(s, &used);
            if (used != s.size()) throw ValidationError("bad number '" + s + "' in generator spec");
            return v;
        } catch (const std::logic_error&) {
            throw ValidationError("bad number '" + s + "' in generator spec");
        }
    };
    if (parts[0] == "auction" && parts.size() == 3) {
        AuctionVariant v;
        if (parts[2] == "blind") v = AuctionVariant::Blind;
        else if (parts[2] == "public") v = AuctionVariant::Public;
        else if (parts[2] == "explain") v = AuctionVariant::Explain;
        else throw ValidationError("unknown auction variant '" + parts[2] + "'");
        return generate_dutch_auction(num(parts[1]), v);
    }
    if (parts[0] == "rps" && parts.size() == 2) {
        if (parts[1] == "standard") return generate_rps(RpsVariant::Standard);
        if (parts[1] == "well") return generate_rps(RpsVariant::Well);
        throw ValidationError("unknown rps variant '" + parts[1] + "'");
    }
    if (parts[0] == "pennies" && parts.size() == 3) {
        bool blaming;
        if (parts[2] == "blaming") blaming = true;
        else if (parts[2] == "plain") blaming = false;
        else throw ValidationError("unknown pennies variant '" + parts[2] + "' (blaming|plain)");
        return generate_matching_pennies(num(parts[1]), blaming);
    }
    throw ValidationError("unknown generator spec '" + spec + "'");
}

}  // namespace explic

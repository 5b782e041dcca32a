#include <gtest/gtest.h>

#include "support.hpp"

using namespace explic;
using namespace explic::testing;

TEST(Oracle, LassoEvaluation) {
    LassoTrace t = parse_trace("{a} {} ({b})^w");
    EXPECT_TRUE(eval_ltl_on_lasso(t, 0, parse_formula("a & X !a & F G b")));
    EXPECT_FALSE(eval_ltl_on_lasso(t, 0, parse_formula("Y true")));
    EXPECT_TRUE(eval_ltl_on_lasso(t, 1, parse_formula("Y a")));
    EXPECT_TRUE(eval_ltl_on_lasso(t, 5, parse_formula("O a & !(H b)")));
    EXPECT_TRUE(eval_ltl_on_lasso(t, 7, parse_formula("b S (!a & !b)")));
    EXPECT_THROW(eval_ltl_on_lasso(t, 0, parse_formula("K[i] a")), ValidationError);
}

TEST(Oracle, EnumerationIsCanonicalAndReplays) {
    System s = generate_from_spec("pennies:2:plain");
    auto ts = enumerate_system_mask_lassos(s, {2, 2});
    ASSERT_FALSE(ts.empty());
    std::set<MaskLasso> seen(ts.begin(), ts.end());
    EXPECT_EQ(seen.size(), ts.size());
    for (auto& t : ts) {
        EXPECT_EQ(canonicalize(t), t);
        EXPECT_TRUE(replays(t, s));
        EXPECT_LE(t.prefix.size(), 2u);
        EXPECT_LE(t.loop.size(), 2u);
    }
}

TEST(Oracle, BlindAuctionIceFails) {
    System s = generate_from_spec("auction:2:blind");
    Verdict v = oracle_check(s, instance_formula(s, {"auction", "2:blind", "ice"}), {4, 2});
    EXPECT_FALSE(v.holds);
}

TEST(Oracle, PenniesPrivacyFailsForTwoPlayers) {
    System s = generate_from_spec("pennies:2:plain");
    Verdict v = oracle_check(s, instance_formula(s, {"pennies", "2:plain", "priv"}), {2, 1});
    EXPECT_FALSE(v.holds);
    EXPECT_TRUE(v.has_counterexample);
}

TEST(Oracle, RejectsOutsideFragment) {
    System s = generate_from_spec("auction:2:blind");
    EXPECT_THROW(oracle_check(s, parse_formula("K[bidder1] K[bidder2] o"), {2, 1}), OracleFragmentError);
    EXPECT_THROW(oracle_check(s, parse_formula("forall X . K[bidder1] (X ~>[b1] o)"), {2, 1}), OracleFragmentError);
    EXPECT_THROW(oracle_check(s, parse_formula("exists X . (X ~>[b1] o)"), {2, 1}), OracleFragmentError);
    EXPECT_THROW(oracle_check(s, parse_formula("G o"), {2, 0}), ValidationError);
}

TEST(Oracle, KnowledgeIsVeridical) {
    std::mt19937 rng(11);
    for (int k = 0; k < 30; ++k) {
        System s = random_system(rng);
        FormulaPtr f = random_ltl(rng, s, 2);
        auto bad = veridicality_violations(s, f, s.agents[k % 2].agent, {2, 2});
        EXPECT_TRUE(bad.empty()) << bad.front();
    }
    System a = generate_from_spec("auction:2:explain");
    auto bad = veridicality_violations(a, parse_formula("b2 | Y b2"), "bidder1", {3, 1});
    EXPECT_TRUE(bad.empty()) << bad.front();
}

TEST(Oracle, KnownCauseOnDeterministicSystemGivesKnowledge) {
    for (const char* spec : {"pennies:2:plain", "pennies:2:blaming", "pennies:3:plain", "pennies:3:blaming"}) {
        System s = generate_from_spec(spec);
        ASSERT_TRUE(is_deterministic(s));
        auto bad = determinism_knowledge_violations(s, "player1", parse_formula("!w"), {2, 1});
        EXPECT_TRUE(bad.empty()) << bad.front();
    }
}

TEST(Oracle, CauseMatchesDefinitionOnBoundedWords) {
    for (auto& c : cause_cases()) {
        auto bad = cause_biconditional_mismatches(c, {4, 1});
        EXPECT_TRUE(bad.empty()) << c.trace << " @" << c.anchor << " differs on " << bad.front();
    }
}

TEST(Oracle, CauseIsDownwardClosed) {
    const auto& c = cause_cases()[0];
    System s = generate_from_spec(c.spec);
    LassoTrace pi = parse_trace(c.trace);
    BoundedConfig b{4, 1};
    auto members = oracle_cause(s, Anchor{pi, c.anchor}, parse_formula(c.effect), c.actions, b);
    std::set<LassoTrace> in(members.begin(), members.end());
    ASSERT_FALSE(in.empty());
    auto piA = project(pi, Letter(c.actions));
    for (auto& w : enumerate_words(s.mask(c.actions), b)) {
        LassoTrace lw = from_mask(w, s);
        for (auto& m : members)
            if (at_least_as_similar(lw, piA, m, Letter(c.actions))) {
                EXPECT_TRUE(in.count(lw)) << to_string(lw) << " below member " << to_string(m);
                break;
            }
    }
}

TEST(Oracle, AgreesWithCheckerOnRandomInstances) {
    auto r = oracle_agreement(0, 100);
    EXPECT_EQ(r.instances, 100);
    EXPECT_TRUE(r.disagreements.empty()) << r.disagreements.size() << " disagreements, first: "
                                         << r.disagreements.front();
}

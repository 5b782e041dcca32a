#include <gtest/gtest.h>

#include "explic/formula.hpp"
#include "explic/generators.hpp"
#include "explic/trace.hpp"

using namespace explic;

namespace {

bool same(const std::string& a, const std::string& b) {
    return structurally_equal(*parse_formula(a), *parse_formula(b));
}

}  // namespace

TEST(Formula, Precedence) {
    EXPECT_TRUE(same("a & b | c", "(a & b) | c"));
    EXPECT_TRUE(same("!a U b", "(!a) U b"));
    EXPECT_TRUE(same("a -> b -> c", "a -> (b -> c)"));
    EXPECT_TRUE(same("X a & b", "(X a) & b"));
    EXPECT_TRUE(same("G F a", "G (F a)"));
    EXPECT_FALSE(same("a & (b | c)", "(a & b) | c"));
}

TEST(Formula, PrintParseRoundTrip) {
    for (const char* s : {"G (a -> F b)", "Y Y (!b1 & Y !b1)", "a S (b U c)", "H (a <-> O b)",
                          "exists X . K[i] (X ~>[a, b] F p)", "forall X . (X ~>[a] p)", "K[j] (p | !q)"}) {
        auto f = parse_formula(s);
        auto g = parse_formula(to_string(*f));
        EXPECT_TRUE(structurally_equal(*f, *g)) << s << " printed as " << to_string(*f);
    }
}

TEST(Formula, SyntaxErrors) {
    EXPECT_THROW(parse_formula("G ("), SyntaxError);
    EXPECT_THROW(parse_formula("a &"), SyntaxError);
    EXPECT_THROW(parse_formula("K[] a"), SyntaxError);
}

TEST(Formula, UnboundCauseVariable) {
    EXPECT_THROW(parse_formula("X ~>[a] p"), Error);
    EXPECT_NO_THROW(parse_formula("exists X . X ~>[a] p"));
}

TEST(Formula, EmptyActionSetWarns) {
    std::vector<ParseWarning> w;
    parse_formula("exists X . K[i] (X ~>[] p)", &w);
    EXPECT_EQ(w.size(), 1u);
}

TEST(Formula, DesugarIsCore) {
    for (const char* s : {"G (a -> F b)", "H (a <-> O b)", "forall X . K[i] (X ~>[a] p)"}) {
        EXPECT_TRUE(is_core(*desugar(parse_formula(s)))) << s;
    }
}

TEST(Formula, PureClassification) {
    EXPECT_TRUE(is_pure_ltl(*parse_formula("G (a -> Y b)")));
    EXPECT_FALSE(is_pure_ltl(*parse_formula("K[i] a")));
    EXPECT_TRUE(has_future(*parse_formula("Y F a")));
    EXPECT_FALSE(has_future(*parse_formula("Y (a S b)")));
}

TEST(Formula, ExplainabilityActionSets) {
    System s = generate_from_spec("auction:3:blind");
    NameSet own = explain_action_set(s, "bidder1", ExplainMode::ICE);
    NameSet others = explain_action_set(s, "bidder1", ExplainMode::ECE);
    NameSet all = explain_action_set(s, "bidder1", ExplainMode::FCE);
    EXPECT_EQ(own, (NameSet{"b1"}));
    EXPECT_EQ(own.size() + others.size(), all.size());
    EXPECT_EQ(all, s.actions);
    for (auto& a : own) EXPECT_FALSE(others.count(a));
}

TEST(Trace, ParsePrintRoundTrip) {
    for (const char* s : {"{o,b1,e} {o} {o,b1} {w1} ({})^w", "({a} {})^w", "{} ({p,q})^w"}) {
        LassoTrace t = parse_trace(s);
        EXPECT_EQ(parse_trace(to_string(t)), t) << s;
    }
    EXPECT_THROW(parse_trace("{a} {b}"), Error);
    EXPECT_THROW(parse_trace("{a} ()^w"), Error);
}

TEST(Trace, Canonicalize) {
    LassoTrace t = parse_trace("{a} {} {a} ({} {a})^w");
    LassoTrace c = canonicalize(t);
    EXPECT_EQ(c, parse_trace("({a} {})^w"));
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(t.at(i), c.at(i));
}

TEST(Trace, ObservationPrefix) {
    LassoTrace a = parse_trace("{o,b1} {o} ({})^w"), b = parse_trace("{o,b2} {o} ({w})^w");
    EXPECT_TRUE(obs_equiv_prefix(a, b, Letter{"o"}, 1));
    EXPECT_FALSE(obs_equiv_prefix(a, b, Letter{"o", "b1"}, 0));
    EXPECT_TRUE(obs_equiv_prefix(a, b, Letter{"o"}, 1));
    EXPECT_FALSE(equal_on(a, b, Letter{"w"}));
}

TEST(Trace, Similarity) {
    // t is at least as similar to ref as cand when its differences are contained
    LassoTrace ref = parse_trace("({})^w");
    LassoTrace near = parse_trace("{a} ({})^w"), far = parse_trace("{a} {a} ({})^w");
    EXPECT_TRUE(at_least_as_similar(near, ref, far, Letter{"a"}));
    EXPECT_FALSE(at_least_as_similar(far, ref, near, Letter{"a"}));
    EXPECT_TRUE(at_least_as_similar(ref, ref, near, Letter{"a"}));
}

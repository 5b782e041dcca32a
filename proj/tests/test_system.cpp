#include <gtest/gtest.h>

#include "explic/generators.hpp"
#include "explic/system.hpp"

using namespace explic;

namespace {

const char* kToggle = R"(
system toggle {
  aps: a, p;
  actions: a;
  agents {
    i { acts: a; obs: a; }
  }
  states: s0*, s1;
  edges {
    s0 -> s1 [guard: a; out: {p}];
    s0 -> s0 [guard: !a; out: {}];
    s1 -> s0 [guard: true; out: {}];
  }
}
)";

}  // namespace

TEST(System, ParsesAndQueries) {
    System s = parse_model(kToggle);
    EXPECT_EQ(s.name, "toggle");
    EXPECT_EQ(s.props().size(), 2u);
    EXPECT_EQ(s.action_list(), std::vector<std::string>{"a"});
    EXPECT_TRUE(is_deterministic(s));
    EXPECT_EQ(s.agent_or_throw("i").obs, (NameSet{"a"}));
    EXPECT_THROW(s.agent_or_throw("nobody"), ValidationError);
}

TEST(System, SerializeRoundTrip) {
    for (const char* spec : {"auction:2:blind", "auction:3:explain", "rps:standard", "rps:well", "pennies:3:blaming",
                             "pennies:2:plain"}) {
        System a = generate_from_spec(spec);
        std::string text = serialize_model(a);
        System b = parse_model(text);
        EXPECT_EQ(serialize_model(b), text) << spec;
        EXPECT_EQ(a.props(), b.props()) << spec;
        EXPECT_EQ(a.states.size(), b.states.size()) << spec;
    }
}

TEST(System, RejectsIncompleteModel) {
    std::string bad = kToggle;
    bad.replace(bad.find("    s0 -> s0 [guard: !a; out: {}];\n"), 35, "");
    EXPECT_THROW(parse_model(bad), ValidationError);
}

TEST(System, RejectsOutputAction) {
    std::string bad = kToggle;
    bad.replace(bad.find("out: {p}"), 8, "out: {a}");
    EXPECT_THROW(parse_model(bad), ValidationError);
}

TEST(System, RejectsSyntaxErrors) {
    EXPECT_THROW(parse_model("system x { aps: a "), Error);
    EXPECT_THROW(parse_model(""), Error);
}

TEST(System, GeneratorsAreActionComplete) {
    for (const char* spec : {"auction:2:public", "auction:4:blind", "rps:well", "pennies:4:plain", "pennies:3:blaming"}) {
        System s = generate_from_spec(spec);
        for (std::size_t q = 0; q < s.states.size(); ++q)
            for (std::size_t m = 0; m < s.action_subsets(); ++m)
                EXPECT_FALSE(s.succ(static_cast<int>(q), m).empty()) << spec << " state " << s.states[q];
    }
}

TEST(System, PenniesIsDeterministic) {
    for (int n = 2; n <= 4; ++n) {
        EXPECT_TRUE(is_deterministic(generate_matching_pennies(n, false)));
        EXPECT_TRUE(is_deterministic(generate_matching_pennies(n, true)));
    }
}

TEST(System, AuctionScalesWithBidders) {
    auto s2 = generate_from_spec("auction:2:blind"), s3 = generate_from_spec("auction:3:blind");
    EXPECT_LT(s2.actions.size(), s3.actions.size());
    EXPECT_EQ(s3.agents.size(), s2.agents.size() + 1);
}

TEST(System, BadGeneratorSpec) {
    EXPECT_THROW(generate_from_spec("auction:1:blind"), ValidationError);
    EXPECT_THROW(generate_from_spec("chess:3"), ValidationError);
    EXPECT_THROW(generate_from_spec("rps:maybe"), ValidationError);
}

#include <gtest/gtest.h>

#include "support.hpp"

using namespace explic;
using namespace explic::testing;

TEST(Bdd, BasicAlgebra) {
    BddManager m;
    bdd a = m.var(0), b = m.var(1);
    EXPECT_EQ(m.land(a, m.lnot(a)), BddManager::False);
    EXPECT_EQ(m.lor(a, m.lnot(a)), BddManager::True);
    EXPECT_EQ(m.land(a, b), m.land(b, a));
    EXPECT_TRUE(m.implies(m.land(a, b), a));
    EXPECT_FALSE(m.implies(a, m.land(a, b)));
    EXPECT_EQ(m.lnot(m.lnot(b)), b);
}

TEST(Nba, UniversalAndEmpty) {
    BddManager m;
    EXPECT_FALSE(is_empty(universal_nba(m)));
    EXPECT_TRUE(is_empty(empty_nba(m)));
    EXPECT_TRUE(is_empty(complement(universal_nba(m))));
}

TEST(Nba, LassoWitnessIsAccepted) {
    std::mt19937 rng(7);
    for (int k = 0; k < 30; ++k) {
        BddManager m;
        Nba a = random_nba(rng, m, 2, 4);
        Lasso w;
        if (is_empty(a, &w)) continue;
        EXPECT_TRUE(accepts(a, w.prefix, w.loop)) << "automaton " << k;
    }
}

TEST(Ltl, SimpleLanguages) {
    BddManager m;
    LtlArena ar;
    int p = ar.var(0);
    Nba gf = ltl_to_nba(ar, ar.globally(ar.eventually(p)), m);
    EXPECT_TRUE(nba_accepts(gf, MaskLasso{{0, 0}, {0, 1}}, 1));
    EXPECT_FALSE(nba_accepts(gf, MaskLasso{{1, 1}, {0}}, 1));
    Nba y = ltl_to_nba(ar, ar.prev(p), m);
    EXPECT_FALSE(nba_accepts(y, MaskLasso{{}, {1}}, 1));  // Y is false at time 0
}

TEST(Ltl, AgreesWithLassoEvaluation) {
    auto r = ltl_vs_lasso(125, 4, 2024);
    EXPECT_GE(r.pairs, 500);
    EXPECT_TRUE(r.mismatches.empty()) << r.mismatches.size() << " mismatches, first: " << r.mismatches.front();
}

TEST(Complement, Metamorphic) {
    auto r = complement_metamorphic(120, 99);
    EXPECT_GE(r.automata, 100);
    EXPECT_TRUE(r.failures.empty()) << r.failures.size() << " failures, first: " << r.failures.front();
}

TEST(Complement, ProductIsIntersection) {
    std::mt19937 rng(3);
    for (int k = 0; k < 40; ++k) {
        BddManager m;
        Nba a = random_nba(rng, m, 2, 3), b = random_nba(rng, m, 2, 3);
        Nba p = product(a, b);
        for (int j = 0; j < 6; ++j) {
            MaskLasso t = random_mask_lasso(rng, 2, 2, 3);
            EXPECT_EQ(nba_accepts(p, t, 2), nba_accepts(a, t, 2) && nba_accepts(b, t, 2)) << k;
        }
    }
}

TEST(Complement, InclusionWitness) {
    BddManager m;
    LtlArena ar;
    int p = ar.var(0);
    Nba gp = ltl_to_nba(ar, ar.globally(p), m), fp = ltl_to_nba(ar, ar.eventually(p), m);
    EXPECT_TRUE(language_included(gp, fp));
    Lasso w;
    EXPECT_FALSE(language_included(fp, gp, &w));
    EXPECT_TRUE(accepts(fp, w.prefix, w.loop));
    EXPECT_FALSE(accepts(gp, w.prefix, w.loop));
}

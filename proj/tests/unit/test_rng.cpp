#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eqlab/rng.hpp"

using eqlab::Rng;

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
        ASSERT_EQ(a.normal(), b.normal());
    }
}

TEST(Rng, DeriveSeedIsOrderSensitive) {
    EXPECT_NE(eqlab::derive_seed(1, {2, 3}), eqlab::derive_seed(1, {3, 2}));
    EXPECT_NE(eqlab::derive_seed(1, {2}), eqlab::derive_seed(2, {2}));
    EXPECT_EQ(eqlab::derive_seed(7, {1, 2, 3}), eqlab::derive_seed(7, {1, 2, 3}));
}

TEST(Rng, SplitDoesNotAdvanceParent) {
    Rng a(5), b(5);
    Rng child = a.split(9);
    (void)child.next_u64();
    EXPECT_EQ(a.next_u64(), b.next_u64());
}

// mt19937_64's 10000th output from the default seed is fixed by the standard;
// checking the engine here pins cross-platform reproducibility.
TEST(Rng, EngineMatchesStandardReference) {
    std::mt19937_64 e;
    e.discard(9999);
    EXPECT_EQ(e(), 9981545732273789042ULL);
}

TEST(Rng, UniformAndBelowRanges) {
    Rng r(1);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto k = r.below(7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Rng, NormalMoments) {
    Rng r(3);
    const int n = 200000;
    double s = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
    EXPECT_NEAR(s4 / n, 3.0, 0.06);
}

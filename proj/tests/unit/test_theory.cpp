#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eqlab/errors.hpp"
#include "eqlab/mlp.hpp"
#include "eqlab/theory.hpp"

using namespace eqlab;
using std::numbers::pi;

TEST(Handcrafted, ShapeAndSameInputsPositive) {
    const int d = 64;
    const auto p = build_handcrafted(d, 1.5);
    EXPECT_EQ(p.width(), 4);
    EXPECT_THROW(build_handcrafted(d, 0.0), std::invalid_argument);
    Rng r(1);
    Vector x(2 * d);
    for (int t = 0; t < 10000; ++t) {
        for (int k = 0; k < d; ++k) x[k] = x[d + k] = r.normal() / 8.0;
        ASSERT_GT(forward(p, x), 0.0);
    }
}

TEST(Handcrafted, SwapLeavesMagnitude) {
    const int d = 16;
    const auto p = build_handcrafted(d, 2.0);
    Rng r(2);
    for (int t = 0; t < 100; ++t) {
        Vector x(2 * d), y(2 * d);
        for (int k = 0; k < 2 * d; ++k) x[k] = r.normal();
        y << x.tail(d), x.head(d);
        EXPECT_NEAR(std::abs(forward(p, x)), std::abs(forward(p, y)), 1e-12);
    }
}

TEST(Handcrafted, DiffAccuracyClosedForm) {
    EXPECT_DOUBLE_EQ(handcrafted_diff_accuracy(1.0), 0.5);
    EXPECT_NEAR(handcrafted_diff_accuracy(1e9), 1.0, 1e-8);
    // Monte-Carlo oracle: u - rho v < 0 with u, v independent half-normals
    Rng r(3);
    const int n = 1000000;
    int hit = 0;
    for (int i = 0; i < n; ++i) hit += std::abs(r.normal()) - 1.5 * std::abs(r.normal()) < 0.0;
    EXPECT_NEAR(static_cast<double>(hit) / n, 0.6257, 0.002);
    EXPECT_NEAR(handcrafted_diff_accuracy(1.5), 0.6256659164, 1e-9);
}

TEST(RichPrediction, FrozenValues) {
    EXPECT_DOUBLE_EQ(rich_accuracy_prediction(2), 0.75);
    EXPECT_NEAR(rich_accuracy_prediction(3), 0.9078654127, 1e-9);
    EXPECT_NEAR(rich_accuracy_prediction(5), 0.9748387036, 1e-9);
    EXPECT_THROW(rich_accuracy_prediction(1), std::invalid_argument);
}

TEST(RichPrediction, MonotoneToOne) {
    double prev = 0.0;
    for (int L = 3; L <= 200; ++L) {
        const double p = rich_accuracy_prediction(L);
        EXPECT_GE(p, prev);
        prev = p;
    }
    EXPECT_NEAR(prev, 1.0, 1e-12);
}

namespace {

Matrix ideal_circulant(int d) {
    Matrix C = Matrix::Zero(2 * d, 2 * d);
    C.topRightCorner(d, d).setIdentity();
    C.bottomLeftCorner(d, d).setIdentity();
    return C;
}

double margin_distance(int P, std::uint64_t seed) {
    const auto pool = sample_symbol_pool(64, 16, seed);
    Rng r(seed + 100);
    const auto b = make_train_batch(pool, P, {}, r);
    return (empirical_margin_matrix(b).X - ideal_circulant(16)).norm();
}

}  // namespace

TEST(MarginMatrix, SymmetricAndNeedsBalance) {
    const auto pool = sample_symbol_pool(8, 4, 1);
    Rng r(2);
    const auto b = make_train_batch(pool, 100, {}, r);
    const auto mm = empirical_margin_matrix(b);
    EXPECT_LT((mm.X - mm.X.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(mm.normalization, 8.0);

    Batch same{b.inputs.leftCols(50), std::vector<int>(50, 1), {}};
    EXPECT_THROW(empirical_margin_matrix(same), std::invalid_argument);
}

TEST(MarginMatrix, ConvergesTowardCirculant) {
    EXPECT_LT(margin_distance(30000, 5), margin_distance(3000, 5));

    const auto pool = sample_symbol_pool(64, 16, 6);
    Rng r(7);
    const auto mm = empirical_margin_matrix(make_train_batch(pool, 30000, {}, r));
    EXPECT_LT(mm.X.diagonal().cwiseAbs().maxCoeff(), 0.1);
}

TEST(Circulant, EigenpairsAndHalfAlignments) {
    const int d = 4;
    const auto es = ideal_circulant_eigensystem(d);
    const Matrix C = ideal_circulant(d);
    for (int l = 0; l < 2 * d; ++l) {
        EXPECT_EQ(es.values[l], l % 2 == 0 ? 1.0 : -1.0);
        EXPECT_LT((C * es.vectors.col(l) - es.values[l] * es.vectors.col(l)).norm(), 1e-12);
        EXPECT_NEAR(half_alignment(es.vectors.col(l)), l % 2 == 0 ? 1.0 : -1.0, 1e-10);
    }
    EXPECT_LT((es.vectors.transpose() * es.vectors - Matrix::Identity(2 * d, 2 * d)).norm(), 1e-12);
}

TEST(Circulant, LargerDimensionAlsoExact) {
    const auto es = ideal_circulant_eigensystem(33);
    const Matrix C = ideal_circulant(33);
    EXPECT_LT((C * es.vectors - es.vectors * es.values.asDiagonal()).norm(), 1e-10);
}

TEST(HalfAlignment, ZeroHalfUndefined) {
    Vector v = Vector::Zero(6);
    v[0] = 1.0;
    EXPECT_THROW(half_alignment(v), UndefinedQuantity);
    EXPECT_THROW(half_alignment(Vector::Ones(5)), std::invalid_argument);
}

TEST(Ntk, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(ntk_kernel(1.0), 1.0);
    EXPECT_DOUBLE_EQ(ntk_kernel(-1.0), 0.0);
    EXPECT_NEAR(ntk_kernel(0.0), 1.0 / (2 * pi), 1e-15);
    EXPECT_NEAR(ntk_kernel(0.5), 0.47116555718878134, 1e-14);
    EXPECT_NEAR(ntk_kernel(-0.5), -0.028834442811218608, 1e-14);
    EXPECT_NO_THROW(ntk_kernel(1.0 + 5e-13));
    EXPECT_THROW(ntk_kernel(1.0 + 1e-9), std::invalid_argument);
}

TEST(Ntk, TaylorFormula) {
    EXPECT_NEAR(taylor_kernel_expectation(0.0, 0.0), 1.0 / (2 * pi), 1e-15);
    EXPECT_NEAR(taylor_kernel_expectation(0.0, 1.0 / 64), 0.16288513707061164, 1e-12);

    const int d = 256;
    Rng r(8);
    double sum = 0, s1 = 0, s2 = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double u = r.normal() / std::sqrt(static_cast<double>(d));
        sum += ntk_kernel(std::clamp(u, -1.0, 1.0));
        s1 += u;
        s2 += u * u;
    }
    EXPECT_LT(std::abs(sum / n - taylor_kernel_expectation(s1 / n, s2 / n)), 1e-3);
}

TEST(Dual, ConstraintsEnforced) {
    const auto pool = sample_symbol_pool(12, 32, 1);
    EXPECT_NO_THROW(build_restricted_dual_classifier(pool, 1.0, 1.1));
    EXPECT_THROW(build_restricted_dual_classifier(pool, 1.0, 2.5), std::invalid_argument);
    EXPECT_THROW(build_restricted_dual_classifier(pool, 1.0, 0.9), std::invalid_argument);
    EXPECT_THROW(build_restricted_dual_classifier(sample_symbol_pool(10, 32, 1), 1.0, 1.1), std::invalid_argument);
}

TEST(Dual, SparsityPattern) {
    const auto pool = sample_symbol_pool(12, 8, 2);
    const auto clf = build_restricted_dual_classifier(pool, 1.0, 1.1);
    EXPECT_EQ(clf.n_same, 4);
    EXPECT_EQ(clf.n_diff, 4);
    // same anchors are (s; s) for symbols 0..3, different anchors pair 4-5, 6-7, 8-9, 10-11
    for (int k = 0; k < 4; ++k) {
        Vector a(16);
        a << pool.symbols.row(k).transpose(), pool.symbols.row(k).transpose();
        EXPECT_LT((clf.anchors.col(k) - a.normalized()).norm(), 1e-12);
        EXPECT_EQ(clf.coeffs[k], 1.0);
    }
    for (int j = 0; j < 4; ++j) {
        const int l = 4 + 2 * j;
        Vector a(16);
        a << pool.symbols.row(l).transpose(), pool.symbols.row(l + 1).transpose();
        EXPECT_LT((clf.anchors.col(4 + j) - a.normalized()).norm(), 1e-12);
        EXPECT_EQ(clf.coeffs[4 + j], -1.1);
    }
}

// With b- = 1.1 the different side holds but the same side does not at d = 32:
// the constant term of E[K] outweighs the O(1/d) advantage. The balanced b- keeps both.
TEST(Dual, MeanLogitSigns) {
    const int d = 32;
    Rng r(3);
    const auto test = make_test_batch(4000, d, {}, r);
    double same_bal = 0, diff_bal = 0, diff_11 = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto pool = sample_symbol_pool(12, d, 10 + rep);
        const Vector fb = build_restricted_dual_classifier(pool, 1.0, balanced_bminus(d)).evaluate_batch(test.inputs);
        const Vector f11 = build_restricted_dual_classifier(pool, 1.0, 1.1).evaluate_batch(test.inputs);
        same_bal += fb.head(2000).mean();
        diff_bal += fb.tail(2000).mean();
        diff_11 += f11.tail(2000).mean();
    }
    EXPECT_GT(same_bal, 0.0);
    EXPECT_LT(diff_bal, 0.0);
    EXPECT_LT(diff_11, 0.0);
}

TEST(Dual, BalancedBminus) {
    EXPECT_NEAR(balanced_bminus(16), 1.0223880597014925, 1e-15);
    EXPECT_GT(balanced_bminus(1), 1.0);
    EXPECT_LT(balanced_bminus(1), 2.0);
}

TEST(Scaling, ExactBoundGivesSlopeTwo) {
    auto runner = [](int d, int L) { return std::exp(-static_cast<double>(L) / (static_cast<double>(d) * d)); };
    const auto fit = lazy_scaling_curve({8, 16, 32}, std::exp(-1.0), runner, {1, 1, 4.0});
    EXPECT_NEAR(fit.slope, 2.0, 0.05);
    EXPECT_EQ(fit.n_fitted, 3);
    for (const auto& p : fit.points) {
        EXPECT_FALSE(p.censored);
        EXPECT_EQ(p.L_star, p.d * p.d);
    }
}

TEST(Scaling, CensoringAndPreconditions) {
    auto never = [](int, int) { return 0.5; };
    const auto fit = lazy_scaling_curve({4, 8, 16}, 0.1, never);
    EXPECT_TRUE(std::isnan(fit.slope));
    for (const auto& p : fit.points) EXPECT_TRUE(p.censored);
    EXPECT_THROW(lazy_scaling_curve({}, 0.1, never), std::invalid_argument);
    EXPECT_THROW(lazy_scaling_curve({4, 8}, 0.1, never), std::invalid_argument);
}

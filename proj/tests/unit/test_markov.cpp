#include <gtest/gtest.h>

#include "eqlab/errors.hpp"
#include "eqlab/markov.hpp"

using namespace eqlab;

TEST(Markov, FirstMicroStepIsAFairCoin) {
    int applied = 0;
    const int runs = 4000;
    for (int s = 0; s < runs; ++s) {
        bool first = true;
        MarkovObserver obs;
        obs.on_micro_step = [&](const MicroStep& m, const WalkerEnsemble&) {
            if (first) {
                EXPECT_EQ(m.rho, 0);
                applied += m.applied;
                first = false;
            }
        };
        run_markov(8, 1, 1, ReadoutSign::positive, static_cast<std::uint64_t>(s), obs);
    }
    EXPECT_NEAR(static_cast<double>(applied) / runs, 0.5, 0.03);
}

TEST(Markov, AcceptanceFollowsRhoSign) {
    MarkovObserver obs;
    obs.on_micro_step = [](const MicroStep& m, const WalkerEnsemble&) {
        if (m.rho > 0) {
            ASSERT_TRUE(m.applied);
        } else if (m.rho < 0) {
            ASSERT_FALSE(m.applied);
        }
    };
    run_markov(16, 64, 200, ReadoutSign::positive, 1, obs);
    run_markov(16, 64, 200, ReadoutSign::negative, 2, obs);
}

// Replays the micro-steps of each batch and checks the state change they imply.
TEST(Markov, BatchUpdateMatchesMicroSteps) {
    for (auto sign : {ReadoutSign::positive, ReadoutSign::negative}) {
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2> expected = decltype(expected)::Zero(12, 2);
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2> pending = decltype(pending)::Zero(12, 2);
        MarkovObserver obs;
        obs.on_micro_step = [&](const MicroStep& m, const WalkerEnsemble&) {
            if (!m.applied) return;
            const bool same = m.u == m.v;
            const int delta = ((sign == ReadoutSign::positive) == same) ? 1 : -1;
            pending(m.u, 0) += delta;
            pending(m.v, 1) += delta;
        };
        obs.on_batch = [&](const WalkerEnsemble& e) {
            expected += pending;
            pending.setZero();
            ASSERT_EQ(e.omega, expected);
        };
        run_markov(12, 32, 300, sign, 3, obs);
    }
}

TEST(Markov, WalkerIncrements) {
    // positive readout: a same step moves s_u by +2, a different step moves s_u and s_v by -1
    int checked = 0;
    std::vector<std::int64_t> s0;
    MicroStep last;
    MarkovObserver obs2;
    obs2.on_micro_step = [&](const MicroStep& m, const WalkerEnsemble& e) {
        last = m;
        s0.assign(static_cast<std::size_t>(e.L()), 0);
        for (int u = 0; u < e.L(); ++u) s0[u] = e.s(u);
    };
    obs2.on_batch = [&](const WalkerEnsemble& e) {
        for (int k = 0; k < e.L(); ++k) {
            std::int64_t want = 0;
            if (last.applied) {
                if (last.u == last.v)
                    want = k == last.u ? 2 : 0;
                else
                    want = -(k == last.u) - (k == last.v);
            }
            ASSERT_EQ(e.s(k) - s0[k], want);
        }
        ++checked;
    };
    run_markov(10, 1, 5000, ReadoutSign::positive, 5, obs2);
    EXPECT_EQ(checked, 5000);
}

TEST(Markov, NegativeWalkersStayFrozen) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::vector<std::int64_t> prev;
        MarkovObserver obs;
        obs.on_batch = [&](const WalkerEnsemble& e) {
            if (!prev.empty())
                for (int u = 0; u < e.L(); ++u)
                    if (prev[u] < 0) {
                        ASSERT_LE(e.s(u), prev[u]);
                    }
            prev.resize(static_cast<std::size_t>(e.L()));
            for (int u = 0; u < e.L(); ++u) prev[u] = e.s(u);
        };
        run_markov(16, 512, 200, ReadoutSign::positive, seed, obs);
    }
}

TEST(Markov, SameToDifferentInvolvementRatio) {
    std::int64_t same = 0, diff = 0;
    MarkovObserver obs;
    obs.on_micro_step = [&](const MicroStep& m, const WalkerEnsemble&) {
        if (m.u == 0 && m.v == 0)
            ++same;
        else if (m.u == 0 || m.v == 0)
            ++diff;
    };
    run_markov(16, 512, 2200, ReadoutSign::positive, 6, obs);
    ASSERT_GT(same + diff, 100000);
    EXPECT_NEAR(static_cast<double>(same) / static_cast<double>(same + diff), 1.0 / 3.0, 0.03);
}

TEST(Markov, Deterministic) {
    const auto a = run_markov(16, 64, 300, ReadoutSign::negative, 7);
    const auto b = run_markov(16, 64, 300, ReadoutSign::negative, 7);
    EXPECT_EQ(a.first.omega, b.first.omega);
    EXPECT_EQ(a.second.mu.applied, b.second.mu.applied);
    EXPECT_EQ(a.second.n_plus_trace, b.second.n_plus_trace);
}

TEST(Markov, RejectsBadArguments) {
    EXPECT_THROW(run_markov(1, 1, 1, ReadoutSign::positive, 0), std::invalid_argument);
    EXPECT_THROW(run_markov(4, 0, 1, ReadoutSign::positive, 0), std::invalid_argument);
    EXPECT_THROW(run_markov(4, 1, -1, ReadoutSign::positive, 0), std::invalid_argument);
}

TEST(Drift, FormulaValues) {
    const auto same = expected_drift(8, 8, 0.5, DriftCase::same);
    EXPECT_NEAR(same.pos, 64.0 / 720.0, 1e-15);
    EXPECT_NEAR(same.neg, -64.0 / 720.0, 1e-15);
    const auto diff = expected_drift(8, 8, 0.5, DriftCase::different);
    EXPECT_NEAR(diff.pos, -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(diff.neg, 1.0 / 6.0, 1e-15);
    EXPECT_THROW(expected_drift(1, 0, 0.5, DriftCase::same), std::invalid_argument);
    EXPECT_THROW(expected_drift(4, 4, 1.5, DriftCase::same), std::invalid_argument);
}

TEST(MuEstimate, ThresholdAndValue) {
    const auto est = estimate_mu({2000, 500});
    EXPECT_DOUBLE_EQ(est.mu_hat, 0.25);
    EXPECT_NEAR(est.standard_error, std::sqrt(0.25 * 0.75 / 2000), 1e-15);
    EXPECT_THROW(estimate_mu({999, 10}), InsufficientData);
    EXPECT_NO_THROW(estimate_mu({10, 1}, 10));
}

TEST(Alignment, LimitsBySign) {
    WalkerEnsemble zero;
    zero.omega = decltype(zero.omega)::Zero(4, 2);
    EXPECT_THROW(limiting_alignment(zero), UndefinedQuantity);

    const auto pos = run_markov(16, 512, 2000, ReadoutSign::positive, 8).first;
    const auto neg = run_markov(16, 512, 2000, ReadoutSign::negative, 8).first;
    EXPECT_GT(limiting_alignment(pos), 0.9);
    EXPECT_LT(limiting_alignment(neg), -0.9);
}

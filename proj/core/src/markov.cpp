#include "eqlab/markov.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eqlab/errors.hpp"
#include "eqlab/rng.hpp"

namespace eqlab {

std::string_view to_string(ReadoutSign s) { return s == ReadoutSign::positive ? "positive" : "negative"; }

ReadoutSign parse_readout_sign(std::string_view s) {
    if (s == "positive" || s == "pos" || s == "+") return ReadoutSign::positive;
    if (s == "negative" || s == "neg" || s == "-") return ReadoutSign::negative;
    throw std::invalid_argument("unknown readout sign '" + std::string(s) + "'");
}

MuEstimate estimate_mu(const MuTrace& trace, std::int64_t min_events) {
    if (trace.eligible < min_events)
        throw InsufficientData("only " + std::to_string(trace.eligible) + " eligible events, need " +
                               std::to_string(min_events));
    MuEstimate est;
    est.eligible = trace.eligible;
    est.applied = trace.applied;
    est.mu_hat = static_cast<double>(trace.applied) / static_cast<double>(trace.eligible);
    est.standard_error = std::sqrt(est.mu_hat * (1.0 - est.mu_hat) / static_cast<double>(trace.eligible));
    return est;
}

std::pair<WalkerEnsemble, WalkerStats> run_markov(int L, int batch, std::int64_t steps, ReadoutSign sign,
                                                  std::uint64_t seed, const MarkovObserver& observer) {
    if (L < 2) throw std::invalid_argument("need L >= 2 walkers");
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (steps < 0) throw std::invalid_argument("steps must be nonnegative");

    WalkerEnsemble ens;
    ens.omega = decltype(ens.omega)::Zero(L, 2);
    ens.readout_sign = sign;
    ens.batch_size = batch;

    WalkerStats stats;
    stats.n_plus_trace.reserve(static_cast<std::size_t>(steps));
    MuTrace trace;
    double drift_sum[2] = {0.0, 0.0};   // [positive walkers, negative walkers]
    std::int64_t drift_n[2] = {0, 0};    // involvements of positive / negative walkers
    auto note_drift = [&](std::int64_t s_before, double delta) {
        if (s_before > 0) {
            drift_sum[0] += delta;
            ++drift_n[0];
        } else if (s_before < 0) {
            drift_sum[1] += delta;
            ++drift_n[1];
        }
    };

    Rng rng(seed);
    decltype(ens.omega) b = decltype(ens.omega)::Zero(L, 2);
    for (std::int64_t t = 0; t < steps; ++t) {
        b.setZero();
        for (int n = 0; n < batch; ++n) {
            const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
            int v = u;
            if (!rng.coin()) {
                v = static_cast<int>(rng.below(static_cast<std::uint64_t>(L - 1)));
                if (v >= u) ++v;
            }
            const bool same = u == v;
            const std::int64_t rho = ens.omega(u, 0) + ens.omega(v, 1);
            bool applied = rho > 0;
            if (rho == 0) applied = rng.coin();

            const bool match = (sign == ReadoutSign::positive) == same;
            const int delta = applied ? (match ? 1 : -1) : 0;
            b(u, 0) += delta;
            b(v, 1) += delta;

            const std::int64_t su = ens.s(u);
            const std::int64_t sv = ens.s(v);
            if (same) {
                note_drift(su, 2.0 * delta);
            } else {
                note_drift(su, delta);
                note_drift(sv, delta);
                if (sign == ReadoutSign::negative || (su > 0 && sv < 0) || (su < 0 && sv > 0)) {
                    ++trace.eligible;
                    trace.applied += applied;
                }
            }
            if (observer.on_micro_step) observer.on_micro_step({t, u, v, rho, applied}, ens);
        }
        ens.omega += b;
        ens.t = t + 1;
        int n_plus = 0;
        for (int k = 0; k < L; ++k) n_plus += ens.s(k) > 0;
        stats.n_plus_trace.push_back(n_plus);
        if (observer.on_batch) observer.on_batch(ens);
    }

    stats.mu.eligible = trace.eligible;
    stats.mu.applied = trace.applied;
    if (trace.eligible > 0) {
        stats.mu.mu_hat = static_cast<double>(trace.applied) / static_cast<double>(trace.eligible);
        stats.mu.standard_error =
            std::sqrt(stats.mu.mu_hat * (1.0 - stats.mu.mu_hat) / static_cast<double>(trace.eligible));
    }
    stats.drift_pos_hat = drift_n[0] ? drift_sum[0] / static_cast<double>(drift_n[0]) : 0.0;
    stats.drift_neg_hat = drift_n[1] ? drift_sum[1] / static_cast<double>(drift_n[1]) : 0.0;
    return {std::move(ens), std::move(stats)};
}

Drift expected_drift(int n_plus, int n_minus, double mu, DriftCase c) {
    if (n_plus < 0 || n_minus < 0) throw std::invalid_argument("walker counts must be nonnegative");
    const double n = n_plus + n_minus;
    if (n < 2) throw std::invalid_argument("need n+ + n- >= 2");
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must lie in [0, 1]");
    const double np = n_plus;
    const double nm = n_minus;
    if (c == DriftCase::same)
        return {2.0 * np * nm * (1.0 - mu) / (3.0 * n * (n - 1.0)), -2.0 * nm * np * mu / (3.0 * n * (n - 1.0))};
    return {2.0 * np * (mu - 1.0) / (3.0 * n), 2.0 * nm * mu / (3.0 * n)};
}

double limiting_alignment(const WalkerEnsemble& ensemble) {
    const Eigen::VectorXd c1 = ensemble.omega.col(0).cast<double>();
    const Eigen::VectorXd c2 = ensemble.omega.col(1).cast<double>();
    const double n1 = c1.norm();
    const double n2 = c2.norm();
    if (n1 == 0.0 || n2 == 0.0) throw UndefinedQuantity("alignment undefined for an all-zero coordinate column");
    return c1.dot(c2) / (n1 * n2);
}

}  // namespace eqlab

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

namespace eqlab {

enum class ReadoutSign { positive, negative };

std::string_view to_string(ReadoutSign s);
ReadoutSign parse_readout_sign(std::string_view s);

/// Integer coordinates omega(k, p) of one hidden weight in the basis of the L
/// training symbols, p = 0 for the first input half and 1 for the second.
struct WalkerEnsemble {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2> omega;
    ReadoutSign readout_sign = ReadoutSign::positive;
    std::int64_t t = 0;  // completed batches
    int batch_size = 1;

    int L() const { return static_cast<int>(omega.rows()); }
    /// Walker position s_u = omega(u, 0) + omega(u, 1).
    std::int64_t s(int u) const { return omega(u, 0) + omega(u, 1); }
};

struct MuEstimate {
    double mu_hat = 0.0;
    double standard_error = 0.0;
    std::int64_t eligible = 0;
    std::int64_t applied = 0;
};

struct WalkerStats {
    MuEstimate mu;
    std::vector<int> n_plus_trace;  // walkers with s > 0 after each batch
    /// Mean change of s per walker involvement, restricted to walkers that were
    /// positive (negative) when the example was drawn.
    double drift_pos_hat = 0.0;
    double drift_neg_hat = 0.0;
};

/// One sampled example and what the process did with it.
struct MicroStep {
    std::int64_t t = 0;  // batch index
    int u = 0;
    int v = 0;
    std::int64_t rho = 0;
    bool applied = false;
};

/// Optional hooks; either may be empty.
struct MarkovObserver {
    std::function<void(const MicroStep&, const WalkerEnsemble&)> on_micro_step;
    std::function<void(const WalkerEnsemble&)> on_batch;  // after each batch is applied
};

/// Event counts from which mu is estimated.
///   positive readout: different pairs whose walkers straddle zero (one s > 0,
///     the other s < 0, in either slot); an event counts as applied when the
///     update went through.
///   negative readout: all different pairs; applied when the update went through.
/// Walker signs are read from the state at the start of the batch.
struct MuTrace {
    std::int64_t eligible = 0;
    std::int64_t applied = 0;
};

/// mu_hat = applied / eligible. Throws InsufficientData below min_events.
MuEstimate estimate_mu(const MuTrace& trace, std::int64_t min_events = 1000);

/// Simulates `steps` batches of `batch` examples each. Same/different is a fair
/// coin per example; different partners are uniform over the other L - 1 symbols.
/// rho = omega(u, 0) + omega(v, 1) is read from the state at the start of the
/// batch and updates accumulate until the batch ends.
std::pair<WalkerEnsemble, WalkerStats> run_markov(int L, int batch, std::int64_t steps, ReadoutSign sign,
                                                  std::uint64_t seed, const MarkovObserver& observer = {});

enum class DriftCase { same, different };

struct Drift {
    double pos = 0.0;
    double neg = 0.0;
};

/// Mean-field drifts of positive and negative walkers.
///   same:      +2 n+ n- (1 - mu) / (3 n (n - 1)),  -2 n- n+ mu / (3 n (n - 1))
///   different: 2 n+ (mu - 1) / (3 n),              2 n- mu / (3 n)
Drift expected_drift(int n_plus, int n_minus, double mu, DriftCase c);

/// Cosine between the two coordinate columns of omega. All-zero state throws
/// UndefinedQuantity.
double limiting_alignment(const WalkerEnsemble& ensemble);

}  // namespace eqlab

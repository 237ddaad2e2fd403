#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "eqlab/rng.hpp"
#include "eqlab/sdtask.hpp"

namespace eqlab {

/// Output prefactor convention.
///   inv_sqrt_d: f = 1/(gamma sqrt(d)) sum_i a_i relu(w_i . x), with d = D/2
///   unit:       f = 1/gamma sum_i a_i relu(w_i . x)   (image inputs of constant norm)
enum class OutputScale { inv_sqrt_d, unit };

std::string_view to_string(OutputScale s);
OutputScale parse_output_scale(std::string_view s);

/// Bias-free two-layer ReLU network. W holds one hidden unit per row.
struct MlpParams {
    Vector a;
    Matrix W;
    double gamma = 1.0;
    OutputScale output_scale = OutputScale::inv_sqrt_d;

    Index width() const { return a.size(); }
    Index input_dim() const { return W.cols(); }
    double prefactor() const;
};

/// Copy of the parameters at step 0; the centered network subtracts its logit.
class InitSnapshot {
public:
    InitSnapshot() = default;
    explicit InitSnapshot(const MlpParams& p) : a0_(p.a), W0_(p.W) {}
    InitSnapshot(Vector a0, Matrix W0) : a0_(std::move(a0)), W0_(std::move(W0)) {}

    const Vector& a0() const { return a0_; }
    const Matrix& W0() const { return W0_; }

    /// The snapshot as a parameter set sharing gamma and output scale with `like`.
    MlpParams as_params(const MlpParams& like) const { return {a0_, W0_, like.gamma, like.output_scale}; }

    /// All-zero snapshot of the given shape (its logit is identically 0).
    static InitSnapshot zeros(Index m, Index D) { return {Vector::Zero(m), Matrix::Zero(m, D)}; }

private:
    Vector a0_;
    Matrix W0_;
};

struct TrainConfig {
    int width = 1024;
    double gamma = 1.0;
    double alpha0 = 0.1;
    int batch = 128;
    int steps = 20000;
    int eval_every = 250;
    int test_size = 6000;
    std::uint64_t seed = 0;
    OutputScale output_scale = OutputScale::inv_sqrt_d;
};

struct HistoryPoint {
    int step = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

struct TrainResult {
    std::vector<HistoryPoint> history;
    double best_test_acc = 0.0;
    MlpParams params_final;
    InitSnapshot snapshot;
};

struct MlpGradient {
    Vector a;
    Matrix W;
};

/// a_i ~ N(0, 1/m), w_i ~ N(0, I/m).
std::pair<MlpParams, InitSnapshot> init_params(int m, int D, double gamma, OutputScale scale, std::uint64_t seed);

/// Uncentered logit of one input.
double forward(const MlpParams& params, const Eigen::Ref<const Vector>& x);
/// Uncentered logits for every column of X.
Vector forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& X);

/// f(x; theta) - f(x; theta(0)).
double forward_centered(const MlpParams& params, const InitSnapshot& snap, const Eigen::Ref<const Vector>& x);
Vector forward_centered_batch(const MlpParams& params, const InitSnapshot& snap, const Eigen::Ref<const Matrix>& X);

/// Mean binary cross-entropy of the centered logits.
double loss(const MlpParams& params, const InitSnapshot& snap, const Batch& batch);

/// Gradient of `loss` with respect to (a, W). ReLU'(0) is taken as 0.
MlpGradient gradient(const MlpParams& params, const InitSnapshot& snap, const Batch& batch);

/// One full-batch gradient step, in place.
void sgd_step(MlpParams& params, const InitSnapshot& snap, const Batch& batch, double lr);

/// gamma <= 1: gamma^2 d alpha0; gamma > 1: gamma sqrt(d) alpha0. The unit
/// output scale drops the d dependence (gamma^2 alpha0, gamma alpha0).
double learning_rate(double gamma, int d, double alpha0, OutputScale scale);

/// Fraction of examples with (centered logit > 0) == label.
double evaluate_accuracy(const MlpParams& params, const InitSnapshot& snap, const Batch& batch);

/// ||theta - theta(0)|| / ||theta(0)|| over all of (a, W).
double relative_weight_change(const MlpParams& params, const InitSnapshot& snap);

using BatchSource = std::function<Batch(Rng&)>;

/// SGD for config.steps steps with a fresh batch each step. The test batch is
/// drawn once and reused; accuracy is recorded every eval_every steps and after
/// the final step. Step 0 is evaluated too.
TrainResult train(const TrainConfig& config, const BatchSource& train_source, const BatchSource& test_source);

// Checkpoint: "EQCK", u32 version=1, u64 m, u64 D, f64 gamma, u32 output_scale
// (0 inv_sqrt_d, 1 unit), then a, W (row-major), a0, W0 as f64.
void write_checkpoint(const std::filesystem::path& path, const MlpParams& params, const InitSnapshot& snap);
std::pair<MlpParams, InitSnapshot> read_checkpoint(const std::filesystem::path& path);

}  // namespace eqlab

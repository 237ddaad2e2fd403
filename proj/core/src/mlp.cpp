#include "eqlab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "eqlab/binary_io.hpp"

namespace eqlab {

namespace {

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

void check_dim(const MlpParams& p, Index D) {
    if (D != p.input_dim())
        throw std::invalid_argument("input dimension " + std::to_string(D) + " does not match network input " +
                                    std::to_string(p.input_dim()));
}

// Centered logits plus the hidden pre-activations of the live network.
struct Pass {
    Matrix H;
    Vector logits;
};

Pass centered_pass(const MlpParams& p, const InitSnapshot& snap, const Eigen::Ref<const Matrix>& X) {
    check_dim(p, X.rows());
    const double pref = p.prefactor();
    Pass out;
    out.H.noalias() = p.W * X;
    Matrix H0;
    H0.noalias() = snap.W0() * X;
    out.logits = pref * (out.H.cwiseMax(0.0).transpose() * p.a - H0.cwiseMax(0.0).transpose() * snap.a0());
    return out;
}

MlpGradient gradient_from_pass(const MlpParams& p, const Batch& batch, const Pass& pass) {
    const Index N = batch.size();
    if (N == 0) throw std::invalid_argument("empty batch");
    const double pref = p.prefactor();
    Vector g(N);
    for (Index j = 0; j < N; ++j) g[j] = (sigmoid(pass.logits[j]) - batch.labels[static_cast<std::size_t>(j)]) / static_cast<double>(N);

    MlpGradient grad;
    grad.a.noalias() = pref * (pass.H.cwiseMax(0.0) * g);
    // dL/dW_ik = pref * sum_j g_j a_i 1[h_ij > 0] x_kj
    Matrix M = (pass.H.array() > 0.0).cast<double>().matrix();
    M.array().colwise() *= p.a.array();
    M.array().rowwise() *= g.transpose().array();
    grad.W.noalias() = pref * (M * batch.inputs.transpose());
    return grad;
}

double accuracy_of(const Vector& logits, const std::vector<int>& labels) {
    Index correct = 0;
    for (Index j = 0; j < logits.size(); ++j) {
        const int pred = logits[j] > 0.0 ? 1 : 0;
        if (pred == labels[static_cast<std::size_t>(j)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(logits.size());
}

}  // namespace

std::string_view to_string(OutputScale s) { return s == OutputScale::unit ? "unit" : "inv_sqrt_d"; }

OutputScale parse_output_scale(std::string_view s) {
    if (s == "unit") return OutputScale::unit;
    if (s == "inv_sqrt_d") return OutputScale::inv_sqrt_d;
    throw std::invalid_argument("unknown output scale '" + std::string(s) + "'");
}

double MlpParams::prefactor() const {
    if (output_scale == OutputScale::unit) return 1.0 / gamma;
    const double d = static_cast<double>(input_dim()) / 2.0;
    return 1.0 / (gamma * std::sqrt(d));
}

std::pair<MlpParams, InitSnapshot> init_params(int m, int D, double gamma, OutputScale scale, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("width m must be >= 1");
    if (D < 1) throw std::invalid_argument("input dimension D must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    Rng rng(seed);
    const double sd = 1.0 / std::sqrt(static_cast<double>(m));
    MlpParams p{Vector(m), Matrix(m, D), gamma, scale};
    for (int i = 0; i < m; ++i) p.a[i] = sd * rng.normal();
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < D; ++k) p.W(i, k) = sd * rng.normal();
    InitSnapshot snap(p);
    return {std::move(p), std::move(snap)};
}

double forward(const MlpParams& params, const Eigen::Ref<const Vector>& x) {
    check_dim(params, x.size());
    return params.prefactor() * params.a.dot((params.W * x).cwiseMax(0.0));
}

Vector forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& X) {
    check_dim(params, X.rows());
    Matrix H;
    H.noalias() = params.W * X;
    return params.prefactor() * (H.cwiseMax(0.0).transpose() * params.a);
}

double forward_centered(const MlpParams& params, const InitSnapshot& snap, const Eigen::Ref<const Vector>& x) {
    check_dim(params, x.size());
    const double f = params.a.dot((params.W * x).cwiseMax(0.0));
    const double f0 = snap.a0().dot((snap.W0() * x).cwiseMax(0.0));
    return params.prefactor() * (f - f0);
}

Vector forward_centered_batch(const MlpParams& params, const InitSnapshot& snap, const Eigen::Ref<const Matrix>& X) {
    return centered_pass(params, snap, X).logits;
}

double loss(const MlpParams& params, const InitSnapshot& snap, const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    const Vector t = forward_centered_batch(params, snap, batch.inputs);
    double total = 0.0;
    for (Index j = 0; j < t.size(); ++j) {
        const int y = batch.labels[static_cast<std::size_t>(j)];
        total += y == 1 ? softplus(-t[j]) : softplus(t[j]);
    }
    return total / static_cast<double>(t.size());
}

MlpGradient gradient(const MlpParams& params, const InitSnapshot& snap, const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    return gradient_from_pass(params, batch, centered_pass(params, snap, batch.inputs));
}

void sgd_step(MlpParams& params, const InitSnapshot& snap, const Batch& batch, double lr) {
    if (lr < 0.0) throw std::invalid_argument("learning rate must be nonnegative");
    const MlpGradient g = gradient(params, snap, batch);
    params.a.noalias() -= lr * g.a;
    params.W.noalias() -= lr * g.W;
}

double learning_rate(double gamma, int d, double alpha0, OutputScale scale) {
    if (!(gamma > 0.0) || d < 1 || !(alpha0 > 0.0)) throw std::invalid_argument("learning_rate inputs must be positive");
    const double dd = static_cast<double>(d);
    if (scale == OutputScale::unit) return gamma <= 1.0 ? gamma * gamma * alpha0 : gamma * alpha0;
    return gamma <= 1.0 ? gamma * gamma * dd * alpha0 : gamma * std::sqrt(dd) * alpha0;
}

double evaluate_accuracy(const MlpParams& params, const InitSnapshot& snap, const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    // Chunked so large test sets do not materialize an m x N activation matrix.
    constexpr Index kChunk = 1024;
    Index correct = 0;
    for (Index start = 0; start < batch.size(); start += kChunk) {
        const Index n = std::min(kChunk, batch.size() - start);
        const Vector t = forward_centered_batch(params, snap, batch.inputs.middleCols(start, n));
        for (Index j = 0; j < n; ++j) {
            const int pred = t[j] > 0.0 ? 1 : 0;
            if (pred == batch.labels[static_cast<std::size_t>(start + j)]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(batch.size());
}

double relative_weight_change(const MlpParams& params, const InitSnapshot& snap) {
    const double num = std::sqrt((params.a - snap.a0()).squaredNorm() + (params.W - snap.W0()).squaredNorm());
    const double den = std::sqrt(snap.a0().squaredNorm() + snap.W0().squaredNorm());
    if (den == 0.0) throw std::invalid_argument("initial parameters are all zero");
    return num / den;
}

TrainResult train(const TrainConfig& config, const BatchSource& train_source, const BatchSource& test_source) {
    if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (config.batch < 2 || config.batch % 2 != 0) throw std::invalid_argument("batch must be positive and even");
    if (!(config.alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
    if (config.eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");

    Rng test_rng(derive_seed(config.seed, {3}));
    const Batch test = test_source(test_rng);
    const Index D = test.dim();
    auto [params, snap] = init_params(config.width, static_cast<int>(D), config.gamma, config.output_scale,
                                      derive_seed(config.seed, {1}));
    const int d_eff = static_cast<int>(std::max<Index>(1, D / 2));
    const double lr = learning_rate(config.gamma, d_eff, config.alpha0, config.output_scale);

    Rng train_rng(derive_seed(config.seed, {2}));
    TrainResult result;
    for (int step = 0; step <= config.steps; ++step) {
        const bool eval_now = step % config.eval_every == 0 || step == config.steps;
        if (step == config.steps) {
            // Final evaluation only; train accuracy on one more fresh batch.
            const Batch batch = train_source(train_rng);
            if (batch.dim() != D) throw std::invalid_argument("train and test sources disagree on dimension");
            result.history.push_back({step, evaluate_accuracy(params, snap, batch), evaluate_accuracy(params, snap, test)});
            break;
        }
        const Batch batch = train_source(train_rng);
        if (batch.dim() != D) throw std::invalid_argument("train and test sources disagree on dimension");
        const Pass pass = centered_pass(params, snap, batch.inputs);
        if (eval_now)
            result.history.push_back({step, accuracy_of(pass.logits, batch.labels), evaluate_accuracy(params, snap, test)});
        const MlpGradient g = gradient_from_pass(params, batch, pass);
        params.a.noalias() -= lr * g.a;
        params.W.noalias() -= lr * g.W;
    }
    result.best_test_acc = 0.0;
    for (const auto& h : result.history) result.best_test_acc = std::max(result.best_test_acc, h.test_acc);
    result.params_final = std::move(params);
    result.snapshot = std::move(snap);
    return result;
}

void write_checkpoint(const std::filesystem::path& path, const MlpParams& params, const InitSnapshot& snap) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    binary::put_magic(out, "EQCK", 1);
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(params.width()));
    binary::put<std::uint64_t>(out, static_cast<std::uint64_t>(params.input_dim()));
    binary::put<double>(out, params.gamma);
    binary::put<std::uint32_t>(out, params.output_scale == OutputScale::unit ? 1U : 0U);
    binary::put_rows(out, params.a.transpose());
    binary::put_rows(out, params.W);
    binary::put_rows(out, snap.a0().transpose());
    binary::put_rows(out, snap.W0());
}

std::pair<MlpParams, InitSnapshot> read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    if (binary::expect_magic(in, "EQCK") != 1) throw ParseError("unsupported checkpoint version");
    const auto m = static_cast<Index>(binary::get<std::uint64_t>(in));
    const auto D = static_cast<Index>(binary::get<std::uint64_t>(in));
    if (m < 1 || D < 1 || m > (1 << 24) || D > (1 << 24)) throw ParseError("implausible checkpoint shape");
    MlpParams p;
    p.gamma = binary::get<double>(in);
    const auto scale = binary::get<std::uint32_t>(in);
    if (scale > 1) throw ParseError("bad output scale tag");
    p.output_scale = scale == 1 ? OutputScale::unit : OutputScale::inv_sqrt_d;
    p.a = binary::get_rows(in, 1, m).transpose();
    p.W = binary::get_rows(in, m, D);
    Vector a0 = binary::get_rows(in, 1, m).transpose();
    Matrix W0 = binary::get_rows(in, m, D);
    return {std::move(p), InitSnapshot(std::move(a0), std::move(W0))};
}

}  // namespace eqlab

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "eqlab/mlp.hpp"
#include "eqlab/sdtask.hpp"

namespace eqlab {

/// Four-unit solution: w = (1;1), (-1;-1), (1;-1), (-1;1) with readouts
/// (1, 1, -rho, -rho). Uses the unit output scale with gamma = 1 so the logit
/// of a same input (z; z) is exactly 2|1.z|.
MlpParams build_handcrafted(int d, double rho);

/// Probability that the four-unit solution rejects a different pair: (2/pi) atan(rho).
double handcrafted_diff_accuracy(double rho);

/// Predicted rich-regime test accuracy with L training symbols.
/// L = 2 gives 3/4; L >= 3 gives 1/2 + Phi(sqrt(2 (L^2 - L)(rho - 1)^2 / ((pi - 2)(rho^2 + 1)))) / 2.
double rich_accuracy_prediction(int L, double rho = 1.5);

struct MarginMatrix {
    Matrix X;  // 2d x 2d, symmetric
    double normalization = 1.0;
};

/// X = (1/P) [X+^T X+ - X-^T X-] over the rows of a balanced batch, times 2d when
/// `scale_by_2d` is set.
MarginMatrix empirical_margin_matrix(const Batch& batch, bool scale_by_2d = true);

struct Eigensystem {
    Vector values;   // length 2d
    Matrix vectors;  // 2d x 2d, one unit eigenvector per column
};

/// Eigenpairs of the limiting circulant [[0, I], [I, 0]] in a real Fourier basis.
/// Column l is cos(pi k l / d) for l <= d and sin(pi k (2d - l) / d) for l > d,
/// with eigenvalue (-1)^l.
Eigensystem ideal_circulant_eigensystem(int d);

/// Cosine between the first and second halves of v.
double half_alignment(const Eigen::Ref<const Vector>& v);

/// K(u) = u (1 - arccos(u)/pi) + sqrt(1 - u^2) / (2 pi). Inputs within 1e-12 of
/// +-1 are clamped.
double ntk_kernel(double u);

/// Second-order estimate 1/(2 pi) + E[u]/2 + 3 E[u^2] / (4 pi) of E[K(u)].
double taylor_kernel_expectation(double Eu, double Eu2);

/// Kernel classifier f(x) = sum_j coeff_j K(x_hat . x_hat_j) on unit-normalized inputs.
struct DualClassifier {
    Matrix anchors;  // D x P, unit columns
    Vector coeffs;   // +bplus for same anchors, -bminus for different anchors
    double bplus = 1.0;
    double bminus = 1.1;
    int n_same = 0;
    int n_diff = 0;

    double evaluate(const Eigen::Ref<const Vector>& x) const;
    Vector evaluate_batch(const Eigen::Ref<const Matrix>& X) const;
};

/// Same anchors (z; z) for the first L/3 symbols; different anchors
/// (z_l; z_{l+1}) for odd l (1-based) in the remaining symbols, so that no
/// symbol appears twice. Requires L % 3 == 0, bplus > 0, bminus > bplus and
/// bminus / bplus < 2.
DualClassifier build_restricted_dual_classifier(const SymbolPool& pool, double bplus, double bminus);

/// The b- that equalizes the expected same and different margins of the
/// restricted classifier at dimension d (with b+ = 1): 1 + 3 / (8d + 6).
double balanced_bminus(int d);

/// Accuracy of a dual classifier on a labeled batch (f > 0 -> class 1).
double dual_accuracy(const DualClassifier& clf, const Batch& batch);

struct ScalingPoint {
    int d = 0;
    int L_star = 0;  // smallest L meeting the target, or the budget when censored
    bool censored = false;
};

struct ScalingFit {
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    int n_fitted = 0;
};

struct ScalingOptions {
    int L_min = 6;
    int L_step = 6;             // candidate L values are multiples of this
    double budget_factor = 4.0;  // L budget = budget_factor * d^2
};

/// Test error of an experiment with L symbols at dimension d.
using ErrorRunner = std::function<double(int d, int L)>;

/// For each d, the smallest L (bisection over multiples of L_step up to the
/// budget) whose error is <= target_error; then the least-squares slope of
/// log L* against log d over uncensored points. Fewer than two uncensored
/// points leaves slope NaN. Assumes the runner's error is nonincreasing in L.
ScalingFit lazy_scaling_curve(const std::vector<int>& d_values, double target_error, const ErrorRunner& runner,
                              ScalingOptions options = {});

}  // namespace eqlab

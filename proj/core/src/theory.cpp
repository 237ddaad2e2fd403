#include "eqlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eqlab/errors.hpp"

namespace eqlab {

namespace {

constexpr double kPi = std::numbers::pi;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

MlpParams build_handcrafted(int d, double rho) {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    MlpParams p;
    p.gamma = 1.0;
    p.output_scale = OutputScale::unit;
    p.a = Vector(4);
    p.a << 1.0, 1.0, -rho, -rho;
    p.W = Matrix(4, 2 * d);
    const double s1[4] = {1.0, -1.0, 1.0, -1.0};
    const double s2[4] = {1.0, -1.0, -1.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        p.W.row(i).head(d).setConstant(s1[i]);
        p.W.row(i).tail(d).setConstant(s2[i]);
    }
    return p;
}

double handcrafted_diff_accuracy(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    return 2.0 / kPi * std::atan(rho);
}

double rich_accuracy_prediction(int L, double rho) {
    if (L < 2) throw std::invalid_argument("L must be >= 2");
    if (L == 2) return 0.75;
    const double n = static_cast<double>(L);
    const double num = 2.0 * (n * n - n) * (rho - 1.0) * (rho - 1.0);
    const double den = (kPi - 2.0) * (rho * rho + 1.0);
    return 0.5 + 0.5 * normal_cdf(std::sqrt(num / den));
}

MarginMatrix empirical_margin_matrix(const Batch& batch, bool scale_by_2d) {
    const Index N = batch.size();
    if (N == 0) throw std::invalid_argument("empty batch");
    std::vector<Index> pos;
    std::vector<Index> neg;
    for (Index j = 0; j < N; ++j) (batch.labels[static_cast<std::size_t>(j)] == 1 ? pos : neg).push_back(j);
    if (pos.size() != neg.size()) throw std::invalid_argument("margin matrix needs a balanced batch");

    const Index D = batch.dim();
    Matrix Xp(D, static_cast<Index>(pos.size()));
    Matrix Xn(D, static_cast<Index>(neg.size()));
    for (std::size_t k = 0; k < pos.size(); ++k) Xp.col(static_cast<Index>(k)) = batch.inputs.col(pos[k]);
    for (std::size_t k = 0; k < neg.size(); ++k) Xn.col(static_cast<Index>(k)) = batch.inputs.col(neg[k]);

    MarginMatrix out;
    out.normalization = scale_by_2d ? static_cast<double>(D) : 1.0;
    out.X = (Xp * Xp.transpose() - Xn * Xn.transpose()) * (out.normalization / static_cast<double>(N));
    return out;
}

Eigensystem ideal_circulant_eigensystem(int d) {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    const int n = 2 * d;
    Eigensystem es{Vector(n), Matrix(n, n)};
    for (int l = 0; l < n; ++l) {
        es.values[l] = (l % 2 == 0) ? 1.0 : -1.0;
        for (int k = 0; k < n; ++k) {
            const double t = kPi * k / d;
            es.vectors(k, l) = l <= d ? std::cos(t * l) : std::sin(t * (n - l));
        }
        es.vectors.col(l).normalize();
    }
    return es;
}

double half_alignment(const Eigen::Ref<const Vector>& v) {
    if (v.size() % 2 != 0) throw std::invalid_argument("vector length must be even");
    const Index d = v.size() / 2;
    const double n1 = v.head(d).norm();
    const double n2 = v.tail(d).norm();
    if (n1 == 0.0 || n2 == 0.0) throw UndefinedQuantity("half has zero norm");
    return v.head(d).dot(v.tail(d)) / (n1 * n2);
}

double ntk_kernel(double u) {
    if (std::abs(u) > 1.0 + 1e-12) throw std::invalid_argument("kernel argument outside [-1, 1]");
    u = std::clamp(u, -1.0, 1.0);
    return u * (1.0 - std::acos(u) / kPi) + std::sqrt(1.0 - u * u) / (2.0 * kPi);
}

double taylor_kernel_expectation(double Eu, double Eu2) {
    return 1.0 / (2.0 * kPi) + Eu / 2.0 + 3.0 * Eu2 / (4.0 * kPi);
}

double DualClassifier::evaluate(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != anchors.rows()) throw std::invalid_argument("input dimension does not match anchors");
    const double nx = x.norm();
    if (nx == 0.0) throw std::invalid_argument("zero input");
    const Vector u = anchors.transpose() * (x / nx);
    double f = 0.0;
    for (Index j = 0; j < u.size(); ++j) f += coeffs[j] * ntk_kernel(std::clamp(u[j], -1.0, 1.0));
    return f;
}

Vector DualClassifier::evaluate_batch(const Eigen::Ref<const Matrix>& X) const {
    Vector out(X.cols());
    for (Index j = 0; j < X.cols(); ++j) out[j] = evaluate(X.col(j));
    return out;
}

DualClassifier build_restricted_dual_classifier(const SymbolPool& pool, double bplus, double bminus) {
    const int L = pool.L();
    if (L % 3 != 0) throw std::invalid_argument("L must be divisible by 3, got " + std::to_string(L));
    if (!(bplus > 0.0)) throw std::invalid_argument("bplus must be positive");
    if (!(bminus > bplus)) throw std::invalid_argument("need |bminus| > |bplus|");
    if (!(bminus / bplus < 2.0)) throw std::invalid_argument("need |bminus / bplus| < 2");

    const int d = pool.d();
    const int s1 = L / 3;
    std::vector<std::pair<int, int>> diff;
    // 1-based l odd, l in S2, l + 1 <= L  <=>  0-based k = l - 1 even, k >= s1, k + 1 < L
    for (int k = s1; k + 1 < L; ++k)
        if (k % 2 == 0) diff.emplace_back(k, k + 1);

    DualClassifier clf;
    clf.bplus = bplus;
    clf.bminus = bminus;
    clf.n_same = s1;
    clf.n_diff = static_cast<int>(diff.size());
    const Index P = clf.n_same + clf.n_diff;
    clf.anchors = Matrix(2 * d, P);
    clf.coeffs = Vector(P);
    Index j = 0;
    for (int k = 0; k < s1; ++k, ++j) {
        clf.anchors.col(j) << pool.symbols.row(k).transpose(), pool.symbols.row(k).transpose();
        clf.coeffs[j] = bplus;
    }
    for (auto [u, v] : diff) {
        clf.anchors.col(j) << pool.symbols.row(u).transpose(), pool.symbols.row(v).transpose();
        clf.coeffs[j] = -bminus;
        ++j;
    }
    clf.anchors.colwise().normalize();
    return clf;
}

double balanced_bminus(int d) {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    return 1.0 + 3.0 / (8.0 * d + 6.0);
}

double dual_accuracy(const DualClassifier& clf, const Batch& batch) {
    if (batch.size() == 0) throw std::invalid_argument("empty batch");
    const Vector f = clf.evaluate_batch(batch.inputs);
    Index correct = 0;
    for (Index j = 0; j < f.size(); ++j) correct += ((f[j] > 0.0 ? 1 : 0) == batch.labels[static_cast<std::size_t>(j)]);
    return static_cast<double>(correct) / static_cast<double>(f.size());
}

ScalingFit lazy_scaling_curve(const std::vector<int>& d_values, double target_error, const ErrorRunner& runner,
                              ScalingOptions options) {
    if (d_values.empty()) throw std::invalid_argument("d_values is empty");
    if (options.L_step < 1 || options.L_min < 1) throw std::invalid_argument("L_min and L_step must be positive");
    std::vector<int> sorted = d_values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("d values must be distinct");
    if (sorted.size() < 3) throw std::invalid_argument("need at least three d values");

    ScalingFit fit;
    for (int d : d_values) {
        if (d < 1) throw std::invalid_argument("d must be >= 1");
        const int step = options.L_step;
        const auto budget = static_cast<int>(options.budget_factor * d * d);
        // Candidates are k * step for k in [k_lo, k_hi].
        int k_lo = (options.L_min + step - 1) / step;
        int k_hi = budget / step;
        if (k_hi < k_lo) throw std::invalid_argument("L budget below L_min for d = " + std::to_string(d));

        ScalingPoint pt{d, k_hi * step, false};
        if (runner(d, k_hi * step) > target_error) {
            pt.censored = true;
        } else {
            while (k_lo < k_hi) {
                const int mid = k_lo + (k_hi - k_lo) / 2;
                if (runner(d, mid * step) <= target_error)
                    k_hi = mid;
                else
                    k_lo = mid + 1;
            }
            pt.L_star = k_hi * step;
        }
        fit.points.push_back(pt);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& pt : fit.points) {
        if (pt.censored) continue;
        const double x = std::log(static_cast<double>(pt.d));
        const double y = std::log(static_cast<double>(pt.L_star));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    fit.n_fitted = n;
    if (n < 2) {
        fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace eqlab

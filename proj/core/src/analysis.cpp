#include "eqlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eqlab/errors.hpp"

namespace eqlab {

AlignmentReport alignment_report(const MlpParams& params, double top_fraction) {
    const Index D = params.input_dim();
    if (D % 2 != 0) throw std::invalid_argument("input dimension must be even to split into halves");
    if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw std::invalid_argument("top_fraction must lie in (0, 1]");
    const Index d = D / 2;
    const Index m = params.width();

    AlignmentReport rep;
    rep.units.resize(static_cast<std::size_t>(m));
    double pos_sum = 0, neg_sum = 0, abs_sum = 0;
    int n_pos = 0, n_neg = 0, n_in = 0;
    for (Index i = 0; i < m; ++i) {
        auto& u = rep.units[static_cast<std::size_t>(i)];
        const auto v1 = params.W.row(i).head(d);
        const auto v2 = params.W.row(i).tail(d);
        u.a = params.a[i];
        u.norm1 = v1.norm();
        u.norm2 = v2.norm();
        if (u.norm1 == 0.0 || u.norm2 == 0.0) {
            u.excluded = true;
            ++rep.summary.n_excluded;
            continue;
        }
        u.cos_align = std::clamp(v1.dot(v2) / (u.norm1 * u.norm2), -1.0, 1.0);
        abs_sum += std::abs(u.cos_align);
        ++n_in;
        if (u.a > 0) {
            pos_sum += u.cos_align;
            ++n_pos;
        } else if (u.a < 0) {
            neg_sum += u.cos_align;
            ++n_neg;
        }
    }
    rep.summary.mean_pos_align = n_pos ? pos_sum / n_pos : 0.0;
    rep.summary.mean_neg_align = n_neg ? neg_sum / n_neg : 0.0;
    rep.summary.mean_abs_align = n_in ? abs_sum / n_in : 0.0;

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < rep.units.size(); ++i)
        if (!rep.units[i].excluded) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(rep.units[x].a) > std::abs(rep.units[y].a);
    });
    const auto n_top = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(top_fraction * order.size())));
    order.resize(std::min(order.size(), n_top));
    int matches = 0;
    for (auto i : order) {
        const auto& u = rep.units[i];
        matches += (u.a > 0 && u.cos_align > 0) || (u.a < 0 && u.cos_align < 0);
    }
    rep.summary.n_top = static_cast<int>(order.size());
    rep.summary.sign_match_rate = order.empty() ? 0.0 : static_cast<double>(matches) / order.size();
    return rep;
}

double readout_ratio(const MlpParams& params) {
    double pos = 0, neg = 0;
    int n_pos = 0, n_neg = 0;
    for (Index i = 0; i < params.a.size(); ++i) {
        if (params.a[i] > 0) {
            pos += params.a[i];
            ++n_pos;
        } else if (params.a[i] < 0) {
            neg += params.a[i];
            ++n_neg;
        }
    }
    if (n_pos == 0 || n_neg == 0) throw UndefinedQuantity("readout ratio needs readouts of both signs");
    return std::abs(neg / n_neg) / std::abs(pos / n_pos);
}

double richness_metric(const MlpParams& params0, const MlpParams& paramsT, const Eigen::Ref<const Matrix>& X) {
    if (params0.W.rows() != paramsT.W.rows() || params0.W.cols() != paramsT.W.cols())
        throw std::invalid_argument("parameter shapes differ");
    if (X.rows() != params0.W.cols()) throw std::invalid_argument("input dimension does not match network");
    if (X.cols() == 0) throw std::invalid_argument("no inputs");
    const Matrix H0 = params0.W * X;
    const Matrix HT = paramsT.W * X;
    double sum = 0.0;
    std::int64_t n = 0;
    for (Index j = 0; j < H0.cols(); ++j)
        for (Index i = 0; i < H0.rows(); ++i) {
            const double base = std::abs(H0(i, j));
            if (base < 1e-12) continue;
            sum += std::abs(HT(i, j) - H0(i, j)) / base;
            ++n;
        }
    if (n == 0) throw UndefinedQuantity("every initial activation is zero");
    return sum / static_cast<double>(n);
}

}  // namespace eqlab

#include "eqlab/bayes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "detail/parallel.hpp"

namespace eqlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kShard = 4096;

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum_exp(const Vector& v) {
    const double hi = v.maxCoeff();
    if (!std::isfinite(hi)) return hi;
    return hi + std::log((v.array() - hi).exp().sum());
}

void check_inputs(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2, double sigma2, Index d) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    if (z1.size() != d || z2.size() != d) throw std::invalid_argument("observation length does not match d");
    if (!z1.allFinite() || !z2.allFinite()) throw std::invalid_argument("non-finite observation");
}

double posterior_from(const LogLikelihoods& ll) {
    // 1 / (1 + exp(diff - same)), stable in both tails
    const double t = ll.diff - ll.same;
    if (t > 0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

std::string_view to_string(PriorKind k) { return k == PriorKind::generalizing ? "generalizing" : "memorizing"; }

PriorKind parse_prior_kind(std::string_view s) {
    if (s == "generalizing") return PriorKind::generalizing;
    if (s == "memorizing") return PriorKind::memorizing;
    throw std::invalid_argument("unknown prior '" + std::string(s) + "'");
}

LogLikelihoods log_likelihoods(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                               const GeneralizingPrior& prior) {
    if (prior.d < 1) throw std::invalid_argument("d must be >= 1");
    check_inputs(z1, z2, prior.sigma2, prior.d);
    const double d = prior.d;
    const double s2 = prior.sigma2;
    const double norms = z1.squaredNorm() + z2.squaredNorm();
    const double cross = z1.dot(z2);

    LogLikelihoods ll;
    ll.same = d * std::log(d / (kTwoPi * std::sqrt(s2 * (2.0 + s2)))) -
              d / (2.0 * s2) * ((1.0 + s2) / (2.0 + s2) * norms - 2.0 / (2.0 + s2) * cross);
    ll.diff = d * std::log(d / (kTwoPi * (1.0 + s2))) - d / (2.0 * (1.0 + s2)) * norms;
    return ll;
}

LogLikelihoods log_likelihoods(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                               const MemorizingPrior& prior) {
    const auto& S = prior.pool.symbols;
    const Index L = S.rows();
    if (L < 2) throw std::invalid_argument("memorizing prior needs at least two symbols");
    check_inputs(z1, z2, prior.sigma2, S.cols());
    const double d = static_cast<double>(S.cols());
    const double s2 = prior.sigma2;
    const double log_norm = d * std::log(d / (kTwoPi * s2));

    LogLikelihoods ll;

    // Same: shared symbol, completed square around the midpoint of z1 and z2.
    const Vector mid = 0.5 * (z1 + z2);
    const Vector to_mid = (S.rowwise() - mid.transpose()).rowwise().squaredNorm();
    const double spread = 0.5 * (z1.squaredNorm() + z2.squaredNorm()) - z1.dot(z2);
    ll.same = log_norm - d / (2.0 * s2) * spread + log_sum_exp(-(d / s2) * to_mid) - std::log(static_cast<double>(L));

    // Different: sum over ordered pairs i != j, with the j != i exclusion done by
    // prefix/suffix log-sums to avoid subtracting the diagonal.
    const Vector A = -(d / (2.0 * s2)) * (S.rowwise() - z1.transpose()).rowwise().squaredNorm();
    const Vector B = -(d / (2.0 * s2)) * (S.rowwise() - z2.transpose()).rowwise().squaredNorm();
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> prefix(static_cast<std::size_t>(L) + 1, ninf);
    std::vector<double> suffix(static_cast<std::size_t>(L) + 1, ninf);
    for (Index i = 0; i < L; ++i) prefix[i + 1] = log_add(prefix[i], B[i]);
    for (Index i = L; i-- > 0;) suffix[i] = log_add(suffix[i + 1], B[i]);
    double acc = ninf;
    for (Index i = 0; i < L; ++i) acc = log_add(acc, A[i] + log_add(prefix[i], suffix[i + 1]));
    ll.diff = log_norm + acc - std::log(static_cast<double>(L) * static_cast<double>(L - 1));
    return ll;
}

double posterior_generalizing(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                              const GeneralizingPrior& prior) {
    return posterior_from(log_likelihoods(z1, z2, prior));
}

double posterior_memorizing(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                            const MemorizingPrior& prior) {
    return posterior_from(log_likelihoods(z1, z2, prior));
}

int bayes_classify(double posterior) { return posterior >= 0.5 ? 1 : 0; }

McEstimate bayes_accuracy_mc(PriorKind kind, double sigma2, int d, const std::optional<SymbolPool>& pool,
                             std::int64_t n, std::uint64_t seed, unsigned workers) {
    if (n < 1000) throw std::invalid_argument("need at least 1000 samples");
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    if (kind == PriorKind::memorizing) {
        if (!pool) throw std::invalid_argument("memorizing prior needs a symbol pool");
        if (pool->d() != d) throw std::invalid_argument("pool dimension does not match d");
    }

    const GeneralizingPrior gen{sigma2, d};
    const MemorizingPrior mem = kind == PriorKind::memorizing ? MemorizingPrior{sigma2, *pool} : MemorizingPrior{};
    const double symbol_sd = 1.0 / std::sqrt(static_cast<double>(d));
    const double noise_sd = std::sqrt(sigma2 / d);

    const auto shards = static_cast<std::size_t>((n + kShard - 1) / kShard);
    std::atomic<std::int64_t> correct{0};
    detail::parallel_for(
        shards,
        [&](std::size_t k) {
            Rng rng(derive_seed(seed, {k}));
            const std::int64_t begin = static_cast<std::int64_t>(k) * kShard;
            const std::int64_t end = std::min(n, begin + kShard);
            Vector s1(d), s2(d), z1(d), z2(d);
            std::int64_t local = 0;
            for (std::int64_t t = begin; t < end; ++t) {
                const int r = rng.coin() ? 1 : 0;
                for (int i = 0; i < d; ++i) s1[i] = symbol_sd * rng.normal();
                if (r == 1) {
                    s2 = s1;
                } else {
                    for (int i = 0; i < d; ++i) s2[i] = symbol_sd * rng.normal();
                }
                for (int i = 0; i < d; ++i) z1[i] = s1[i] + noise_sd * rng.normal();
                for (int i = 0; i < d; ++i) z2[i] = s2[i] + noise_sd * rng.normal();
                const double p = kind == PriorKind::generalizing ? posterior_generalizing(z1, z2, gen)
                                                                 : posterior_memorizing(z1, z2, mem);
                local += bayes_classify(p) == r;
            }
            correct += local;
        },
        workers);

    McEstimate est;
    est.n = n;
    est.accuracy = static_cast<double>(correct.load()) / static_cast<double>(n);
    est.standard_error = std::sqrt(est.accuracy * (1.0 - est.accuracy) / static_cast<double>(n));
    est.half_width = 1.96 * est.standard_error;
    return est;
}

}  // namespace eqlab

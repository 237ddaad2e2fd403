#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "eqlab/sdtask.hpp"

namespace eqlab {

/// Symbols drawn from N(0, I/d), observations z = s + N(0, sigma2 I/d).
struct GeneralizingPrior {
    double sigma2 = 0.1;
    int d = 64;
};

/// Symbols drawn uniformly from a fixed pool (different pairs without replacement).
struct MemorizingPrior {
    double sigma2 = 0.1;
    SymbolPool pool;
};

enum class PriorKind { generalizing, memorizing };

std::string_view to_string(PriorKind k);
PriorKind parse_prior_kind(std::string_view s);

/// log p(z1, z2 | r) for r = 1 and r = 0.
struct LogLikelihoods {
    double same = 0.0;
    double diff = 0.0;
};

LogLikelihoods log_likelihoods(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                               const GeneralizingPrior& prior);
LogLikelihoods log_likelihoods(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                               const MemorizingPrior& prior);

/// p(r = 1 | z1, z2) with equal class priors.
double posterior_generalizing(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                              const GeneralizingPrior& prior);
double posterior_memorizing(const Eigen::Ref<const Vector>& z1, const Eigen::Ref<const Vector>& z2,
                            const MemorizingPrior& prior);

/// 1 iff posterior >= 1/2.
int bayes_classify(double posterior);

struct McEstimate {
    double accuracy = 0.0;
    double standard_error = 0.0;  // sqrt(p (1 - p) / n)
    double half_width = 0.0;      // 1.96 standard errors
    std::int64_t n = 0;
};

/// Accuracy of the selected prior's classifier on n examples drawn from the
/// generalizing process (fresh symbols). Work is split into fixed shards with
/// their own substreams, so the result does not depend on the thread count.
McEstimate bayes_accuracy_mc(PriorKind kind, double sigma2, int d, const std::optional<SymbolPool>& pool,
                             std::int64_t n, std::uint64_t seed, unsigned workers = 0);

}  // namespace eqlab

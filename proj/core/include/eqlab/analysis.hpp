#pragma once

#include <vector>

#include "eqlab/mlp.hpp"

namespace eqlab {

struct UnitAlignment {
    double a = 0.0;
    double cos_align = 0.0;  // v1 . v2 / (|v1| |v2|); 0 when excluded
    double norm1 = 0.0;
    double norm2 = 0.0;
    bool excluded = false;  // a zero-norm half
};

struct AlignmentSummary {
    double mean_pos_align = 0.0;   // over units with a > 0
    double mean_neg_align = 0.0;   // over units with a < 0
    double mean_abs_align = 0.0;   // over all included units
    double sign_match_rate = 0.0;  // sign(cos_align) == sign(a) among the top |a| units
    int n_top = 0;
    int n_excluded = 0;
};

struct AlignmentReport {
    std::vector<UnitAlignment> units;
    AlignmentSummary summary;
};

/// Splits each hidden weight into halves (v1; v2) and reports their cosine.
/// `top_fraction` selects the largest-|a| units used for the sign-match rate.
AlignmentReport alignment_report(const MlpParams& params, double top_fraction = 0.1);

/// |mean of negative readouts| / |mean of positive readouts|.
double readout_ratio(const MlpParams& params);

/// Mean over units i and inputs x of |w_i(T).x - w_i(0).x| / |w_i(0).x|,
/// skipping terms with |w_i(0).x| < 1e-12. Inputs are the columns of X.
double richness_metric(const MlpParams& params0, const MlpParams& paramsT, const Eigen::Ref<const Matrix>& X);

}  // namespace eqlab

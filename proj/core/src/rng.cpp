#include "eqlab/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace eqlab {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    // Smallest all-ones mask covering n - 1, then reject.
    const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(n - 1);
    for (;;) {
        const std::uint64_t r = engine_() & mask;
        if (r < n) return r;
    }
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

}  // namespace eqlab

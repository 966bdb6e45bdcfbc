#include <gmq/confidence.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gmq {

double confidence_width(std::uint64_t pulls, double delta) {
    if (pulls == 0) throw std::domain_error("confidence_width: T must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("confidence_width: delta must lie in (0, 1)");
    const double log_inv = std::log(1.0 / delta);
    const double loglog_inv = std::max(0.0, std::log(log_inv));
    const double t = static_cast<double>(pulls);
    const double numer = 2.0 * log_inv + 6.0 * loglog_inv + 3.0 * std::log(std::log(M_E * t));
    return std::sqrt(numer / t);
}

Interval bounds(const PullStats& stats, double delta_per_arm) {
    const double w = confidence_width(stats.pulls, delta_per_arm);
    return {stats.mean - w, stats.mean + w};
}

Interval unpulled_bounds() noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
}

std::uint64_t invert_width(double target, double delta_per_arm) {
    if (!(target > 0.0)) throw std::domain_error("invert_width: target must be positive");
    if (confidence_width(1, delta_per_arm) < target) return 1;
    // U is decreasing from T = 2 on; T = 1 was handled above.
    std::uint64_t lo = 1;  // U(lo) >= target
    std::uint64_t hi = 2;
    while (confidence_width(hi, delta_per_arm) >= target) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (confidence_width(mid, delta_per_arm) < target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace gmq

#pragma once

#include <cstdint>
#include <utility>

namespace gmq {

/// Pull count and running mean of one arm. Single writer per arm.
struct PullStats {
    std::uint64_t pulls = 0;
    double mean = 0.0;  // meaningless while pulls == 0

    void record(double reward) noexcept {
        ++pulls;
        mean += (reward - mean) / static_cast<double>(pulls);
    }
};

struct Interval {
    double lcb;
    double ucb;
};

/// Anytime (iterated-logarithm) confidence half-width after `pulls` observations:
///
///   U(T, d) = sqrt((2 ln(1/d) + 6 ln ln(1/d) + 3 ln ln(e T)) / T)
///
/// Natural logs. For d >= 1/e the 6 ln ln(1/d) term is clamped at 0.
/// Throws std::domain_error for T = 0 or d outside (0, 1).
double confidence_width(std::uint64_t pulls, double delta);

/// [mean - U, mean + U] with U = confidence_width(pulls, delta_per_arm).
/// Throws std::domain_error for an unpulled arm; use unpulled_bounds() instead.
Interval bounds(const PullStats& stats, double delta_per_arm);

/// (-inf, +inf), the bounds of an arm that has not been pulled.
Interval unpulled_bounds() noexcept;

/// Smallest T with confidence_width(T, delta_per_arm) < target.
std::uint64_t invert_width(double target, double delta_per_arm);

}  // namespace gmq

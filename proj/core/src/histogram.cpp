#include "streamq/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamq {

void histogram::validate() const {
    if (boundaries.empty() && counts.empty() && total == 0.0) {
        return; // a fresh, never-fed histogram is fine
    }
    if (counts.size() != boundaries.size()) {
        throw domain_error("histogram: " + std::to_string(counts.size()) + " counts for " +
                           std::to_string(boundaries.size()) + " boundaries");
    }
    if (boundaries.empty()) {
        throw domain_error("histogram: nonzero total but no bins");
    }
    if (!std::isfinite(lower_origin) || !(lower_origin < boundaries.front())) {
        throw domain_error("histogram: lower_origin must sit strictly below the first boundary");
    }
    double prev = lower_origin;
    double sum = 0.0;
    for (std::size_t j = 0; j < boundaries.size(); ++j) {
        const double b = boundaries[j];
        const double c = counts[j];
        if (!std::isfinite(b) || !(b > prev)) {
            throw domain_error("histogram: boundaries must be finite and strictly increasing (bin " +
                               std::to_string(j + 1) + ")");
        }
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw domain_error("histogram: counts must be finite and non-negative (bin " +
                               std::to_string(j + 1) + ")");
        }
        prev = b;
        sum += c;
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw domain_error("histogram: total must be positive and finite");
    }
    if (std::abs(sum - total) > 1e-9 * std::max(1.0, total)) {
        throw domain_error("histogram: counts sum to " + std::to_string(sum) +
                           " but total is " + std::to_string(total));
    }
}

double cdf_eval(const histogram& h, double x) {
    if (h.boundaries.empty() || h.counts.size() != h.boundaries.size() || !(h.total > 0.0)) {
        throw domain_error("cdf_eval: empty histogram");
    }
    if (!std::isfinite(x)) {
        throw domain_error("cdf_eval: x must be finite");
    }
    if (x < h.lower_origin) {
        throw range_error(range_error::side::below, x, h.lower_origin, h.boundaries.back());
    }
    if (x > h.boundaries.back()) {
        throw range_error(range_error::side::above, x, h.lower_origin, h.boundaries.back());
    }

    // Bin containing x under the half-open convention (b_{j-1}, b_j]; for
    // x == lower_origin this lands in bin 1 with a zero in-bin fraction.
    const std::size_t j = static_cast<std::size_t>(
        std::lower_bound(h.boundaries.begin(), h.boundaries.end(), x) - h.boundaries.begin());

    // One forward pass captures both the cumulative count before bin j and
    // the full sum; using the summed counts (not the stored total) as the
    // denominator makes the result exactly 0 at the origin and exactly 1 at
    // the top boundary.
    double before = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (i == j) before = sum;
        sum += h.counts[i];
    }
    if (!(sum > 0.0)) {
        throw domain_error("cdf_eval: histogram holds no mass");
    }

    const double left = j == 0 ? h.lower_origin : h.boundaries[j - 1];
    const double width = h.boundaries[j] - left;
    const double frac = width > 0.0 ? (x - left) / width : 1.0;
    return (before + h.counts[j] * frac) / sum;
}

double quantile_from_histogram(const histogram& h, double q) {
    if (!(q > 0.0) || !(q <= 1.0)) {
        throw domain_error("quantile level must be in (0, 1], got " + std::to_string(q));
    }
    if (h.boundaries.empty() || h.counts.size() != h.boundaries.size() || !(h.total > 0.0)) {
        throw not_warmed_up(1, "quantile_from_histogram: empty histogram");
    }

    double sum = 0.0;
    for (const double c : h.counts) sum += c;
    if (!(sum > 0.0)) {
        throw domain_error("quantile_from_histogram: histogram holds no mass");
    }

    // Smallest x whose cumulative count reaches q * sum. At the first bin
    // where the running sum crosses the target the bin count is necessarily
    // positive, so the division is safe; an exact landing on the bin's upper
    // edge returns that boundary with no rounding.
    const double target = q * sum;
    double cum = 0.0;
    for (std::size_t j = 0; j < h.counts.size(); ++j) {
        const double next = cum + h.counts[j];
        if (next >= target) {
            if (next == target) return h.boundaries[j];
            const double left = j == 0 ? h.lower_origin : h.boundaries[j - 1];
            const double frac = (target - cum) / h.counts[j];
            const double x = left + frac * (h.boundaries[j] - left);
            return std::clamp(x, left, h.boundaries[j]);
        }
        cum = next;
    }
    return h.boundaries.back(); // only reachable through rounding in q * sum
}

double entropy_discrete(std::span<const double> counts) {
    if (counts.empty()) {
        throw domain_error("entropy_discrete: empty counts");
    }
    double sum = 0.0;
    for (const double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw domain_error("entropy_discrete: counts must be finite and non-negative");
        }
        sum += c;
    }
    if (!(sum > 0.0)) {
        throw domain_error("entropy_discrete: counts sum to zero");
    }
    double h = 0.0;
    for (const double c : counts) {
        if (c > 0.0) {
            const double p = c / sum;
            h -= p * std::log(p);
        }
    }
    return h;
}

} // namespace streamq

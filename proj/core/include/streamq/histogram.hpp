#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "streamq/errors.hpp"

namespace streamq {

/// Piecewise-uniform approximation of a data distribution.
///
/// Bin j (1-based) covers (boundary[j-2], boundary[j-1]], with lower_origin
/// standing in as the left edge of bin 1, and holds counts[j-1] data points.
/// Counts are reals: the estimators that maintain these histograms produce
/// fractional counts. `total` tracks the number of observations represented
/// and the counts sum to it within relative tolerance 1e-9.
struct histogram {
    double lower_origin = 0.0;
    std::vector<double> boundaries;
    std::vector<double> counts;
    double total = 0.0;

    std::size_t bin_count() const noexcept { return boundaries.size(); }
    bool empty() const noexcept { return boundaries.empty() || total <= 0.0; }
    double max_boundary() const { return boundaries.back(); }

    /// Throws domain_error if any structural invariant is broken. Used by
    /// tests and by estimators after state-restoring construction.
    void validate() const;
};

/// Smallest spacing kept between adjacent boundaries near coordinate x;
/// guards the width denominators in the cdf against degenerate bins.
inline double min_separation(double x) {
    return 1e-12 * std::max(1.0, std::abs(x));
}

/// Piecewise-linear cumulative distribution of `h` at x.
///
/// With j the bin satisfying b_{j-1} < x <= b_j, returns
///   (C_{j-1} + c_j * (x - b_{j-1}) / (b_j - b_{j-1})) / total
/// where C_{j-1} is the cumulative count through bin j-1. Evaluates to
/// exactly 0 at lower_origin and exactly 1 at the last boundary.
///
/// Throws range_error if x lies outside [lower_origin, b_n], domain_error
/// if the histogram is empty.
double cdf_eval(const histogram& h, double x);

/// Generalized inverse of cdf_eval: the smallest x with cdf_eval(h, x) >= q,
/// found by linear interpolation inside the bin where the cumulative count
/// crosses q * total. q must be in (0, 1].
///
/// Throws not_warmed_up if the histogram is empty, domain_error for q
/// outside (0, 1].
double quantile_from_histogram(const histogram& h, double q);

/// Shannon entropy, in nats, of the distribution obtained by normalizing
/// `counts`; zero counts contribute nothing (0 ln 0 = 0).
///
/// Throws domain_error if counts is empty, has a negative entry, or sums
/// to zero.
double entropy_discrete(std::span<const double> counts);

} // namespace streamq

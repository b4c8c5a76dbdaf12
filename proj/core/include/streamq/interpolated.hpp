#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streamq/estimator.hpp"
#include "streamq/histogram.hpp"

namespace streamq {

/// Equiprobable-bin streaming histogram with interpolated boundaries.
///
/// The estimator keeps n bins that each hold an equal share of the
/// observations seen so far, so the bin boundaries are themselves the
/// (j/n)-quantile estimates. Each new datum d updates the piecewise-linear
/// cdf F_i to F_{i+1}(x) = (i F_i(x) + [x >= d]) / (i + 1) and the
/// boundaries are re-derived by inverting F_{i+1} at the levels j/n; the
/// inversion interpolates inside bins, so boundaries move to coordinates
/// that were never observed. Memory stays at O(n) scalars for any stream
/// length.
///
/// The first n observations are buffered; the initial histogram places its
/// boundaries on those n sorted values (the smallest becomes the lower
/// origin), giving n-1 equally filled bins. The very next observation
/// brings the bin count up to n, where it stays.
class interpolated_estimator final : public quantile_estimator {
public:
    /// bin_budget is the steady-state bin count n; at least 2.
    explicit interpolated_estimator(std::size_t bin_budget);

    /// Resume from a previously exported histogram (bin count must not
    /// exceed bin_budget; the histogram is validated).
    interpolated_estimator(std::size_t bin_budget, histogram state);

    void observe(double datum) override;
    double query(double q) const override;

    std::size_t warmup_size() const override { return bin_budget_; }
    std::uint64_t observed() const override { return seen_; }
    std::size_t state_scalars() const override;
    std::string_view name() const override { return "interpolated"; }

    std::size_t bin_budget() const { return bin_budget_; }

    /// Current histogram; empty until warm-up completes.
    const histogram& state() const { return hist_; }

private:
    void seed_from_warmup_();
    void refresh_boundaries_(double datum);

    std::size_t bin_budget_;
    histogram hist_;
    std::vector<double> warmup_;
    std::vector<double> scratch_; // reused boundary buffer for refreshes
    std::uint64_t seen_ = 0;
};

} // namespace streamq

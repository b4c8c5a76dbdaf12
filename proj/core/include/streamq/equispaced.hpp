#pragma once

#include <cstdint>
#include <vector>

#include "streamq/estimator.hpp"
#include "streamq/histogram.hpp"

namespace streamq {

/// Fixed-budget histogram with equal-width bins over an adaptive range.
///
/// The first n observations set the initial range [min, max], divided into
/// n equal bins. A datum outside the range doubles the span (repeatedly,
/// if needed) away from the fixed endpoint — the low end stays put when
/// extending upward, the high end when extending downward — so old bins
/// regroup exactly, in pairs, into the coarser grid before the datum is
/// deposited. Quantiles interpolate the resulting histogram.
class equispaced_estimator final : public quantile_estimator {
public:
    explicit equispaced_estimator(std::size_t bin_budget);

    void observe(double datum) override;
    double query(double q) const override;

    std::size_t warmup_size() const override { return bin_budget_; }
    std::uint64_t observed() const override { return seen_; }
    std::size_t state_scalars() const override;
    std::string_view name() const override { return "equispaced"; }

    std::size_t bin_budget() const { return bin_budget_; }
    double range_low() const { return low_; }
    double range_high() const { return high_; }

    /// Equal-width histogram view of the current state; empty until
    /// warm-up completes.
    const histogram& state() const { return hist_; }

private:
    void seed_from_warmup_();
    void extend_up_(double datum);
    void extend_down_(double datum);
    void regroup_(std::uint64_t group, bool from_top);
    void rebuild_boundaries_();
    void deposit_(double datum);

    std::size_t bin_budget_;
    double low_ = 0.0;
    double high_ = 0.0;
    histogram hist_; // counts live here; boundaries rebuilt on range change
    std::vector<double> warmup_;
    std::uint64_t seen_ = 0;
};

} // namespace streamq

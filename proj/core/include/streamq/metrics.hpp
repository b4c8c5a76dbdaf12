#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "streamq/errors.hpp"

namespace streamq {

/// Accuracy of an estimate series against exact ground truth.
struct error_summary {
    /// Mean of |est - truth| / |truth| over the scored steps (a ratio;
    /// multiply by 100 for percent). NaN when nothing was scored.
    double mean_relative_error = std::numeric_limits<double>::quiet_NaN();
    /// Largest |est - truth| over the scored steps, zero-truth steps
    /// included.
    double max_absolute_error = 0.0;
    /// Steps that contributed to mean_relative_error.
    std::size_t scored = 0;
    /// Steps skipped from the mean because the truth was exactly zero
    /// (they still count toward max_absolute_error).
    std::size_t zero_truth_excluded = 0;
    /// Steps skipped entirely because the estimate was NaN (estimator not
    /// warmed up at that point).
    std::size_t not_ready_excluded = 0;
};

/// Online accumulator behind compute_errors, usable directly when the
/// series should not be materialized.
class error_accumulator {
public:
    void add(double truth, double estimate);
    error_summary summary() const;
    std::size_t steps() const noexcept { return steps_; }

private:
    double rel_sum_ = 0.0;
    double max_abs_ = 0.0;
    std::size_t rel_count_ = 0;
    std::size_t zero_truth_ = 0;
    std::size_t not_ready_ = 0;
    std::size_t steps_ = 0;
};

/// Score `estimates` against `truth` step by step, ignoring the first
/// `warmup_skip` entries. The series must have equal length; truth entries
/// must be finite. NaN estimates are tallied and excluded rather than
/// propagated, so a series recorded before an estimator warmed up can be
/// scored as-is.
error_summary compute_errors(std::span<const double> truth, std::span<const double> estimates,
                             std::size_t warmup_skip);

} // namespace streamq

#include "streamq/metrics.hpp"

#include <cmath>
#include <string>

namespace streamq {

void error_accumulator::add(double truth, double estimate) {
    if (!std::isfinite(truth)) {
        throw domain_error("error_accumulator: ground truth must be finite");
    }
    ++steps_;
    if (std::isnan(estimate)) {
        ++not_ready_;
        return;
    }
    const double abs_err = std::abs(estimate - truth);
    max_abs_ = std::max(max_abs_, abs_err);
    if (truth == 0.0) {
        ++zero_truth_;
        return;
    }
    rel_sum_ += abs_err / std::abs(truth);
    ++rel_count_;
}

error_summary error_accumulator::summary() const {
    error_summary s;
    if (rel_count_ > 0) {
        s.mean_relative_error = rel_sum_ / static_cast<double>(rel_count_);
    }
    s.max_absolute_error = max_abs_;
    s.scored = rel_count_;
    s.zero_truth_excluded = zero_truth_;
    s.not_ready_excluded = not_ready_;
    return s;
}

error_summary compute_errors(std::span<const double> truth, std::span<const double> estimates,
                             std::size_t warmup_skip) {
    if (truth.size() != estimates.size()) {
        throw domain_error("compute_errors: " + std::to_string(truth.size()) +
                           " truth values vs " + std::to_string(estimates.size()) + " estimates");
    }
    error_accumulator acc;
    for (std::size_t i = warmup_skip; i < truth.size(); ++i) {
        acc.add(truth[i], estimates[i]);
    }
    return acc.summary();
}

} // namespace streamq

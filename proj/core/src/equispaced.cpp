#include "streamq/equispaced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace streamq {

equispaced_estimator::equispaced_estimator(std::size_t bin_budget)
    : bin_budget_(bin_budget) {
    if (bin_budget_ < 2) {
        throw config_error("equispaced: bin budget must be at least 2");
    }
    warmup_.reserve(bin_budget_);
}

void equispaced_estimator::observe(double datum) {
    require_finite(datum, name());
    if (hist_.bin_count() == 0) {
        warmup_.push_back(datum);
        ++seen_;
        if (warmup_.size() == bin_budget_) {
            seed_from_warmup_();
        }
        return;
    }
    if (datum > high_) {
        extend_up_(datum);
    } else if (datum < low_) {
        extend_down_(datum);
    }
    deposit_(datum);
    ++seen_;
}

double equispaced_estimator::query(double q) const {
    if (hist_.bin_count() == 0) {
        throw not_warmed_up(bin_budget_ - warmup_.size(),
                            "equispaced: still warming up, needs " +
                                std::to_string(bin_budget_ - warmup_.size()) +
                                " more observations");
    }
    return quantile_from_histogram(hist_, q);
}

std::size_t equispaced_estimator::state_scalars() const {
    return hist_.boundaries.size() + hist_.counts.size() + warmup_.size() + 4;
}

void equispaced_estimator::seed_from_warmup_() {
    const auto [lo, hi] = std::minmax_element(warmup_.begin(), warmup_.end());
    low_ = *lo;
    high_ = *hi;
    if (!(high_ > low_)) {
        high_ = low_ + min_separation(low_); // all warm-up values identical
    }
    hist_.counts.assign(bin_budget_, 0.0);
    hist_.total = 0.0;
    rebuild_boundaries_();
    for (const double v : warmup_) {
        deposit_(v);
    }
    warmup_.clear();
    warmup_.shrink_to_fit();
}

void equispaced_estimator::extend_up_(double datum) {
    double span = high_ - low_;
    std::uint64_t doublings = 0;
    while (low_ + span < datum) {
        span *= 2.0;
        ++doublings;
        if (!std::isfinite(span)) {
            // Absurd dynamic range: doubling overflowed, so stretch straight
            // to the datum; the regroup below collapses every old bin into
            // the first one, which any grouping factor this large implies.
            span = datum - low_;
            while (low_ + span < datum) {
                span = std::nextafter(span, std::numeric_limits<double>::infinity());
            }
            doublings = 64;
            break;
        }
    }
    regroup_(doublings, /*from_top=*/false);
    high_ = low_ + span;
    rebuild_boundaries_();
}

void equispaced_estimator::extend_down_(double datum) {
    double span = high_ - low_;
    std::uint64_t doublings = 0;
    while (high_ - span > datum) {
        span *= 2.0;
        ++doublings;
        if (!std::isfinite(span)) {
            span = high_ - datum;
            while (high_ - span > datum) {
                span = std::nextafter(span, std::numeric_limits<double>::infinity());
            }
            doublings = 64;
            break;
        }
    }
    regroup_(doublings, /*from_top=*/true);
    low_ = high_ - span;
    rebuild_boundaries_();
}

void equispaced_estimator::regroup_(std::uint64_t doublings, bool from_top) {
    if (doublings == 0) return;
    const std::size_t n = bin_budget_;
    std::vector<double> merged(n, 0.0);
    if (doublings >= 63) {
        double sum = 0.0;
        for (const double c : hist_.counts) sum += c;
        merged[from_top ? n - 1 : 0] = sum;
    } else {
        // After m doublings each new bin is the union of 2^m old ones,
        // grouped away from the fixed endpoint; counts are integers, so the
        // regrouping is exact.
        const std::uint64_t group = std::uint64_t{1} << doublings;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t nj =
                from_top ? n - 1 - static_cast<std::size_t>((std::uint64_t{n - 1 - j}) / group)
                         : static_cast<std::size_t>(std::uint64_t{j} / group);
            merged[nj] += hist_.counts[j];
        }
    }
    hist_.counts = std::move(merged);
}

void equispaced_estimator::rebuild_boundaries_() {
    const std::size_t n = bin_budget_;
    hist_.lower_origin = low_;
    hist_.boundaries.resize(n);
    const double span = high_ - low_;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        hist_.boundaries[j] =
            low_ + span * (static_cast<double>(j + 1) / static_cast<double>(n));
    }
    hist_.boundaries[n - 1] = high_;
}

void equispaced_estimator::deposit_(double datum) {
    const std::size_t n = bin_budget_;
    const double r = (datum - low_) / (high_ - low_) * static_cast<double>(n);
    std::size_t idx = r <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(r)) - 1;
    idx = std::min(idx, n - 1);
    hist_.counts[idx] += 1.0;
    hist_.total += 1.0;
}

} // namespace streamq

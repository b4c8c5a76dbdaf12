#include "streamq/interpolated.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamq {

interpolated_estimator::interpolated_estimator(std::size_t bin_budget)
    : bin_budget_(bin_budget) {
    if (bin_budget_ < 2) {
        throw config_error("interpolated: bin budget must be at least 2");
    }
    warmup_.reserve(bin_budget_);
}

interpolated_estimator::interpolated_estimator(std::size_t bin_budget, histogram state)
    : bin_budget_(bin_budget), hist_(std::move(state)) {
    if (bin_budget_ < 2) {
        throw config_error("interpolated: bin budget must be at least 2");
    }
    hist_.validate();
    if (hist_.empty()) {
        throw config_error("interpolated: restored histogram is empty");
    }
    if (hist_.bin_count() > bin_budget_) {
        throw config_error("interpolated: restored histogram exceeds the bin budget");
    }
    seen_ = static_cast<std::uint64_t>(std::llround(hist_.total));
}

void interpolated_estimator::observe(double datum) {
    require_finite(datum, name());
    if (hist_.bin_count() == 0) {
        warmup_.push_back(datum);
        ++seen_;
        if (warmup_.size() == bin_budget_) {
            seed_from_warmup_();
        }
        return;
    }
    refresh_boundaries_(datum);
    ++seen_;
}

double interpolated_estimator::query(double q) const {
    if (hist_.bin_count() == 0) {
        throw not_warmed_up(bin_budget_ - warmup_.size(),
                            "interpolated: still warming up, needs " +
                                std::to_string(bin_budget_ - warmup_.size()) +
                                " more observations");
    }
    return quantile_from_histogram(hist_, q);
}

std::size_t interpolated_estimator::state_scalars() const {
    return hist_.boundaries.size() + hist_.counts.size() + warmup_.size() + 2;
}

void interpolated_estimator::seed_from_warmup_() {
    std::sort(warmup_.begin(), warmup_.end());
    const std::size_t n = warmup_.size();

    // The smallest warm-up value becomes the lower origin and the remaining
    // n-1 sorted values the boundaries, nudged apart where duplicates would
    // produce zero-width bins. That yields n-1 bins sharing the n
    // observations equally; the next observation raises the count to n.
    hist_.lower_origin = warmup_.front();
    hist_.boundaries.clear();
    hist_.boundaries.reserve(bin_budget_);
    double prev = hist_.lower_origin;
    for (std::size_t j = 1; j < n; ++j) {
        const double b = std::max(warmup_[j], prev + min_separation(prev));
        hist_.boundaries.push_back(b);
        prev = b;
    }
    const double nd = static_cast<double>(n);
    hist_.counts.assign(n - 1, nd / static_cast<double>(n - 1));
    hist_.total = nd;
    warmup_.clear();
    warmup_.shrink_to_fit();
}

void interpolated_estimator::refresh_boundaries_(double d) {
    // Stretch the covered range first so the old cdf is defined at d.
    if (d > hist_.boundaries.back()) hist_.boundaries.back() = d;
    if (d < hist_.lower_origin) hist_.lower_origin = d;

    // The updated cdf is the old one scaled by i/(i+1) plus a step of height
    // 1/(i+1) at d. Levels at or below the step invert through the scaled
    // old cdf, levels inside the step land exactly on d, and levels above it
    // invert through the old cdf shifted down by the step.
    const double i = hist_.total;
    const double scale = i / (i + 1.0);
    const double pd = cdf_eval(hist_, d);
    const double jump_lo = scale * pd;
    const double jump_hi = jump_lo + 1.0 / (i + 1.0);
    const double new_total = i + 1.0;
    const std::size_t n = bin_budget_;

    double old_sum = 0.0;
    for (const double c : hist_.counts) old_sum += c;

    // All n target levels are non-decreasing, so one cumulative walker
    // sweeps the old histogram once instead of re-searching per level.
    std::size_t bin = 0;
    double cum = 0.0;
    auto invert = [&](double p) {
        const double target = p * old_sum;
        while (bin < hist_.counts.size()) {
            const double next = cum + hist_.counts[bin];
            if (next >= target) {
                if (next == target) return hist_.boundaries[bin];
                const double left = bin == 0 ? hist_.lower_origin : hist_.boundaries[bin - 1];
                const double frac = (target - cum) / hist_.counts[bin];
                return std::clamp(left + frac * (hist_.boundaries[bin] - left), left,
                                  hist_.boundaries[bin]);
            }
            cum = next;
            ++bin;
        }
        return hist_.boundaries.back();
    };

    scratch_.clear();
    scratch_.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) {
        double x;
        if (j == n) {
            x = hist_.boundaries.back(); // level 1 is the top of the range
        } else {
            const double level = static_cast<double>(j) / static_cast<double>(n);
            if (level <= jump_lo) {
                x = invert(level / scale);
            } else if (level <= jump_hi) {
                x = d;
            } else {
                x = invert((level * new_total - 1.0) / i);
            }
        }
        scratch_.push_back(x);
    }

    // Duplicate data can collapse boundaries; keep them strictly increasing.
    double prev = hist_.lower_origin;
    for (double& b : scratch_) {
        b = std::max(b, prev + min_separation(prev));
        prev = b;
    }

    hist_.boundaries.assign(scratch_.begin(), scratch_.end());
    hist_.counts.assign(n, new_total / static_cast<double>(n));
    hist_.total = new_total;
}

} // namespace streamq

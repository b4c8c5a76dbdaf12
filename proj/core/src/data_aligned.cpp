#include "streamq/data_aligned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace streamq {

namespace {

inline double xlogx(double x) {
    return x > 0.0 ? x * std::log(x) : 0.0;
}

// p ln(p / w) with the 0 ln 0 convention; the per-bin term of (negated)
// differential entropy of a piecewise-uniform density.
inline double xlogx_over(double p, double w) {
    return p > 0.0 ? p * std::log(p / w) : 0.0;
}

} // namespace

void insert_temporary_bin(histogram& h, double d) {
    if (!std::isfinite(d)) {
        throw invalid_datum(d, "insert_temporary_bin");
    }
    auto& bounds = h.boundaries;
    auto& counts = h.counts;
    if (counts.size() != bounds.size()) {
        throw domain_error("insert_temporary_bin: malformed histogram");
    }

    if (bounds.empty()) {
        h.lower_origin = d - min_separation(d);
        bounds.push_back(d);
        counts.push_back(1.0);
    } else if (d > bounds.back()) {
        bounds.push_back(d);
        counts.push_back(1.0);
    } else {
        const std::size_t pos = static_cast<std::size_t>(
            std::lower_bound(bounds.begin(), bounds.end(), d) - bounds.begin());
        if (bounds[pos] == d) {
            // Repeat of an existing boundary: no new bin, just more mass.
            counts[pos] += 1.0;
        } else if (pos == 0 && d <= h.lower_origin) {
            // New minimum: nothing lies at or below d, so no mass moves.
            bounds.insert(bounds.begin(), d);
            counts.insert(counts.begin(), 1.0);
            h.lower_origin = d - min_separation(d);
        } else {
            // Split bin pos at d: the mass on (left, d] travels with the
            // new bin, keeping the split conservative.
            const double left = pos == 0 ? h.lower_origin : bounds[pos - 1];
            const double moved = counts[pos] * (d - left) / (bounds[pos] - left);
            counts[pos] -= moved;
            bounds.insert(bounds.begin() + static_cast<std::ptrdiff_t>(pos), d);
            counts.insert(counts.begin() + static_cast<std::ptrdiff_t>(pos), moved + 1.0);
        }
    }
    h.total += 1.0;
}

std::size_t choose_merge(std::span<const double> counts) {
    if (counts.size() < 2) {
        throw domain_error("choose_merge: need at least two bins");
    }
    double sum = 0.0;
    for (const double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw domain_error("choose_merge: counts must be finite and non-negative");
        }
        sum += c;
    }
    if (!(sum > 0.0)) {
        throw domain_error("choose_merge: counts sum to zero");
    }

    // Merging bins k, k+1 changes the entropy -sum p ln p only through the
    // pair's own terms, so the loss is evaluated locally. strict < keeps
    // the smallest index on ties.
    std::size_t best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
        const double a = counts[k] / sum;
        const double b = counts[k + 1] / sum;
        const double loss = xlogx(a + b) - xlogx(a) - xlogx(b);
        if (loss < best_loss) {
            best_loss = loss;
            best = k;
        }
    }
    return best;
}

std::size_t choose_merge_width_aware(std::span<const double> counts,
                                     std::span<const double> widths) {
    if (counts.size() < 2) {
        throw domain_error("choose_merge_width_aware: need at least two bins");
    }
    if (widths.size() != counts.size()) {
        throw domain_error("choose_merge_width_aware: widths do not match counts");
    }
    double sum = 0.0;
    for (const double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw domain_error("choose_merge_width_aware: counts must be finite and non-negative");
        }
        sum += c;
    }
    if (!(sum > 0.0)) {
        throw domain_error("choose_merge_width_aware: counts sum to zero");
    }
    for (const double w : widths) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw domain_error("choose_merge_width_aware: widths must be finite and positive");
        }
    }

    std::size_t best = 0;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
        const double a = counts[k] / sum;
        const double b = counts[k + 1] / sum;
        const double loss = xlogx_over(a + b, widths[k] + widths[k + 1]) -
                            xlogx_over(a, widths[k]) - xlogx_over(b, widths[k + 1]);
        if (loss < best_loss) {
            best_loss = loss;
            best = k;
        }
    }
    return best;
}

void merge_bins(histogram& h, std::size_t k) {
    if (h.boundaries.size() < 2 || k + 1 >= h.boundaries.size()) {
        throw domain_error("merge_bins: pair index " + std::to_string(k) +
                           " out of range for " + std::to_string(h.boundaries.size()) + " bins");
    }
    h.counts[k] += h.counts[k + 1];
    h.counts.erase(h.counts.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    // The pooled bin keeps the pair's upper boundary.
    h.boundaries.erase(h.boundaries.begin() + static_cast<std::ptrdiff_t>(k));
}

data_aligned_estimator::data_aligned_estimator(std::size_t bin_budget, merge_objective objective)
    : bin_budget_(bin_budget), objective_(objective) {
    if (bin_budget_ < 2) {
        throw config_error("aligned: bin budget must be at least 2");
    }
}

data_aligned_estimator::data_aligned_estimator(std::size_t bin_budget, histogram state,
                                               merge_objective objective)
    : bin_budget_(bin_budget), objective_(objective), hist_(std::move(state)) {
    if (bin_budget_ < 2) {
        throw config_error("aligned: bin budget must be at least 2");
    }
    hist_.validate();
    if (hist_.empty()) {
        throw config_error("aligned: restored histogram is empty");
    }
    if (hist_.bin_count() > bin_budget_) {
        throw config_error("aligned: restored histogram exceeds the bin budget");
    }
    seen_ = static_cast<std::uint64_t>(std::llround(hist_.total));
}

void data_aligned_estimator::observe(double datum) {
    require_finite(datum, name());
    insert_temporary_bin(hist_, datum);
    if (hist_.bin_count() > bin_budget_) {
        std::size_t k;
        if (objective_ == merge_objective::discrete_entropy) {
            k = choose_merge(hist_.counts);
        } else {
            width_scratch_.clear();
            width_scratch_.reserve(hist_.bin_count());
            double left = hist_.lower_origin;
            for (const double b : hist_.boundaries) {
                width_scratch_.push_back(b - left);
                left = b;
            }
            k = choose_merge_width_aware(hist_.counts, width_scratch_);
        }
        merge_bins(hist_, k);
    }
    ++seen_;
}

double data_aligned_estimator::query(double q) const {
    // Serviceable as soon as one observation exists: the histogram is
    // simply smaller during warm-up.
    return quantile_from_histogram(hist_, q);
}

std::size_t data_aligned_estimator::state_scalars() const {
    return hist_.boundaries.size() + hist_.counts.size() + 2;
}

} // namespace streamq

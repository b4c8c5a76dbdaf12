#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "streamq/estimator.hpp"
#include "streamq/histogram.hpp"

namespace streamq {

/// Criterion used to pick which adjacent bin pair to merge when a
/// data-aligned histogram exceeds its budget.
enum class merge_objective {
    /// Minimize the loss of Shannon entropy of the bin-probability vector
    /// (ignores bin widths).
    discrete_entropy,
    /// Minimize the loss of differential entropy of the piecewise-uniform
    /// density the histogram represents (widths participate).
    width_aware_entropy,
};

/// Step 1 of an update: give datum d its own bin. A datum above the current
/// top gets a fresh unit bin appended; one equal to an existing boundary
/// bumps that bin's count; one inside bin j splits it at d, moving the
/// mass fraction c_j (d - b_{j-1}) / (b_j - b_{j-1}) into the new bin along
/// with the unit for d itself. A datum at or below the lower origin becomes
/// the new first boundary and the origin moves just below it. Grows the bin
/// count by at most one and raises total by exactly one.
void insert_temporary_bin(histogram& h, double d);

/// Step 2: index k of the left bin of the adjacent pair whose merge loses
/// the least entropy, i.e. minimizing
///   (p_k + p_{k+1}) ln(p_k + p_{k+1}) - p_k ln p_k - p_{k+1} ln p_{k+1}
/// over k in [0, counts.size() - 2], with p the normalized counts and
/// 0 ln 0 = 0. Ties resolve to the smallest k. The argmin is unchanged by
/// rescaling all counts, so raw counts may be passed directly.
std::size_t choose_merge(std::span<const double> counts);

/// Variant of choose_merge scoring differential-entropy loss; widths must
/// hold the bin widths aligned with counts.
std::size_t choose_merge_width_aware(std::span<const double> counts,
                                     std::span<const double> widths);

/// Step 3: pool bins k and k+1 (0-based): counts add, the boundary between
/// them disappears, total is untouched.
void merge_bins(histogram& h, std::size_t k);

/// Equiprobable-bin streaming histogram whose boundaries are observed data.
///
/// Every datum first receives its own bin via insert_temporary_bin; once
/// the histogram holds more than n bins, the adjacent pair whose merge
/// costs the least entropy is pooled. Boundaries therefore always coincide
/// with values that actually occurred, so estimates never leave the
/// observed range and repeated values are represented exactly. Memory is
/// O(n) scalars for any stream length.
class data_aligned_estimator final : public quantile_estimator {
public:
    explicit data_aligned_estimator(std::size_t bin_budget,
                                    merge_objective objective = merge_objective::discrete_entropy);

    /// Resume from a previously exported histogram (validated; bin count
    /// must not exceed bin_budget).
    data_aligned_estimator(std::size_t bin_budget, histogram state,
                           merge_objective objective = merge_objective::discrete_entropy);

    void observe(double datum) override;
    double query(double q) const override;

    std::size_t warmup_size() const override { return bin_budget_; }
    std::uint64_t observed() const override { return seen_; }
    std::size_t state_scalars() const override;
    std::string_view name() const override { return "aligned"; }

    std::size_t bin_budget() const { return bin_budget_; }
    merge_objective objective() const { return objective_; }

    /// Current histogram; during warm-up it simply has fewer bins.
    const histogram& state() const { return hist_; }

private:
    std::size_t bin_budget_;
    merge_objective objective_;
    histogram hist_;
    std::vector<double> width_scratch_;
    std::uint64_t seen_ = 0;
};

} // namespace streamq

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "streamq/errors.hpp"

namespace streamq {

/// Sorted multiset with order-statistic access, organized as a list of
/// bounded sorted blocks: inserts cost a binary search plus a bounded
/// memmove, rank queries a walk over the block sizes. Roughly O(sqrt n)
/// per operation at the block sizes used here, which is what makes exact
/// ground truth affordable along million-element streams.
class indexed_multiset {
public:
    void insert(double value);

    /// k-th smallest, 1-based. Throws domain_error when out of range.
    double kth(std::size_t k) const;

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

private:
    static constexpr std::size_t kBlockTarget = 1024; // split at twice this

    std::vector<std::vector<double>> blocks_;
    std::vector<double> block_max_; // back() of each block, for the search
    std::size_t size_ = 0;
};

/// Exact ground truth for streamed quantile queries: remembers everything,
/// answers with the ceil(q * count)-th order statistic.
class exact_oracle {
public:
    void observe(double datum);

    /// Exact q-quantile of all data so far, q in (0, 1]. Throws
    /// domain_error on an empty oracle or a level outside (0, 1].
    double quantile(double q) const;

    std::size_t size() const noexcept { return values_.size(); }

private:
    indexed_multiset values_;
};

/// One-shot exact quantile of a batch: the ceil(q * n)-th smallest value.
/// The batch is taken by value and partially reordered in place.
double exact_quantile(std::vector<double> values, double q);

} // namespace streamq

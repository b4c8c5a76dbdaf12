#pragma once

#include <cstdint>
#include <vector>

#include "streamq/estimator.hpp"
#include "streamq/rng.hpp"

namespace streamq {

/// Uniform reservoir sampling (algorithm R) with quantiles read off the
/// sample's order statistics.
///
/// The first `capacity` observations fill the buffer; afterwards the i-th
/// observation replaces a uniformly chosen slot with probability
/// capacity / i, which keeps every prefix uniformly represented. Estimates
/// are the ceil(q * m)-th smallest of the m buffered values.
class reservoir_estimator final : public quantile_estimator {
public:
    reservoir_estimator(std::size_t capacity, std::uint64_t seed);

    void observe(double datum) override;
    double query(double q) const override;

    std::size_t warmup_size() const override { return capacity_; }
    std::uint64_t observed() const override { return seen_; }
    std::size_t state_scalars() const override;
    std::string_view name() const override { return "reservoir"; }

    std::size_t capacity() const { return capacity_; }
    const std::vector<double>& sample() const { return buffer_; }

private:
    std::size_t capacity_;
    rng rng_;
    std::vector<double> buffer_;
    mutable std::vector<double> sorted_;
    mutable bool sorted_stale_ = true;
    std::uint64_t seen_ = 0;
};

} // namespace streamq

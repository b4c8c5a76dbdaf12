#pragma once

#include <array>
#include <cstdint>

#include "streamq/estimator.hpp"

namespace streamq {

/// The classic five-marker streaming estimator for a single quantile level.
///
/// Five markers track the minimum, the maximum, the target quantile and the
/// two midpoints; marker heights move by a piecewise-parabolic rule (with a
/// linear fallback when the parabola would break marker ordering) whenever
/// their positions drift from the desired ones. Exact for the first five
/// observations, O(1) memory afterwards.
class p2_estimator final : public quantile_estimator {
public:
    /// level is the single quantile level this instance tracks, in (0, 1].
    explicit p2_estimator(double level);

    void observe(double datum) override;

    /// Only the configured level is answerable; anything else throws
    /// domain_error.
    double query(double q) const override;

    std::size_t warmup_size() const override { return kMarkers; }
    std::uint64_t observed() const override { return seen_; }
    std::size_t state_scalars() const override;
    std::string_view name() const override { return "p2"; }

    double level() const { return level_; }

private:
    static constexpr std::size_t kMarkers = 5;

    double parabolic_(std::size_t i, double dir) const;
    double linear_(std::size_t i, double dir) const;

    double level_;
    std::array<double, kMarkers> heights_{};
    std::array<double, kMarkers> positions_{};
    std::array<double, kMarkers> desired_{};
    std::array<double, kMarkers> desired_step_{};
    std::uint64_t seen_ = 0;
};

} // namespace streamq

#include "streamq/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamq {

reservoir_estimator::reservoir_estimator(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
    if (capacity_ == 0) {
        throw config_error("reservoir: capacity must be positive");
    }
    buffer_.reserve(capacity_);
    sorted_.reserve(capacity_);
}

void reservoir_estimator::observe(double datum) {
    require_finite(datum, name());
    ++seen_;
    if (buffer_.size() < capacity_) {
        buffer_.push_back(datum);
        sorted_stale_ = true;
        return;
    }
    // One draw decides both acceptance (slot < capacity happens with
    // probability capacity / seen) and, when accepted, the slot itself.
    const std::uint64_t slot = rng_.below(seen_);
    if (slot < capacity_) {
        buffer_[static_cast<std::size_t>(slot)] = datum;
        sorted_stale_ = true;
    }
}

double reservoir_estimator::query(double q) const {
    if (!(q > 0.0) || !(q <= 1.0)) {
        throw domain_error("quantile level must be in (0, 1], got " + std::to_string(q));
    }
    if (buffer_.empty()) {
        throw not_warmed_up(1, "reservoir: no observations yet");
    }
    if (sorted_stale_) {
        sorted_ = buffer_;
        std::sort(sorted_.begin(), sorted_.end());
        sorted_stale_ = false;
    }
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted_.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
    return sorted_[rank - 1];
}

std::size_t reservoir_estimator::state_scalars() const {
    return buffer_.size() + sorted_.size() + 2;
}

} // namespace streamq

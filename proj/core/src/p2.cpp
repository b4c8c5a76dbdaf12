#include "streamq/p2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamq {

p2_estimator::p2_estimator(double level) : level_(level) {
    if (!(level > 0.0) || !(level <= 1.0)) {
        throw config_error("p2: quantile level must be in (0, 1], got " + std::to_string(level));
    }
    desired_step_ = {0.0, level_ / 2.0, level_, (1.0 + level_) / 2.0, 1.0};
}

void p2_estimator::observe(double datum) {
    require_finite(datum, name());

    if (seen_ < kMarkers) {
        heights_[seen_] = datum;
        ++seen_;
        if (seen_ == kMarkers) {
            std::sort(heights_.begin(), heights_.end());
            for (std::size_t i = 0; i < kMarkers; ++i) {
                positions_[i] = static_cast<double>(i + 1);
            }
            desired_ = {1.0, 1.0 + 2.0 * level_, 1.0 + 4.0 * level_, 3.0 + 2.0 * level_, 5.0};
        }
        return;
    }

    // Cell k holds the datum: markers k+1 and above shift one rank up.
    std::size_t k;
    if (datum < heights_[0]) {
        heights_[0] = datum;
        k = 0;
    } else if (datum >= heights_[kMarkers - 1]) {
        heights_[kMarkers - 1] = std::max(heights_[kMarkers - 1], datum);
        k = kMarkers - 2;
    } else {
        k = 0;
        while (k + 2 < kMarkers && datum >= heights_[k + 1]) ++k;
    }
    for (std::size_t i = k + 1; i < kMarkers; ++i) positions_[i] += 1.0;
    for (std::size_t i = 0; i < kMarkers; ++i) desired_[i] += desired_step_[i];

    // Interior markers drifting a full rank from their desired position move
    // one rank toward it, provided the neighbouring rank is free; heights
    // follow the parabolic prediction unless it would break their ordering.
    for (std::size_t i = 1; i + 1 < kMarkers; ++i) {
        const double drift = desired_[i] - positions_[i];
        const bool up = drift >= 1.0 && positions_[i + 1] - positions_[i] > 1.0;
        const bool down = drift <= -1.0 && positions_[i - 1] - positions_[i] < -1.0;
        if (!up && !down) continue;
        const double dir = up ? 1.0 : -1.0;
        const double candidate = parabolic_(i, dir);
        if (heights_[i - 1] < candidate && candidate < heights_[i + 1]) {
            heights_[i] = candidate;
        } else {
            heights_[i] = linear_(i, dir);
        }
        positions_[i] += dir;
    }
    ++seen_;
}

double p2_estimator::query(double q) const {
    if (!(q > 0.0) || !(q <= 1.0)) {
        throw domain_error("quantile level must be in (0, 1], got " + std::to_string(q));
    }
    if (std::abs(q - level_) > 1e-12) {
        throw domain_error("p2: instance tracks level " + std::to_string(level_) +
                           ", asked for " + std::to_string(q));
    }
    if (seen_ < kMarkers) {
        throw not_warmed_up(kMarkers - static_cast<std::size_t>(seen_),
                            "p2: needs five observations before the first estimate");
    }
    return heights_[2];
}

std::size_t p2_estimator::state_scalars() const {
    return 4 * kMarkers + 2; // heights, positions, desired, steps, level, count
}

double p2_estimator::parabolic_(std::size_t i, double dir) const {
    const double np = positions_[i];
    const double nm = positions_[i - 1];
    const double npp = positions_[i + 1];
    return heights_[i] +
           dir / (npp - nm) *
               ((np - nm + dir) * (heights_[i + 1] - heights_[i]) / (npp - np) +
                (npp - np - dir) * (heights_[i] - heights_[i - 1]) / (np - nm));
}

double p2_estimator::linear_(std::size_t i, double dir) const {
    const std::size_t j = dir > 0.0 ? i + 1 : i - 1;
    return heights_[i] + dir * (heights_[j] - heights_[i]) / (positions_[j] - positions_[i]);
}

} // namespace streamq

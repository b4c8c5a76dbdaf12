#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "streamq/errors.hpp"

namespace streamq {

/// Common contract for single-pass quantile estimators.
///
/// Implementations hold a bounded number of scalars regardless of how many
/// observations they have consumed; `state_scalars()` reports that number so
/// tests can pin it down.
class quantile_estimator {
public:
    virtual ~quantile_estimator() = default;

    /// Consume one observation. Throws invalid_datum on non-finite input and
    /// leaves the state untouched in that case.
    virtual void observe(double datum) = 0;

    /// Estimate of the q-quantile of everything observed so far. Levels are
    /// fractions in (0, 1]. Throws not_warmed_up until enough data has been
    /// seen, domain_error for levels outside the supported range.
    virtual double query(double q) const = 0;

    /// Observations required before query() is serviceable.
    virtual std::size_t warmup_size() const = 0;

    /// Observations consumed so far.
    virtual std::uint64_t observed() const = 0;

    bool ready() const { return observed() >= warmup_size(); }

    /// Number of scalar values currently retained (bounded by the
    /// configured budget, never by the stream length).
    virtual std::size_t state_scalars() const = 0;

    virtual std::string_view name() const = 0;

protected:
    static void require_finite(double datum, std::string_view who) {
        if (!std::isfinite(datum)) {
            throw invalid_datum(datum, who);
        }
    }
};

} // namespace streamq

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace streamq {

/// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (all-zero count vector, quantile level outside (0,1], bad index).
class domain_error : public error {
public:
    using error::error;
};

/// A point fell outside a histogram's covered range.
class range_error : public error {
public:
    enum class side { below, above };

    range_error(side s, const std::string& what) : error(what), side_(s) {}

    range_error(side s, double x, double lo, double hi)
        : error("x = " + std::to_string(x) + " lies " +
                (s == side::below ? "below" : "above") + " the covered range [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          side_(s) {}

    side which_side() const noexcept { return side_; }

private:
    side side_;
};

/// Query issued before the estimator has seen enough data.
class not_warmed_up : public error {
public:
    not_warmed_up(std::size_t remaining, const std::string& what)
        : error(what), remaining_(remaining) {}

    /// Observations still needed before queries become valid.
    std::size_t remaining() const noexcept { return remaining_; }

private:
    std::size_t remaining_;
};

/// A non-finite (NaN or infinite) datum was offered to observe().
class invalid_datum : public error {
public:
    using error::error;

    invalid_datum(double datum, std::string_view who)
        : error(std::string(who) + ": non-finite datum " + std::to_string(datum)) {}
};

/// Malformed experiment or stream configuration.
class config_error : public error {
public:
    using error::error;
};

/// Malformed content inside a data or config file; the message carries the
/// path and 1-based line number.
class parse_error : public error {
public:
    parse_error(const std::string& path, std::size_t line, const std::string& what)
        : error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

/// Filesystem failure, carries the offending path in the message.
class io_error : public error {
public:
    using error::error;
};

} // namespace streamq

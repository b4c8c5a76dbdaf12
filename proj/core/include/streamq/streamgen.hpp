#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "streamq/errors.hpp"
#include "streamq/rng.hpp"

namespace streamq {

enum class segment_family {
    constant,  ///< every value equals `value`
    uniform,   ///< uniform on [lo, hi]
    lognormal, ///< scale * exp(sigma * Z), Z standard normal
};

/// One homogeneous stretch of a synthetic stream. Only the fields of the
/// chosen family are meaningful.
struct stream_segment {
    segment_family family = segment_family::constant;
    std::uint64_t duration = 0;
    double value = 0.0; // constant
    double lo = 0.0;    // uniform
    double hi = 0.0;    // uniform
    double scale = 0.0; // lognormal
    double sigma = 0.0; // lognormal
};

stream_segment constant_segment(std::uint64_t duration, double value);
stream_segment uniform_segment(std::uint64_t duration, double lo, double hi);
stream_segment lognormal_segment(std::uint64_t duration, double scale, double sigma);

/// A single-step burst: the value at `position` (0-based) is `multiplier`
/// times the largest value emitted before it, instead of a segment draw.
struct stream_spike {
    std::uint64_t position = 0;
    double multiplier = 1.0;
};

/// Deterministic description of a non-stationary synthetic stream.
/// Segment durations must add up to `length`. Every value a valid spec
/// emits is finite and positive.
struct stream_spec {
    std::uint64_t length = 0;
    std::uint64_t seed = 0;
    std::vector<stream_segment> segments;
    std::vector<stream_spike> spikes;

    /// Throws config_error on any structural problem.
    void validate() const;
};

/// Forward-only generator over a spec. Each segment draws from its own
/// generator seeded by (spec seed, segment index), so the emitted sequence
/// depends only on the spec, never on how the consumer batches reads.
/// Spikes replace the segment draw at their position without consuming
/// randomness.
class stream_cursor {
public:
    explicit stream_cursor(stream_spec spec);

    bool done() const noexcept { return position_ >= spec_.length; }
    double next();

    /// Values emitted so far.
    std::uint64_t position() const noexcept { return position_; }
    const stream_spec& spec() const noexcept { return spec_; }

private:
    stream_spec spec_;
    rng segment_rng_;
    std::size_t active_segment_ = 0;
    std::uint64_t segment_left_ = 0;
    std::size_t next_spike_ = 0;
    std::uint64_t position_ = 0;
    double running_max_ = 0.0;
};

/// Materialize the whole stream.
std::vector<double> generate(const stream_spec& spec);

/// Built-in stream shapes exercised throughout the docs and tests, in a
/// stable order: "spiky", "shifting", "heavy-tail-drift".
const std::vector<std::pair<std::string, stream_spec>>& preset_streams();

/// Lookup by name; throws config_error listing the valid names.
stream_spec preset_stream(std::string_view name);

/// Plain-text round trip. The format is line-oriented:
///
///   length = 100000
///   seed = 1001
///   segment uniform lo=8 hi=12 duration=35000
///   segment lognormal scale=10 sigma=0.5 duration=30000
///   spike position=12000 multiplier=12
///
/// '#' starts a comment. parse_stream_spec validates before returning.
std::string format_stream_spec(const stream_spec& spec);
stream_spec parse_stream_spec(const std::string& text, const std::string& name_for_errors);

/// Line-level pieces, shared with the experiment config parser: `rest` is
/// everything after the "segment" / "spike" keyword.
stream_segment parse_segment_line(const std::string& rest);
stream_spike parse_spike_line(const std::string& rest);
std::string format_segment(const stream_segment& seg);
std::string format_spike(const stream_spike& spike);

} // namespace streamq

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "streamq/streamgen.hpp"

using namespace streamq;

namespace {

bool mentions(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

stream_spec tiny_spec() {
    stream_spec spec;
    spec.length = 5;
    spec.seed = 77;
    spec.segments = {constant_segment(3, 1.0), constant_segment(2, 2.0)};
    return spec;
}

} // namespace

TEST_SUITE("streamgen") {

TEST_CASE("segments partition the stream in order") {
    const std::vector<double> out = generate(tiny_spec());
    CHECK(out == std::vector<double>(std::initializer_list<double>{1.0, 1.0, 1.0, 2.0, 2.0}));

    stream_spec flat;
    flat.length = 4;
    flat.segments = {constant_segment(4, 5.0)};
    CHECK(generate(flat) == std::vector<double>(4, 5.0));
}

TEST_CASE("generation is deterministic in the spec and sensitive to the seed") {
    stream_spec spec;
    spec.length = 300;
    spec.seed = 12;
    spec.segments = {uniform_segment(150, 1.0, 9.0), lognormal_segment(150, 5.0, 0.4)};
    const std::vector<double> a = generate(spec);
    const std::vector<double> b = generate(spec);
    CHECK(a == b);
    spec.seed = 13;
    const std::vector<double> c = generate(spec);
    CHECK(a != c);
    for (const double v : a) {
        CHECK(v > 0.0);
    }
}

TEST_CASE("spikes replace the draw with a multiple of the running maximum") {
    stream_spec spec;
    spec.length = 40;
    spec.seed = 5;
    spec.segments = {uniform_segment(40, 2.0, 4.0)};
    stream_spec spiked = spec;
    spiked.spikes = {{13, 3.0}, {20, 2.0}};

    const std::vector<double> plain = generate(spec);
    const std::vector<double> burst = generate(spiked);
    REQUIRE(burst.size() == 40);

    const double max_before_13 = *std::max_element(burst.begin(), burst.begin() + 13);
    CHECK(burst[13] == 3.0 * max_before_13);
    const double max_before_20 = *std::max_element(burst.begin(), burst.begin() + 20);
    CHECK(burst[20] == 2.0 * max_before_20);
    // Spikes consume no randomness: the segment's draw sequence simply
    // resumes, shifted by the number of spikes already emitted.
    for (std::size_t i = 0; i < 13; ++i) {
        CHECK(burst[i] == plain[i]);
    }
    for (std::size_t i = 14; i < 20; ++i) {
        CHECK(burst[i] == plain[i - 1]);
    }
    for (std::size_t i = 21; i < burst.size(); ++i) {
        CHECK(burst[i] == plain[i - 2]);
    }
}

TEST_CASE("the cursor matches batch generation value for value") {
    stream_spec spec = preset_stream("spiky");
    const std::vector<double> batch = generate(spec);
    stream_cursor cur(spec);
    for (std::size_t i = 0; i < 500; ++i) {
        CHECK(cur.position() == i);
        CHECK_FALSE(cur.done());
        CHECK(cur.next() == batch[i]);
    }

    stream_cursor tiny(tiny_spec());
    std::size_t drained = 0;
    while (!tiny.done()) {
        tiny.next();
        ++drained;
    }
    CHECK(drained == 5);
    CHECK(tiny.position() == 5);
    CHECK_THROWS_AS(tiny.next(), domain_error);
}

TEST_CASE("validation pinpoints the offending segment") {
    stream_spec spec = tiny_spec();
    spec.segments[1] = uniform_segment(2, 9.0, 3.0); // lo >= hi
    try {
        spec.validate();
        FAIL_CHECK("expected config_error");
    } catch (const config_error& e) {
        CHECK(mentions(e, "segment 2"));
    }
    CHECK_THROWS_AS(generate(spec), config_error); // generation validates too
}

TEST_CASE("validation rejects every structural defect") {
    stream_spec zero_len;
    zero_len.segments = {constant_segment(1, 1.0)};
    CHECK_THROWS_AS(zero_len.validate(), config_error);

    stream_spec no_segments;
    no_segments.length = 5;
    CHECK_THROWS_AS(no_segments.validate(), config_error);

    stream_spec zero_duration = tiny_spec();
    zero_duration.segments[0].duration = 0;
    CHECK_THROWS_AS(zero_duration.validate(), config_error);

    stream_spec overlong = tiny_spec();
    overlong.segments[1].duration = 3; // 3 + 3 spills past length 5
    try {
        overlong.validate();
        FAIL_CHECK("expected config_error");
    } catch (const config_error& e) {
        CHECK(mentions(e, "exceed"));
    }

    stream_spec far_overlong = tiny_spec();
    far_overlong.segments[1].duration = 9; // single segment longer than the stream
    try {
        far_overlong.validate();
        FAIL_CHECK("expected config_error");
    } catch (const config_error& e) {
        CHECK(mentions(e, "cover 12 of 5"));
    }

    stream_spec underlong = tiny_spec();
    underlong.segments[1].duration = 1;
    try {
        underlong.validate();
        FAIL_CHECK("expected config_error");
    } catch (const config_error& e) {
        CHECK(mentions(e, "cover 4 of 5"));
    }

    stream_spec negative_constant = tiny_spec();
    negative_constant.segments[0].value = -1.0;
    CHECK_THROWS_AS(negative_constant.validate(), config_error);

    stream_spec wild_sigma = tiny_spec();
    wild_sigma.segments[0] = lognormal_segment(3, 10.0, 31.0);
    CHECK_THROWS_AS(wild_sigma.validate(), config_error);

    stream_spec spike_at_origin = tiny_spec();
    spike_at_origin.spikes = {{0, 2.0}}; // nothing before it to amplify
    CHECK_THROWS_AS(spike_at_origin.validate(), config_error);

    stream_spec spike_past_end = tiny_spec();
    spike_past_end.spikes = {{5, 2.0}};
    CHECK_THROWS_AS(spike_past_end.validate(), config_error);

    stream_spec spike_twice = tiny_spec();
    spike_twice.spikes = {{2, 2.0}, {2, 3.0}};
    CHECK_THROWS_AS(spike_twice.validate(), config_error);

    stream_spec weak_spike = tiny_spec();
    weak_spike.spikes = {{2, 0.0}};
    CHECK_THROWS_AS(weak_spike.validate(), config_error);
}

TEST_CASE("the text form round-trips every preset") {
    for (const auto& [name, spec] : preset_streams()) {
        const std::string text = format_stream_spec(spec);
        const stream_spec back = parse_stream_spec(text, name);
        CHECK(format_stream_spec(back) == text);
        CHECK(back.length == spec.length);
        CHECK(back.seed == spec.seed);
        CHECK(back.segments.size() == spec.segments.size());
        CHECK(back.spikes.size() == spec.spikes.size());
        // Equality of the generated stream is the equality that matters.
        CHECK(generate(back) == generate(spec));
    }
}

TEST_CASE("the preset catalogue is stable") {
    const auto& presets = preset_streams();
    REQUIRE(presets.size() == 3);
    CHECK(presets[0].first == "spiky");
    CHECK(presets[1].first == "shifting");
    CHECK(presets[2].first == "heavy-tail-drift");
    for (const auto& [name, spec] : presets) {
        CHECK(spec.length == 100000);
        CHECK_NOTHROW(spec.validate());
    }
    CHECK(preset_stream("spiky").seed == 9001);
    CHECK(preset_stream("spiky").spikes.size() == 4);
    try {
        preset_stream("nope");
        FAIL_CHECK("expected config_error");
    } catch (const config_error& e) {
        CHECK(mentions(e, "spiky"));
        CHECK(mentions(e, "heavy-tail-drift"));
    }
}

TEST_CASE("parsing failures carry the file name and line number") {
    try {
        parse_stream_spec("length = 5\nwibble\n", "inline");
        FAIL_CHECK("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
        CHECK(mentions(e, "inline:2"));
    }
    try {
        parse_stream_spec("seed = 3\n", "inline");
        FAIL_CHECK("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(mentions(e, "length"));
    }
    CHECK_THROWS_AS(
        parse_stream_spec("length = 5\nsegment constant value=1 duration=5 duration=5\n", "x"),
        parse_error);
    CHECK_THROWS_AS(parse_stream_spec("length = 5\nsegment warp value=1 duration=5\n", "x"),
                    parse_error);
    CHECK_THROWS_AS(parse_stream_spec("length = nope\n", "x"), parse_error);

    // Comments and blank lines are ignored; a trailing comment is stripped.
    const stream_spec ok = parse_stream_spec(
        "# header\nlength = 5\n\nseed = 77 # the usual\n"
        "segment constant value=1 duration=3\nsegment constant value=2 duration=2\n",
        "inline");
    CHECK(generate(ok) == generate(tiny_spec()));
}

} // TEST_SUITE

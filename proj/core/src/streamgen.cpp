#include "streamq/streamgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "parse_util.hpp"
#include "streamq/format.hpp"

namespace streamq {

using detail::split_ws;

namespace {

// Tag space for per-segment sub-seeds; disjoint from the estimator tags
// used by the experiment engine.
constexpr std::uint64_t kSegmentSeedTag = 0x5e900000ULL;

const char* family_name(segment_family f) {
    switch (f) {
    case segment_family::constant: return "constant";
    case segment_family::uniform: return "uniform";
    case segment_family::lognormal: return "lognormal";
    }
    return "?";
}

// key=value tokens -> map, rejecting repeats and stray words.
std::map<std::string, std::string> parse_kv(const std::vector<std::string>& tokens,
                                            std::size_t first, const std::string& what) {
    std::map<std::string, std::string> kv;
    for (std::size_t i = first; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == tokens[i].size()) {
            throw config_error(what + ": expected key=value, got '" + tokens[i] + "'");
        }
        const auto [it, fresh] = kv.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
        if (!fresh) {
            throw config_error(what + ": duplicate key '" + it->first + "'");
        }
    }
    return kv;
}

double take_double(std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& what) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw config_error(what + ": missing " + key + "=");
    }
    double v;
    if (!detail::parse_double_str(it->second, v)) {
        throw config_error(what + ": bad number '" + it->second + "' for " + key);
    }
    kv.erase(it);
    return v;
}

std::uint64_t take_u64(std::map<std::string, std::string>& kv, const std::string& key,
                       const std::string& what) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw config_error(what + ": missing " + key + "=");
    }
    std::uint64_t v;
    if (!detail::parse_u64_str(it->second, v)) {
        throw config_error(what + ": bad integer '" + it->second + "' for " + key);
    }
    kv.erase(it);
    return v;
}

void reject_leftovers(const std::map<std::string, std::string>& kv, const std::string& what) {
    if (!kv.empty()) {
        throw config_error(what + ": unknown key '" + kv.begin()->first + "'");
    }
}

} // namespace

stream_segment constant_segment(std::uint64_t duration, double value) {
    stream_segment s;
    s.family = segment_family::constant;
    s.duration = duration;
    s.value = value;
    return s;
}

stream_segment uniform_segment(std::uint64_t duration, double lo, double hi) {
    stream_segment s;
    s.family = segment_family::uniform;
    s.duration = duration;
    s.lo = lo;
    s.hi = hi;
    return s;
}

stream_segment lognormal_segment(std::uint64_t duration, double scale, double sigma) {
    stream_segment s;
    s.family = segment_family::lognormal;
    s.duration = duration;
    s.scale = scale;
    s.sigma = sigma;
    return s;
}

void stream_spec::validate() const {
    if (length == 0) {
        throw config_error("stream spec: length must be positive");
    }
    if (segments.empty()) {
        throw config_error("stream spec: needs at least one segment");
    }
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& seg = segments[i];
        const std::string where = "segment " + std::to_string(i + 1);
        if (seg.duration == 0) {
            throw config_error("stream spec: " + where + " has zero duration");
        }
        switch (seg.family) {
        case segment_family::constant:
            if (!(seg.value > 0.0) || !std::isfinite(seg.value)) {
                throw config_error("stream spec: " + where + ": value must be finite and positive");
            }
            break;
        case segment_family::uniform:
            if (!(seg.lo > 0.0) || !(seg.hi > seg.lo) || !std::isfinite(seg.hi)) {
                throw config_error("stream spec: " + where + ": needs 0 < lo < hi, finite");
            }
            break;
        case segment_family::lognormal:
            if (!(seg.scale > 0.0) || !std::isfinite(seg.scale) || !(seg.sigma >= 0.0) ||
                !(seg.sigma <= 30.0)) {
                throw config_error("stream spec: " + where +
                                   ": needs scale > 0 and sigma in [0, 30]");
            }
            break;
        }
        if (covered > length - seg.duration) {
            throw config_error("stream spec: segment durations exceed length");
        }
        covered += seg.duration;
    }
    if (covered != length) {
        throw config_error("stream spec: segment durations cover " + std::to_string(covered) +
                           " of " + std::to_string(length) + " values");
    }
    std::vector<std::uint64_t> positions;
    positions.reserve(spikes.size());
    for (const auto& spike : spikes) {
        if (spike.position == 0 || spike.position >= length) {
            throw config_error(
                "stream spec: spike position must be in [1, length): " +
                std::to_string(spike.position));
        }
        if (!(spike.multiplier > 0.0) || !std::isfinite(spike.multiplier)) {
            throw config_error("stream spec: spike multiplier must be finite and positive");
        }
        positions.push_back(spike.position);
    }
    std::sort(positions.begin(), positions.end());
    if (std::adjacent_find(positions.begin(), positions.end()) != positions.end()) {
        throw config_error("stream spec: spike positions must be distinct");
    }
}

stream_cursor::stream_cursor(stream_spec spec) : spec_(std::move(spec)), segment_rng_(0) {
    spec_.validate();
    std::sort(spec_.spikes.begin(), spec_.spikes.end(),
              [](const stream_spike& a, const stream_spike& b) { return a.position < b.position; });
    segment_left_ = spec_.segments[0].duration;
    segment_rng_ = rng(derive_seed(spec_.seed, kSegmentSeedTag));
}

double stream_cursor::next() {
    if (done()) {
        throw domain_error("stream_cursor: stream exhausted");
    }
    while (segment_left_ == 0) {
        ++active_segment_;
        segment_left_ = spec_.segments[active_segment_].duration;
        segment_rng_ = rng(derive_seed(spec_.seed, kSegmentSeedTag + active_segment_));
    }

    double v;
    if (next_spike_ < spec_.spikes.size() && spec_.spikes[next_spike_].position == position_) {
        v = spec_.spikes[next_spike_].multiplier * running_max_;
        ++next_spike_;
    } else {
        const auto& seg = spec_.segments[active_segment_];
        switch (seg.family) {
        case segment_family::constant:
            v = seg.value;
            break;
        case segment_family::uniform:
            v = segment_rng_.uniform(seg.lo, seg.hi);
            break;
        case segment_family::lognormal:
        default:
            v = seg.scale * std::exp(seg.sigma * segment_rng_.gaussian());
            break;
        }
    }
    --segment_left_;
    ++position_;
    running_max_ = std::max(running_max_, v);
    return v;
}

std::vector<double> generate(const stream_spec& spec) {
    stream_cursor cur(spec);
    std::vector<double> out;
    out.reserve(spec.length);
    while (!cur.done()) {
        out.push_back(cur.next());
    }
    return out;
}

const std::vector<std::pair<std::string, stream_spec>>& preset_streams() {
    static const std::vector<std::pair<std::string, stream_spec>> presets = [] {
        std::vector<std::pair<std::string, stream_spec>> out;

        // A steady band punctured by rare single-step bursts: the bursts
        // barely move mid quantiles but wreck estimators whose bin layout
        // chases the observed range.
        stream_spec spiky;
        spiky.length = 100000;
        spiky.seed = 9001;
        spiky.segments = {
            uniform_segment(35000, 8.0, 12.0),
            lognormal_segment(30000, 10.0, 0.5),
            uniform_segment(35000, 6.0, 14.0),
        };
        spiky.spikes = {
            {12000, 12.0},
            {30000, 9.0},
            {52000, 14.0},
            {76000, 11.0},
        };
        out.emplace_back("spiky", std::move(spiky));

        // Sustained downward level shifts. A four-reading power-on transient
        // near 10000 collapses to an operating level of 260 -- far below a
        // quarter of the opening scale -- and from there the level decays
        // geometrically through overlapping bands: early segments are brief
        // and high, later ones long and low, so the upper quantiles drain
        // downward for the whole stream while fresh data keeps arriving
        // below the old mass.
        stream_spec shifting;
        shifting.length = 100000;
        shifting.seed = 9002;
        shifting.segments.push_back(uniform_segment(4, 9000.0, 10000.0));
        {
            const std::uint64_t durations[] = {15,   23,   34,   51,    76,    114,  171,
                                               257,  385,  578,  867,   1301,  1951, 2927,
                                               4391, 6586, 9879, 14819, 22228, 33343};
            double level = 260.0;
            for (std::size_t k = 0; k < 20; ++k) {
                shifting.segments.push_back(lognormal_segment(durations[k], level, 0.10));
                level *= 0.82;
            }
        }
        out.emplace_back("shifting", std::move(shifting));

        // Lognormal body whose tail index drifts heavier over time, read
        // through a saturating sensor: every cycle opens with a burst of
        // rail readings pinned at exactly 199, the way a clipped transducer
        // reports all over-range inputs. The rail leads each cycle so it
        // always holds the top ~15% of the mass seen so far, keeping the
        // extreme upper range pinned while the body keeps reshaping and
        // spreading underneath it.
        stream_spec drift;
        drift.length = 100000;
        drift.seed = 9003;
        const std::size_t drift_cycles = 10;
        for (std::size_t c = 0; c < drift_cycles; ++c) {
            const double sigma =
                0.25 + 0.35 * static_cast<double>(c) / static_cast<double>(drift_cycles - 1);
            drift.segments.push_back(constant_segment(1500, 199.0));
            drift.segments.push_back(lognormal_segment(8500, 10.0, sigma));
        }
        out.emplace_back("heavy-tail-drift", std::move(drift));

        return out;
    }();
    return presets;
}

stream_spec preset_stream(std::string_view name) {
    for (const auto& [preset_name, spec] : preset_streams()) {
        if (preset_name == name) return spec;
    }
    std::string names;
    for (const auto& [preset_name, spec] : preset_streams()) {
        if (!names.empty()) names += ", ";
        names += preset_name;
    }
    throw config_error("unknown preset stream '" + std::string(name) + "' (available: " + names +
                       ")");
}

std::string format_segment(const stream_segment& seg) {
    std::string out = "segment ";
    out += family_name(seg.family);
    switch (seg.family) {
    case segment_family::constant:
        out += " value=" + format_double(seg.value);
        break;
    case segment_family::uniform:
        out += " lo=" + format_double(seg.lo) + " hi=" + format_double(seg.hi);
        break;
    case segment_family::lognormal:
        out += " scale=" + format_double(seg.scale) + " sigma=" + format_double(seg.sigma);
        break;
    }
    out += " duration=" + std::to_string(seg.duration);
    return out;
}

std::string format_spike(const stream_spike& spike) {
    return "spike position=" + std::to_string(spike.position) +
           " multiplier=" + format_double(spike.multiplier);
}

std::string format_stream_spec(const stream_spec& spec) {
    std::string out;
    out += "length = " + std::to_string(spec.length) + "\n";
    out += "seed = " + std::to_string(spec.seed) + "\n";
    for (const auto& seg : spec.segments) {
        out += format_segment(seg) + "\n";
    }
    for (const auto& spike : spec.spikes) {
        out += format_spike(spike) + "\n";
    }
    return out;
}

stream_segment parse_segment_line(const std::string& rest) {
    const auto tokens = split_ws(rest);
    if (tokens.empty()) {
        throw config_error("segment: missing family (constant, uniform or lognormal)");
    }
    const std::string& family = tokens[0];
    auto kv = parse_kv(tokens, 1, "segment " + family);
    stream_segment seg;
    if (family == "constant") {
        seg = constant_segment(0, take_double(kv, "value", "segment constant"));
        seg.duration = take_u64(kv, "duration", "segment constant");
    } else if (family == "uniform") {
        const double lo = take_double(kv, "lo", "segment uniform");
        const double hi = take_double(kv, "hi", "segment uniform");
        seg = uniform_segment(take_u64(kv, "duration", "segment uniform"), lo, hi);
    } else if (family == "lognormal") {
        const double scale = take_double(kv, "scale", "segment lognormal");
        const double sigma = take_double(kv, "sigma", "segment lognormal");
        seg = lognormal_segment(take_u64(kv, "duration", "segment lognormal"), scale, sigma);
    } else {
        throw config_error("segment: unknown family '" + family + "'");
    }
    reject_leftovers(kv, "segment " + family);
    return seg;
}

stream_spike parse_spike_line(const std::string& rest) {
    auto kv = parse_kv(split_ws(rest), 0, "spike");
    stream_spike spike;
    spike.position = take_u64(kv, "position", "spike");
    spike.multiplier = take_double(kv, "multiplier", "spike");
    reject_leftovers(kv, "spike");
    return spike;
}

stream_spec parse_stream_spec(const std::string& text, const std::string& name_for_errors) {
    stream_spec spec;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool saw_length = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        try {
            if (tokens[0] == "segment") {
                const auto pos = line.find("segment");
                spec.segments.push_back(parse_segment_line(line.substr(pos + 7)));
            } else if (tokens[0] == "spike") {
                const auto pos = line.find("spike");
                spec.spikes.push_back(parse_spike_line(line.substr(pos + 5)));
            } else if (const auto eq = line.find('='); eq != std::string::npos) {
                const std::string key = detail::trim(line.substr(0, eq));
                const std::string value = detail::trim(line.substr(eq + 1));
                std::uint64_t parsed;
                if (!detail::parse_u64_str(value, parsed)) {
                    throw config_error("bad integer '" + value + "' for " + key);
                }
                if (key == "length") {
                    spec.length = parsed;
                    saw_length = true;
                } else if (key == "seed") {
                    spec.seed = parsed;
                } else {
                    throw config_error("unknown key '" + key + "'");
                }
            } else {
                throw config_error("expected 'key = value', 'segment ...' or 'spike ...'");
            }
        } catch (const config_error& e) {
            throw parse_error(name_for_errors, lineno, e.what());
        }
    }
    if (!saw_length) {
        throw parse_error(name_for_errors, lineno, "missing 'length = ...'");
    }
    spec.validate();
    return spec;
}

} // namespace streamq

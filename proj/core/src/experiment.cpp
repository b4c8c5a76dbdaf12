#include "streamq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

#include "parse_util.hpp"
#include "streamq/data_aligned.hpp"
#include "streamq/equispaced.hpp"
#include "streamq/estimator.hpp"
#include "streamq/format.hpp"
#include "streamq/interpolated.hpp"
#include "streamq/oracle.hpp"
#include "streamq/p2.hpp"
#include "streamq/reservoir.hpp"
#include "streamq/rng.hpp"

namespace streamq {

namespace {

// Tag for deriving per-instance reservoir seeds from the user seed;
// disjoint from the stream-segment tag space.
constexpr std::uint64_t kReservoirSeedTag = 0xae5e0000ULL;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& known_estimators() {
    static const std::vector<std::string> names = {
        "aligned", "aligned-width", "interpolated", "p2", "reservoir", "equispaced"};
    return names;
}

bool is_budgeted(const std::string& kind) { return kind != "p2"; }

// ---------------------------------------------------------------- output --

/// Writes through a sibling temp file and renames on commit, so readers
/// only ever see complete files.
class atomic_file {
public:
    explicit atomic_file(std::string path)
        : path_(std::move(path)), tmp_(path_ + ".tmp"), out_(tmp_, std::ios::binary) {
        if (!out_) {
            throw io_error("cannot open " + tmp_ + " for writing");
        }
    }

    atomic_file(const atomic_file&) = delete;
    atomic_file& operator=(const atomic_file&) = delete;

    ~atomic_file() {
        if (!committed_) {
            out_.close();
            std::remove(tmp_.c_str());
        }
    }

    std::ostream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_) {
            throw io_error("write failed on " + tmp_);
        }
        out_.close();
        if (std::rename(tmp_.c_str(), path_.c_str()) != 0) {
            throw io_error("cannot rename " + tmp_ + " to " + path_);
        }
        committed_ = true;
    }

private:
    std::string path_;
    std::string tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

// --------------------------------------------------------------- sources --

class source_cursor {
public:
    virtual ~source_cursor() = default;
    virtual bool next(double& out) = 0;
};

class synthetic_source final : public source_cursor {
public:
    explicit synthetic_source(const stream_spec& spec) : cursor_(spec) {}
    bool next(double& out) override {
        if (cursor_.done()) return false;
        out = cursor_.next();
        return true;
    }

private:
    stream_cursor cursor_;
};

class file_source final : public source_cursor {
public:
    explicit file_source(std::string path) : path_(std::move(path)), in_(path_) {
        if (!in_) {
            throw io_error("cannot open stream file " + path_);
        }
    }

    bool next(double& out) override {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            const std::string text = detail::trim(line);
            if (text.empty()) continue;
            double v;
            if (!detail::parse_double_str(text, v)) {
                throw parse_error(path_, lineno_, "not a number: '" + text + "'");
            }
            if (!std::isfinite(v)) {
                throw parse_error(path_, lineno_, "non-finite value: '" + text + "'");
            }
            out = v;
            return true;
        }
        return false;
    }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t lineno_ = 0;
};

/// Where the data comes from, in a reopenable form (parallel mode streams
/// the source once per worker).
struct resolved_source {
    std::optional<stream_spec> spec;
    std::string path;
    std::uint64_t seed_base = 0; ///< estimator-internal randomness derives from this
};

resolved_source resolve_source(const experiment_config& cfg) {
    resolved_source src;
    if (cfg.stream) {
        src.spec = *cfg.stream;
        src.spec->seed = cfg.seed.value_or(src.spec->seed);
    } else if (cfg.source.empty()) {
        throw config_error("no stream source configured (need source= or an inline stream)");
    } else {
        bool preset = false;
        for (const auto& [name, spec] : preset_streams()) {
            if (name == cfg.source) {
                src.spec = spec;
                if (cfg.seed) src.spec->seed = *cfg.seed;
                preset = true;
                break;
            }
        }
        if (!preset) {
            src.path = cfg.source;
        }
    }
    if (src.spec) {
        src.spec->validate();
        src.seed_base = src.spec->seed;
    } else {
        src.seed_base = cfg.seed.value_or(0);
    }
    return src;
}

std::unique_ptr<source_cursor> open_source(const resolved_source& src) {
    if (src.spec) {
        return std::make_unique<synthetic_source>(*src.spec);
    }
    return std::make_unique<file_source>(src.path);
}

// ------------------------------------------------------------- instances --

struct instance {
    std::string label;
    std::string kind;
    std::size_t bins = 0;
    std::unique_ptr<quantile_estimator> est;
};

std::unique_ptr<quantile_estimator> make_estimator(const std::string& kind, std::size_t bins,
                                                   double q, std::uint64_t seed_base) {
    if (kind == "aligned") {
        return std::make_unique<data_aligned_estimator>(bins);
    }
    if (kind == "aligned-width") {
        return std::make_unique<data_aligned_estimator>(bins, merge_objective::width_aware_entropy);
    }
    if (kind == "interpolated") {
        return std::make_unique<interpolated_estimator>(bins);
    }
    if (kind == "p2") {
        return std::make_unique<p2_estimator>(q);
    }
    if (kind == "reservoir") {
        return std::make_unique<reservoir_estimator>(
            bins, derive_seed(seed_base, kReservoirSeedTag ^ static_cast<std::uint64_t>(bins)));
    }
    if (kind == "equispaced") {
        return std::make_unique<equispaced_estimator>(bins);
    }
    throw config_error("unknown estimator '" + kind + "'");
}

std::vector<instance> build_instances(const experiment_config& cfg, std::uint64_t seed_base) {
    std::vector<instance> out;
    for (const auto& kind : cfg.estimators) {
        if (!is_budgeted(kind)) {
            out.push_back({kind, kind, 5, make_estimator(kind, 5, cfg.q, seed_base)});
            continue;
        }
        for (const std::size_t bins : cfg.bins) {
            out.push_back({kind + "_" + std::to_string(bins), kind, bins,
                           make_estimator(kind, bins, cfg.q, seed_base)});
        }
    }
    return out;
}

// --------------------------------------------------------------- writers --

void write_header(std::ostream& out, const std::vector<instance>& instances, bool csv) {
    const char sep = csv ? ',' : ' ';
    if (!csv) out << "# ";
    out << "step" << sep << "datum" << sep << "truth";
    for (const auto& inst : instances) {
        out << sep << inst.label;
    }
    out << '\n';
}

void write_row(std::ostream& out, std::uint64_t step, double datum, double truth,
               std::span<const double> estimates, bool csv) {
    const char sep = csv ? ',' : ' ';
    out << step << sep << format_double(datum) << sep << format_double(truth);
    for (const double e : estimates) {
        out << sep << format_double(e);
    }
    out << '\n';
}

void write_summary_file(atomic_file& file, const experiment_config& cfg, const run_result& result) {
    auto& out = file.stream();
    out << "label,kind,bins,q,stride,stream_length,warmup_skip,scored,"
           "mean_relative_error,max_absolute_error,zero_truth_excluded,not_ready_excluded\n";
    for (const auto& row : result.rows) {
        out << row.label << ',' << row.kind << ',' << row.bins << ',' << format_double(cfg.q)
            << ',' << cfg.stride << ',' << result.stream_length << ',' << result.warmup_skip << ','
            << row.errors.scored << ',' << format_double(row.errors.mean_relative_error) << ','
            << format_double(row.errors.max_absolute_error) << ',' << row.errors.zero_truth_excluded
            << ',' << row.errors.not_ready_excluded << '\n';
    }
}

// A worker's view of one estimator column.
struct column_state {
    instance* inst = nullptr;
    error_accumulator acc;
    std::vector<double> estimates; // buffered only in parallel mode
};

run_result assemble_result(const experiment_config& cfg, const std::vector<instance>& instances,
                           std::vector<column_state>& columns, std::uint64_t length,
                           std::uint64_t rows, std::uint64_t warm) {
    run_result result;
    result.stream_length = length;
    result.trace_rows = rows;
    result.warmup_skip = warm;
    result.q = cfg.q;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        result.rows.push_back(
            {instances[i].label, instances[i].kind, instances[i].bins, columns[i].acc.summary()});
    }
    return result;
}

std::uint64_t default_warmup(const std::vector<instance>& instances) {
    std::uint64_t warm = 0;
    for (const auto& inst : instances) {
        warm = std::max<std::uint64_t>(warm, inst.est->warmup_size());
    }
    return warm;
}

double sample_estimate(const instance& inst, double q) {
    return inst.est->ready() ? inst.est->query(q) : kNan;
}

run_result run_lockstep(const experiment_config& cfg, const resolved_source& src,
                        std::vector<instance>& instances) {
    std::optional<atomic_file> trace;
    std::optional<atomic_file> plot;
    if (!cfg.out_trace.empty()) trace.emplace(cfg.out_trace);
    if (!cfg.out_plot.empty()) plot.emplace(cfg.out_plot);
    if (trace) write_header(trace->stream(), instances, /*csv=*/true);
    if (plot) write_header(plot->stream(), instances, /*csv=*/false);

    const std::uint64_t warm = cfg.warmup_skip.value_or(default_warmup(instances));
    std::vector<column_state> columns(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) columns[i].inst = &instances[i];

    exact_oracle oracle;
    auto cursor = open_source(src);
    std::vector<double> estimates(instances.size());
    std::uint64_t t = 0;
    std::uint64_t rows = 0;
    double d;
    while (cursor->next(d)) {
        ++t;
        oracle.observe(d);
        for (auto& inst : instances) inst.est->observe(d);
        if (t % cfg.stride != 0) continue;
        ++rows;
        const double truth = oracle.quantile(cfg.q);
        for (std::size_t i = 0; i < instances.size(); ++i) {
            estimates[i] = sample_estimate(instances[i], cfg.q);
        }
        if (trace) write_row(trace->stream(), t, d, truth, estimates, /*csv=*/true);
        if (plot) write_row(plot->stream(), t, d, truth, estimates, /*csv=*/false);
        if (t > warm) {
            for (std::size_t i = 0; i < instances.size(); ++i) {
                columns[i].acc.add(truth, estimates[i]);
            }
        }
    }
    if (t == 0) {
        throw config_error("stream source yielded no data");
    }

    run_result result = assemble_result(cfg, instances, columns, t, rows, warm);
    if (!cfg.out_summary.empty()) {
        atomic_file summary(cfg.out_summary);
        write_summary_file(summary, cfg, result);
        summary.commit();
    }
    if (trace) trace->commit();
    if (plot) plot->commit();
    return result;
}

// Parallel mode: one oracle pass records the ground truth, then each worker
// re-streams the source through its share of the estimators, buffering
// sampled columns. Values, ordering and formatting match the lockstep path
// exactly, so the output files are byte-identical.
run_result run_parallel(const experiment_config& cfg, const resolved_source& src,
                        std::vector<instance>& instances) {
    std::vector<double> datums;
    std::vector<double> truths;
    exact_oracle oracle;
    std::uint64_t t = 0;
    {
        auto cursor = open_source(src);
        double d;
        while (cursor->next(d)) {
            ++t;
            oracle.observe(d);
            if (t % cfg.stride == 0) {
                datums.push_back(d);
                truths.push_back(oracle.quantile(cfg.q));
            }
        }
    }
    if (t == 0) {
        throw config_error("stream source yielded no data");
    }
    const std::uint64_t length = t;
    const std::uint64_t rows = datums.size();
    const std::uint64_t warm = cfg.warmup_skip.value_or(default_warmup(instances));

    std::vector<column_state> columns(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) columns[i].inst = &instances[i];

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(cfg.threads, instances.size()));
    const std::size_t chunk = (instances.size() + workers - 1) / workers;

    auto run_chunk = [&](std::size_t begin, std::size_t end) {
        auto cursor = open_source(src);
        std::uint64_t step = 0;
        std::uint64_t row = 0;
        double d;
        while (cursor->next(d)) {
            ++step;
            for (std::size_t i = begin; i < end; ++i) {
                columns[i].inst->est->observe(d);
            }
            if (step % cfg.stride != 0) continue;
            for (std::size_t i = begin; i < end; ++i) {
                const double est = sample_estimate(*columns[i].inst, cfg.q);
                columns[i].estimates.push_back(est);
                if (step > warm) {
                    columns[i].acc.add(truths[row], est);
                }
            }
            ++row;
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(instances.size(), begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run_chunk, begin, end);
    }
    for (auto& th : pool) th.join();

    run_result result = assemble_result(cfg, instances, columns, length, rows, warm);

    std::vector<double> estimates(instances.size());
    auto emit_rows = [&](std::ostream& out, bool csv) {
        for (std::uint64_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < instances.size(); ++i) {
                estimates[i] = columns[i].estimates[r];
            }
            write_row(out, (r + 1) * cfg.stride, datums[r], truths[r], estimates, csv);
        }
    };
    if (!cfg.out_trace.empty()) {
        atomic_file trace(cfg.out_trace);
        write_header(trace.stream(), instances, /*csv=*/true);
        emit_rows(trace.stream(), /*csv=*/true);
        trace.commit();
    }
    if (!cfg.out_plot.empty()) {
        atomic_file plot(cfg.out_plot);
        write_header(plot.stream(), instances, /*csv=*/false);
        emit_rows(plot.stream(), /*csv=*/false);
        plot.commit();
    }
    if (!cfg.out_summary.empty()) {
        atomic_file summary(cfg.out_summary);
        write_summary_file(summary, cfg, result);
        summary.commit();
    }
    return result;
}

} // namespace

void experiment_config::validate() const {
    if (!(q > 0.0) || !(q <= 1.0)) {
        throw config_error("q must be in (0, 1], got " + std::to_string(q));
    }
    if (bins.empty()) {
        throw config_error("bins list must not be empty");
    }
    for (const std::size_t b : bins) {
        if (b < 2) {
            throw config_error("bin budgets must be at least 2, got " + std::to_string(b));
        }
    }
    for (std::size_t i = 0; i < bins.size(); ++i) {
        for (std::size_t j = i + 1; j < bins.size(); ++j) {
            if (bins[i] == bins[j]) {
                throw config_error("duplicate bin budget " + std::to_string(bins[i]));
            }
        }
    }
    if (estimators.empty()) {
        throw config_error("estimator list must not be empty");
    }
    for (const auto& kind : estimators) {
        const auto& known = known_estimators();
        if (std::find(known.begin(), known.end(), kind) == known.end()) {
            std::string names;
            for (const auto& k : known) {
                if (!names.empty()) names += ", ";
                names += k;
            }
            throw config_error("unknown estimator '" + kind + "' (available: " + names + ")");
        }
    }
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        for (std::size_t j = i + 1; j < estimators.size(); ++j) {
            if (estimators[i] == estimators[j]) {
                throw config_error("estimator '" + estimators[i] + "' listed twice");
            }
        }
    }
    if (stride == 0) {
        throw config_error("stride must be at least 1");
    }
    if (threads == 0) {
        throw config_error("threads must be at least 1");
    }
    if (stream) {
        stream->validate();
    }
}

experiment_config load_config_file(const std::string& path) {
    experiment_config cfg;
    merge_config_file(cfg, path);
    return cfg;
}

void merge_config_file(experiment_config& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open config " + path);
    }
    stream_spec inline_spec;
    bool saw_stream_parts = false;
    bool saw_length = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto tokens = detail::split_ws(line);
        if (tokens.empty()) continue;
        try {
            if (tokens[0] == "segment") {
                inline_spec.segments.push_back(
                    parse_segment_line(line.substr(line.find("segment") + 7)));
                saw_stream_parts = true;
                continue;
            }
            if (tokens[0] == "spike") {
                inline_spec.spikes.push_back(parse_spike_line(line.substr(line.find("spike") + 5)));
                saw_stream_parts = true;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw config_error("expected 'key = value', 'segment ...' or 'spike ...'");
            }
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw config_error("expected 'key = value'");
            }

            auto as_u64 = [&](const char* what) {
                std::uint64_t v;
                if (!detail::parse_u64_str(value, v)) {
                    throw config_error(std::string("bad integer '") + value + "' for " + what);
                }
                return v;
            };

            if (key == "q") {
                double v;
                if (!detail::parse_double_str(value, v)) {
                    throw config_error("bad number '" + value + "' for q");
                }
                cfg.q = v;
            } else if (key == "bins") {
                const auto pieces = detail::split_list(value, ',');
                if (pieces.empty()) {
                    throw config_error("bad bins list '" + value + "'");
                }
                cfg.bins.clear();
                for (const auto& piece : pieces) {
                    std::uint64_t v;
                    if (!detail::parse_u64_str(piece, v)) {
                        throw config_error("bad bin count '" + piece + "'");
                    }
                    cfg.bins.push_back(static_cast<std::size_t>(v));
                }
            } else if (key == "estimators") {
                const auto pieces = detail::split_list(value, ',');
                if (pieces.empty()) {
                    throw config_error("bad estimator list '" + value + "'");
                }
                cfg.estimators = pieces;
            } else if (key == "source") {
                cfg.source = value;
            } else if (key == "seed") {
                cfg.seed = as_u64("seed");
            } else if (key == "stride") {
                cfg.stride = as_u64("stride");
            } else if (key == "warmup_skip") {
                cfg.warmup_skip = as_u64("warmup_skip");
            } else if (key == "out_trace") {
                cfg.out_trace = value;
            } else if (key == "out_summary") {
                cfg.out_summary = value;
            } else if (key == "out_plot") {
                cfg.out_plot = value;
            } else if (key == "threads") {
                cfg.threads = static_cast<unsigned>(as_u64("threads"));
            } else if (key == "length") {
                inline_spec.length = as_u64("length");
                saw_length = true;
                saw_stream_parts = true;
            } else {
                throw config_error("unknown key '" + key + "'");
            }
        } catch (const config_error& e) {
            throw parse_error(path, lineno, e.what());
        }
    }

    if (saw_stream_parts) {
        if (!saw_length) {
            throw parse_error(path, lineno, "inline stream needs 'length = ...'");
        }
        if (!cfg.source.empty()) {
            throw parse_error(path, lineno, "config sets both source= and an inline stream");
        }
        cfg.stream = std::move(inline_spec);
    }
}

run_result run_experiment(const experiment_config& config) {
    config.validate();
    const resolved_source src = resolve_source(config);
    std::vector<instance> instances = build_instances(config, src.seed_base);
    if (config.threads > 1 && instances.size() > 1) {
        return run_parallel(config, src, instances);
    }
    return run_lockstep(config, src, instances);
}

std::vector<double> ingest_file(const std::string& path) {
    file_source source(path);
    std::vector<double> out;
    double v;
    while (source.next(v)) {
        out.push_back(v);
    }
    return out;
}

void write_values_file(const std::string& path, const stream_spec& spec) {
    stream_cursor cursor(spec);
    atomic_file file(path);
    while (!cursor.done()) {
        file.stream() << format_double(cursor.next()) << '\n';
    }
    file.commit();
}

std::string render_summary(const run_result& result) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s %8s %12s %14s %10s %11s %10s\n", "estimator", "bins",
                  "mre", "max_abs_err", "scored", "zero-truth", "not-ready");
    out << buf;
    for (const auto& row : result.rows) {
        const double mre = row.errors.mean_relative_error;
        char mre_text[32];
        if (std::isnan(mre)) {
            std::snprintf(mre_text, sizeof mre_text, "n/a");
        } else {
            std::snprintf(mre_text, sizeof mre_text, "%.4g%%", mre * 100.0);
        }
        std::snprintf(buf, sizeof buf, "%-20s %8zu %12s %14.6g %10zu %11zu %10zu\n",
                      row.label.c_str(), row.bins, mre_text, row.errors.max_absolute_error,
                      row.errors.scored, row.errors.zero_truth_excluded,
                      row.errors.not_ready_excluded);
        out << buf;
    }
    return out.str();
}

} // namespace streamq

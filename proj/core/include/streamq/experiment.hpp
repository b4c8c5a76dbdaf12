#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamq/metrics.hpp"
#include "streamq/streamgen.hpp"

namespace streamq {

/// Everything one benchmark run needs. Built from a config file, from CLI
/// flags, or directly in code; CLI flags override file values field by
/// field.
struct experiment_config {
    /// Quantile level under test, in (0, 1].
    double q = 0.5;
    /// Scalar budgets to instantiate per budgeted estimator.
    std::vector<std::size_t> bins = {500};
    /// Estimators to run: aligned, aligned-width, interpolated, p2,
    /// reservoir, equispaced (any order, no repeats).
    std::vector<std::string> estimators = {"aligned", "interpolated", "p2", "reservoir",
                                           "equispaced"};
    /// Preset name or path to a one-value-per-line file; unused when
    /// `stream` is set.
    std::string source;
    /// Inline synthetic stream (takes precedence over `source`).
    std::optional<stream_spec> stream;
    /// Single user-visible seed: it reseeds a synthetic source and derives
    /// estimator-internal randomness. Unset keeps a preset's built-in seed.
    std::optional<std::uint64_t> seed;
    /// Evaluate estimates against the oracle every `stride` observations.
    std::uint64_t stride = 1;
    /// Observations dropped from scoring at the head of the stream;
    /// defaults to the largest warm-up among the configured estimators.
    std::optional<std::uint64_t> warmup_skip;
    std::string out_trace;   ///< CSV of per-step estimates (optional)
    std::string out_summary; ///< CSV of per-estimator error summaries (optional)
    std::string out_plot;    ///< gnuplot-ready .dat mirror of the trace (optional)
    /// Worker threads; above 1 each estimator re-streams the source
    /// independently, buffering its sampled column, with outputs
    /// byte-identical to the single-threaded run.
    unsigned threads = 1;

    /// Structural checks that need no source access; throws config_error.
    void validate() const;
};

/// Parse a line-oriented `key = value` config, which may inline a stream
/// spec through length / segment / spike lines. Unknown keys are errors.
experiment_config load_config_file(const std::string& path);

/// Same parse, but only the keys present in the file touch `cfg`; lets
/// callers layer defaults, file and command-line flags in that order.
void merge_config_file(experiment_config& cfg, const std::string& path);

struct summary_row {
    std::string label;    ///< trace column name, e.g. "aligned_500"
    std::string kind;     ///< estimator family, e.g. "aligned"
    std::size_t bins = 0; ///< scalar budget this instance ran with
    error_summary errors;
};

struct run_result {
    std::uint64_t stream_length = 0;
    std::uint64_t trace_rows = 0;
    std::uint64_t warmup_skip = 0; ///< observations excluded from scoring
    double q = 0.0;
    std::vector<summary_row> rows; ///< in column order
};

/// Stream the configured source once through every configured estimator in
/// lockstep with an exact oracle, write the requested outputs atomically
/// (complete files or nothing), and return the error summaries.
run_result run_experiment(const experiment_config& config);

/// Load a one-value-per-line file ('#' comments and blank lines allowed).
/// Meant for tests and small inputs; run_experiment itself streams files
/// without materializing them.
std::vector<double> ingest_file(const std::string& path);

/// Materialize a synthetic stream to a value file (atomically).
void write_values_file(const std::string& path, const stream_spec& spec);

/// Fixed-width human-readable table of a finished run.
std::string render_summary(const run_result& result);

} // namespace streamq

// streamq: run bounded-memory quantile estimators over a stream, compare
// them against an exact oracle, and write traces / summaries. See --help
// of each subcommand; exit codes are 0 success, 1 usage, 2 configuration,
// 3 file system, 4 malformed file content, 5 internal.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "streamq/errors.hpp"
#include "streamq/experiment.hpp"
#include "streamq/streamgen.hpp"

namespace {

// One flag set shared by `run` and `sweep`; values only override the config
// file when the user actually passed them.
struct run_flags {
    std::string config;
    double q = 0.0;
    std::vector<std::size_t> bins;
    std::vector<std::string> estimators;
    std::string source;
    std::uint64_t seed = 0;
    std::uint64_t stride = 0;
    std::uint64_t warmup_skip = 0;
    std::string out_trace;
    std::string out_summary;
    std::string out_plot;
    unsigned threads = 0;

    CLI::Option* q_opt = nullptr;
    CLI::Option* bins_opt = nullptr;
    CLI::Option* estimators_opt = nullptr;
    CLI::Option* source_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* stride_opt = nullptr;
    CLI::Option* warmup_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

void add_run_flags(CLI::App& cmd, run_flags& f) {
    cmd.add_option("--config", f.config, "experiment config file; flags override its values")
        ->check(CLI::ExistingFile);
    f.q_opt = cmd.add_option("--q", f.q, "quantile level in (0, 1]");
    f.bins_opt = cmd.add_option("--bins", f.bins, "bin/sample budgets, comma separated")
                     ->delimiter(',');
    f.estimators_opt = cmd.add_option("--estimators", f.estimators,
                                      "aligned, aligned-width, interpolated, p2, reservoir, "
                                      "equispaced (comma separated)")
                           ->delimiter(',');
    f.source_opt = cmd.add_option("--source", f.source, "preset stream name or value file path");
    f.seed_opt = cmd.add_option("--seed", f.seed,
                                "seed for the synthetic source and estimator randomness");
    f.stride_opt = cmd.add_option("--stride", f.stride, "evaluate every Nth observation");
    f.warmup_opt = cmd.add_option("--warmup-skip", f.warmup_skip,
                                  "observations excluded from scoring (default: largest warm-up)");
    cmd.add_option("--out-trace", f.out_trace, "write the per-step estimate trace CSV here");
    cmd.add_option("--out-summary", f.out_summary, "write the per-estimator summary CSV here");
    cmd.add_option("--out-plot", f.out_plot, "write a gnuplot-ready copy of the trace here");
    f.threads_opt = cmd.add_option("--threads", f.threads, "worker threads (default 1)");
}

streamq::experiment_config build_config(const run_flags& f, bool sweep) {
    streamq::experiment_config cfg;
    if (sweep) {
        cfg.bins = {500, 100, 50, 25, 12};
    }
    if (!f.config.empty()) {
        streamq::merge_config_file(cfg, f.config);
    }
    if (f.q_opt->count()) cfg.q = f.q;
    if (f.bins_opt->count()) cfg.bins = f.bins;
    if (f.estimators_opt->count()) cfg.estimators = f.estimators;
    if (f.source_opt->count()) {
        cfg.source = f.source;
        cfg.stream.reset(); // an explicit source replaces any inline stream
    }
    if (f.seed_opt->count()) cfg.seed = f.seed;
    if (f.stride_opt->count()) cfg.stride = f.stride;
    if (f.warmup_opt->count()) cfg.warmup_skip = f.warmup_skip;
    if (!f.out_trace.empty()) cfg.out_trace = f.out_trace;
    if (!f.out_summary.empty()) cfg.out_summary = f.out_summary;
    if (!f.out_plot.empty()) cfg.out_plot = f.out_plot;
    if (f.threads_opt->count()) cfg.threads = f.threads;
    return cfg;
}

int do_run(const run_flags& flags, bool sweep) {
    const streamq::experiment_config cfg = build_config(flags, sweep);
    const streamq::run_result result = streamq::run_experiment(cfg);
    std::cout << "stream length " << result.stream_length << ", " << result.trace_rows
              << " evaluations at q = " << result.q << ", first " << result.warmup_skip
              << " observations unscored\n\n";
    std::cout << streamq::render_summary(result);
    if (!cfg.out_trace.empty()) std::cout << "\ntrace   -> " << cfg.out_trace << '\n';
    if (!cfg.out_summary.empty()) std::cout << "summary -> " << cfg.out_summary << '\n';
    if (!cfg.out_plot.empty()) std::cout << "plot    -> " << cfg.out_plot << '\n';
    return 0;
}

int do_gen(const std::string& source, const std::string& config, const std::string& out,
           const std::optional<std::uint64_t>& seed) {
    streamq::stream_spec spec;
    if (!config.empty()) {
        std::ifstream in(config);
        if (!in) {
            throw streamq::io_error("cannot open stream spec " + config);
        }
        std::ostringstream text;
        text << in.rdbuf();
        spec = streamq::parse_stream_spec(text.str(), config);
    } else if (!source.empty()) {
        spec = streamq::preset_stream(source);
    } else {
        throw streamq::config_error("gen needs --source <preset> or --config <spec file>");
    }
    if (seed) {
        spec.seed = *seed;
    }
    streamq::write_values_file(out, spec);
    std::cout << "wrote " << spec.length << " values to " << out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bounded-memory streaming quantile estimators with an exact-oracle benchmark"};
    app.require_subcommand(1);

    run_flags run_f;
    CLI::App* run_cmd =
        app.add_subcommand("run", "stream a source through the estimators and score them");
    add_run_flags(*run_cmd, run_f);

    run_flags sweep_f;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "like run, but defaults to the memory-budget ladder 500,100,50,25,12");
    add_run_flags(*sweep_cmd, sweep_f);

    std::string gen_source;
    std::string gen_config;
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    CLI::App* gen_cmd = app.add_subcommand("gen", "materialize a synthetic stream to a value file");
    gen_cmd->add_option("--source", gen_source, "preset stream name");
    gen_cmd->add_option("--config", gen_config, "stream spec file")->check(CLI::ExistingFile);
    CLI::Option* gen_out_opt =
        gen_cmd->add_option("--out", gen_out, "output value file")->required();
    CLI::Option* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "override the spec seed");
    (void)gen_out_opt;

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(run_f, /*sweep=*/false);
        if (sweep_cmd->parsed()) return do_run(sweep_f, /*sweep=*/true);
        if (gen_cmd->parsed()) {
            std::optional<std::uint64_t> seed;
            if (gen_seed_opt->count()) seed = gen_seed;
            return do_gen(gen_source, gen_config, gen_out, seed);
        }
    } catch (const streamq::parse_error& e) {
        std::cerr << "error (malformed file): " << e.what() << '\n';
        return 4;
    } catch (const streamq::io_error& e) {
        std::cerr << "error (file system): " << e.what() << '\n';
        return 3;
    } catch (const streamq::config_error& e) {
        std::cerr << "error (configuration): " << e.what() << '\n';
        return 2;
    } catch (const streamq::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error (internal): " << e.what() << '\n';
        return 5;
    }
    return 0;
}

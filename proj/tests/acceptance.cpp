// Acceptance gate for the library: every check below encodes a promised
// behaviour end to end, prints one PASS/FAIL line, and the binary exits
// nonzero if anything failed. Tolerances and pinned values are deliberate:
// the runs are deterministic, so a drift in any of them is a real change.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "streamq/data_aligned.hpp"
#include "streamq/equispaced.hpp"
#include "streamq/experiment.hpp"
#include "streamq/format.hpp"
#include "streamq/interpolated.hpp"
#include "streamq/metrics.hpp"
#include "streamq/oracle.hpp"
#include "streamq/p2.hpp"
#include "streamq/reservoir.hpp"
#include "streamq/rng.hpp"
#include "streamq/streamgen.hpp"

using namespace streamq;
namespace fs = std::filesystem;

namespace {

struct criterion_result {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// 1. While the data-aligned histogram is within budget it is lossless: at
//    every rank level its estimate is bit-for-bit the exact order statistic.
//    Two regimes keep the arithmetic integral: distinct values arriving as
//    running extremes, and duplicate repetitions of already-seen boundaries.
//    Lengths are powers of two so the rank levels are exact in binary.
criterion_result check_within_budget_exactness() {
    std::mt19937_64 gen(0xface5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t checks = 0;

    // Regime A: distinct values, each a new minimum or maximum on arrival.
    for (const std::size_t len : {std::size_t{8}, std::size_t{16}, std::size_t{64}}) {
        data_aligned_estimator est(64);
        std::vector<double> values;
        double lo = 10.0 * std::exp(u(gen));
        double hi = lo;
        est.observe(lo);
        values.push_back(lo);
        for (std::size_t i = 1; i < len; ++i) {
            const double gap = (0.1 + u(gen)) * (1.0 + (hi - lo));
            const bool below = (gen() & 1) != 0;
            const double v = below ? lo - gap : hi + gap;
            (below ? lo : hi) = v;
            est.observe(v);
            values.push_back(v);
            const std::size_t t = i + 1;
            if ((t & (t - 1)) != 0) continue; // rank levels exact only at powers of two
            for (std::size_t k = 1; k <= t; ++k) {
                const double q = static_cast<double>(k) / static_cast<double>(t);
                const double want = exact_quantile(values, q);
                const double got = est.query(q);
                ++checks;
                if (got != want) {
                    std::ostringstream ss;
                    ss << "distinct regime: len " << t << " rank " << k << ": got "
                       << format_double(got) << ", exact " << format_double(want);
                    return {false, ss.str()};
                }
            }
        }
    }

    // Regime B: 48 ascending distinct values, then 208 repeats of them; at
    // each distinct value's cumulative rank the estimate is that value.
    {
        data_aligned_estimator est(64);
        std::vector<double> distinct;
        std::vector<std::uint64_t> mult(48, 1);
        double v = 5.0;
        for (std::size_t j = 0; j < 48; ++j) {
            v += 0.3 + u(gen);
            distinct.push_back(v);
            est.observe(v);
        }
        std::vector<double> all = distinct;
        for (std::size_t i = 0; i < 208; ++i) {
            const std::size_t j = static_cast<std::size_t>(gen() % 48);
            est.observe(distinct[j]);
            ++mult[j];
            all.push_back(distinct[j]);
        }
        if (est.state().bin_count() != 48 || est.state().total != 256.0) {
            return {false, "duplicate regime: expected 48 bins holding 256 observations"};
        }
        std::uint64_t cum = 0;
        for (std::size_t j = 0; j < 48; ++j) {
            cum += mult[j];
            const double q = static_cast<double>(cum) / 256.0;
            const double got = est.query(q);
            const double want = exact_quantile(all, q);
            ++checks;
            if (got != distinct[j] || want != distinct[j]) {
                std::ostringstream ss;
                ss << "duplicate regime: value " << j << ": got " << format_double(got)
                   << ", exact " << format_double(want);
                return {false, ss.str()};
            }
        }
    }

    std::ostringstream ss;
    ss << checks << " rank levels bit-identical to the exact oracle across both regimes";
    return {true, ss.str()};
}

// ---------------------------------------------------------------------------
// 2. Every merge the estimator performs is the entropy-optimal one: an
//    independent long double scan over whole-histogram entropies after each
//    candidate merge must agree (up to rounding-range ties), and composing
//    insert/choose/merge by hand must reproduce the estimator state exactly.
criterion_result check_merge_choice_is_entropy_optimal() {
    std::mt19937_64 gen(20240817);
    std::lognormal_distribution<double> logn(2.0, 0.7);
    const std::size_t budget = 24;

    histogram h;
    data_aligned_estimator est(budget);
    std::uint64_t merges = 0;
    std::uint64_t near_ties = 0;

    const auto entropy_after = [](const std::vector<double>& counts, std::size_t k) {
        long double sum = 0.0L;
        for (const double c : counts) sum += c;
        long double hs = 0.0L;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            long double c = counts[j];
            if (j == k) c += counts[j + 1];
            if (j == k + 1) continue;
            if (c > 0.0L) {
                const long double p = c / sum;
                hs -= p * std::log(p);
            }
        }
        return hs;
    };

    for (std::uint64_t i = 0; i < 10024; ++i) {
        const double d = logn(gen);
        insert_temporary_bin(h, d);
        if (h.bin_count() > budget) {
            const std::size_t k = choose_merge(h.counts);
            long double best = -std::numeric_limits<long double>::infinity();
            std::size_t argmax = 0;
            for (std::size_t c = 0; c + 1 < h.counts.size(); ++c) {
                const long double hs = entropy_after(h.counts, c);
                if (hs > best) {
                    best = hs;
                    argmax = c;
                }
            }
            const long double chosen = entropy_after(h.counts, k);
            if (k != argmax) {
                ++near_ties;
                if (best - chosen > 1e-12L) {
                    std::ostringstream ss;
                    ss << "merge " << merges << ": chose pair " << k << " but pair " << argmax
                       << " keeps " << static_cast<double>(best - chosen) << " nats more";
                    return {false, ss.str()};
                }
            }
            merge_bins(h, k);
            ++merges;
        }
        est.observe(d);
        if (h.boundaries != est.state().boundaries || h.counts != est.state().counts) {
            return {false, "estimator state diverged from the hand-composed update at step " +
                               std::to_string(i + 1)};
        }
    }

    if (merges < 10000) {
        return {false, "only " + std::to_string(merges) + " merges exercised"};
    }
    std::ostringstream ss;
    ss << merges << " merges entropy-optimal (" << near_ties
       << " rounding-range ties), estimator state bit-identical throughout";
    return {true, ss.str()};
}

// ---------------------------------------------------------------------------
// 3. State stays bounded and structurally sound along a 100k non-stationary
//    stream with bursts: bin budgets are never exceeded, mass equals the
//    observation count, boundaries stay strictly increasing, and the
//    interpolated histogram keeps its bins equiprobable.
criterion_result check_bounded_state_over_long_streams() {
    stream_spec spec;
    spec.length = 100000;
    spec.seed = 31337;
    spec.segments = {uniform_segment(40000, 5.0, 15.0), lognormal_segment(30000, 10.0, 0.8),
                     uniform_segment(30000, 50.0, 60.0)};
    spec.spikes = {{9000, 8.0}, {47000, 20.0}, {81000, 3.0}};

    data_aligned_estimator aligned(48);
    interpolated_estimator interp(32);
    std::size_t max_aligned_scalars = 0;
    std::size_t max_interp_scalars = 0;

    stream_cursor cur(spec);
    std::uint64_t t = 0;
    while (!cur.done()) {
        const double d = cur.next();
        aligned.observe(d);
        interp.observe(d);
        ++t;
        max_aligned_scalars = std::max(max_aligned_scalars, aligned.state_scalars());
        max_interp_scalars = std::max(max_interp_scalars, interp.state_scalars());
        if (t % 1000 != 0) continue;

        const histogram& ha = aligned.state();
        ha.validate();
        if (ha.bin_count() > 48) {
            return {false, "aligned histogram exceeded its bin budget at step " + std::to_string(t)};
        }
        if (ha.total != static_cast<double>(t)) {
            return {false, "aligned total drifted from the observation count at step " +
                               std::to_string(t)};
        }
        double mass = 0.0;
        for (const double c : ha.counts) mass += c;
        if (std::abs(mass - ha.total) > 1e-9 * ha.total) {
            return {false, "aligned mass leaked at step " + std::to_string(t)};
        }

        const histogram& hi = interp.state();
        hi.validate();
        if (hi.bin_count() > 32) {
            return {false, "interpolated histogram exceeded its bin budget"};
        }
        if (std::abs(hi.total - static_cast<double>(t)) > 1e-9 * static_cast<double>(t)) {
            return {false, "interpolated total drifted at step " + std::to_string(t)};
        }
        const double share = hi.total / static_cast<double>(hi.bin_count());
        for (const double c : hi.counts) {
            if (std::abs(c - share) > 1e-9 * share) {
                return {false, "interpolated bins lost equiprobability at step " +
                                   std::to_string(t)};
            }
        }
    }

    if (max_aligned_scalars > 2 * 48 + 2 || max_interp_scalars > 2 * 32 + 2) {
        std::ostringstream ss;
        ss << "state grew beyond its budget: aligned " << max_aligned_scalars << ", interpolated "
           << max_interp_scalars << " scalars";
        return {false, ss.str()};
    }
    std::ostringstream ss;
    ss << "100000 steps with bursts: budgets held, peak state " << max_aligned_scalars << " / "
       << max_interp_scalars << " scalars";
    return {true, ss.str()};
}

// ---------------------------------------------------------------------------
// 4. The reservoir admits the i-th observation with probability exactly
//    capacity / i. Over 20000 independent streams, the per-position admission
//    counts at positions 11..50 (capacity 10) must pass a chi-squared
//    goodness-of-fit test at the 1% level (40 degrees of freedom).
criterion_result check_reservoir_inclusion_uniformity() {
    const std::size_t capacity = 10;
    const int first = 11;
    const int last = 50;
    const int trials = 20000;
    std::vector<int> admitted(last + 1, 0);

    for (int t = 0; t < trials; ++t) {
        reservoir_estimator est(capacity, static_cast<std::uint64_t>(t) + 1);
        for (int i = 1; i <= last; ++i) {
            const double v = static_cast<double>(i);
            est.observe(v);
            if (i >= first) {
                const auto& s = est.sample();
                if (std::find(s.begin(), s.end(), v) != s.end()) {
                    ++admitted[static_cast<std::size_t>(i)];
                }
            }
        }
    }

    double chi2 = 0.0;
    for (int i = first; i <= last; ++i) {
        const double p = static_cast<double>(capacity) / i;
        const double expected = trials * p;
        const double dev = admitted[static_cast<std::size_t>(i)] - expected;
        chi2 += dev * dev / (expected * (1.0 - p));
    }

    const double critical = 63.6907; // chi-squared, 40 dof, upper 1%
    std::ostringstream ss;
    ss << "chi-squared " << chi2 << " over 40 positions (1% critical " << critical << ")";
    return {chi2 < critical, ss.str()};
}

// ---------------------------------------------------------------------------
// 5. On the bundled non-stationary presets, the data-aligned estimator beats
//    every baseline at the tail levels the presets were built to stress, and
//    each mean relative error matches its pinned value (the runs are fully
//    deterministic; drift means behaviour changed).
criterion_result check_preset_accuracy_ordering() {
    struct pinned_run {
        const char* source;
        double q;
        struct entry {
            const char* kind;
            double mre;
        } entries[5];
    };
    const pinned_run runs[] = {
        {"spiky",
         0.95,
         {{"aligned", 0.010726719733287385},
          {"interpolated", 0.022938670315421437},
          {"p2", 0.17640045481965247},
          {"reservoir", 0.052833653529446745},
          {"equispaced", 7.388277738047005}}},
        {"shifting",
         0.99,
         {{"aligned", 0.003990774073720823},
          {"interpolated", 0.06133506411593776},
          {"p2", 2.236926193854326},
          {"reservoir", 0.0945281324560014},
          {"equispaced", 0.059304925150119335}}},
    };

    std::ostringstream detail;
    for (const auto& run : runs) {
        experiment_config cfg;
        cfg.source = run.source;
        cfg.q = run.q;
        cfg.bins = {500};
        cfg.stride = 1;
        const run_result result = run_experiment(cfg);

        const auto mre_of = [&](const std::string& kind) {
            for (const auto& row : result.rows) {
                if (row.kind == kind) return row.errors.mean_relative_error;
            }
            return std::numeric_limits<double>::quiet_NaN();
        };

        const double aligned = mre_of("aligned");
        detail << run.source << " q=" << format_double(run.q) << ":";
        for (const auto& e : run.entries) {
            const double got = mre_of(e.kind);
            detail << ' ' << e.kind << '=' << format_double(got);
            if (!(std::abs(got - e.mre) <= 1e-3 * e.mre)) {
                return {false, std::string("pinned value drifted on ") + run.source + ": " +
                                   e.kind + " = " + format_double(got) + ", pinned " +
                                   format_double(e.mre)};
            }
            if (std::string(e.kind) != "aligned" && !(aligned < got)) {
                return {false, std::string(run.source) + ": aligned (" + format_double(aligned) +
                                   ") did not beat " + e.kind + " (" + format_double(got) + ")"};
            }
        }
        detail << "; ";
    }
    return {true, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Shrinking the bin budget degrades accuracy gracefully: along the budget
//    ladder 500 -> 100 -> 50 -> 25 -> 12 on the drifting heavy-tail preset,
//    each halving-scale step costs at most a factor two in mean relative
//    error, and the full-budget results match their pinned values.
criterion_result check_budget_ladder_degrades_gracefully() {
    const auto start = std::chrono::steady_clock::now();

    experiment_config cfg;
    cfg.source = "heavy-tail-drift";
    cfg.q = 0.99;
    cfg.bins = {500, 100, 50, 25, 12};
    cfg.estimators = {"aligned"};
    cfg.stride = 1;
    const run_result result = run_experiment(cfg);

    if (result.warmup_skip != 500) {
        return {false, "expected the default warm-up skip of 500, got " +
                           std::to_string(result.warmup_skip)};
    }

    const double pinned_mre = 0.0486535680433343;
    const double pinned_max_abs = 12.633253000099558;
    const double full_mre = result.rows[0].errors.mean_relative_error;
    const double full_max = result.rows[0].errors.max_absolute_error;
    if (!(std::abs(full_mre - pinned_mre) <= 1e-3 * pinned_mre)) {
        return {false, "pinned 500-bin mre drifted: got " + format_double(full_mre) +
                           ", pinned " + format_double(pinned_mre)};
    }
    if (!(std::abs(full_max - pinned_max_abs) <= 1e-3 * pinned_max_abs)) {
        return {false, "pinned 500-bin max abs error drifted: got " + format_double(full_max) +
                           ", pinned " + format_double(pinned_max_abs)};
    }

    std::ostringstream detail;
    detail << "q=0.99 mre by budget:";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const double mre = result.rows[i].errors.mean_relative_error;
        detail << ' ' << result.rows[i].label << '=' << format_double(mre);
        if (i > 0) {
            const double prev = result.rows[i - 1].errors.mean_relative_error;
            if (!(mre < 2.0 * prev)) {
                return {false, result.rows[i].label + " lost more than 2x accuracy over " +
                                   result.rows[i - 1].label + ": " + format_double(mre) + " vs " +
                                   format_double(prev)};
            }
        }
    }

    // The upper tail of this preset is pinned by a heavy point mass, so the
    // ladder above mostly gates determinism.  The median moves with the
    // drifting body, where the budget genuinely matters: rerun the ladder at
    // q = 0.5 and require that accuracy stays usable and degrades gently all
    // the way down to 12 bins.
    cfg.q = 0.5;
    const run_result median = run_experiment(cfg);
    detail << "; q=0.5:";
    for (std::size_t i = 0; i < median.rows.size(); ++i) {
        const double mre = median.rows[i].errors.mean_relative_error;
        detail << ' ' << median.rows[i].label << '=' << format_double(mre);
        if (!(mre < 0.05)) {
            return {false, median.rows[i].label + " median mre " + format_double(mre) +
                               " is not below 0.05"};
        }
        if (i > 0) {
            const double prev = median.rows[i - 1].errors.mean_relative_error;
            if (!(mre < 2.0 * prev)) {
                return {false, median.rows[i].label + " lost more than 2x median accuracy over " +
                                   median.rows[i - 1].label + ": " + format_double(mre) + " vs " +
                                   format_double(prev)};
            }
        }
    }
    const double median_fine = median.rows.front().errors.mean_relative_error;
    const double median_coarse = median.rows.back().errors.mean_relative_error;
    if (!(median_coarse < 2.5 * median_fine)) {
        return {false, "12-bin median mre " + format_double(median_coarse) +
                           " exceeds 2.5x the 500-bin mre " + format_double(median_fine)};
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (elapsed >= 120) {
        return {false, "budget ladder took " + std::to_string(elapsed) + "s, limit 120s"};
    }
    detail << " (" << elapsed << "s)";
    return {true, detail.str()};
}

// ---------------------------------------------------------------------------
// 7. Multi-threaded runs produce byte-identical trace, summary and plot
//    files, and repeating a run changes nothing.
criterion_result check_threaded_outputs_byte_identical() {
    std::random_device rd;
    const fs::path dir = fs::temp_directory_path() /
                         ("streamq_acceptance_" + std::to_string(rd()) + "_" +
                          std::to_string(rd()));
    fs::create_directories(dir);
    struct cleanup {
        fs::path p;
        ~cleanup() {
            std::error_code ec;
            fs::remove_all(p, ec);
        }
    } guard{dir};

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    experiment_config cfg;
    cfg.source = "spiky";
    cfg.seed = 424242;
    cfg.q = 0.9;
    cfg.bins = {32, 8};
    cfg.stride = 100;

    std::string trace[3];
    std::string summary[3];
    std::string plot[3];
    const unsigned thread_plan[3] = {1, 1, 3};
    for (int r = 0; r < 3; ++r) {
        cfg.threads = thread_plan[r];
        cfg.out_trace = (dir / ("trace" + std::to_string(r) + ".csv")).string();
        cfg.out_summary = (dir / ("summary" + std::to_string(r) + ".csv")).string();
        cfg.out_plot = (dir / ("plot" + std::to_string(r) + ".dat")).string();
        run_experiment(cfg);
        trace[r] = slurp(cfg.out_trace);
        summary[r] = slurp(cfg.out_summary);
        plot[r] = slurp(cfg.out_plot);
    }

    if (trace[0].empty() || trace[0] != trace[1] || trace[0] != trace[2]) {
        return {false, "trace files differ between runs"};
    }
    if (summary[0].empty() || summary[0] != summary[1] || summary[0] != summary[2]) {
        return {false, "summary files differ between runs"};
    }
    if (plot[0].empty() || plot[0] != plot[1] || plot[0] != plot[2]) {
        return {false, "plot files differ between runs"};
    }
    std::ostringstream ss;
    ss << "repeat and 3-thread runs byte-identical (" << trace[0].size() << "-byte trace)";
    return {true, ss.str()};
}

// ---------------------------------------------------------------------------
// 8. A million-observation stream through every estimator is deterministic
//    end to end: re-running yields the same estimates and the same state
//    footprint at every checkpoint.
criterion_result check_million_step_determinism() {
    stream_spec spec;
    spec.length = 1000000;
    spec.seed = 517;
    spec.segments = {lognormal_segment(400000, 12.0, 0.4), uniform_segment(300000, 2.0, 80.0),
                     lognormal_segment(300000, 30.0, 0.9)};
    spec.spikes = {{250000, 6.0}, {750000, 15.0}};
    const double q = 0.95;
    const std::size_t budget = 64;

    const auto run_once = [&](std::vector<double>& estimates, std::vector<std::size_t>& scalars) {
        data_aligned_estimator aligned(budget);
        interpolated_estimator interp(budget);
        p2_estimator p2(q);
        reservoir_estimator reservoir(budget, derive_seed(spec.seed, 0xae5e0000ULL ^ budget));
        equispaced_estimator equi(budget);
        quantile_estimator* ests[] = {&aligned, &interp, &p2, &reservoir, &equi};

        stream_cursor cur(spec);
        std::uint64_t t = 0;
        while (!cur.done()) {
            const double d = cur.next();
            for (auto* e : ests) e->observe(d);
            ++t;
            if (t % 10000 != 0) continue;
            for (auto* e : ests) {
                estimates.push_back(e->query(q));
                scalars.push_back(e->state_scalars());
            }
        }
    };

    std::vector<double> est_a;
    std::vector<std::size_t> scal_a;
    run_once(est_a, scal_a);
    std::vector<double> est_b;
    std::vector<std::size_t> scal_b;
    run_once(est_b, scal_b);

    if (est_a != est_b) {
        return {false, "estimates diverged between identical runs"};
    }
    if (scal_a != scal_b) {
        return {false, "state footprints diverged between identical runs"};
    }
    const std::size_t peak = *std::max_element(scal_a.begin(), scal_a.end());
    if (peak > 4 * budget + 4) {
        return {false, "state footprint grew with the stream: peak " + std::to_string(peak) +
                           " scalars"};
    }
    std::ostringstream ss;
    ss << est_a.size() << " checkpoints identical across reruns, peak state " << peak
       << " scalars";
    return {true, ss.str()};
}

} // namespace

int main() {
    struct item {
        const char* name;
        criterion_result (*fn)();
    };
    const item items[] = {
        {"within_budget_exactness", check_within_budget_exactness},
        {"merge_choice_is_entropy_optimal", check_merge_choice_is_entropy_optimal},
        {"bounded_state_over_long_streams", check_bounded_state_over_long_streams},
        {"reservoir_inclusion_uniformity", check_reservoir_inclusion_uniformity},
        {"preset_accuracy_ordering", check_preset_accuracy_ordering},
        {"budget_ladder_degrades_gracefully", check_budget_ladder_degrades_gracefully},
        {"threaded_outputs_byte_identical", check_threaded_outputs_byte_identical},
        {"million_step_determinism", check_million_step_determinism},
    };

    int failures = 0;
    for (const auto& [name, fn] : items) {
        criterion_result r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, std::string("unexpected exception: ") + e.what()};
        }
        std::printf("%s %s -- %s\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu acceptance criteria failed\n", failures,
                    std::size(items));
        return 1;
    }
    std::printf("all %zu acceptance criteria passed\n", std::size(items));
    return 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ladb/config.hpp"

namespace ladb {

// One scored cell of the benchmark grid. pairing_mse is NaN when the task has
// no ground-truth map; on a failed cell every metric is NaN and error holds
// the reason.
struct MetricReport {
    std::string task;
    std::string method;
    double paired_fraction = 0.0;
    std::uint64_t seed = 0;
    long n = 0;
    double sliced_w2 = 0.0;
    double mmd = 0.0;
    double pairing_mse = 0.0;
    double cycle_err = 0.0;
    bool failed = false;
    std::string error;

    // Throws std::invalid_argument unless (failed) or (sliced_w2, mmd,
    // cycle_err finite and non-negative; pairing_mse NaN or finite
    // non-negative; n >= 1).
    void validate() const;
};

// CSV with columns task,method,paired_fraction,seed,n,sliced_w2,mmd,
// pairing_mse,cycle_err,wall_ms. wall_ms is always 0 so a rerun is
// byte-identical; real timings live in the run log. Undefined or failed
// metrics print as nan.
std::string report_csv(const std::vector<MetricReport>& rows);

// Per-(task, method, fraction) mean and sample standard deviation over the
// seeds that produced a non-failed row. Rows where a metric is NaN for every
// contributing seed keep NaN.
struct AggregateRow {
    std::string task;
    std::string method;
    double paired_fraction = 0.0;
    int n_seeds = 0;
    double sliced_w2_mean = 0.0, sliced_w2_std = 0.0;
    double mmd_mean = 0.0, mmd_std = 0.0;
    double pairing_mse_mean = 0.0, pairing_mse_std = 0.0;
    double cycle_err_mean = 0.0, cycle_err_std = 0.0;
};

std::vector<AggregateRow> aggregate_report(const std::vector<MetricReport>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

struct BenchResult {
    std::vector<MetricReport> rows;
    std::vector<std::string> log;  // timing and error lines, one per cell
    int failed_cells = 0;
    int total_cells = 0;
};

// Runs one cell in isolation: regenerates the seed's data, trains what the
// method needs at the given fraction, translates cfg.bench.eval_n fresh
// source points, and scores them against a fresh reference draw of the
// target. Any exception becomes a failed report, never a throw.
MetricReport benchmark_cell(const ExperimentConfig& cfg, const std::string& method,
                            double fraction, std::uint64_t seed);

// Full seeds x methods x fractions cross-product in declaration order.
// Models that do not depend on the fraction (the source model, DDIB's target
// model) are trained once per seed; training is a pure function of its
// inputs, so the cached rows match isolated benchmark_cell runs exactly.
// Requires exactly one source domain; throws std::invalid_argument otherwise.
BenchResult benchmark_run(const ExperimentConfig& cfg);

}  // namespace ladb

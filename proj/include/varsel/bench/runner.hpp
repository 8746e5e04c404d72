#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varsel/bench/config.hpp"
#include "varsel/metrics.hpp"

namespace varsel::bench {

// One (cell, method, replicate) outcome.
struct RunRecord {
    Study study;
    Family family;
    int n = 0;
    double rho = 0.0;
    double sigma2 = 0.0;
    std::string method;
    int replicate = 0;
    ModelSpec selected;
    ReplicateMetrics metrics;
    double wall_ms = 0.0;
};

// Selection outcome of one method on one dataset; the method seed drives
// GA evolution and CV fold assignment.
ModelSpec select_with_method(const Dataset& data, const std::string& method,
                             const BenchConfig& config, std::uint64_t method_seed);

struct RunOptions {
    int workers = 0;                       // 0 = config value, then hardware
    bool resume = false;                   // reuse rows from a prior partial run
    const std::atomic<bool>* stop_flag = nullptr; // external interrupt (SIGINT)
    long interrupt_after_tasks = -1;       // stop early after N tasks (tests)
    std::function<void(long done, long total)> progress;
};

struct RunOutcome {
    std::filesystem::path dir;
    long tasks_total = 0;
    long tasks_done = 0;
    bool interrupted = false;
};

// Executes the full (cell, replicate) grid of a resolved config with a
// worker pool, one replicate per task, all methods of a task on the same
// dataset. Writes manifest.txt up front, streams finished rows to
// replicates.partial.csv, and on completion writes the canonical
// replicates.csv, summary.csv and timings.csv (summary.csv is exactly the
// aggregate of replicates.csv). Row order and content are deterministic
// given the manifest, independent of worker count. An interrupted run
// leaves the partial file plus a RESUME marker; rerunning with
// options.resume finishes the remaining tasks and produces the identical
// final replicates.csv.
RunOutcome run_benchmark(const BenchConfig& config, const RunOptions& options = {});

// In-memory variant used by the acceptance suite: runs the grid and
// returns records in canonical order without touching the filesystem.
std::vector<RunRecord> run_grid(const BenchConfig& config, int workers,
                                const std::function<void(long, long)>& progress = {});

// Canonical CSV serializations (fixed, documented headers).
std::string replicates_csv_header();
std::string summary_csv_header();
std::string record_csv_row(const RunRecord& r);
std::string summary_csv_row(const RunRecord& first_of_group, const MetricsSummary& s);

} // namespace varsel::bench

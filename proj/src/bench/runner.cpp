#include "varsel/bench/runner.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "varsel/io_util.hpp"
#include "varsel/lasso.hpp"

namespace varsel::bench {

namespace fs = std::filesystem;

namespace {

struct Cell {
    int n;
    double rho;
    double sigma2;
};

std::vector<Cell> enumerate_cells(const BenchConfig& cfg) {
    std::vector<Cell> cells;
    for (double s2 : cfg.sigma2_grid)
        for (double rho : cfg.rho_grid)
            for (int n : cfg.n_grid) cells.push_back({n, rho, s2});
    return cells;
}

int effective_workers(const BenchConfig& cfg, const RunOptions& opts) {
    int w = opts.workers > 0 ? opts.workers : cfg.workers;
    if (w <= 0) w = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, w);
}

std::string bool_str(bool b) { return b ? "1" : "0"; }

// Key identifying a task row independent of file order.
std::string partial_key(int n, double rho, double sigma2, int replicate) {
    return std::to_string(n) + "|" + format_double(rho) + "|" + format_double(sigma2) +
           "|" + std::to_string(replicate);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

constexpr const char* kPartialHeader =
    "study,family,n,rho,sigma2,method,replicate,selected,correct,recall,fdr,is_null,"
    "wall_ms";

std::string partial_csv_row(const RunRecord& r) {
    std::ostringstream out;
    out << study_name(r.study) << ',' << family_name(r.family) << ',' << r.n << ','
        << format_double(r.rho) << ',' << format_double(r.sigma2) << ',' << r.method
        << ',' << r.replicate << ',' << r.selected.to_bitstring() << ','
        << bool_str(r.metrics.correct) << ',' << format_double(r.metrics.recall) << ','
        << format_double(r.metrics.fdr) << ',' << bool_str(r.metrics.is_null) << ','
        << format_double(r.wall_ms);
    return out.str();
}

std::optional<RunRecord> parse_partial_row(const std::string& line, const BenchConfig& cfg) {
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 13) return std::nullopt;
    try {
        RunRecord r;
        r.study = study_from_name(f[0]);
        r.family = family_from_name(f[1]);
        r.n = static_cast<int>(parse_int(f[2]));
        r.rho = parse_double(f[3]);
        r.sigma2 = parse_double(f[4]);
        r.method = f[5];
        r.replicate = static_cast<int>(parse_int(f[6]));
        r.selected = ModelSpec::from_bitstring(f[7]);
        if (r.selected.width() != cfg.p) return std::nullopt;
        r.metrics = replicate_metrics(r.selected, cfg.true_support());
        // Sanity: stored metric fields must match the recomputation.
        if (bool_str(r.metrics.correct) != f[8]) return std::nullopt;
        r.wall_ms = parse_double(f[12]);
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

ModelSpec select_with_method(const Dataset& data, const std::string& method,
                             const BenchConfig& config, std::uint64_t method_seed) {
    if (method == "BIC" || method == "AIC") {
        const Criterion c = criterion_from_name(method);
        return exhaustive_search(data, c).best.spec;
    }
    if (method == "GA_BIC" || method == "GA_AIC") {
        GAConfig ga = config.ga;
        ga.seed = method_seed;
        const Criterion c = criterion_from_name(method.substr(3));
        return ga_search(data, c, ga).best.spec;
    }
    if (method == "Stepwise_BIC" || method == "Stepwise_AIC") {
        const Criterion c = criterion_from_name(method.substr(9));
        return stepwise_search(data, c).best.spec;
    }
    if (method == "LASSO_BIC" || method == "LASSO_AIC") {
        const Criterion c = criterion_from_name(method.substr(6));
        const LassoPath path = lasso_path(data, config.lasso_n_lambda);
        return lasso_select_ic(data, path, c).best.spec;
    }
    if (method == "LASSO_CV") {
        const LassoPath path = lasso_path(data, config.lasso_n_lambda);
        const CVResult cv = cv_select(data, path, config.cv_folds, method_seed);
        return path.supports[static_cast<std::size_t>(cv.lambda_min_index)];
    }
    throw Error("unknown method: " + method);
}

std::string replicates_csv_header() {
    return "study,family,n,rho,sigma2,method,replicate,selected,correct,recall,fdr,"
           "is_null";
}

std::string summary_csv_header() {
    return "study,family,n,rho,sigma2,method,n_replicates,cir,recall,fdr,fdr_pooled,"
           "n_null_selected";
}

std::string record_csv_row(const RunRecord& r) {
    std::ostringstream out;
    out << study_name(r.study) << ',' << family_name(r.family) << ',' << r.n << ','
        << format_double(r.rho) << ',' << format_double(r.sigma2) << ',' << r.method
        << ',' << r.replicate << ',' << r.selected.to_bitstring() << ','
        << bool_str(r.metrics.correct) << ',' << format_double(r.metrics.recall) << ','
        << format_double(r.metrics.fdr) << ',' << bool_str(r.metrics.is_null);
    return out.str();
}

std::string summary_csv_row(const RunRecord& g, const MetricsSummary& s) {
    std::ostringstream out;
    out << study_name(g.study) << ',' << family_name(g.family) << ',' << g.n << ','
        << format_double(g.rho) << ',' << format_double(g.sigma2) << ',' << g.method
        << ',' << s.n_replicates << ',' << format_double(s.cir) << ','
        << format_double(s.recall) << ',' << (s.fdr ? format_double(*s.fdr) : "NA")
        << ',' << (s.fdr_pooled ? format_double(*s.fdr_pooled) : "NA") << ','
        << s.n_null_selected;
    return out.str();
}

namespace {

// Runs one (cell, replicate) task: same dataset for every method.
std::vector<RunRecord> run_task(const BenchConfig& cfg, const Cell& cell, int replicate) {
    const SimSetting setting = cfg.cell_setting(cell.n, cell.rho, cell.sigma2, replicate);
    const Dataset data = gen_dataset(setting);
    const ModelSpec truth = cfg.true_support();

    std::vector<RunRecord> records;
    records.reserve(cfg.methods.size());
    for (const std::string& method : cfg.methods) {
        const std::uint64_t mseed =
            cfg.method_seed(cell.n, cell.rho, cell.sigma2, replicate, method);
        const auto t0 = std::chrono::steady_clock::now();
        const ModelSpec selected = select_with_method(data, method, cfg, mseed);
        const auto t1 = std::chrono::steady_clock::now();

        RunRecord r;
        r.study = cfg.study;
        r.family = cfg.family;
        r.n = cell.n;
        r.rho = cell.rho;
        r.sigma2 = cell.sigma2;
        r.method = method;
        r.replicate = replicate;
        r.selected = selected;
        r.metrics = replicate_metrics(selected, truth);
        r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        records.push_back(std::move(r));
    }
    return records;
}

// Core pool: fills `results` (indexed by task) for every task not already
// present, streaming each finished task through `on_done` under a lock.
// Returns false when stopped before completing all tasks.
bool run_pool(const BenchConfig& cfg, const std::vector<Cell>& cells, int workers,
              const RunOptions& opts,
              std::vector<std::optional<std::vector<RunRecord>>>& results,
              const std::function<void(long, const std::vector<RunRecord>&)>& on_done) {
    const long n_tasks = static_cast<long>(results.size());
    std::atomic<long> next{0};
    std::atomic<long> completed{0};
    std::atomic<bool> stop{false};
    std::mutex sink_mutex;
    std::exception_ptr first_error;

    long already_done = 0;
    for (const auto& r : results)
        if (r) ++already_done;
    completed = already_done;

    auto worker = [&]() {
        for (;;) {
            if (stop.load() || (opts.stop_flag && opts.stop_flag->load())) return;
            const long i = next.fetch_add(1);
            if (i >= n_tasks) return;
            if (results[static_cast<std::size_t>(i)]) continue; // resumed
            const int cell_index = static_cast<int>(i) / cfg.replicates;
            const int replicate = static_cast<int>(i) % cfg.replicates;
            try {
                std::vector<RunRecord> recs =
                    run_task(cfg, cells[static_cast<std::size_t>(cell_index)], replicate);
                std::lock_guard<std::mutex> lock(sink_mutex);
                if (on_done) on_done(i, recs);
                results[static_cast<std::size_t>(i)] = std::move(recs);
                const long done = ++completed;
                if (opts.progress) opts.progress(done, n_tasks);
                if (opts.interrupt_after_tasks >= 0 &&
                    done - already_done >= opts.interrupt_after_tasks)
                    stop = true;
            } catch (...) {
                std::lock_guard<std::mutex> lock(sink_mutex);
                if (!first_error) first_error = std::current_exception();
                stop = true;
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return completed.load() == n_tasks;
}

} // namespace

std::vector<RunRecord> run_grid(const BenchConfig& config, int workers,
                                const std::function<void(long, long)>& progress) {
    const BenchConfig cfg = config.resolved();
    const std::vector<Cell> cells = enumerate_cells(cfg);
    const long n_tasks = static_cast<long>(cells.size()) * cfg.replicates;
    std::vector<std::optional<std::vector<RunRecord>>> results(
        static_cast<std::size_t>(n_tasks));

    RunOptions opts;
    opts.workers = workers;
    opts.progress = progress;
    run_pool(cfg, cells, effective_workers(cfg, opts), opts, results, {});

    std::vector<RunRecord> flat;
    flat.reserve(static_cast<std::size_t>(n_tasks) * cfg.methods.size());
    for (auto& task : results)
        for (RunRecord& r : *task) flat.push_back(std::move(r));
    return flat;
}

RunOutcome run_benchmark(const BenchConfig& config, const RunOptions& options) {
    const BenchConfig cfg = config.resolved();
    const std::vector<Cell> cells = enumerate_cells(cfg);
    const long n_tasks = static_cast<long>(cells.size()) * cfg.replicates;

    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    const fs::path manifest_path = dir / "manifest.txt";
    const fs::path partial_path = dir / "replicates.partial.csv";
    const fs::path marker_path = dir / "RESUME";

    const std::string manifest = cfg.manifest();
    const std::string manifest_tag = std::to_string(fnv1a64(manifest));

    std::vector<std::optional<std::vector<RunRecord>>> results(
        static_cast<std::size_t>(n_tasks));

    // Task index by row key, to match resumed rows back to their slot.
    std::map<std::string, long> task_of_key;
    for (long i = 0; i < n_tasks; ++i) {
        const Cell& c = cells[static_cast<std::size_t>(i / cfg.replicates)];
        task_of_key[partial_key(c.n, c.rho, c.sigma2,
                                static_cast<int>(i % cfg.replicates))] = i;
    }

    if (options.resume && fs::exists(marker_path) && fs::exists(partial_path)) {
        std::ifstream marker(marker_path);
        std::string stored_tag;
        marker >> stored_tag;
        if (stored_tag != manifest_tag)
            throw Error("RESUME marker does not match this manifest; "
                        "remove the output directory to start over");
        std::map<long, std::vector<RunRecord>> partial;
        std::ifstream in(partial_path);
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const std::optional<RunRecord> rec = parse_partial_row(line, cfg);
            if (!rec) continue; // torn or stale line
            const auto it = task_of_key.find(
                partial_key(rec->n, rec->rho, rec->sigma2, rec->replicate));
            if (it == task_of_key.end()) continue;
            partial[it->second].push_back(*rec);
        }
        // A task counts as done only when every method row is present, in order.
        for (auto& [task, recs] : partial) {
            if (recs.size() != cfg.methods.size()) continue;
            bool ordered = true;
            for (std::size_t m = 0; m < recs.size(); ++m)
                if (recs[m].method != cfg.methods[m]) ordered = false;
            if (ordered) results[static_cast<std::size_t>(task)] = std::move(recs);
        }
    }

    {
        std::ofstream mf(manifest_path);
        mf << manifest;
        std::ofstream marker(marker_path);
        marker << manifest_tag << "\n";
    }

    std::ofstream partial(partial_path,
                          options.resume ? std::ios::app : std::ios::trunc);
    if (!options.resume || fs::file_size(partial_path) == 0)
        partial << kPartialHeader << "\n";

    auto on_done = [&](long, const std::vector<RunRecord>& recs) {
        for (const RunRecord& r : recs) partial << partial_csv_row(r) << "\n";
        partial.flush();
    };

    RunOptions opts = options;
    const bool complete =
        run_pool(cfg, cells, effective_workers(cfg, opts), opts, results, on_done);
    partial.close();

    RunOutcome outcome;
    outcome.dir = dir;
    outcome.tasks_total = n_tasks;
    outcome.tasks_done = 0;
    for (const auto& t : results)
        if (t) ++outcome.tasks_done;
    outcome.interrupted = !complete;
    if (!complete) return outcome; // partial + marker stay for --resume

    // Canonical outputs: task enumeration order, methods in config order.
    {
        std::ofstream rep(dir / "replicates.csv");
        std::ofstream tim(dir / "timings.csv");
        rep << replicates_csv_header() << "\n";
        tim << "study,family,n,rho,sigma2,method,replicate,wall_ms\n";
        for (const auto& task : results) {
            for (const RunRecord& r : *task) {
                rep << record_csv_row(r) << "\n";
                tim << study_name(r.study) << ',' << family_name(r.family) << ',' << r.n
                    << ',' << format_double(r.rho) << ',' << format_double(r.sigma2)
                    << ',' << r.method << ',' << r.replicate << ','
                    << format_double(r.wall_ms) << "\n";
            }
        }
    }
    {
        // summary.csv = metrics::aggregate per (cell, method), same order.
        std::ofstream sum(dir / "summary.csv");
        sum << summary_csv_header() << "\n";
        for (long c = 0; c < static_cast<long>(cells.size()); ++c) {
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                std::vector<ReplicateMetrics> ms;
                ms.reserve(static_cast<std::size_t>(cfg.replicates));
                for (int rep = 0; rep < cfg.replicates; ++rep) {
                    const auto& task = results[static_cast<std::size_t>(
                        c * cfg.replicates + rep)];
                    ms.push_back((*task)[m].metrics);
                }
                const auto& first =
                    (*results[static_cast<std::size_t>(c * cfg.replicates)])[m];
                sum << summary_csv_row(first, aggregate(ms)) << "\n";
            }
        }
    }
    fs::remove(partial_path);
    fs::remove(marker_path);
    return outcome;
}

} // namespace varsel::bench

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

#include "varsel/bench/figures.hpp"
#include "varsel/bench/runner.hpp"
#include "varsel/simgen.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void handle_signal(int) {
    g_interrupted = true;
}

int cmd_validate(const std::string& config_path) {
    try {
        const auto cfg = varsel::bench::BenchConfig::load(config_path).resolved();
        std::cout << cfg.manifest();
        const long cells = static_cast<long>(cfg.n_grid.size()) * cfg.rho_grid.size() *
                           cfg.sigma2_grid.size();
        std::cerr << "ok: " << cells << " cells x " << cfg.replicates
                  << " replicates x " << cfg.methods.size() << " methods\n";
        return 0;
    } catch (const varsel::ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    }
}

int cmd_run(const std::string& config_path, int workers, long seed_override,
            const std::string& output_override, bool resume) {
    auto cfg = varsel::bench::BenchConfig::load(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!output_override.empty()) cfg.output = output_override;

    varsel::bench::RunOptions opts;
    opts.workers = workers;
    opts.resume = resume;
    opts.stop_flag = &g_interrupted;
    opts.progress = [](long done, long total) {
        const long step = std::max(total / 100, 1L);
        if (done % step == 0 || done == total)
            std::cerr << "\r" << done << "/" << total << " replicates" << std::flush;
    };

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    const auto outcome = varsel::bench::run_benchmark(cfg, opts);
    std::cerr << "\n";
    if (outcome.interrupted) {
        std::cerr << "interrupted after " << outcome.tasks_done << "/"
                  << outcome.tasks_total
                  << " replicates; partial results kept, rerun with --resume\n";
        return 130;
    }
    std::cerr << "wrote " << (outcome.dir / "replicates.csv").string() << ", "
              << (outcome.dir / "summary.csv").string() << "\n";
    return 0;
}

int cmd_render(const std::string& results_dir) {
    const auto result = varsel::bench::render_figures(results_dir);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << "\n";
    return 0;
}

int cmd_gen(const std::string& study, const std::string& family, int n, double rho,
            double sigma2, long seed, const std::string& out_path) {
    varsel::SimSetting setting =
        study == "S2" ? varsel::SimSetting::study2(varsel::family_from_name(family), n,
                                                   rho, sigma2,
                                                   static_cast<std::uint64_t>(seed))
                      : varsel::SimSetting::study1(varsel::family_from_name(family), n,
                                                   rho, sigma2,
                                                   static_cast<std::uint64_t>(seed));
    const varsel::Dataset data = varsel::gen_dataset(setting);
    if (out_path.empty() || out_path == "-") {
        varsel::write_dataset_csv(data, std::cout);
    } else {
        std::ofstream out(out_path);
        varsel::write_dataset_csv(data, out);
        std::cerr << "wrote " << out_path << " (f = " << setting.cohens_f() << ")\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"variable-selection benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, results_dir, output_override;
    int workers = 0;
    long seed = -1;
    bool resume = false;

    auto* run = app.add_subcommand("run", "run a benchmark config");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--workers", workers, "worker threads (0 = all cores)");
    run->add_option("--seed", seed, "override the base seed");
    run->add_option("--output", output_override, "override the output directory");
    run->add_flag("--resume", resume, "reuse rows from an interrupted run");

    auto* validate = app.add_subcommand("validate", "check a config and print the manifest");
    validate->add_option("config", config_path, "config file")->required();

    auto* render = app.add_subcommand("render", "render figure panels from summary.csv");
    render->add_option("results", results_dir, "results directory")->required();

    std::string gen_study = "S1", gen_family = "gaussian", gen_out;
    int gen_n = 100;
    double gen_rho = 0.0, gen_sigma2 = 6.25;
    long gen_seed = 1;
    auto* gen = app.add_subcommand("gen", "dump one simulated dataset as CSV");
    gen->add_option("--study", gen_study, "S1 or S2");
    gen->add_option("--family", gen_family, "gaussian | bernoulli | poisson");
    gen->add_option("--n", gen_n, "sample size");
    gen->add_option("--rho", gen_rho, "correlation parameter");
    gen->add_option("--sigma2", gen_sigma2, "Gaussian error variance");
    gen->add_option("--seed", gen_seed, "dataset seed");
    gen->add_option("-o,--output", gen_out, "output file ('-' = stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, workers, seed, output_override, resume);
        if (validate->parsed()) return cmd_validate(config_path);
        if (render->parsed()) return cmd_render(results_dir);
        if (gen->parsed())
            return cmd_gen(gen_study, gen_family, gen_n, gen_rho, gen_sigma2, gen_seed,
                           gen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

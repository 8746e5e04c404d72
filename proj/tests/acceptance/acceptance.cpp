// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Monte-Carlo criteria use 100 replicates (20 for the reduced
// large-p study); every tolerance is fixed here in code.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "test_util.hpp"
#include "varsel/bench/runner.hpp"
#include "varsel/lasso.hpp"
#include "varsel/metrics.hpp"
#include "varsel/search.hpp"
#include "varsel/simgen.hpp"

using namespace varsel;
using namespace varsel::bench;
namespace fs = std::filesystem;

namespace {

int g_workers = 0;

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;

    Check() = default;
    explicit Check(std::string name_) : name(std::move(name_)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "FAILED " + what;
        } else {
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(double v, int prec = 3) {
    std::ostringstream s;
    s.precision(prec);
    s << std::fixed << v;
    return s.str();
}

using SummaryKey = std::pair<std::string, std::string>; // (cell tag, method)

std::map<SummaryKey, MetricsSummary> summarize(const std::vector<RunRecord>& records) {
    std::map<SummaryKey, std::vector<ReplicateMetrics>> groups;
    for (const RunRecord& r : records) {
        const std::string cell = "n=" + std::to_string(r.n) +
                                 ",rho=" + fmt(r.rho, 2) + ",s2=" + fmt(r.sigma2, 2);
        groups[{cell, r.method}].push_back(r.metrics);
    }
    std::map<SummaryKey, MetricsSummary> out;
    for (auto& [key, ms] : groups) out[key] = aggregate(ms);
    return out;
}

std::string cell_tag(int n, double rho, double sigma2) {
    return "n=" + std::to_string(n) + ",rho=" + fmt(rho, 2) + ",s2=" + fmt(sigma2, 2);
}

void progress_meter(long done, long total) {
    const long step = std::max(total / 10, 1L);
    if (done % step == 0 || done == total)
        std::cerr << "    " << done << "/" << total << " replicates\n";
}

// ----- Simulation study 1 runs (criteria 1, 2, 3, 5, 6) -----

const std::vector<RunRecord>& study1_records() {
    static std::vector<RunRecord> records = [] {
        BenchConfig cfg;
        cfg.study = Study::S1Equicorr;
        cfg.family = Family::Gaussian;
        cfg.n_grid = {800, 1600, 3200, 6400};
        cfg.rho_grid = {0.0};
        cfg.sigma2_grid = {6.25};
        cfg.replicates = 100;
        cfg.methods = known_methods();
        cfg.seed = 20250801;
        std::cerr << "  [study 1 grid: 4 cells x 9 methods x 100 replicates]\n";
        auto recs = run_grid(cfg, g_workers, progress_meter);
        std::cerr << "\n";
        return recs;
    }();
    return records;
}

const std::map<SummaryKey, MetricsSummary>& study1_summary() {
    static const std::map<SummaryKey, MetricsSummary> s = summarize(study1_records());
    return s;
}

const MetricsSummary& s1_at(int n, const std::string& method) {
    return study1_summary().at({cell_tag(n, 0.0, 6.25), method});
}

Check criterion1() {
    Check c{"criterion 1: exhaustive BIC consistency plateau"};
    const double cir = s1_at(6400, "BIC").cir;
    c.require(cir >= 0.9, "BIC CIR at (rho=0, s2=6.25, n=6400) = " + fmt(cir) + " >= 0.9");
    return c;
}

Check criterion2() {
    Check c{"criterion 2: exhaustive AIC ceiling"};
    const double cir = s1_at(6400, "AIC").cir;
    c.require(cir >= 0.55 && cir <= 0.80,
              "AIC CIR at the same cell = " + fmt(cir) + " in [0.55, 0.80]");
    return c;
}

Check criterion3() {
    Check c{"criterion 3: stepwise BIC ceiling"};
    const double cir = s1_at(6400, "Stepwise_BIC").cir;
    c.require(cir >= 0.80 && cir <= 0.97,
              "Stepwise_BIC CIR at the same cell = " + fmt(cir) + " in [0.80, 0.97]");
    return c;
}

Check criterion4() {
    Check c{"criterion 4: LASSO_CV ceiling over the full study-1 grid"};
    BenchConfig cfg;
    cfg.study = Study::S1Equicorr;
    cfg.family = Family::Gaussian;
    cfg.n_grid = {50, 100, 200, 400, 800, 1600, 3200, 6400};
    cfg.rho_grid = {0.0, 0.10, 0.25, 0.50, 0.75, 0.90};
    cfg.sigma2_grid = {6.25, 16.0, 100.0};
    cfg.replicates = 100;
    cfg.methods = {"LASSO_CV"};
    cfg.seed = 20250802;
    std::cerr << "  [study 1 full grid: 144 cells x 100 replicates, LASSO_CV]\n";
    const auto records = run_grid(cfg, g_workers, progress_meter);
    std::cerr << "\n";
    double max_cir = 0.0;
    std::string argmax;
    for (const auto& [key, summary] : summarize(records)) {
        if (summary.cir > max_cir) {
            max_cir = summary.cir;
            argmax = key.first;
        }
    }
    c.require(max_cir <= 0.35,
              "max LASSO_CV CIR = " + fmt(max_cir) + " (at " + argmax + ") <= 0.35");
    return c;
}

Check criterion5() {
    Check c{"criterion 5: FDR floors at (rho=0, s2=6.25, n=6400)"};
    auto fdr_of = [&](const std::string& m) {
        const auto& s = s1_at(6400, m);
        if (!s.fdr) {
            c.require(false, m + " FDR is NA");
            return -1.0;
        }
        return *s.fdr;
    };
    const double bic = fdr_of("BIC");
    if (bic >= 0.0) c.require(bic <= 0.02, "BIC FDR = " + fmt(bic) + " <= 0.02");
    for (const char* m : {"Stepwise_BIC", "Stepwise_AIC"}) {
        const double v = fdr_of(m);
        if (v >= 0.0)
            c.require(v >= 0.0 && v <= 0.08,
                      std::string(m) + " FDR = " + fmt(v) + " in [0, 0.08]");
    }
    for (const char* m : {"AIC", "LASSO_AIC"}) {
        const double v = fdr_of(m);
        if (v >= 0.0)
            c.require(v >= 0.05 && v <= 0.20,
                      std::string(m) + " FDR = " + fmt(v) + " in [0.05, 0.20]");
    }
    const double cv = fdr_of("LASSO_CV");
    if (cv >= 0.0) c.require(cv >= 0.2, "LASSO_CV FDR = " + fmt(cv) + " >= 0.2");
    return c;
}

Check criterion6() {
    Check c{"criterion 6: recall saturation for all nine methods at n >= 800"};
    double min_recall = 1.0;
    std::string argmin = "-";
    for (int n : {800, 1600, 3200, 6400}) {
        for (const std::string& m : known_methods()) {
            const double r = s1_at(n, m).recall;
            if (r < min_recall) {
                min_recall = r;
                argmin = m + " at n=" + std::to_string(n);
            }
        }
    }
    c.require(min_recall >= 0.99,
              "min recall over 9 methods x n in {800..6400} = " + fmt(min_recall) +
                  " (" + argmin + ") >= 0.99");
    return c;
}

Check criterion7() {
    Check c{"criterion 7: reduced study 2 (p=50, 20 replicates)"};
    BenchConfig cfg;
    cfg.study = Study::S2Ar1;
    cfg.family = Family::Gaussian;
    cfg.n_grid = {800, 3200};
    cfg.rho_grid = {0.0, 0.9};
    cfg.sigma2_grid = {6.25};
    cfg.replicates = 20;
    cfg.methods = {"GA_BIC", "GA_AIC", "LASSO_BIC", "LASSO_CV"};
    cfg.seed = 20250803;
    std::cerr << "  [study 2 reduced grid: 4 cells x 4 methods x 20 replicates]\n";
    const auto records = run_grid(cfg, g_workers, progress_meter);
    std::cerr << "\n";
    const auto summary = summarize(records);

    const double ga_bic = summary.at({cell_tag(3200, 0.9, 6.25), "GA_BIC"}).cir;
    const double lasso_bic = summary.at({cell_tag(3200, 0.9, 6.25), "LASSO_BIC"}).cir;
    c.require(ga_bic > lasso_bic, "GA_BIC CIR (" + fmt(ga_bic) +
                                      ") > LASSO_BIC CIR (" + fmt(lasso_bic) +
                                      ") at (rho=0.9, n=3200)");
    for (const char* m : {"GA_AIC", "LASSO_CV"}) {
        double worst = 0.0;
        for (int n : {800, 3200})
            for (double rho : {0.0, 0.9})
                worst = std::max(worst, summary.at({cell_tag(n, rho, 6.25), m}).cir);
        c.require(worst <= 0.1, std::string(m) + " max CIR = " + fmt(worst) + " <= 0.1");
    }
    return c;
}

// ----- criterion 8: oracle equivalences -----

std::pair<ModelSpec, double> brute_force_best(const Dataset& data, Criterion criterion) {
    ModelSpec best;
    double best_score = std::numeric_limits<double>::infinity();
    bool have = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << data.p()); ++mask) {
        const ModelSpec spec = ModelSpec::from_mask(data.p(), mask);
        double s;
        try {
            s = evaluate(criterion, fit_model(data, spec), data.n());
        } catch (const Error&) {
            continue;
        }
        bool better = false;
        if (!have || s < best_score)
            better = true;
        else if (s == best_score && spec.count() < best.count())
            better = true;
        else if (s == best_score && spec.count() == best.count() &&
                 spec_lex_less(spec, best))
            better = true;
        if (better) {
            have = true;
            best = spec;
            best_score = s;
        }
    }
    return {best, best_score};
}

Check criterion8() {
    Check c{"criterion 8: oracle equivalences"};

    { // 8a: exhaustive vs an independent brute-force loop, 50 instances p <= 6
        int matches = 0;
        const Family families[] = {Family::Gaussian, Family::Bernoulli, Family::Poisson};
        for (int i = 0; i < 50; ++i) {
            const Family family = families[i % 3];
            const Criterion criterion = i % 2 ? Criterion::AIC : Criterion::BIC;
            const int p = 1 + i % 6;
            const Dataset data =
                testutil::random_instance(family, 30 + 7 * (i % 10), p, 88000 + i);
            const auto [oracle_spec, oracle_score] = brute_force_best(data, criterion);
            const SearchResult r = exhaustive_search(data, criterion);
            if (r.best.spec == oracle_spec &&
                std::abs(r.best_score - oracle_score) <=
                    1e-8 * (1.0 + std::abs(oracle_score)))
                ++matches;
        }
        c.require(matches == 50,
                  "exhaustive = brute force on " + std::to_string(matches) + "/50");
    }

    { // 8b: GA recovers the exhaustive optimum on >= 95% of 50 instances p <= 10
        int recovered = 0;
        for (int i = 0; i < 50; ++i) {
            const int p = 4 + i % 7;
            const Dataset data =
                testutil::random_instance(Family::Gaussian, 100 + 13 * (i % 12), p,
                                          77000 + i, 0.8);
            const SearchResult ex = exhaustive_search(data, Criterion::BIC);
            GAConfig ga;
            ga.seed = 1000 + static_cast<std::uint64_t>(i);
            const SearchResult g = ga_search(data, Criterion::BIC, ga);
            if (g.best.spec == ex.best.spec) ++recovered;
        }
        c.require(recovered >= 48, "GA recovered the exhaustive optimum on " +
                                       std::to_string(recovered) + "/50 (need >= 48)");
    }

    { // 8c: lambda_max zeroes the support on every instance
        bool all_empty = true;
        const Family families[] = {Family::Gaussian, Family::Bernoulli, Family::Poisson};
        for (int i = 0; i < 30; ++i) {
            const Dataset data = testutil::random_instance(
                families[i % 3], 40 + 11 * (i % 8), 2 + i % 6, 66000 + i);
            const LassoPath path = lasso_path(data, 15);
            all_empty &= path.supports.front().count() == 0;
        }
        c.require(all_empty, "empty support at lambda_max on 30/30 instances");
    }

    { // 8d: orthonormal-design LASSO equals soft-thresholding to 1e-6
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            RandomStream rng(55000 + static_cast<std::uint64_t>(i));
            const int n = 80, p = 5;
            Eigen::MatrixXd m(n, p);
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < p; ++j) m(r, j) = rng.normal();
            for (int j = 0; j < p; ++j) m.col(j).array() -= m.col(j).mean();
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
            Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
            q *= std::sqrt(static_cast<double>(n));
            Eigen::VectorXd y(n);
            for (int r = 0; r < n; ++r)
                y[r] = q(r, 0) - 0.6 * q(r, 2) + rng.normal();
            const Dataset data(std::move(y), std::move(q), Family::Gaussian);
            const LassoPath path = lasso_path(data, 25);
            const Eigen::VectorXd yc = data.y.array() - data.y.mean();
            for (std::size_t l = 0; l < path.size(); ++l) {
                for (int j = 0; j < p; ++j) {
                    const double z = data.X.col(j).dot(yc) / n;
                    const double target =
                        z > path.lambdas[l]
                            ? z - path.lambdas[l]
                            : (z < -path.lambdas[l] ? z + path.lambdas[l] : 0.0);
                    worst = std::max(worst, std::abs(path.coefs[l][j] - target));
                }
            }
        }
        c.require(worst <= 1e-6,
                  "orthonormal soft-threshold max deviation = " + fmt(worst, 9));
    }

    { // 8e: IRLS null fits equal the link of the sample mean to 1e-8
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Family family = i % 2 ? Family::Bernoulli : Family::Poisson;
            const Dataset data =
                testutil::random_instance(family, 30 + 9 * (i % 6), 3, 44000 + i);
            const double ybar = data.y.mean();
            if (family == Family::Bernoulli && (ybar == 0.0 || ybar == 1.0)) continue;
            const FittedModel fit = fit_glm(data, data.null_spec());
            const double expected = family == Family::Bernoulli
                                        ? std::log(ybar / (1.0 - ybar))
                                        : std::log(ybar);
            worst = std::max(worst, std::abs(fit.beta0 - expected));
        }
        c.require(worst <= 1e-8, "null-fit link deviation max = " + fmt(worst, 12));
    }

    { // 8f: AIC equals BIC at n = e^2 to 1e-12
        RandomStream rng(33000);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double ll = -300.0 * rng.uniform01();
            const int k = 1 + static_cast<int>(rng.uniform_below(15));
            worst = std::max(worst,
                             std::abs(evaluate(Criterion::AIC, ll, k, std::exp(2.0)) -
                                      evaluate(Criterion::BIC, ll, k, std::exp(2.0))));
        }
        c.require(worst <= 1e-12, "max |AIC - BIC| at n=e^2 = " + fmt(worst, 15));
    }
    return c;
}

Check criterion9() {
    Check c{"criterion 9: byte-identical reruns independent of worker count"};
    const fs::path base = fs::temp_directory_path() / "varsel_acceptance";
    fs::remove_all(base);

    BenchConfig cfg;
    cfg.study = Study::S1Equicorr;
    cfg.family = Family::Gaussian;
    cfg.n_grid = {50, 100};
    cfg.rho_grid = {0.0, 0.5};
    cfg.sigma2_grid = {6.25};
    cfg.replicates = 5;
    cfg.methods = {"BIC", "Stepwise_BIC", "LASSO_CV", "GA_BIC"};
    cfg.seed = 31415;
    cfg.lasso_n_lambda = 40;
    cfg.cv_folds = 10;

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    std::string first;
    for (int workers : {1, 2, 4}) {
        BenchConfig run_cfg = cfg;
        run_cfg.output = (base / ("w" + std::to_string(workers))).string();
        RunOptions opts;
        opts.workers = workers;
        run_benchmark(run_cfg, opts);
        const std::string content = slurp(fs::path(run_cfg.output) / "replicates.csv");
        if (first.empty())
            first = content;
        else
            c.require(content == first, "workers=" + std::to_string(workers) +
                                            " replicates.csv identical");
    }

    // Rerun from the emitted manifest: same bytes again.
    BenchConfig manifest_cfg =
        BenchConfig::load(base / "w1" / "manifest.txt");
    manifest_cfg.output = (base / "manifest_rerun").string();
    run_benchmark(manifest_cfg);
    c.require(slurp(base / "manifest_rerun" / "replicates.csv") == first,
              "manifest rerun replicates.csv identical");
    return c;
}

} // namespace

int main(int argc, char** argv) {
    g_workers = static_cast<int>(std::thread::hardware_concurrency());
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc)
            g_workers = std::atoi(argv[++i]);
    }
    std::cerr << "acceptance suite, " << g_workers << " workers\n";

    const std::vector<std::function<Check()>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9};

    int failures = 0;
    for (const auto& run : criteria) {
        Check c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail = std::string("exception: ") + e.what();
        }
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " — " << c.detail
                  << "\n";
        std::cout.flush();
        if (!c.pass) ++failures;
    }
    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}

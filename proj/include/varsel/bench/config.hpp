#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "varsel/search.hpp"
#include "varsel/simgen.hpp"

namespace varsel::bench {

// The nine benchmarked selection methods. BIC/AIC run the exhaustive
// search (small p only); GA_*, Stepwise_* and LASSO_* bind to the
// corresponding search or path routines; LASSO_CV selects by k-fold
// cross-validated loss.
const std::vector<std::string>& known_methods();

// One benchmark run: a (n, rho, sigma2) grid for a fixed study and family,
// a method list, and the knobs each method needs. Parsed from a flat
// key-value text file ('#' comments); parse errors carry line numbers.
struct BenchConfig {
    Study study = Study::S1Equicorr;
    Family family = Family::Gaussian;
    int p = -1; // -1 resolves to the study default (6 or 50)
    std::vector<int> n_grid;
    std::vector<double> rho_grid;
    std::vector<double> sigma2_grid;
    int replicates = 100;
    std::vector<std::string> methods;
    std::uint64_t seed = 1;
    int workers = 0; // 0 = hardware concurrency
    std::string output = "results";

    // Data-generation knobs; negative beta_value resolves per study/family.
    double beta_value = -1.0;
    double beta0 = 1.0;
    std::vector<int> true_support_1based; // empty resolves to the study default
    double poisson_eta_clamp = 8.0;

    // Method parameters.
    GAConfig ga;
    int lasso_n_lambda = 100;
    int cv_folds = 10;

    static BenchConfig parse(const std::string& text);
    static BenchConfig load(const std::filesystem::path& file);

    // Fills every defaulted field and validates; the result re-parses to
    // itself through manifest().
    BenchConfig resolved() const;

    // Fully explicit, reparseable key-value text. Only valid on a resolved
    // config.
    std::string manifest() const;

    // Data-generating setting for one grid cell and replicate; the data
    // seed depends only on the cell parameters and replicate index, never
    // on the method or scheduling.
    SimSetting cell_setting(int n, double rho, double sigma2, int replicate) const;
    std::uint64_t method_seed(int n, double rho, double sigma2, int replicate,
                              const std::string& method) const;

    ModelSpec true_support() const;
};

} // namespace varsel::bench

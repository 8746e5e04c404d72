#pragma once

#include <cstdint>
#include <vector>

#include "varsel/criteria.hpp"
#include "varsel/model.hpp"
#include "varsel/search.hpp"

namespace varsel {

// L1-penalized solutions over a descending lambda grid. Coefficients are on
// the original data scale; the penalty itself acts on internally
// standardized columns (centered, unit population variance). The optimized
// objective is (1/(2n)) RSS + lambda * sum |beta_std_j| for Gaussian and
// (1/n) NLL + lambda * sum |beta_std_j| for the GLM families, so the grid
// head lambda_max = max_j |<x_std_j, y - ybar>| / n zeroes every penalized
// coefficient exactly.
struct LassoPath {
    Family family = Family::Gaussian;
    std::vector<double> lambdas;
    std::vector<double> intercepts;
    std::vector<Eigen::VectorXd> coefs; // length p each
    std::vector<ModelSpec> supports;    // nonzero pattern per lambda
    std::vector<bool> converged;        // per-lambda sweep-cap flag

    std::size_t size() const { return lambdas.size(); }
};

struct LassoControl {
    int n_lambda = 100;
    double lambda_min_ratio = -1.0; // <0 means 1e-4 when n > p, else 1e-2
    double coef_tol = 1e-7;         // max standardized coefficient change per sweep
    long max_sweeps_per_lambda = 100000;
    int max_outer_per_lambda = 25; // proximal Newton iterations (GLM only)
};

// Cyclic coordinate descent with covariance updates, warm starts along the
// grid, and active-set iteration. GLM families run a proximal Newton outer
// loop (penalized weighted least squares inner solve).
LassoPath lasso_path(const Dataset& data, int n_lambda = 100);
LassoPath lasso_path(const Dataset& data, const LassoControl& control);

// Same solver on an externally supplied grid; cross-validation refits every
// training fold over the full-data grid.
LassoPath lasso_path_fixed(const Dataset& data, const std::vector<double>& lambdas,
                           const LassoControl& control = {});

// Penalized objective at given original-scale coefficients, standardized
// penalty as above. Lets tests compare warm-started and cold-started
// solutions on an equal footing.
double lasso_objective(const Dataset& data, double lambda, double intercept,
                       const Eigen::VectorXd& coef);

struct CVResult {
    double lambda_min = 0.0;
    int lambda_min_index = 0;
    std::vector<double> cv_mean; // per-lambda mean validation loss
    std::vector<double> cv_se;   // per-lambda standard error over folds
    std::vector<int> fold_assignment;
};

// Seeded k-fold cross-validation over the path's grid: MSE loss for
// Gaussian, mean deviance for Bernoulli/Poisson. Ties go to the larger
// lambda. A single-class Bernoulli training fold triggers one reshuffle,
// then FoldDegenerateError.
CVResult cv_select(const Dataset& data, const LassoPath& path, int n_folds,
                   std::uint64_t seed);

struct LassoSelectOptions {
    // true: refit every distinct support by unpenalized maximum likelihood
    // (the criterion formulas assume the ML estimator). false: score the
    // penalized coefficients at each grid point directly, with the nonzero
    // count standing in for the degrees of freedom.
    bool refit = true;
};

// Criterion-based selection along the path; minimizer under the tie rule
// (smaller support, then larger lambda). Candidates whose fit fails are
// skipped.
SearchResult lasso_select_ic(const Dataset& data, const LassoPath& path,
                             Criterion criterion, const LassoSelectOptions& options = {});

} // namespace varsel

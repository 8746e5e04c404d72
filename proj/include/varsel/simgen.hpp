#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "varsel/model.hpp"
#include "varsel/rng.hpp"

namespace varsel {

// S1: equicorrelated p=6 design, true support {x1,x2,x3}.
// S2: AR(1) p=50 design, true support = odd-numbered regressors.
enum class Study { S1Equicorr, S2Ar1 };

std::string study_name(Study s);
Study study_from_name(const std::string& name);

// One cell of the simulation grid plus the replicate seed. Generation is a
// pure function of this struct: identical settings give bit-identical data.
struct SimSetting {
    Study study = Study::S1Equicorr;
    Family family = Family::Gaussian;
    int n = 100;
    int p = 6;
    double rho = 0.0;
    double sigma2 = 1.0; // Gaussian error variance; ignored by the GLM families
    ModelSpec true_support;
    double beta_value = 1.0;
    double beta0 = 1.0;
    std::uint64_t seed = 0;
    double poisson_eta_clamp = 8.0; // cap on the linear predictor before exp()

    static SimSetting study1(Family family, int n, double rho, double sigma2,
                             std::uint64_t seed);
    static SimSetting study2(Family family, int n, double rho, double sigma2,
                             std::uint64_t seed);

    // Effect size under the unit-coefficient design: f = 1/sigma.
    double cohens_f() const;
    void validate() const;
};

// Rows i.i.d. N(0, Sigma) with Sigma = (1-rho) I + rho J, realized through
// the (lower) triangular Cholesky factor of Sigma.
Eigen::MatrixXd gen_design_equicorr(int n, int p, double rho, RandomStream& rng);

// Per row: x_1 ~ N(0, 1/(1-rho^2)), x_k = rho x_{k-1} + eta_k with standard
// normal innovations, so every column is stationary with variance
// 1/(1-rho^2) and Corr(x_k, x_{k+d}) = rho^d.
Eigen::MatrixXd gen_design_ar1(int n, int p, double rho, RandomStream& rng);

// Response on top of a realized design; clamp_events counts Poisson rows
// whose linear predictor hit poisson_eta_clamp.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& X, const SimSetting& setting,
                             RandomStream& rng, long* clamp_events = nullptr);

// Design + response from the setting's own seed.
Dataset gen_dataset(const SimSetting& setting, long* clamp_events = nullptr);

// CSV dump for external cross-checks: header row, y first, x1..xp after.
void write_dataset_csv(const Dataset& data, std::ostream& out);

} // namespace varsel

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "varsel/errors.hpp"
#include "varsel/model_spec.hpp"

namespace varsel {

// Response families; canonical links only (identity / logit / log).
enum class Family { Gaussian, Bernoulli, Poisson };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Response vector plus regressor matrix. Immutable after construction and
// safe to share across concurrent workers.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    Family family = Family::Gaussian;

    Dataset() = default;
    Dataset(Eigen::VectorXd y_, Eigen::MatrixXd X_, Family family_);

    int n() const { return static_cast<int>(y.size()); }
    int p() const { return static_cast<int>(X.cols()); }

    ModelSpec null_spec() const { return ModelSpec(p()); }
    ModelSpec full_spec() const {
        ModelSpec s(p());
        for (int j = 0; j < p(); ++j) s.set(j, true);
        return s;
    }
};

// Maximum-likelihood fit of one candidate model.
struct FittedModel {
    ModelSpec spec;
    double beta0 = 0.0;
    Eigen::VectorXd beta; // aligned with spec.indices(), ascending
    double loglik = 0.0;
    int k = 0; // |included| + 2 for Gaussian (sigma^2 counts), +1 otherwise
    bool converged = true;
    bool separation = false;                 // Bernoulli/Poisson divergence warning
    std::optional<double> sigma2_hat = std::nullopt; // Gaussian only, RSS/n
};

// Ordinary least squares via Householder QR of [1 | X_S].
// Throws RankDeficientError on collinear columns and DegenerateFitError when
// RSS <= n * eps * Var(y) (interpolating fit, log-likelihood diverges).
FittedModel fit_lm(const Dataset& data, const ModelSpec& spec);

// Shared orthogonal decomposition of the full design [1 | X], factored once
// per dataset so subset fits reduce to small triangular-factor problems:
// with [1|X] = QR, the subset least-squares problem min ||y - A_S b|| equals
// min ||Q'y - R_S b|| plus the fixed residual of y off the full column span.
// Search loops fit thousands of subsets per dataset; this keeps each one
// O(p q^2) instead of O(n q^2) while staying a QR solve.
struct LmPrecomp {
    int n = 0;
    int p = 0;
    Eigen::MatrixXd r_factor; // min(n, p+1) x (p+1), column 0 = intercept
    Eigen::VectorXd qty;      // Q'y, length min(n, p+1)
    double rss_offset = 0.0;  // ||y||^2 - ||Q'y||^2
    double var_y = 0.0;       // population variance of y, for the degeneracy test
    bool constant_response = false; // every fit interpolates

    static LmPrecomp build(const Dataset& data);
};

// Same contract and error conditions as fit_lm, computed from the shared factor.
FittedModel fit_lm_subset(const LmPrecomp& pre, const ModelSpec& spec);

// IRLS settings; the defaults are the module's documented behavior.
struct IrlsControl {
    double tol = 1e-8;          // relative deviance change
    int max_iter = 50;
    int max_halvings = 10;      // step-halving when deviance increases
    double eta_divergence = 30; // |eta| beyond this flags separation
};

// Bernoulli / Poisson maximum likelihood via iteratively reweighted least
// squares. A diverging linear predictor returns a fit with converged=false
// and separation=true rather than throwing; hitting the iteration cap with
// no separation throws NotConvergedError. The Poisson log-likelihood keeps
// the -log(y_i!) constant so criteria are comparable across families' models
// on the same data.
FittedModel fit_glm(const Dataset& data, const ModelSpec& spec,
                    const IrlsControl& control = {});

// Fits with the family-appropriate routine.
FittedModel fit_model(const Dataset& data, const ModelSpec& spec);

// Family log-likelihood at the supplied coefficients (Gaussian: profiled
// over sigma^2, i.e. evaluated at sigma^2 = RSS/n).
double loglik_at(const Dataset& data, const ModelSpec& spec, double beta0,
                 const Eigen::VectorXd& beta);

// Gradient of the log-likelihood at (beta0, beta) over [intercept, included
// columns]; for the canonical links this is A' (y - mu). Used by tests to
// verify stationarity at the IRLS optimum.
Eigen::VectorXd loglik_gradient(const Dataset& data, const ModelSpec& spec, double beta0,
                                const Eigen::VectorXd& beta);

} // namespace varsel

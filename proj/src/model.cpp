#include "varsel/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varsel {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kProbClamp = 1e-10;   // Bernoulli probabilities inside the likelihood
constexpr double kWeightFloor = 1e-10; // IRLS working weights

// [1 | X_S], columns in ascending regressor order after the intercept.
Eigen::MatrixXd design_matrix(const Dataset& data, const ModelSpec& spec) {
    if (spec.width() != data.p())
        throw DimensionError("ModelSpec width does not match dataset p");
    const std::vector<int> idx = spec.indices();
    Eigen::MatrixXd a(data.n(), 1 + static_cast<int>(idx.size()));
    a.col(0).setOnes();
    for (std::size_t j = 0; j < idx.size(); ++j) a.col(1 + static_cast<int>(j)) = data.X.col(idx[j]);
    return a;
}

double population_variance(const Eigen::VectorXd& y) {
    const double mean = y.mean();
    return (y.array() - mean).square().sum() / static_cast<double>(y.size());
}

// A numerically constant response makes every fit an interpolation; the
// variance-scaled RSS threshold degenerates to zero there and rounding
// noise in the RSS would escape it.
bool response_constant(double var_y, double mean_sq_y) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    return var_y <= 16.0 * eps * eps * mean_sq_y;
}

double gaussian_profile_loglik(int n, double rss) {
    return -0.5 * n * (std::log(kTwoPi) + std::log(rss / n) + 1.0);
}

double bernoulli_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double p = 1.0 / (1.0 + std::exp(-eta[i]));
        p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
        ll += y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
    }
    return ll;
}

double poisson_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        ll += y[i] * eta[i] - std::exp(eta[i]) - std::lgamma(y[i] + 1.0);
    }
    return ll;
}

// Deviance relative to the saturated model; the IRLS convergence monitor.
double glm_deviance(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    if (family == Family::Bernoulli) return -2.0 * bernoulli_loglik(y, eta);
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double mu = std::exp(eta[i]);
        if (y[i] > 0.0)
            dev += y[i] * (std::log(y[i]) - eta[i]) - (y[i] - mu);
        else
            dev += mu;
    }
    return 2.0 * dev;
}

void glm_mu_weights(Family family, const Eigen::VectorXd& eta, Eigen::VectorXd& mu,
                    Eigen::VectorXd& w) {
    const Eigen::Index n = eta.size();
    mu.resize(n);
    w.resize(n);
    if (family == Family::Bernoulli) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-eta[i]));
            mu[i] = p;
            w[i] = std::max(p * (1.0 - p), kWeightFloor);
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            mu[i] = std::exp(eta[i]);
            w[i] = std::max(mu[i], kWeightFloor);
        }
    }
}

FittedModel finish_lm_fit(const ModelSpec& spec, const Eigen::VectorXd& coef, int n,
                          double rss, double var_y) {
    if (rss <= n * std::numeric_limits<double>::epsilon() * var_y)
        throw DegenerateFitError("residual sum of squares is numerically zero");
    if (!(rss > 0.0) || !std::isfinite(rss))
        throw DegenerateFitError("residual sum of squares is not positive");
    FittedModel fit;
    fit.spec = spec;
    fit.beta0 = coef[0];
    fit.beta = coef.tail(coef.size() - 1);
    fit.sigma2_hat = rss / n;
    fit.loglik = gaussian_profile_loglik(n, rss);
    fit.k = spec.count() + 2;
    fit.converged = true;
    return fit;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Gaussian: return "gaussian";
        case Family::Bernoulli: return "bernoulli";
        case Family::Poisson: return "poisson";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::Gaussian;
    if (name == "bernoulli") return Family::Bernoulli;
    if (name == "poisson") return Family::Poisson;
    throw Error("unknown family: " + name);
}

Dataset::Dataset(Eigen::VectorXd y_, Eigen::MatrixXd X_, Family family_)
    : y(std::move(y_)), X(std::move(X_)), family(family_) {
    if (y.size() < 1) throw DimensionError("dataset needs n >= 1");
    if (X.rows() != y.size())
        throw DimensionError("y length does not match the row count of X");
    if (family == Family::Bernoulli) {
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (y[i] != 0.0 && y[i] != 1.0)
                throw DimensionError("Bernoulli responses must be exactly 0 or 1");
    } else if (family == Family::Poisson) {
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (y[i] < 0.0 || y[i] != std::floor(y[i]))
                throw DimensionError("Poisson responses must be integers >= 0");
    }
}

FittedModel fit_lm(const Dataset& data, const ModelSpec& spec) {
    if (data.family != Family::Gaussian)
        throw Error("fit_lm requires a Gaussian dataset");
    if (response_constant(population_variance(data.y),
                          data.y.squaredNorm() / data.n()))
        throw DegenerateFitError("response is numerically constant");
    const Eigen::MatrixXd a = design_matrix(data, spec);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols())
        throw RankDeficientError("design has linearly dependent columns for spec " +
                                 spec.to_index_string());
    const Eigen::VectorXd coef = qr.solve(data.y);
    const double rss = (data.y - a * coef).squaredNorm();
    return finish_lm_fit(spec, coef, data.n(), rss, population_variance(data.y));
}

LmPrecomp LmPrecomp::build(const Dataset& data) {
    if (data.family != Family::Gaussian)
        throw Error("LmPrecomp requires a Gaussian dataset");
    const int n = data.n();
    const int cols = data.p() + 1;
    const int r = std::min(n, cols);
    Eigen::MatrixXd a(n, cols);
    a.col(0).setOnes();
    a.rightCols(data.p()) = data.X;

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    LmPrecomp pre;
    pre.n = n;
    pre.p = data.p();
    pre.r_factor = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Eigen::VectorXd qty_full = qr.householderQ().transpose() * data.y;
    pre.qty = qty_full.head(r);
    pre.rss_offset = std::max(0.0, qty_full.tail(n - r).squaredNorm());
    pre.var_y = population_variance(data.y);
    pre.constant_response =
        response_constant(pre.var_y, data.y.squaredNorm() / data.n());
    return pre;
}

FittedModel fit_lm_subset(const LmPrecomp& pre, const ModelSpec& spec) {
    if (spec.width() != pre.p)
        throw DimensionError("ModelSpec width does not match precomputed design");
    if (pre.constant_response)
        throw DegenerateFitError("response is numerically constant");
    const std::vector<int> idx = spec.indices();
    const int q1 = 1 + static_cast<int>(idx.size());
    Eigen::MatrixXd sub(pre.r_factor.rows(), q1);
    sub.col(0) = pre.r_factor.col(0);
    for (std::size_t j = 0; j < idx.size(); ++j)
        sub.col(1 + static_cast<int>(j)) = pre.r_factor.col(idx[j] + 1);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    if (qr.rank() < q1)
        throw RankDeficientError("design has linearly dependent columns for spec " +
                                 spec.to_index_string());
    const Eigen::VectorXd coef = qr.solve(pre.qty);
    const double rss = pre.rss_offset + (pre.qty - sub * coef).squaredNorm();
    return finish_lm_fit(spec, coef, pre.n, rss, pre.var_y);
}

FittedModel fit_glm(const Dataset& data, const ModelSpec& spec, const IrlsControl& control) {
    if (data.family == Family::Gaussian)
        throw Error("fit_glm requires a Bernoulli or Poisson dataset");
    const Eigen::MatrixXd a = design_matrix(data, spec);
    const int q1 = static_cast<int>(a.cols());

    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(a);
        if (rank_check.rank() < q1)
            throw RankDeficientError("design has linearly dependent columns for spec " +
                                     spec.to_index_string());
    }

    // Start from the intercept-only fit on the link scale.
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(q1);
    const double ybar = data.y.mean();
    if (data.family == Family::Bernoulli) {
        const double pbar = std::clamp(ybar, 1e-6, 1.0 - 1e-6);
        coef[0] = std::log(pbar / (1.0 - pbar));
    } else {
        coef[0] = std::log(std::max(ybar, 0.1));
    }

    Eigen::VectorXd eta = a * coef;
    double dev = glm_deviance(data.family, data.y, eta);
    bool converged = false;
    bool separation = false;
    Eigen::VectorXd mu, w;

    for (int iter = 0; iter < control.max_iter; ++iter) {
        if (eta.cwiseAbs().maxCoeff() > control.eta_divergence) {
            separation = true;
            break;
        }
        glm_mu_weights(data.family, eta, mu, w);
        const Eigen::VectorXd z = eta + (data.y - mu).cwiseQuotient(w);
        const Eigen::VectorXd sw = w.cwiseSqrt();
        Eigen::VectorXd coef_try =
            (sw.asDiagonal() * a).householderQr().solve(sw.cwiseProduct(z));
        Eigen::VectorXd eta_try = a * coef_try;
        double dev_try = glm_deviance(data.family, data.y, eta_try);

        int halvings = 0;
        while ((!std::isfinite(dev_try) || dev_try > dev * (1.0 + 1e-12)) &&
               halvings < control.max_halvings) {
            coef_try = 0.5 * (coef_try + coef);
            eta_try = a * coef_try;
            dev_try = glm_deviance(data.family, data.y, eta_try);
            ++halvings;
        }
        if (!std::isfinite(dev_try) || dev_try > dev * (1.0 + 1e-12)) {
            // No descent step available; numerically stationary.
            converged = true;
            break;
        }

        const double rel_change = std::abs(dev - dev_try) / (std::abs(dev_try) + 0.1);
        coef = coef_try;
        eta = eta_try;
        dev = dev_try;
        if (rel_change < control.tol) {
            converged = true;
            break;
        }
    }

    if (eta.cwiseAbs().maxCoeff() > control.eta_divergence) separation = true;
    if (separation) converged = false;
    if (!converged && !separation)
        throw NotConvergedError("IRLS exceeded " + std::to_string(control.max_iter) +
                                " iterations for spec " + spec.to_index_string());

    FittedModel fit;
    fit.spec = spec;
    fit.beta0 = coef[0];
    fit.beta = coef.tail(q1 - 1);
    fit.loglik = data.family == Family::Bernoulli ? bernoulli_loglik(data.y, eta)
                                                  : poisson_loglik(data.y, eta);
    fit.k = spec.count() + 1;
    fit.converged = converged;
    fit.separation = separation;
    return fit;
}

FittedModel fit_model(const Dataset& data, const ModelSpec& spec) {
    return data.family == Family::Gaussian ? fit_lm(data, spec) : fit_glm(data, spec);
}

double loglik_at(const Dataset& data, const ModelSpec& spec, double beta0,
                 const Eigen::VectorXd& beta) {
    const std::vector<int> idx = spec.indices();
    if (beta.size() != static_cast<Eigen::Index>(idx.size()))
        throw DimensionError("coefficient vector does not match spec size");
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(data.n(), beta0);
    for (std::size_t j = 0; j < idx.size(); ++j)
        eta += beta[static_cast<Eigen::Index>(j)] * data.X.col(idx[j]);
    switch (data.family) {
        case Family::Gaussian: {
            const double rss = (data.y - eta).squaredNorm();
            return gaussian_profile_loglik(data.n(), rss);
        }
        case Family::Bernoulli: return bernoulli_loglik(data.y, eta);
        case Family::Poisson: return poisson_loglik(data.y, eta);
    }
    return 0.0;
}

Eigen::VectorXd loglik_gradient(const Dataset& data, const ModelSpec& spec, double beta0,
                                const Eigen::VectorXd& beta) {
    const Eigen::MatrixXd a = design_matrix(data, spec);
    Eigen::VectorXd eta = a.col(0) * beta0;
    for (Eigen::Index j = 1; j < a.cols(); ++j) eta += beta[j - 1] * a.col(j);
    Eigen::VectorXd mu(data.n());
    switch (data.family) {
        case Family::Gaussian: mu = eta; break;
        case Family::Bernoulli:
            for (Eigen::Index i = 0; i < mu.size(); ++i)
                mu[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            break;
        case Family::Poisson:
            for (Eigen::Index i = 0; i < mu.size(); ++i) mu[i] = std::exp(eta[i]);
            break;
    }
    // Score of the canonical-link likelihood (Gaussian: up to the 1/sigma^2 factor).
    return a.transpose() * (data.y - mu);
}

} // namespace varsel

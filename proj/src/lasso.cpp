#include "varsel/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "varsel/rng.hpp"

namespace varsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbClamp = 1e-10;  // likelihood evaluations
constexpr double kWeightClamp = 1e-5; // proximal Newton working weights

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Centered columns scaled to unit population variance (divisor n).
// Zero-variance columns stay zero and are never updated.
struct Standardized {
    Eigen::MatrixXd xs;
    Eigen::VectorXd means;
    Eigen::VectorXd scales;
    std::vector<bool> usable;
    double y_mean = 0.0;
};

Standardized standardize(const Dataset& data) {
    const int n = data.n(), p = data.p();
    Standardized s;
    s.xs.resize(n, p);
    s.means.resize(p);
    s.scales.resize(p);
    s.usable.assign(p, false);
    for (int j = 0; j < p; ++j) {
        const double m = data.X.col(j).mean();
        const Eigen::VectorXd centered = data.X.col(j).array() - m;
        const double sd = std::sqrt(centered.squaredNorm() / n);
        s.means[j] = m;
        s.scales[j] = sd;
        if (sd > 0.0) {
            s.xs.col(j) = centered / sd;
            s.usable[j] = true;
        } else {
            s.xs.col(j).setZero();
        }
    }
    s.y_mean = data.y.mean();
    return s;
}

// Gaussian coordinate descent with covariance updates: maintains
// grad_j = <x_j, y>/n - sum_k G_jk beta_k, with Gram columns filled lazily
// on first activation of a variable.
class GaussianCd {
  public:
    GaussianCd(const Standardized& s, const Dataset& data, const LassoControl& ctl)
        : s_(s), ctl_(ctl), n_(data.n()), p_(data.p()) {
        const Eigen::VectorXd yc = data.y.array() - s_.y_mean;
        grad_ = s_.xs.transpose() * yc / n_;
        beta_ = Eigen::VectorXd::Zero(p_);
        gram_.resize(p_);
        gram_ready_.assign(p_, false);
    }

    double lambda_max() const {
        double m = 0.0;
        for (int j = 0; j < p_; ++j)
            if (s_.usable[j]) m = std::max(m, std::abs(grad_[j]));
        return m;
    }

    bool solve_at(double lambda) {
        long sweeps = 0;
        for (;;) {
            const double full_change = sweep(lambda, false);
            ++sweeps;
            if (full_change <= ctl_.coef_tol) return true;
            if (sweeps >= ctl_.max_sweeps_per_lambda) return false;
            for (;;) {
                const double active_change = sweep(lambda, true);
                ++sweeps;
                if (active_change <= ctl_.coef_tol) break;
                if (sweeps >= ctl_.max_sweeps_per_lambda) return false;
            }
        }
    }

    const Eigen::VectorXd& beta() const { return beta_; }
    double intercept_std() const { return 0.0; } // y and x both centered

  private:
    double sweep(double lambda, bool active_only) {
        double max_change = 0.0;
        for (int j = 0; j < p_; ++j) {
            if (!s_.usable[j]) continue;
            if (active_only && beta_[j] == 0.0) continue;
            const double z = grad_[j] + beta_[j]; // G_jj = 1 after standardization
            const double bn = soft_threshold(z, lambda);
            const double delta = bn - beta_[j];
            if (delta != 0.0) {
                ensure_gram(j);
                grad_ -= gram_[j] * delta;
                beta_[j] = bn;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        return max_change;
    }

    void ensure_gram(int j) {
        if (gram_ready_[j]) return;
        gram_[j] = s_.xs.transpose() * s_.xs.col(j) / n_;
        gram_ready_[j] = true;
    }

    const Standardized& s_;
    const LassoControl& ctl_;
    int n_, p_;
    Eigen::VectorXd grad_;
    Eigen::VectorXd beta_;
    std::vector<Eigen::VectorXd> gram_;
    std::vector<bool> gram_ready_;
};

// Proximal Newton for Bernoulli/Poisson: quadratic approximation of the
// scaled negative log-likelihood around the current point, penalized
// weighted least squares inner solve by coordinate descent.
class GlmCd {
  public:
    GlmCd(const Standardized& s, const Dataset& data, const LassoControl& ctl)
        : s_(s), y_(data.y), family_(data.family), ctl_(ctl), n_(data.n()),
          p_(data.p()) {
        beta_ = Eigen::VectorXd::Zero(p_);
        const double ybar = y_.mean();
        if (family_ == Family::Bernoulli) {
            const double pbar = std::clamp(ybar, 1e-6, 1.0 - 1e-6);
            b0_ = std::log(pbar / (1.0 - pbar));
        } else {
            b0_ = std::log(std::max(ybar, 0.1));
        }
    }

    double lambda_max() const {
        // Score of the scaled NLL at the intercept-only fit; the null fitted
        // mean is ybar for both canonical families and the columns are
        // centered, so <x_j, y - ybar> = <x_j, y>.
        double m = 0.0;
        for (int j = 0; j < p_; ++j)
            if (s_.usable[j]) m = std::max(m, std::abs(s_.xs.col(j).dot(y_)) / n_);
        return m;
    }

    bool solve_at(double lambda) {
        long sweeps = 0;
        for (int outer = 0; outer < ctl_.max_outer_per_lambda; ++outer) {
            Eigen::VectorXd eta = (s_.xs * beta_).array() + b0_;
            Eigen::VectorXd mu(n_), w(n_);
            if (family_ == Family::Bernoulli) {
                for (int i = 0; i < n_; ++i) {
                    const double pr =
                        std::clamp(1.0 / (1.0 + std::exp(-eta[i])), kWeightClamp,
                                   1.0 - kWeightClamp);
                    mu[i] = pr;
                    w[i] = pr * (1.0 - pr);
                }
            } else {
                for (int i = 0; i < n_; ++i) {
                    mu[i] = std::exp(std::min(eta[i], 300.0));
                    w[i] = std::max(mu[i], kWeightClamp);
                }
            }

            const Eigen::MatrixXd wxs = s_.xs.array().colwise() * w.array();
            Eigen::VectorXd denom(p_);
            for (int j = 0; j < p_; ++j)
                denom[j] = s_.usable[j] ? wxs.col(j).dot(s_.xs.col(j)) / n_ : 0.0;
            const double wsum = w.sum();

            // Working residual of z = eta + (y - mu)/w around the current fit.
            Eigen::VectorXd r = (y_ - mu).cwiseQuotient(w);
            double outer_change = 0.0;

            auto wls_sweep = [&](bool active_only) {
                double max_change = 0.0;
                for (int j = 0; j < p_; ++j) {
                    if (!s_.usable[j] || denom[j] <= 0.0) continue;
                    if (active_only && beta_[j] == 0.0) continue;
                    const double rho = wxs.col(j).dot(r) / n_ + denom[j] * beta_[j];
                    const double bn = soft_threshold(rho, lambda) / denom[j];
                    const double delta = bn - beta_[j];
                    if (delta != 0.0) {
                        r -= s_.xs.col(j) * delta;
                        beta_[j] = bn;
                        max_change = std::max(max_change, std::abs(delta));
                    }
                }
                const double d0 = w.dot(r) / wsum;
                if (d0 != 0.0) {
                    b0_ += d0;
                    r.array() -= d0;
                    max_change = std::max(max_change, std::abs(d0));
                }
                return max_change;
            };

            for (;;) {
                const double full_change = wls_sweep(false);
                ++sweeps;
                outer_change = std::max(outer_change, full_change);
                if (full_change <= ctl_.coef_tol) break;
                if (sweeps >= ctl_.max_sweeps_per_lambda) return false;
                for (;;) {
                    const double active_change = wls_sweep(true);
                    ++sweeps;
                    outer_change = std::max(outer_change, active_change);
                    if (active_change <= ctl_.coef_tol) break;
                    if (sweeps >= ctl_.max_sweeps_per_lambda) return false;
                }
            }
            if (outer_change <= ctl_.coef_tol) return true;
        }
        return false;
    }

    const Eigen::VectorXd& beta() const { return beta_; }
    double intercept_std() const { return b0_; }

  private:
    const Standardized& s_;
    const Eigen::VectorXd& y_;
    Family family_;
    const LassoControl& ctl_;
    int n_, p_;
    Eigen::VectorXd beta_;
    double b0_ = 0.0;
};

template <typename Solver>
LassoPath run_path(const Dataset& data, const Standardized& std_data,
                   std::vector<double> lambdas, const LassoControl& ctl) {
    Solver solver(std_data, data, ctl);
    const bool auto_grid = lambdas.empty();
    if (lambdas.empty()) {
        double lambda_max = solver.lambda_max();
        if (!(lambda_max > 0.0)) lambda_max = 1e-3; // fully uncorrelated edge case
        const int n_lambda = std::max(1, ctl.n_lambda);
        double ratio = ctl.lambda_min_ratio;
        if (ratio <= 0.0) ratio = data.n() > data.p() ? 1e-4 : 1e-2;
        lambdas.resize(n_lambda);
        lambdas[0] = lambda_max;
        for (int i = 1; i < n_lambda; ++i)
            lambdas[i] = lambda_max * std::pow(ratio, static_cast<double>(i) /
                                                          (n_lambda - 1));
    }
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i - 1]))
            throw Error("lambda grid must be strictly decreasing");

    const int p = data.p();
    LassoPath path;
    path.family = data.family;
    path.lambdas = lambdas;
    path.intercepts.reserve(lambdas.size());
    path.coefs.reserve(lambdas.size());
    path.supports.reserve(lambdas.size());
    path.converged.reserve(lambdas.size());

    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const double lambda = lambdas[li];
        // At the head of an auto grid the solution is the null model by the
        // definition of lambda_max; solving there can only flip coefficients
        // by rounding noise, so keep the solver at its null starting state.
        const bool ok = (auto_grid && li == 0) ? true : solver.solve_at(lambda);
        const Eigen::VectorXd& bstd = solver.beta();
        Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
        ModelSpec support(p);
        double intercept = solver.intercept_std();
        for (int j = 0; j < p; ++j) {
            if (bstd[j] != 0.0) {
                coef[j] = bstd[j] / std_data.scales[j];
                support.set(j, true);
                intercept -= coef[j] * std_data.means[j];
            }
        }
        if (data.family == Family::Gaussian) intercept += std_data.y_mean;
        path.intercepts.push_back(intercept);
        path.coefs.push_back(std::move(coef));
        path.supports.push_back(std::move(support));
        path.converged.push_back(ok);
    }
    return path;
}

LassoPath path_impl(const Dataset& data, std::vector<double> lambdas,
                    const LassoControl& ctl) {
    if (data.p() < 1) throw Error("lasso_path requires p >= 1");
    const Standardized std_data = standardize(data);
    if (data.family == Family::Gaussian)
        return run_path<GaussianCd>(data, std_data, std::move(lambdas), ctl);
    return run_path<GlmCd>(data, std_data, std::move(lambdas), ctl);
}

double deviance_loss(Family family, double y, double eta) {
    switch (family) {
        case Family::Gaussian: {
            const double r = y - eta;
            return r * r;
        }
        case Family::Bernoulli: {
            const double pr =
                std::clamp(1.0 / (1.0 + std::exp(-eta)), kProbClamp, 1.0 - kProbClamp);
            return -2.0 * (y * std::log(pr) + (1.0 - y) * std::log(1.0 - pr));
        }
        case Family::Poisson: {
            const double mu = std::exp(eta);
            if (y > 0.0) return 2.0 * (y * (std::log(y) - eta) - (y - mu));
            return 2.0 * mu;
        }
    }
    return 0.0;
}

} // namespace

LassoPath lasso_path(const Dataset& data, int n_lambda) {
    LassoControl ctl;
    ctl.n_lambda = n_lambda;
    return path_impl(data, {}, ctl);
}

LassoPath lasso_path(const Dataset& data, const LassoControl& control) {
    return path_impl(data, {}, control);
}

LassoPath lasso_path_fixed(const Dataset& data, const std::vector<double>& lambdas,
                           const LassoControl& control) {
    if (lambdas.empty()) throw Error("lasso_path_fixed needs a non-empty grid");
    return path_impl(data, lambdas, control);
}

double lasso_objective(const Dataset& data, double lambda, double intercept,
                       const Eigen::VectorXd& coef) {
    if (coef.size() != data.p()) throw DimensionError("coefficient length != p");
    const int n = data.n();
    Eigen::VectorXd eta = (data.X * coef).array() + intercept;
    double fit = 0.0;
    switch (data.family) {
        case Family::Gaussian: fit = (data.y - eta).squaredNorm() / (2.0 * n); break;
        case Family::Bernoulli:
            for (int i = 0; i < n; ++i)
                fit += 0.5 * deviance_loss(Family::Bernoulli, data.y[i], eta[i]);
            fit /= n;
            break;
        case Family::Poisson:
            for (int i = 0; i < n; ++i)
                fit += std::exp(eta[i]) - data.y[i] * eta[i] + std::lgamma(data.y[i] + 1.0);
            fit /= n;
            break;
    }
    double penalty = 0.0;
    for (int j = 0; j < data.p(); ++j) {
        const double m = data.X.col(j).mean();
        const double sd =
            std::sqrt((data.X.col(j).array() - m).square().sum() / n);
        penalty += std::abs(coef[j]) * sd;
    }
    return fit + lambda * penalty;
}

CVResult cv_select(const Dataset& data, const LassoPath& path, int n_folds,
                   std::uint64_t seed) {
    const int n = data.n();
    if (n_folds < 2) throw Error("cv_select requires n_folds >= 2");
    if (n < n_folds) throw Error("cv_select requires n >= n_folds");
    const int n_lambda = static_cast<int>(path.size());

    std::vector<int> fold_of(n);
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
        RandomStream rng(mix64(seed) + static_cast<std::uint64_t>(attempt));
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        for (int i = 0; i < n; ++i) fold_of[perm[i]] = i % n_folds;
        ok = true;
        if (data.family == Family::Bernoulli) {
            for (int f = 0; f < n_folds && ok; ++f) {
                double sum = 0.0;
                int count = 0;
                for (int i = 0; i < n; ++i)
                    if (fold_of[i] != f) {
                        sum += data.y[i];
                        ++count;
                    }
                if (count == 0 || sum == 0.0 || sum == count) ok = false;
            }
        }
    }
    if (!ok)
        throw FoldDegenerateError(
            "a Bernoulli training fold is single-class after one reshuffle");

    Eigen::MatrixXd fold_loss(n_folds, n_lambda);
    for (int f = 0; f < n_folds; ++f) {
        std::vector<int> train_rows, val_rows;
        for (int i = 0; i < n; ++i)
            (fold_of[i] == f ? val_rows : train_rows).push_back(i);

        Eigen::VectorXd ty(train_rows.size());
        Eigen::MatrixXd tx(train_rows.size(), data.p());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            ty[static_cast<Eigen::Index>(i)] = data.y[train_rows[i]];
            tx.row(static_cast<Eigen::Index>(i)) = data.X.row(train_rows[i]);
        }
        const Dataset train(std::move(ty), std::move(tx), data.family);
        const LassoPath tp = lasso_path_fixed(train, path.lambdas);

        for (int l = 0; l < n_lambda; ++l) {
            double loss = 0.0;
            for (int i : val_rows) {
                const double eta =
                    tp.intercepts[l] + data.X.row(i).dot(tp.coefs[l]);
                loss += deviance_loss(data.family, data.y[i], eta);
            }
            fold_loss(f, l) = loss / static_cast<double>(val_rows.size());
        }
    }

    CVResult result;
    result.fold_assignment = std::move(fold_of);
    result.cv_mean.resize(n_lambda);
    result.cv_se.resize(n_lambda);
    for (int l = 0; l < n_lambda; ++l) {
        const double mean = fold_loss.col(l).mean();
        result.cv_mean[l] = mean;
        const double ss = (fold_loss.col(l).array() - mean).square().sum();
        result.cv_se[l] = std::sqrt(ss / (n_folds - 1) / n_folds);
    }
    int best = 0;
    for (int l = 1; l < n_lambda; ++l)
        if (result.cv_mean[l] < result.cv_mean[best]) best = l; // ties keep larger lambda
    result.lambda_min_index = best;
    result.lambda_min = path.lambdas[static_cast<std::size_t>(best)];
    return result;
}

SearchResult lasso_select_ic(const Dataset& data, const LassoPath& path,
                             Criterion criterion, const LassoSelectOptions& options) {
    const ModelScorer scorer(data, criterion);
    std::unordered_set<ModelSpec, ModelSpecHash> seen;

    SearchResult result;
    bool have_best = false;
    ModelSpec best_spec;
    double best_score = kInf;
    std::size_t best_index = 0;

    for (std::size_t l = 0; l < path.size(); ++l) {
        const ModelSpec& support = path.supports[l];
        if (options.refit && !seen.insert(support).second) continue;
        ++result.n_models_evaluated;
        double score;
        try {
            if (options.refit) {
                score = scorer.score(scorer.fit(support));
            } else {
                const std::vector<int> idx = support.indices();
                Eigen::VectorXd beta(static_cast<Eigen::Index>(idx.size()));
                for (std::size_t j = 0; j < idx.size(); ++j)
                    beta[static_cast<Eigen::Index>(j)] = path.coefs[l][idx[j]];
                const double ll =
                    loglik_at(data, support, path.intercepts[l], beta);
                const int k = support.count() +
                              (data.family == Family::Gaussian ? 2 : 1);
                score = evaluate(criterion, ll, k, data.n());
            }
        } catch (const Error&) {
            ++result.n_skipped;
            continue;
        }
        if (!std::isfinite(score)) {
            ++result.n_skipped;
            continue;
        }
        result.trace.emplace_back(support, score);
        // Ties: smaller support, then the earlier (larger-lambda) candidate.
        const bool better =
            !have_best || score < best_score ||
            (score == best_score && support.count() < best_spec.count());
        if (better) {
            have_best = true;
            best_spec = support;
            best_score = score;
            best_index = l;
        }
    }
    if (!have_best)
        throw AllModelsDegenerateError("no path candidate produced a finite score");
    if (options.refit) {
        result.best = scorer.fit(best_spec);
    } else {
        FittedModel fit;
        fit.spec = best_spec;
        fit.beta0 = path.intercepts[best_index];
        const std::vector<int> idx = best_spec.indices();
        fit.beta.resize(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j)
            fit.beta[static_cast<Eigen::Index>(j)] = path.coefs[best_index][idx[j]];
        fit.loglik = loglik_at(data, best_spec, fit.beta0, fit.beta);
        fit.k = best_spec.count() + (data.family == Family::Gaussian ? 2 : 1);
        fit.converged = path.converged[best_index];
        result.best = std::move(fit);
    }
    result.best_score = best_score;
    return result;
}

} // namespace varsel

#include "varsel/simgen.hpp"

#include <cmath>
#include <ostream>

#include "varsel/io_util.hpp"

namespace varsel {

std::string study_name(Study s) {
    return s == Study::S1Equicorr ? "S1" : "S2";
}

Study study_from_name(const std::string& name) {
    if (name == "S1") return Study::S1Equicorr;
    if (name == "S2") return Study::S2Ar1;
    throw Error("unknown study: " + name + " (expected S1 or S2)");
}

SimSetting SimSetting::study1(Family family, int n, double rho, double sigma2,
                              std::uint64_t seed) {
    SimSetting s;
    s.study = Study::S1Equicorr;
    s.family = family;
    s.n = n;
    s.p = 6;
    s.rho = rho;
    s.sigma2 = sigma2;
    s.true_support = ModelSpec::from_indices(6, {0, 1, 2});
    s.seed = seed;
    return s;
}

SimSetting SimSetting::study2(Family family, int n, double rho, double sigma2,
                              std::uint64_t seed) {
    SimSetting s;
    s.study = Study::S2Ar1;
    s.family = family;
    s.n = n;
    s.p = 50;
    s.rho = rho;
    s.sigma2 = sigma2;
    s.true_support = ModelSpec(50);
    for (int j = 0; j < 50; j += 2) s.true_support.set(j, true); // x1, x3, ..., x49
    if (family != Family::Gaussian) s.beta_value = 0.3;
    s.seed = seed;
    return s;
}

double SimSetting::cohens_f() const {
    return 1.0 / std::sqrt(sigma2);
}

void SimSetting::validate() const {
    if (n < 1) throw Error("SimSetting: n must be >= 1");
    if (p < 0) throw Error("SimSetting: p must be >= 0");
    if (rho < 0.0 || rho >= 1.0) throw Error("SimSetting: rho must be in [0, 1)");
    if (family == Family::Gaussian && sigma2 <= 0.0)
        throw Error("SimSetting: sigma2 must be > 0");
    if (true_support.width() != p)
        throw Error("SimSetting: true_support width must equal p");
}

Eigen::MatrixXd gen_design_equicorr(int n, int p, double rho, RandomStream& rng) {
    if (rho < 0.0 || rho >= 1.0) throw Error("equicorrelated design needs rho in [0, 1)");
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, rho);
    sigma.diagonal().setOnes();
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();

    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = rng.normal();
        x.row(i) = (chol * z).transpose();
    }
    return x;
}

Eigen::MatrixXd gen_design_ar1(int n, int p, double rho, RandomStream& rng) {
    if (rho < 0.0 || rho >= 1.0) throw Error("AR(1) design needs rho in [0, 1)");
    const double sd1 = 1.0 / std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = sd1 * rng.normal();
        for (int j = 1; j < p; ++j) x(i, j) = rho * x(i, j - 1) + rng.normal();
    }
    return x;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& X, const SimSetting& setting,
                             RandomStream& rng, long* clamp_events) {
    if (X.rows() != setting.n || X.cols() != setting.p)
        throw DimensionError("design dimensions do not match the setting");
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(setting.p);
    for (int j : setting.true_support.indices()) beta[j] = setting.beta_value;
    Eigen::VectorXd eta = (X * beta).array() + setting.beta0;

    Eigen::VectorXd y(setting.n);
    switch (setting.family) {
        case Family::Gaussian: {
            const double sd = std::sqrt(setting.sigma2);
            for (int i = 0; i < setting.n; ++i) y[i] = eta[i] + sd * rng.normal();
            break;
        }
        case Family::Bernoulli:
            for (int i = 0; i < setting.n; ++i)
                y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta[i]))) ? 1.0 : 0.0;
            break;
        case Family::Poisson:
            for (int i = 0; i < setting.n; ++i) {
                double e = eta[i];
                if (e > setting.poisson_eta_clamp) {
                    e = setting.poisson_eta_clamp;
                    if (clamp_events) ++*clamp_events;
                }
                y[i] = static_cast<double>(rng.poisson(std::exp(e)));
            }
            break;
    }
    return y;
}

Dataset gen_dataset(const SimSetting& setting, long* clamp_events) {
    setting.validate();
    RandomStream rng(setting.seed);
    Eigen::MatrixXd x = setting.study == Study::S1Equicorr
                            ? gen_design_equicorr(setting.n, setting.p, setting.rho, rng)
                            : gen_design_ar1(setting.n, setting.p, setting.rho, rng);
    Eigen::VectorXd y = gen_response(x, setting, rng, clamp_events);
    return Dataset(std::move(y), std::move(x), setting.family);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
    out << "y";
    for (int j = 1; j <= data.p(); ++j) out << ",x" << j;
    out << "\n";
    for (int i = 0; i < data.n(); ++i) {
        out << format_double(data.y[i]);
        for (int j = 0; j < data.p(); ++j) out << ',' << format_double(data.X(i, j));
        out << "\n";
    }
}

} // namespace varsel

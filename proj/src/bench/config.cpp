#include "varsel/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "varsel/io_util.hpp"
#include "varsel/rng.hpp"

namespace varsel::bench {

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string token;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!token.empty()) out.push_back(std::move(token));
            token.clear();
        } else {
            token += c;
        }
    }
    if (!token.empty()) out.push_back(std::move(token));
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <typename F>
auto guarded(int line, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(line, e.what());
    }
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += " ";
        s += format_double(v[i]);
    }
    return s;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += " ";
        s += std::to_string(v[i]);
    }
    return s;
}

} // namespace

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> names = {
        "BIC",       "AIC",       "GA_BIC",    "GA_AIC",      "LASSO_BIC",
        "LASSO_AIC", "LASSO_CV",  "Stepwise_BIC", "Stepwise_AIC"};
    return names;
}

BenchConfig BenchConfig::parse(const std::string& text) {
    BenchConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::set<std::string> seen;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "empty key");
        if (value.empty()) throw ConfigError(line_no, "empty value for key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(line_no, "duplicate key '" + key + "'");

        guarded(line_no, [&] {
            if (key == "study") {
                cfg.study = study_from_name(value);
            } else if (key == "family") {
                cfg.family = family_from_name(value);
            } else if (key == "p") {
                cfg.p = static_cast<int>(parse_int(value));
            } else if (key == "n") {
                cfg.n_grid.clear();
                for (const auto& t : split_list(value))
                    cfg.n_grid.push_back(static_cast<int>(parse_int(t)));
            } else if (key == "rho") {
                cfg.rho_grid.clear();
                for (const auto& t : split_list(value)) cfg.rho_grid.push_back(parse_double(t));
            } else if (key == "sigma2") {
                cfg.sigma2_grid.clear();
                for (const auto& t : split_list(value))
                    cfg.sigma2_grid.push_back(parse_double(t));
            } else if (key == "replicates") {
                cfg.replicates = static_cast<int>(parse_int(value));
            } else if (key == "methods") {
                cfg.methods = split_list(value);
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_int(value));
            } else if (key == "workers") {
                cfg.workers = static_cast<int>(parse_int(value));
            } else if (key == "output") {
                cfg.output = value;
            } else if (key == "beta_value") {
                cfg.beta_value = parse_double(value);
            } else if (key == "beta0") {
                cfg.beta0 = parse_double(value);
            } else if (key == "true_support") {
                cfg.true_support_1based.clear();
                for (const auto& t : split_list(value))
                    cfg.true_support_1based.push_back(static_cast<int>(parse_int(t)));
            } else if (key == "poisson_eta_clamp") {
                cfg.poisson_eta_clamp = parse_double(value);
            } else if (key == "ga.population_size") {
                cfg.ga.population_size = static_cast<int>(parse_int(value));
            } else if (key == "ga.max_generations") {
                cfg.ga.max_generations = static_cast<int>(parse_int(value));
            } else if (key == "ga.stall_generations") {
                cfg.ga.stall_generations = static_cast<int>(parse_int(value));
            } else if (key == "ga.crossover_prob") {
                cfg.ga.crossover_prob = parse_double(value);
            } else if (key == "ga.mutation_prob_per_gene") {
                cfg.ga.mutation_prob_per_gene = parse_double(value);
            } else if (key == "ga.elite_fraction") {
                cfg.ga.elite_fraction = parse_double(value);
            } else if (key == "lasso.n_lambda") {
                cfg.lasso_n_lambda = static_cast<int>(parse_int(value));
            } else if (key == "cv.folds") {
                cfg.cv_folds = static_cast<int>(parse_int(value));
            } else {
                throw ConfigError(line_no, "unknown key '" + key + "'");
            }
            return 0;
        });
    }
    return cfg;
}

BenchConfig BenchConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError(0, "cannot open config file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

BenchConfig BenchConfig::resolved() const {
    BenchConfig r = *this;
    if (r.p < 0) r.p = r.study == Study::S1Equicorr ? 6 : 50;
    if (r.beta_value < 0.0) {
        // GLM effect sizes scale down in the large-p design to keep the
        // linear predictor in a realistic range.
        if (r.family != Family::Gaussian && r.p > 6)
            r.beta_value = 0.3;
        else
            r.beta_value = 1.0;
    }
    if (r.true_support_1based.empty()) {
        if (r.study == Study::S1Equicorr) {
            for (int j = 1; j <= std::min(3, r.p); ++j) r.true_support_1based.push_back(j);
        } else {
            for (int j = 1; j <= r.p; j += 2) r.true_support_1based.push_back(j);
        }
    }
    if (r.n_grid.empty()) throw ConfigError(0, "missing required key 'n'");
    if (r.rho_grid.empty()) throw ConfigError(0, "missing required key 'rho'");
    if (r.sigma2_grid.empty()) {
        if (r.family == Family::Gaussian)
            throw ConfigError(0, "missing required key 'sigma2'");
        r.sigma2_grid = {1.0}; // nominal; the GLM families have no error variance
    }
    if (r.methods.empty()) throw ConfigError(0, "missing required key 'methods'");

    // Validation.
    if (r.p < 1) throw ConfigError(0, "p must be >= 1");
    if (r.replicates < 1) throw ConfigError(0, "replicates must be >= 1");
    if (r.workers < 0) throw ConfigError(0, "workers must be >= 0");
    if (r.cv_folds < 2) throw ConfigError(0, "cv.folds must be >= 2");
    if (r.lasso_n_lambda < 2) throw ConfigError(0, "lasso.n_lambda must be >= 2");
    for (int n : r.n_grid) {
        if (n < 2) throw ConfigError(0, "each n must be >= 2");
        if (std::count(r.n_grid.begin(), r.n_grid.end(), n) > 1)
            throw ConfigError(0, "duplicate n value " + std::to_string(n));
    }
    for (double rho : r.rho_grid)
        if (rho < 0.0 || rho >= 1.0) throw ConfigError(0, "rho must be in [0, 1)");
    for (double s2 : r.sigma2_grid)
        if (s2 <= 0.0) throw ConfigError(0, "sigma2 must be > 0");
    std::set<std::string> method_set;
    for (const std::string& m : r.methods) {
        if (std::find(known_methods().begin(), known_methods().end(), m) ==
            known_methods().end())
            throw ConfigError(0, "unknown method '" + m + "'");
        if (!method_set.insert(m).second)
            throw ConfigError(0, "duplicate method '" + m + "'");
        if ((m == "BIC" || m == "AIC") && r.p > 25)
            throw ConfigError(0, "method " + m + " (exhaustive search) requires p <= 25");
    }
    for (int j : r.true_support_1based)
        if (j < 1 || j > r.p) throw ConfigError(0, "true_support index out of 1..p");
    if (r.true_support_1based.empty())
        throw ConfigError(0, "true_support must be non-empty");
    try {
        r.ga.validate(r.p);
    } catch (const std::exception& e) {
        throw ConfigError(0, e.what());
    }
    for (int n : r.n_grid)
        if (n < r.cv_folds &&
            std::find(r.methods.begin(), r.methods.end(), "LASSO_CV") != r.methods.end())
            throw ConfigError(0, "LASSO_CV requires every n >= cv.folds");
    return r;
}

std::string BenchConfig::manifest() const {
    std::ostringstream out;
    out << "# resolved benchmark manifest; re-runnable as a config file\n";
    out << "study = " << study_name(study) << "\n";
    out << "family = " << family_name(family) << "\n";
    out << "p = " << p << "\n";
    out << "n = " << join_ints(n_grid) << "\n";
    out << "rho = " << join_doubles(rho_grid) << "\n";
    out << "sigma2 = " << join_doubles(sigma2_grid) << "\n";
    out << "replicates = " << replicates << "\n";
    out << "methods = ";
    for (std::size_t i = 0; i < methods.size(); ++i) out << (i ? " " : "") << methods[i];
    out << "\n";
    out << "seed = " << seed << "\n";
    out << "workers = " << workers << "\n";
    out << "output = " << output << "\n";
    out << "beta_value = " << format_double(beta_value) << "\n";
    out << "beta0 = " << format_double(beta0) << "\n";
    out << "true_support = " << join_ints(true_support_1based) << "\n";
    out << "poisson_eta_clamp = " << format_double(poisson_eta_clamp) << "\n";
    out << "ga.population_size = " << ga.population_size << "\n";
    out << "ga.max_generations = " << ga.max_generations << "\n";
    out << "ga.stall_generations = " << ga.stall_generations << "\n";
    out << "ga.crossover_prob = " << format_double(ga.crossover_prob) << "\n";
    out << "ga.mutation_prob_per_gene = " << format_double(ga.mutation_prob_per_gene)
        << "\n";
    out << "ga.elite_fraction = " << format_double(ga.elite_fraction) << "\n";
    out << "lasso.n_lambda = " << lasso_n_lambda << "\n";
    out << "cv.folds = " << cv_folds << "\n";
    return out.str();
}

ModelSpec BenchConfig::true_support() const {
    ModelSpec s(p);
    for (int j : true_support_1based) s.set(j - 1, true);
    return s;
}

SimSetting BenchConfig::cell_setting(int n, double rho, double sigma2,
                                     int replicate) const {
    SimSetting s;
    s.study = study;
    s.family = family;
    s.n = n;
    s.p = p;
    s.rho = rho;
    s.sigma2 = sigma2;
    s.true_support = true_support();
    s.beta_value = beta_value;
    s.beta0 = beta0;
    s.poisson_eta_clamp = poisson_eta_clamp;

    std::string cell = study_name(study) + "|" + family_name(family) +
                       "|n=" + std::to_string(n) + "|rho=" + format_double(rho) +
                       "|sigma2=" + format_double(sigma2) + "|p=" + std::to_string(p) +
                       "|beta=" + format_double(beta_value) +
                       "|beta0=" + format_double(beta0);
    s.seed = derive_seed(seed, fnv1a64(cell), static_cast<std::uint64_t>(replicate));
    return s;
}

std::uint64_t BenchConfig::method_seed(int n, double rho, double sigma2, int replicate,
                                       const std::string& method) const {
    const SimSetting s = cell_setting(n, rho, sigma2, replicate);
    return mix64(s.seed ^ fnv1a64(method));
}

} // namespace varsel::bench

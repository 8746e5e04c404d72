#include "varsel/criteria.hpp"

#include <cmath>

namespace varsel {

std::string criterion_name(Criterion c) {
    return c == Criterion::AIC ? "AIC" : "BIC";
}

Criterion criterion_from_name(const std::string& name) {
    if (name == "AIC") return Criterion::AIC;
    if (name == "BIC") return Criterion::BIC;
    throw Error("unknown criterion: " + name);
}

double evaluate(Criterion criterion, double loglik, int k, double n) {
    if (!std::isfinite(loglik))
        throw NonFiniteLoglikError("criterion requested on a non-finite log-likelihood");
    if (n < 1.0) throw DimensionError("criterion requires n >= 1");
    const double penalty = criterion == Criterion::AIC ? 2.0 * k : k * std::log(n);
    return -2.0 * loglik + penalty;
}

double evaluate(Criterion criterion, const FittedModel& fit, double n) {
    return evaluate(criterion, fit.loglik, fit.k, n);
}

} // namespace varsel

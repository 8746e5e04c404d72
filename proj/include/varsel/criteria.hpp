#pragma once

#include <string>

#include "varsel/model.hpp"

namespace varsel {

enum class Criterion { AIC, BIC };

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

// AIC = -2 l + 2k, BIC = -2 l + k log(n), natural log. A lower value is a
// better trade-off between fit and complexity. n is real-valued so the
// penalties can be compared at non-integer sample sizes (they coincide at
// n = e^2). Throws NonFiniteLoglikError on a non-finite l.
double evaluate(Criterion criterion, double loglik, int k, double n);
double evaluate(Criterion criterion, const FittedModel& fit, double n);

} // namespace varsel

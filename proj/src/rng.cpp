#include "varsel/rng.hpp"

#include <cmath>

namespace varsel {

double RandomStream::normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

long RandomStream::poisson(double mean) {
    if (mean <= 0.0) return 0;

    if (mean < 10.0) {
        // Inversion by multiplication (Knuth).
        const double limit = std::exp(-mean);
        double prod = 1.0;
        long k = 0;
        do {
            prod *= uniform01();
            ++k;
        } while (prod > limit);
        return k - 1;
    }

    // PTRD: transformed rejection with squeeze (Hormann 1993).
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);

    for (;;) {
        double u = uniform01() - 0.5;
        double v = uniform01();
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_mu - mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<long>(kf);
    }
}

std::uint64_t RandomStream::uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t x, r;
    do {
        x = eng_();
        r = x % n;
    } while (x - r > std::uint64_t(0) - n);
    return r;
}

} // namespace varsel

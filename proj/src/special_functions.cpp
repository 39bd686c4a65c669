#include "fibint/special_functions.hpp"

#include <cmath>

namespace fibint {

namespace {

// Lanczos approximation, g = 7, 9 coefficients. Good for ~15 significant
// digits with the argument shifted into x >= 0.5.
double lanczos_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,     676.5203681218851,    -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};
    const double g = 7.0;
    double series = coef[0];
    for (int i = 1; i < 9; ++i)
        series += coef[i] / (x - 1.0 + i);
    const double t = x - 0.5 + g;
    return std::sqrt(2.0 * M_PI) * std::pow(t, x - 0.5) * std::exp(-t) * series;
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0))
        throw domain_error("gamma_fn: argument must be positive");
    if (x < 0.5)
        return lanczos_gamma(x + 1.0) / x;
    return lanczos_gamma(x);
}

double pochhammer(double a, long k) {
    if (k < 0)
        throw domain_error("pochhammer: k must be non-negative");
    double p = 1.0;
    for (long i = 0; i < k; ++i)
        p *= a + static_cast<double>(i);
    return p;
}

namespace detail {

double gamma_signed(double x) {
    if (x > 0.0)
        return gamma_fn(x);
    if (near_integer(x))
        throw domain_error("gamma_signed: pole at non-positive integer");
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
}

double rgamma_signed(double x) {
    if (x > 0.0)
        return 1.0 / gamma_fn(x);
    if (near_integer(x))
        return 0.0;
    return std::sin(M_PI * x) * gamma_fn(1.0 - x) / M_PI;
}

}  // namespace detail

double hyp2f1(const Hyp2F1Params& p) { return hyp2f1_t<double>(p.a, p.b, p.c, p.z); }

}  // namespace fibint

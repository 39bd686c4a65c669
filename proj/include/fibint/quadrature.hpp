#ifndef FIBINT_QUADRATURE_HPP
#define FIBINT_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "fibint/common.hpp"

namespace fibint {

/// Tolerances and budget for the adaptive integrators.
struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-300;
    int max_subdivisions = 4000;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1] (positive half).
struct GK15 {
    static constexpr double nodes[8] = {
        0.000000000000000, 0.405845151377397, 0.741531185599394, 0.949107912342759,
        0.207784955007898, 0.586087235467691, 0.864864423359769, 0.991455371120813};
    static constexpr double gauss_w[4] = {0.417959183673469, 0.381830050505119,
                                          0.279705391489277, 0.129484966168870};
    static constexpr double kronrod_w[8] = {0.209482141084728, 0.190350578064785,
                                            0.140653259715525, 0.063092092629979,
                                            0.204432940075298, 0.169004726639267,
                                            0.104790010322250, 0.022935322010529};
};

template <class Func>
double gk15_panel(const Func& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double gauss = GK15::gauss_w[0] * f0;
    double kron = GK15::kronrod_w[0] * f0;
    for (int i = 1; i < 4; ++i) {
        const double dx = half * GK15::nodes[i];
        const double fi = f(mid + dx) + f(mid - dx);
        gauss += GK15::gauss_w[i] * fi;
        kron += GK15::kronrod_w[i] * fi;
    }
    for (int i = 4; i < 8; ++i) {
        const double dx = half * GK15::nodes[i];
        kron += GK15::kronrod_w[i] * (f(mid + dx) + f(mid - dx));
    }
    gauss *= half;
    kron *= half;
    err = std::abs(kron - gauss);
    return kron;
}

}  // namespace detail

/// Adaptive 1D integration on [a, b] with interval bisection (worst first).
/// Throws convergence_error when the subdivision budget is exhausted.
template <class Func>
double integrate_adaptive(const Func& f, double a, double b, const QuadratureSpec& spec = {}) {
    struct Interval {
        double a, b, value, error;
    };
    if (a == b)
        return 0.0;
    std::vector<Interval> heap;
    double err0;
    const double v0 = detail::gk15_panel(f, a, b, err0);
    heap.push_back({a, b, v0, err0});
    double total = v0;
    double total_err = err0;
    for (int it = 0; it < spec.max_subdivisions; ++it) {
        if (total_err <= spec.rel_tol * std::abs(total) + spec.abs_tol)
            return total;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < heap.size(); ++i)
            if (heap[i].error > heap[worst].error)
                worst = i;
        const Interval cur = heap[worst];
        const double mid = 0.5 * (cur.a + cur.b);
        double el, er;
        const double vl = detail::gk15_panel(f, cur.a, mid, el);
        const double vr = detail::gk15_panel(f, mid, cur.b, er);
        total += vl + vr - cur.value;
        total_err += el + er - cur.error;
        heap[worst] = {cur.a, mid, vl, el};
        heap.push_back({mid, cur.b, vr, er});
    }
    if (total_err <= spec.rel_tol * std::abs(total) + spec.abs_tol)
        return total;
    throw convergence_error("integrate_adaptive: tolerance not met");
}

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].
/// Computed by Newton iteration on the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fibint

#endif

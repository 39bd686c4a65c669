#include "fibint/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace fibint {

namespace {

int find_span(int degree, const std::vector<double>& knots, double xi) {
    const int n = static_cast<int>(knots.size()) - degree - 2;  // last control point index
    if (xi >= knots[n + 1])
        return n;  // right end: clamp into the last non-empty span
    int lo = degree, hi = n + 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (xi < knots[mid])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

}  // namespace

BasisEval basis_eval(int degree, const std::vector<double>& knots, double xi, int order) {
    if (knots.size() < static_cast<std::size_t>(2 * (degree + 1)))
        throw domain_error("basis_eval: knot vector too short");
    if (xi < knots.front() - 1e-14 || xi > knots.back() + 1e-14)
        throw domain_error("basis_eval: parameter outside the knot range");
    xi = std::clamp(xi, knots.front(), knots.back());

    const int p = degree;
    const int span = find_span(p, knots, xi);

    // Knot differences and the triangular table of basis values (NURBS-book
    // style "DersBasisFuns").
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1, 0.0), right(p + 1, 0.0);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - knots[span + 1 - j];
        right[j] = knots[span + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    BasisEval out;
    out.span = span;
    out.first_index = span - p;
    out.ders.assign(order + 1, std::vector<double>(p + 1, 0.0));
    for (int j = 0; j <= p; ++j)
        out.ders[0][j] = ndu[j][p];

    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= order; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out.ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= order; ++k) {
        for (int j = 0; j <= p; ++j)
            out.ders[k][j] *= factor;
        factor *= (p - k);
    }
    return out;
}

std::vector<double> open_uniform_knots(int degree, int n_cp) {
    if (n_cp < degree + 1)
        throw domain_error("open_uniform_knots: need at least degree + 1 control points");
    const int n_interior = n_cp - degree - 1;
    std::vector<double> knots;
    knots.reserve(n_cp + degree + 1);
    for (int i = 0; i <= degree; ++i)
        knots.push_back(0.0);
    for (int i = 1; i <= n_interior; ++i)
        knots.push_back(static_cast<double>(i) / (n_interior + 1));
    for (int i = 0; i <= degree; ++i)
        knots.push_back(1.0);
    return knots;
}

std::vector<double> greville_abscissae(int degree, const std::vector<double>& knots) {
    const int n_cp = static_cast<int>(knots.size()) - degree - 1;
    std::vector<double> greville(n_cp, 0.0);
    for (int i = 0; i < n_cp; ++i) {
        double sum = 0.0;
        for (int j = 1; j <= degree; ++j)
            sum += knots[i + j];
        greville[i] = sum / degree;
    }
    return greville;
}

int element_count(int degree, const std::vector<double>& knots) {
    int count = 0;
    for (std::size_t i = degree; i + degree + 1 < knots.size(); ++i)
        if (knots[i + 1] > knots[i])
            ++count;
    return count;
}

void element_span(int degree, const std::vector<double>& knots, int element, double& xi0,
                  double& xi1) {
    int count = 0;
    for (std::size_t i = degree; i + degree + 1 < knots.size(); ++i) {
        if (knots[i + 1] > knots[i]) {
            if (count == element) {
                xi0 = knots[i];
                xi1 = knots[i + 1];
                return;
            }
            ++count;
        }
    }
    throw domain_error("element_span: element index out of range");
}

}  // namespace fibint

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace hardedge {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson to absolute tolerance tol.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol,
                        int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t order) {
        nodes.resize(order);
        weights.resize(order);
        const std::size_t m = (order + 1) / 2;
        for (std::size_t i = 0; i < m; ++i) {
            double x = std::cos(3.14159265358979323846 *
                                (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(order) + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (std::size_t j = 0; j < order; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * static_cast<double>(j) + 1.0) * x * p1 -
                          static_cast<double>(j) * p2) /
                         (static_cast<double>(j) + 1.0);
                }
                pp = static_cast<double>(order) * (x * p0 - p1) /
                     (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
            weights[order - 1 - i] = weights[i];
        }
    }

    template <class F>
    double integrate(const F& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double rad = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            s += weights[i] * f(mid + rad * nodes[i]);
        }
        return s * rad;
    }

    template <class F>
    double composite(const F& f, double a, double b,
                     std::size_t panels) const {
        const double h = (b - a) / static_cast<double>(panels);
        double s = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
            const double x0 = a + static_cast<double>(p) * h;
            s += integrate(f, x0, x0 + h);
        }
        return s;
    }
};

}  // namespace hardedge

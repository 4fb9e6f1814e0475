#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hardedge/brownian.hpp"
#include "hardedge/grid.hpp"
#include "hardedge/params.hpp"
#include "hardedge/rng.hpp"

namespace hardedge {

/// Trapezoid discretization of the random integral operator on [0, T].
/// Kernel K(t, s) = A(t ^ s) w(s) acting on L^2(w dt), with
///   A(u) = int_0^u e^{a r + (2/sqrt(beta)) b(r)} dr,
///   w(s) = e^{-(a+1) s - (2/sqrt(beta)) b(s)}.
/// The matrix on grid values is M[i][j] = A(t_i ^ t_j) w_j omega_j; the
/// similarity transform by diag(sqrt(w_i omega_i)) makes it symmetric
/// positive semidefinite. Only the semiseparable factors are stored; the
/// dense matrix is materialized on demand.
struct OperatorDiscretization {
    TimeGrid grid;
    std::vector<double> brownian;       // node values, b[0] = 0
    std::vector<double> quad_weights;   // trapezoid weights omega_i
    std::vector<double> kernel_prefix;  // A(t_i)
    std::vector<double> weight_fn;      // w(t_i)
    std::vector<double> sym_factor;     // sqrt(w_i omega_i)

    std::size_t size() const { return grid.n_points(); }

    /// Quadrature of the kernel diagonal; equals the matrix trace.
    double trace() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            s += kernel_prefix[i] * weight_fn[i] * quad_weights[i];
        }
        return s;
    }

    /// y = S x with S the symmetrized matrix, in O(n) using the
    /// semiseparable structure S_ij = phi_i A(min(i,j)) phi_j.
    void apply_symmetrized(const std::vector<double>& x,
                           std::vector<double>& y) const {
        const std::size_t n = size();
        y.resize(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += sym_factor[i] * x[i];
        double prefix_a = 0.0;  // sum_{j<=i} A_j phi_j x_j
        double prefix = 0.0;    // sum_{j<=i} phi_j x_j
        for (std::size_t i = 0; i < n; ++i) {
            const double px = sym_factor[i] * x[i];
            prefix_a += kernel_prefix[i] * px;
            prefix += px;
            y[i] = sym_factor[i] *
                   (prefix_a + kernel_prefix[i] * (total - prefix));
        }
    }

    std::vector<double> dense_kernel() const {
        const std::size_t n = size();
        if (n > 4096) {
            throw std::length_error("dense_kernel: grid too fine");
        }
        std::vector<double> m(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m[i * n + j] = kernel_prefix[std::min(i, j)] * weight_fn[j] *
                               quad_weights[j];
            }
        }
        return m;
    }

    std::vector<double> dense_symmetrized() const {
        const std::size_t n = size();
        if (n > 4096) {
            throw std::length_error("dense_symmetrized: grid too fine");
        }
        std::vector<double> m(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m[i * n + j] = sym_factor[i] * kernel_prefix[std::min(i, j)] *
                               sym_factor[j];
            }
        }
        return m;
    }
};

inline OperatorDiscretization build_operator(const EnsembleParams& params,
                                             const std::vector<double>& brownian,
                                             const TimeGrid& grid) {
    if (grid.t0 != 0.0) {
        throw std::domain_error("build_operator: grid must start at 0");
    }
    if (brownian.size() != grid.n_points()) {
        throw std::domain_error("build_operator: path/grid size mismatch");
    }
    OperatorDiscretization op;
    op.grid = grid;
    op.brownian = brownian;
    const std::size_t n = grid.n_points();
    const double coef = 2.0 / std::sqrt(params.beta);
    op.quad_weights.assign(n, grid.dt);
    op.quad_weights.front() = 0.5 * grid.dt;
    op.quad_weights.back() = 0.5 * grid.dt;
    op.kernel_prefix.resize(n);
    op.weight_fn.resize(n);
    op.sym_factor.resize(n);
    double prev = std::exp(params.a * grid.time(0) + coef * brownian[0]);
    op.kernel_prefix[0] = 0.0;
    op.weight_fn[0] =
        std::exp(-(params.a + 1.0) * grid.time(0) - coef * brownian[0]);
    op.sym_factor[0] = std::sqrt(op.weight_fn[0] * op.quad_weights[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const double t = grid.time(i);
        const double cur = std::exp(params.a * t + coef * brownian[i]);
        op.kernel_prefix[i] =
            op.kernel_prefix[i - 1] + 0.5 * grid.dt * (prev + cur);
        prev = cur;
        op.weight_fn[i] = std::exp(-(params.a + 1.0) * t - coef * brownian[i]);
        op.sym_factor[i] = std::sqrt(op.weight_fn[i] * op.quad_weights[i]);
    }
    return op;
}

/// Top eigenvalue of the symmetrized matrix by power iteration (relative
/// tolerance on the Rayleigh quotient). Estimates 1/Lambda for this path.
inline double largest_eigenvalue(const OperatorDiscretization& op,
                                 double rel_tol = 1e-10,
                                 std::size_t max_iter = 200000) {
    const std::size_t n = op.size();
    std::vector<double> v(op.sym_factor);
    std::vector<double> w;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    double lam = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        op.apply_symmetrized(v, w);
        double rayleigh = 0.0;
        double wn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rayleigh += v[i] * w[i];
            wn += w[i] * w[i];
        }
        wn = std::sqrt(wn);
        if (!(wn > 0.0)) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
        if (it > 0 && std::abs(rayleigh - lam) <= rel_tol * std::abs(rayleigh)) {
            return rayleigh;
        }
        lam = rayleigh;
    }
    throw std::runtime_error(
        "largest_eigenvalue: power iteration did not converge "
        "(ill-conditioned discretization)");
}

/// Shooting test on the eigenvalue equation in its first-order form:
/// integrates the pair (value, slope) from (0, 1) along the given
/// Brownian path and reports whether both stay positive on the whole
/// grid, i.e. whether lambda is below the top eigenvalue's reciprocal
/// scale for this path. Overflow is handled by joint rescaling, which
/// leaves the sign tests exact.
inline bool riccati_sweep(const EnsembleParams& params,
                          const std::vector<double>& brownian, double lambda,
                          const TimeGrid& grid) {
    if (!(lambda >= 0.0)) {
        throw std::domain_error("riccati_sweep: lambda must be >= 0");
    }
    if (brownian.size() != grid.n_points()) {
        throw std::domain_error("riccati_sweep: path/grid size mismatch");
    }
    const double noise = 2.0 / std::sqrt(params.beta);
    const double drift_coef = params.a + 2.0 / params.beta;
    double psi = 0.0;
    double slope = 1.0;
    const double dt = grid.dt;
    for (std::size_t k = 0; k + 1 < grid.n_points(); ++k) {
        const double db = brownian[k + 1] - brownian[k];
        const double t = grid.time(k);
        const double new_psi = psi + slope * dt;
        const double new_slope =
            slope + noise * slope * db +
            (drift_coef * slope - lambda * std::exp(-t) * psi) * dt;
        psi = new_psi;
        slope = new_slope;
        if (psi <= 0.0 || slope <= 0.0) return false;
        if (psi > 1e200 || slope > 1e200) {
            psi = std::ldexp(psi, -512);
            slope = std::ldexp(slope, -512);
        }
    }
    return psi > 0.0 && slope > 0.0;
}

/// Locate the top-eigenvalue scale on a fixed path by bisection on the
/// shooting test.
inline double riccati_bisect(const EnsembleParams& params,
                             const std::vector<double>& brownian,
                             const TimeGrid& grid, double tol_rel = 1e-6) {
    double lo = 0.0;
    double hi = 1.0;
    int guard = 0;
    while (riccati_sweep(params, brownian, hi, grid) && guard++ < 64) {
        lo = hi;
        hi *= 2.0;
    }
    while ((hi - lo) > tol_rel * hi) {
        const double mid = 0.5 * (lo + hi);
        if (riccati_sweep(params, brownian, mid, grid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct OperatorDrawConfig {
    double dt = 0.01;
    double t_max = 30.0;       // extended until the tail bound is met
    double tail_tol = 1e-8;
    double t_cap = 150.0;
};

/// Sample a Brownian driving path long enough that exp(-(a+1)T + (2/
/// sqrt(beta)) max|b|) <= tail_tol, extending by 10 time units at a time.
inline std::pair<TimeGrid, std::vector<double>> sample_operator_path(
    const EnsembleParams& params, const OperatorDrawConfig& cfg,
    RngStream stream) {
    CounterRng rng(stream);
    const double coef = 2.0 / std::sqrt(params.beta);
    double T = cfg.t_max;
    std::size_t n = static_cast<std::size_t>(std::llround(T / cfg.dt));
    std::vector<double> b(1, 0.0);
    double max_abs = 0.0;
    const double sdt = std::sqrt(cfg.dt);
    auto extend_to = [&](std::size_t target) {
        while (b.size() < target + 1) {
            b.push_back(b.back() + sdt * rng.next_normal());
            max_abs = std::max(max_abs, std::abs(b.back()));
        }
    };
    extend_to(n);
    while (-(params.a + 1.0) * T + coef * max_abs > std::log(cfg.tail_tol) &&
           T < cfg.t_cap) {
        T += 10.0;
        n = static_cast<std::size_t>(std::llround(T / cfg.dt));
        extend_to(n);
    }
    return {TimeGrid(0.0, cfg.dt, n), std::move(b)};
}

/// One draw of the limiting scaled smallest eigenvalue via the operator
/// route: the reciprocal of the top eigenvalue of a fresh discretization.
inline double sample_operator_hard_edge(const EnsembleParams& params,
                                        const OperatorDrawConfig& cfg,
                                        RngStream stream) {
    auto [grid, b] = sample_operator_path(params, cfg, stream);
    const OperatorDiscretization op = build_operator(params, b, grid);
    return 1.0 / largest_eigenvalue(op);
}

}  // namespace hardedge

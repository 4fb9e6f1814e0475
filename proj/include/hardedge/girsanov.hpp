#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "hardedge/grid.hpp"
#include "hardedge/params.hpp"

namespace hardedge {

namespace detail {
inline double softplus(double x) {
    return x > 40.0 ? x : std::log1p(std::exp(x));
}
}  // namespace detail

/// The drift-correction family behind the change of measure. With
/// u = tanh(y/2) everything is an elementary polynomial in u:
///   h1(y)  = -gamma (1-u)/2
///   h2(y)  = (1-u^2)(A u + B)/(2 beta),  A = gamma(gamma-1)/4,
///                                        B = (gamma/2)(c - gamma),
///                                        c = (beta/2)(a + 1/2)
/// and the antiderivative of h2 is (A u^2/2 + B u)/beta exactly, so the
/// correction terms need no quadrature tables.
class HFamily {
  public:
    explicit HFamily(const EnsembleParams& params)
        : p_(params),
          c_(0.5 * params.beta * (params.a + 0.5)),
          A_(0.25 * params.gamma * (params.gamma - 1.0)),
          B_(0.5 * params.gamma * (c_ - params.gamma)) {
        // Uniform-in-time lower bound on the y-drift's bounded part,
        // h0 = inf h - 1/2; the time factor on h2 ranges over (0, 1].
        double inf_val = 0.0;
        const int n = 8192;
        for (int i = 0; i <= n; ++i) {
            const double u = -1.0 + 2.0 * static_cast<double>(i) / n;
            const double h1u = -0.5 * p_.gamma * (1.0 - u);
            const double h2u = (1.0 - u * u) * (A_ * u + B_) / (2.0 * p_.beta);
            inf_val = std::min(inf_val, h1u + std::min(h2u, 0.0));
        }
        h0_ = 0.25 * p_.beta * (p_.a + 0.5) + inf_val - 0.5;
    }

    const EnsembleParams& params() const { return p_; }

    double h1(double y) const {
        return -0.5 * p_.gamma * (1.0 - std::tanh(0.5 * y));
    }

    double h1_prime(double y) const {
        const double u = std::tanh(0.5 * y);
        return 0.25 * p_.gamma * (1.0 - u * u);
    }

    /// int_0^y h1 = gamma (softplus(-y) - log 2).
    double h1_antideriv(double y) const {
        return p_.gamma * (detail::softplus(-y) - 0.6931471805599453094);
    }

    double h1_antideriv_pos_limit() const {
        return -p_.gamma * 0.6931471805599453094;
    }

    double h2(double y) const { return h2_of_u(std::tanh(0.5 * y)); }

    double h2_of_u(double u) const {
        return (1.0 - u * u) * (A_ * u + B_) / (2.0 * p_.beta);
    }

    double h2_prime(double y) const {
        const double u = std::tanh(0.5 * y);
        return (1.0 - u * u) * (A_ - 2.0 * B_ * u - 3.0 * A_ * u * u) /
               (4.0 * p_.beta);
    }

    /// int_0^y h2 = (A u^2/2 + B u)/beta at u = tanh(y/2).
    double h2_antideriv(double y) const {
        const double u = std::tanh(0.5 * y);
        return (0.5 * A_ * u * u + B_ * u) / p_.beta;
    }

    double h2_antideriv_pos_limit() const { return (0.5 * A_ + B_) / p_.beta; }
    double h2_antideriv_neg_limit() const { return (0.5 * A_ - B_) / p_.beta; }

    double eta(double s) const {
        return (2.0 / p_.beta) * std::exp(-0.125 * p_.beta * s);
    }

    /// h(t, y) = (beta/4)(a + 1/2) + h1(y) + e^{-(beta/8)(T-t)} h2(y).
    double h_total(double T, double t, double y) const {
        return 0.25 * p_.beta * (p_.a + 0.5) + h1(y) +
               std::exp(-0.125 * p_.beta * (T - t)) * h2(y);
    }

    double kappa() const {
        const double g = p_.gamma;
        return -g * (g + 1.0 - 0.5 * p_.beta) / 8.0;
    }

    /// Same constant assembled from the h-family at y = 0.
    double kappa_from_h() const {
        const double h10 = h1(0.0);
        return 0.5 * h10 * h10 + 0.5 * h1_prime(0.0) +
               0.25 * p_.beta * (p_.a + 0.5) * h10;
    }

    /// nu(T, y): boundary terms of the exponent, finite-horizon variant.
    double nu(double T, double y) const {
        const double H1 = p_.gamma * detail::softplus(-y);
        const double H2 = (2.0 / p_.beta) *
                          (h2_antideriv(y) - std::exp(-0.125 * p_.beta * T) *
                                                 h2_antideriv_pos_limit());
        return -(p_.beta * (p_.a + 0.5) + 2.0) + H1 + H2;
    }

    /// Horizon-free variant: the damped boundary term is dropped.
    double nu_infinite(double y) const {
        const double H1 = p_.gamma * detail::softplus(-y);
        return -(p_.beta * (p_.a + 0.5) + 2.0) + H1 +
               (2.0 / p_.beta) * h2_antideriv(y);
    }

    /// phi(s, y): integrand of the decaying exponent correction.
    double phi(double s, double y) const {
        const double e = eta(s);
        const double u = std::tanh(0.5 * y);
        const double h2v = h2_of_u(u);
        const double h1v = -0.5 * p_.gamma * (1.0 - u);
        const double h2pv = (1.0 - u * u) *
                            (A_ - 2.0 * B_ * u - 3.0 * A_ * u * u) /
                            (4.0 * p_.beta);
        const double F2 = (0.5 * A_ * u * u + B_ * u) / p_.beta;
        return 0.5 * e * e * h2v * h2v +
               e * (h1v * h2v + 0.25 * p_.beta * (p_.a + 0.5) * h2v +
                    0.125 * p_.beta * F2 + 0.5 * h2pv);
    }

    /// Constant drift floor used by the stationary comparison process.
    double floor_drift_constant() const { return h0_; }

  private:
    EnsembleParams p_;
    double c_;
    double A_;
    double B_;
    double h0_;
};

/// Log of the change-of-measure weight, split into the deterministic
/// leading part and the path-dependent residual.
struct GirsanovWeight {
    double log_leading = 0.0;
    double log_residual = 0.0;
    double total() const { return log_leading + log_residual; }
};

inline double leading_log_factor(const EnsembleParams& params, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::domain_error("leading_log_factor: lambda must be > 0");
    }
    const double g = params.gamma;
    return -0.5 * params.beta * lambda + 2.0 * g * std::sqrt(lambda) -
           g * (g + 1.0 - 0.5 * params.beta) / (2.0 * params.beta) *
               std::log(lambda);
}

/// Closed form of the log weight: leading factors plus
/// (beta/2) e^{-y_T} + nu(T, y_T) + sum phi(T - t_k, y_k) dt.
inline GirsanovWeight girsanov_log_weight_closed(const HFamily& hf,
                                                 double lambda,
                                                 const DiffusionPath& y_path) {
    const EnsembleParams& p = hf.params();
    if (!(lambda >= 1.0)) {
        throw std::domain_error("girsanov_log_weight_closed: lambda >= 1");
    }
    const double T = y_path.grid.t_end();
    GirsanovWeight w;
    w.log_leading = leading_log_factor(p, lambda);
    double phi_int = 0.0;
    const double dt = y_path.grid.dt;
    for (std::size_t k = 0; k + 1 < y_path.values.size(); ++k) {
        phi_int += hf.phi(T - y_path.grid.time(k), y_path.values[k]) * dt;
    }
    const double yT = y_path.terminal();
    w.log_residual =
        0.5 * p.beta * std::exp(-yT) + hf.nu(T, yT) + phi_int;
    return w;
}

/// Direct discretization of the log weight from the defining stochastic
/// integrals, left-endpoint (Ito) evaluation:
///   int (f - g) dy - 1/2 int (f^2 - g^2) dt
/// with f the original drift and g the tilted one. Uses the recorded path
/// increments for dy.
inline double girsanov_log_weight_direct(const HFamily& hf, double lambda,
                                         const DiffusionPath& y_path) {
    const EnsembleParams& p = hf.params();
    const double T = y_path.grid.t_end();
    const double sqrt_lambda = std::sqrt(lambda);
    const double c0 = 0.25 * p.beta * (p.a + 0.5);
    double sum = 0.0;
    const double dt = y_path.grid.dt;
    for (std::size_t k = 0; k + 1 < y_path.values.size(); ++k) {
        const double t = y_path.grid.time(k);
        const double y = y_path.values[k];
        const double force = 0.5 * p.beta * sqrt_lambda *
                             std::exp(-0.125 * p.beta * t);
        const double f = c0 - force * std::cosh(y);
        const double g = hf.h_total(T, t, y) - force * std::sinh(y);
        const double dy = y_path.values[k + 1] - y;
        sum += (f - g) * dy - 0.5 * (f * f - g * g) * dt;
    }
    return sum;
}

}  // namespace hardedge

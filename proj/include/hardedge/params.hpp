#pragma once

#include <cmath>
#include <stdexcept>

namespace hardedge {

/// Ensemble parameters (beta, a) together with the derived exponent
/// gamma = (beta/2)(a+1) - 1 that controls the subleading tail factors.
struct EnsembleParams {
    double beta;
    double a;
    double gamma;
};

inline EnsembleParams make_params(double beta, double a) {
    if (!(beta > 0.0)) {
        throw std::domain_error("make_params: beta must be > 0");
    }
    if (!(a > -1.0)) {
        throw std::domain_error("make_params: a must be > -1");
    }
    return EnsembleParams{beta, a, 0.5 * beta * (a + 1.0) - 1.0};
}

/// Horizon T = (4/beta) log(lambda) after which the forcing coefficient
/// sqrt(lambda) e^{-beta t/8} has relaxed to 1. Negative for lambda < 1.
inline double horizon_time(const EnsembleParams& params, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::domain_error("horizon_time: lambda must be > 0");
    }
    return (4.0 / params.beta) * std::log(lambda);
}

}  // namespace hardedge

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hardedge/diffusion.hpp"
#include "hardedge/girsanov.hpp"
#include "hardedge/p1_table.hpp"
#include "hardedge/params.hpp"
#include "hardedge/quadrature.hpp"

namespace hardedge {

/// Non-explosion probability of the homogeneous comparison process started
/// at x, evaluated as a ratio of scale-function integrals:
///   (1/Z) int_{-inf}^x exp(-(beta/2)[(a+1) xi + e^{-xi}]) d xi.
/// Strictly increasing in x, tends to 1 at +infinity; an analytic upper
/// bound for the unit-level survival function at very negative starts.
inline double exit_probability(const EnsembleParams& params, double x) {
    const double beta = params.beta;
    const double c = 0.5 * beta * (params.a + 1.0);
    const auto rho = [&](double xi) {
        return std::exp(-c * xi - 0.5 * beta * std::exp(-xi));
    };
    // Below xi_lo the integrand is < e^{-650} of its scale.
    double xi_lo = -std::log((1400.0 + 2.0 * std::abs(c) * 10.0) / beta);
    xi_lo = std::min(xi_lo, -4.0);
    const double xi_hi = std::max(30.0, 60.0 / c);
    const double scale = rho(std::min(-std::log(params.a + 1.0), xi_hi));
    const double tol = 1e-12 * std::max(1.0, scale);
    const double tail = std::exp(-c * xi_hi) / c;  // e^{-xi} negligible there
    const double z = adaptive_simpson(rho, xi_lo, xi_hi, tol) + tail;
    double num;
    if (x <= xi_lo) {
        num = 0.0;
    } else if (x >= xi_hi) {
        num = z - std::exp(-c * x) / c;
    } else {
        num = adaptive_simpson(rho, xi_lo, x, tol);
    }
    return std::min(1.0, std::max(0.0, num / z));
}

/// kappa3 * exp(-(beta/4) e^{-x}): the double-exponential upper-bound
/// shape for the unit-level survival function at negative starts.
inline double p1_tail_bound(const EnsembleParams& params, double x,
                            double kappa3) {
    return kappa3 * std::exp(-0.25 * params.beta * std::exp(-x));
}

/// Calibrates kappa3 as 1.2 times the largest ratio of tabulated survival
/// to the bound shape over the window of starts [window_lo, window_hi].
inline double calibrate_tail_bound(const EnsembleParams& params,
                                   const P1Table& table,
                                   double window_lo = -6.0,
                                   double window_hi = -1.0) {
    double best = 0.0;
    for (std::size_t i = 0; i < table.xs.size(); ++i) {
        const double x = table.xs[i];
        if (x < window_lo - 1e-9 || x > window_hi + 1e-9) continue;
        if (table.values[i] <= 0.0) continue;
        best = std::max(
            best, table.values[i] *
                      std::exp(0.25 * params.beta * std::exp(-x)));
    }
    return 1.2 * best;
}

struct P1BuildConfig {
    double x_min = -8.0;
    double x_max = 12.0;
    double dx = 0.1;
    std::size_t paths_per_node = 5000;
    double dt = 2e-3;
    double horizon_units = 48.0;  // simulate to horizon_units / beta
    double survive_level = 2.0;
    unsigned threads = 0;
    RngStream stream{};
    ExplosionPolicy policy{};
};

/// Long-horizon survival classification for the unit-level process from
/// each grid start: survived iff the path never crossed the floor and sits
/// above survive_level once the forcing has decayed by e^{-6}. Isotonic
/// projection enforces the provable monotonicity in the start point; the
/// plateau is the top-node value.
inline P1Table build_p1_table(const EnsembleParams& params,
                              const P1BuildConfig& config) {
    P1Table table;
    table.params = params;
    const std::size_t n_nodes = static_cast<std::size_t>(
        std::llround((config.x_max - config.x_min) / config.dx)) + 1;
    table.xs.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        table.xs[i] = config.x_min + static_cast<double>(i) * config.dx;
    }
    const double t_end = config.horizon_units / params.beta;
    const TimeGrid grid = make_grid(0.0, t_end, config.dt);
    const DriftSpec spec{ProcessKind::x, params, 1.0, 0.0, 0.0};
    const std::size_t total = n_nodes * config.paths_per_node;
    std::vector<unsigned char> survived(total, 0);
    parallel_blocks(total, config.threads, [&](std::size_t first,
                                               std::size_t last) {
        for (std::size_t idx = first; idx < last; ++idx) {
            const std::size_t node = idx / config.paths_per_node;
            const std::size_t path_id = idx % config.paths_per_node;
            const RngStream s = config.stream.substream(
                (static_cast<std::uint64_t>(node) << 32) + path_id);
            const DiffusionPath path =
                integrate(spec, table.xs[node], grid, config.policy, s);
            survived[idx] = (!path.exploded() &&
                             path.terminal() >= config.survive_level)
                                ? 1
                                : 0;
        }
    });
    table.values.resize(n_nodes);
    table.stderrs.resize(n_nodes);
    const double n_paths = static_cast<double>(config.paths_per_node);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < config.paths_per_node; ++j) {
            hits += survived[i * config.paths_per_node + j];
        }
        const double p = static_cast<double>(hits) / n_paths;
        table.values[i] = p;
        table.stderrs[i] = std::sqrt(std::max(p * (1.0 - p), 0.0) / n_paths);
    }
    isotonic_increasing(table.values);
    table.plateau = table.values.back();
    table.plateau_stderr = table.stderrs.back();
    return table;
}

}  // namespace hardedge

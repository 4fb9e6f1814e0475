#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hardedge/diffusion.hpp"
#include "hardedge/girsanov.hpp"
#include "hardedge/p1_table.hpp"
#include "hardedge/params.hpp"

namespace hardedge {

/// Importance-sampling results on one batch of tilted paths. p_hat and
/// e_lambda share the paths and differ exactly by the deterministic
/// leading factor.
struct WeightedEstimates {
    MonteCarloEstimate p_hat;
    MonteCarloEstimate e_lambda;
    double log_leading = 0.0;
    double truncated_fraction = 0.0;
    double top1_weight_share = 0.0;
    bool degenerate = false;  // top 1% of weights carry > 50% of the mass
};

/// Simulates the tilted process to the horizon and averages
/// p1(y_T) exp(log R_T). The tilted process never explodes, so every path
/// contributes; weights are handled in log space with the leading factor
/// split off.
inline WeightedEstimates importance_run(const EnsembleParams& params,
                                        double lambda, const P1Table& p1,
                                        const SimConfig& config) {
    if (!(lambda >= 1.0)) {
        throw std::domain_error("importance_run: lambda must be >= 1");
    }
    const HFamily hf(params);
    const double T = horizon_time(params, lambda);
    const double start = config.start.value_or(entrance_start(lambda));
    WeightedEstimates out;
    out.log_leading = leading_log_factor(params, lambda);
    std::vector<double> e_weights(config.n_paths);
    std::vector<unsigned char> truncated(config.n_paths, 0);
    if (T <= 0.0) {
        const double w =
            p1.lookup(start) *
            std::exp(0.5 * params.beta * std::exp(-start) + hf.nu(0.0, start));
        std::fill(e_weights.begin(), e_weights.end(), w);
    } else {
        const TimeGrid grid = make_grid(0.0, T, config.dt);
        const DriftSpec spec{ProcessKind::y, params, lambda, T, 0.0};
        parallel_blocks(
            config.n_paths, config.threads,
            [&](std::size_t first, std::size_t last) {
                for (std::size_t k = first; k < last; ++k) {
                    const DiffusionPath path =
                        integrate(spec, start, grid, config.policy,
                                  config.stream.substream(k));
                    const GirsanovWeight w =
                        girsanov_log_weight_closed(hf, lambda, path);
                    e_weights[k] =
                        p1.lookup(path.terminal()) * std::exp(w.log_residual);
                    truncated[k] =
                        path.status == PathStatus::truncated ? 1 : 0;
                }
            });
    }
    out.e_lambda = summarize(e_weights, config.stream.seed);
    const double scale = std::exp(out.log_leading);
    out.p_hat = out.e_lambda;
    out.p_hat.mean *= scale;
    out.p_hat.stderr_mean *= scale;
    std::size_t t_count = 0;
    for (unsigned char c : truncated) t_count += c;
    out.truncated_fraction =
        static_cast<double>(t_count) / static_cast<double>(config.n_paths);
    // weight-degeneracy diagnostic on the path weights
    std::vector<double> sorted(e_weights);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const std::size_t top =
        std::max<std::size_t>(1, sorted.size() / 100);
    double top_sum = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        total += sorted[i];
        if (i < top) top_sum += sorted[i];
    }
    out.top1_weight_share = total > 0.0 ? top_sum / total : 0.0;
    out.degenerate = out.top1_weight_share > 0.5;
    return out;
}

inline WeightedEstimates estimate_p_importance(const EnsembleParams& params,
                                               double lambda,
                                               const P1Table& p1,
                                               const SimConfig& config) {
    return importance_run(params, lambda, p1, config);
}

inline MonteCarloEstimate estimate_e_lambda(const EnsembleParams& params,
                                            double lambda, const P1Table& p1,
                                            const SimConfig& config) {
    return importance_run(params, lambda, p1, config).e_lambda;
}

}  // namespace hardedge

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hardedge/importance.hpp"
#include "hardedge/p1_table.hpp"
#include "hardedge/params.hpp"

namespace hardedge {

/// Tail-constant diagnostics over a lambda grid: one importance estimate
/// per lambda, their spread, and the value at the largest lambda as the
/// working estimate of the limiting constant.
struct TailFit {
    std::vector<double> lambdas;
    std::vector<MonteCarloEstimate> e_estimates;
    double flatness = 0.0;  // max pairwise relative deviation of the means
    double extrapolated_e = 0.0;
    bool flatness_flag = false;  // set when flatness exceeds 0.15
};

inline TailFit tail_fit(const EnsembleParams& params,
                        const std::vector<double>& lambdas, const P1Table& p1,
                        const SimConfig& config) {
    if (lambdas.empty()) {
        throw std::domain_error("tail_fit: empty lambda grid");
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] >= 4.0)) {
            throw std::domain_error("tail_fit: lambdas must be >= 4");
        }
        if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
            throw std::domain_error("tail_fit: lambdas must increase");
        }
    }
    TailFit fit;
    fit.lambdas = lambdas;
    fit.e_estimates.reserve(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        SimConfig c = config;
        c.stream = config.stream.substream(static_cast<std::uint64_t>(i) << 33);
        fit.e_estimates.push_back(
            estimate_e_lambda(params, lambdas[i], p1, c));
    }
    double min_mean = fit.e_estimates.front().mean;
    double max_dev = 0.0;
    for (const auto& e : fit.e_estimates) min_mean = std::min(min_mean, e.mean);
    for (std::size_t i = 0; i < fit.e_estimates.size(); ++i) {
        for (std::size_t j = i + 1; j < fit.e_estimates.size(); ++j) {
            max_dev = std::max(max_dev, std::abs(fit.e_estimates[i].mean -
                                                 fit.e_estimates[j].mean));
        }
    }
    fit.flatness = min_mean > 0.0 ? max_dev / min_mean : 0.0;
    fit.extrapolated_e = fit.e_estimates.back().mean;
    fit.flatness_flag = fit.flatness > 0.15;
    return fit;
}

}  // namespace hardedge

#pragma once

#include <cmath>
#include <vector>

#include "hardedge/grid.hpp"
#include "hardedge/rng.hpp"

namespace hardedge {

/// n_steps independent N(0, dt) increments, deterministic in (grid, stream).
inline std::vector<double> sample_brownian_increments(const TimeGrid& grid,
                                                      RngStream stream) {
    CounterRng rng(stream);
    std::vector<double> inc(grid.n_steps);
    const double s = std::sqrt(grid.dt);
    for (double& x : inc) x = s * rng.next_normal();
    return inc;
}

/// Cumulative path b with b[0] = 0 from increments on the same grid.
inline std::vector<double> cumulate_brownian(const std::vector<double>& inc) {
    std::vector<double> b(inc.size() + 1);
    b[0] = 0.0;
    for (std::size_t k = 0; k < inc.size(); ++k) b[k + 1] = b[k] + inc[k];
    return b;
}

}  // namespace hardedge

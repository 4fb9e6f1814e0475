#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hardedge {

/// Uniform time grid t0 + k*dt, k = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, std::size_t n_steps_)
        : t0(t0_), dt(dt_), n_steps(n_steps_) {
        if (!(dt > 0.0)) {
            throw std::domain_error("TimeGrid: dt must be > 0");
        }
    }

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return time(n_steps); }
    std::size_t n_points() const { return n_steps + 1; }
};

/// Grid covering [t0, t0 + span] with step at most dt_max.
inline TimeGrid make_grid(double t0, double span, double dt_max) {
    if (!(span >= 0.0) || !(dt_max > 0.0)) {
        throw std::domain_error("make_grid: need span >= 0 and dt_max > 0");
    }
    std::size_t n = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-12));
    if (n == 0) n = 1;
    return TimeGrid(t0, span / static_cast<double>(n), n);
}

enum class PathStatus { survived, exploded, truncated };

/// A sampled diffusion path on a grid. For exploded paths the values stop
/// at the node interval where the explosion floor was crossed and
/// explosion_time records the crossing; otherwise one value per node.
struct DiffusionPath {
    TimeGrid grid;
    std::vector<double> values;
    PathStatus status = PathStatus::survived;
    double explosion_time = std::numeric_limits<double>::quiet_NaN();

    bool exploded() const { return status == PathStatus::exploded; }
    double terminal() const { return values.back(); }
};

}  // namespace hardedge

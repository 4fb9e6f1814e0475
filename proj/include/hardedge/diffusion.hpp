#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hardedge/brownian.hpp"
#include "hardedge/estimate.hpp"
#include "hardedge/girsanov.hpp"
#include "hardedge/grid.hpp"
#include "hardedge/p1_table.hpp"
#include "hardedge/params.hpp"
#include "hardedge/rng.hpp"

namespace hardedge {

enum class ProcessKind { x, q, y, y_tilde, y_homogeneous, z };

/// Which process, with the constants its drift needs. lambda is unused for
/// z and y_homogeneous; T (the horizon entering the time-dependent drift
/// correction) is needed by y only; h0 by z only.
struct DriftSpec {
    ProcessKind kind = ProcessKind::x;
    EnsembleParams params{1.0, 0.0, 0.0};
    double lambda = 0.0;
    double T = 0.0;
    double h0 = 0.0;
};

/// -1: explodes toward -infinity (floor crossing terminates the path),
///  0: no explosion mechanism.
inline int explosion_direction(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::x:
        case ProcessKind::q:
        case ProcessKind::y_tilde:
        case ProcessKind::y_homogeneous:
            return -1;
        case ProcessKind::y:
        case ProcessKind::z:
            return 0;
    }
    return 0;
}

inline double drift(const DriftSpec& s, double t, double v) {
    const double beta = s.params.beta;
    const double a = s.params.a;
    switch (s.kind) {
        case ProcessKind::x: {
            const double E = std::exp(-v);
            const double force =
                0.5 * beta * std::sqrt(s.lambda) * std::exp(-0.125 * beta * t);
            return 0.25 * beta * (a + 0.5) - force * 0.5 * (E + 1.0 / E);
        }
        case ProcessKind::q:
            return (a + 2.0 / beta) * v - v * v - s.lambda * std::exp(-t);
        case ProcessKind::y: {
            const double E = std::exp(-v);
            const double u = (1.0 - E) / (1.0 + E);  // tanh(v/2)
            const double g = s.params.gamma;
            const double A = 0.25 * g * (g - 1.0);
            const double B = 0.5 * g * (0.5 * beta * (a + 0.5) - g);
            const double q8 = std::exp(0.125 * beta * t);
            const double sqrt_lambda = std::sqrt(s.lambda);
            const double force = 0.5 * beta * sqrt_lambda / q8;
            const double eta_fac = q8 / sqrt_lambda;  // e^{-(beta/8)(T-t)}
            const double h = 0.25 * beta * (a + 0.5) - 0.5 * g * (1.0 - u) +
                             eta_fac * (1.0 - u * u) * (A * u + B) /
                                 (2.0 * beta);
            return h - force * 0.5 * (1.0 / E - E);
        }
        case ProcessKind::y_tilde: {
            const double E = std::exp(-v);
            return 0.25 * beta * (a + 0.5) -
                   0.25 * beta * std::exp(-0.125 * beta * t) * E;
        }
        case ProcessKind::y_homogeneous:
            return 0.25 * beta * (a + 1.0 - std::exp(-v));
        case ProcessKind::z: {
            const double E = std::exp(-v);
            return s.h0 - 0.25 * beta * (1.0 / E - E);
        }
    }
    return 0.0;
}

/// Noise coefficient; 1 for every unit-diffusion process, (2/sqrt(beta)) q
/// for the Riccati-type q process.
inline double noise_coefficient(const DriftSpec& s, double v) {
    if (s.kind == ProcessKind::q) {
        return 2.0 / std::sqrt(s.params.beta) * v;
    }
    return 1.0;
}

struct ExplosionPolicy {
    double floor = -25.0;
    std::size_t substep_cap = 1000000;
    double step_scale = 0.1;  // substep = min(dt, step_scale/(1+|drift|))
};

/// Start height standing in for the entrance boundary at +infinity.
inline double entrance_start(double lambda) {
    return std::max(8.0, 0.5 * std::log(std::max(lambda, 1.0)) + 4.0);
}

/// Euler-Maruyama with per-step adaptive substepping. Fresh N(0, h)
/// increments are drawn per substep; record values at grid nodes. Paths of
/// downward-exploding processes end where the floor is crossed. If a step
/// exhausts the substep budget it finishes coarsely and the path is
/// flagged truncated.
inline DiffusionPath integrate(const DriftSpec& spec, double start,
                               const TimeGrid& grid,
                               const ExplosionPolicy& policy,
                               RngStream stream) {
    if (!(policy.floor < -10.0)) {
        throw std::domain_error("integrate: explosion floor must be < -10");
    }
    CounterRng rng(stream);
    DiffusionPath path;
    path.grid = grid;
    path.values.reserve(grid.n_points());
    path.values.push_back(start);
    const int dir = explosion_direction(spec.kind);
    double v = start;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        double t = grid.time(k);
        const double t_next = grid.time(k + 1);
        const double eps = 1e-12 * grid.dt;
        std::size_t substeps = 0;
        while (t_next - t > eps) {
            const double f = drift(spec, t, v);
            double h = policy.step_scale / (1.0 + std::abs(f));
            if (++substeps >= policy.substep_cap) {
                path.status = PathStatus::truncated;
                h = t_next - t;
            }
            h = std::min(h, t_next - t);
            const double sigma = noise_coefficient(spec, v);
            v += f * h + sigma * std::sqrt(h) * rng.next_normal();
            t += h;
            if (spec.kind == ProcessKind::z && v > 0.0) v = -v;
            if (dir < 0 && v <= policy.floor) {
                path.status = PathStatus::exploded;
                path.explosion_time = t;
                path.values.push_back(v);
                return path;
            }
        }
        path.values.push_back(v);
    }
    return path;
}

/// One member of a shared-noise family: a process, where it turns on, and
/// its start value there.
struct CoupledMember {
    DriftSpec spec;
    std::size_t start_step = 0;
    double start_value = 0.0;
};

/// Advances several unit-diffusion processes on one grid with a jointly
/// adapted substep partition and one shared increment per substep, so
/// pathwise comparisons are exact at the substep level.
inline std::vector<DiffusionPath> integrate_coupled(
    const std::vector<CoupledMember>& members, const TimeGrid& grid,
    const ExplosionPolicy& policy, RngStream stream) {
    CounterRng rng(stream);
    const std::size_t m = members.size();
    std::vector<double> v(m, 0.0);
    std::vector<DiffusionPath> paths(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (members[i].spec.kind == ProcessKind::q) {
            throw std::domain_error(
                "integrate_coupled: unit-diffusion members only");
        }
        paths[i].grid = TimeGrid(grid.time(members[i].start_step), grid.dt,
                                 grid.n_steps - members[i].start_step);
        paths[i].values.reserve(paths[i].grid.n_points());
    }
    std::vector<double> f(m, 0.0);
    for (std::size_t k = 0; k <= grid.n_steps; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            if (members[i].start_step == k) v[i] = members[i].start_value;
            if (k >= members[i].start_step) paths[i].values.push_back(v[i]);
        }
        if (k == grid.n_steps) break;
        double t = grid.time(k);
        const double t_next = grid.time(k + 1);
        const double eps = 1e-12 * grid.dt;
        std::size_t substeps = 0;
        while (t_next - t > eps) {
            double h = t_next - t;
            bool any_active = false;
            for (std::size_t i = 0; i < m; ++i) {
                if (k < members[i].start_step) continue;
                any_active = true;
                f[i] = drift(members[i].spec, t, v[i]);
                h = std::min(h, policy.step_scale / (1.0 + std::abs(f[i])));
            }
            if (++substeps >= policy.substep_cap || !any_active) {
                h = t_next - t;
            }
            const double db = std::sqrt(h) * rng.next_normal();
            for (std::size_t i = 0; i < m; ++i) {
                if (k < members[i].start_step) continue;
                v[i] += f[i] * h + db;
                if (members[i].spec.kind == ProcessKind::z && v[i] > 0.0) {
                    v[i] = -v[i];
                }
            }
            t += h;
        }
    }
    return paths;
}

/// The time-reversed family y^T for the horizons in T_list (increasing),
/// run on one Brownian motion, together with the stationary reflected
/// comparison process z when requested. All paths live on the shared grid
/// [0, T_max] in the clock of the longest horizon; the member with horizon
/// T starts at node (T_max - T)/dt. Larger T means an earlier start, so
/// the family is ordered downward in T.
struct CoupledFamily {
    std::vector<DiffusionPath> y_paths;
    DiffusionPath z_path;  // empty unless requested
};

class ZStationarySampler;  // defined below

CoupledFamily coupled_y_family(const EnsembleParams& params,
                               const std::vector<double>& T_list, double dt,
                               RngStream stream, bool with_z = false);

/// Stationary law m(dz) ~ exp(2 h0 z - beta cosh z) dz on (-inf, 0],
/// sampled by inverse CDF on a Simpson table (CDF accurate to ~1e-12).
class ZStationarySampler {
  public:
    ZStationarySampler(const EnsembleParams& params, double h0)
        : h0_(h0), beta_(params.beta) {
        const double zstar =
            h0 < 0.0 ? std::asinh(2.0 * h0 / params.beta) : 0.0;
        double zlo = std::min(zstar, 0.0) - 1.0;
        const double peak = exponent(std::min(zstar, 0.0));
        while (exponent(zlo) > peak - 80.0) zlo -= 0.5;
        const std::size_t n = 16384;
        zs_.resize(n + 1);
        cdf_.resize(n + 1);
        dens_.resize(n + 1);
        const double h = -zlo / static_cast<double>(n);
        for (std::size_t i = 0; i <= n; ++i) {
            zs_[i] = zlo + static_cast<double>(i) * h;
            dens_[i] = std::exp(exponent(zs_[i]) - peak);
        }
        cdf_[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mid =
                std::exp(exponent(0.5 * (zs_[i] + zs_[i + 1])) - peak);
            cdf_[i + 1] = cdf_[i] + h / 6.0 * (dens_[i] + 4.0 * mid +
                                               dens_[i + 1]);
        }
        const double total = cdf_.back();
        for (auto& c : cdf_) c /= total;
        for (auto& d : dens_) d /= total;
    }

    double exponent(double z) const {
        return 2.0 * h0_ * z - beta_ * std::cosh(z);
    }

    double draw(CounterRng& rng) const {
        const double u = rng.next_unit();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        std::size_t j =
            static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cdf_.begin() - 1, 0));
        if (j + 1 >= cdf_.size()) j = cdf_.size() - 2;
        // solve the in-cell quadratic (linear density model)
        const double hcell = zs_[j + 1] - zs_[j];
        const double target = u - cdf_[j];
        const double d0 = dens_[j];
        const double slope = (dens_[j + 1] - dens_[j]) / hcell;
        double s = target / std::max(d0, 1e-300);
        for (int it2 = 0; it2 < 3; ++it2) {
            const double F = d0 * s + 0.5 * slope * s * s - target;
            const double Fp = d0 + slope * s;
            if (Fp > 0.0) s -= F / Fp;
            s = std::min(std::max(s, 0.0), hcell);
        }
        return zs_[j] + s;
    }

    /// Quadrature of z against the normalized stationary density.
    double mean() const {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i + 1 < zs_.size(); ++i) {
            const double h = zs_[i + 1] - zs_[i];
            num += 0.5 * h * (zs_[i] * dens_[i] + zs_[i + 1] * dens_[i + 1]);
            den += 0.5 * h * (dens_[i] + dens_[i + 1]);
        }
        return num / den;
    }

  private:
    double h0_;
    double beta_;
    std::vector<double> zs_;
    std::vector<double> cdf_;
    std::vector<double> dens_;
};

inline double sample_z_stationary(const EnsembleParams& params, double h0,
                                  RngStream stream) {
    const ZStationarySampler sampler(params, h0);
    CounterRng rng(stream);
    return sampler.draw(rng);
}

inline CoupledFamily coupled_y_family(const EnsembleParams& params,
                                      const std::vector<double>& T_list,
                                      double dt, RngStream stream,
                                      bool with_z) {
    if (T_list.empty()) throw std::domain_error("coupled_y_family: empty T list");
    for (std::size_t i = 0; i + 1 < T_list.size(); ++i) {
        if (!(T_list[i] < T_list[i + 1])) {
            throw std::domain_error("coupled_y_family: T_list must increase");
        }
    }
    const double T_max = T_list.back();
    const std::size_t n = static_cast<std::size_t>(std::llround(T_max / dt));
    const TimeGrid grid(0.0, T_max / static_cast<double>(n), n);
    const double lambda_max = std::exp(0.25 * params.beta * T_max);
    std::vector<CoupledMember> members;
    const HFamily hf(params);
    if (with_z) {
        CoupledMember zm;
        zm.spec = DriftSpec{ProcessKind::z, params, 0.0, 0.0,
                            hf.floor_drift_constant()};
        zm.start_step = 0;
        zm.start_value =
            sample_z_stationary(params, hf.floor_drift_constant(),
                                stream.substream(1));
        members.push_back(zm);
    }
    for (double T : T_list) {
        CoupledMember ym;
        ym.spec = DriftSpec{ProcessKind::y, params, lambda_max, T_max, 0.0};
        const std::size_t steps_T =
            static_cast<std::size_t>(std::llround(T / grid.dt));
        ym.start_step = n - std::min(steps_T, n);
        const double lambda_T = std::exp(0.25 * params.beta * T);
        ym.start_value = entrance_start(lambda_T);
        members.push_back(ym);
    }
    ExplosionPolicy policy;
    auto paths =
        integrate_coupled(members, grid, policy, stream.substream(0));
    CoupledFamily fam;
    if (with_z) {
        fam.z_path = std::move(paths.front());
        paths.erase(paths.begin());
    }
    fam.y_paths = std::move(paths);
    return fam;
}

struct SimConfig {
    std::size_t n_paths = 100000;
    double dt = 1e-3;
    unsigned threads = 0;
    RngStream stream{};
    std::optional<double> start{};
    ExplosionPolicy policy{};
};

struct DirectEstimate {
    MonteCarloEstimate estimate;
    double truncated_fraction = 0.0;
};

/// Survival-probability estimate through the Markov decomposition: run the
/// full process to the horizon and weight survivors by the unit-level
/// table at the terminal point.
inline DirectEstimate estimate_p_direct(const EnsembleParams& params,
                                        double lambda, const P1Table& p1,
                                        const SimConfig& config) {
    if (!(lambda >= 1.0)) {
        throw std::domain_error("estimate_p_direct: lambda must be >= 1");
    }
    const double T = horizon_time(params, lambda);
    const double start = config.start.value_or(entrance_start(lambda));
    DirectEstimate out;
    if (T <= 0.0) {
        out.estimate = MonteCarloEstimate{p1.lookup(start), 0.0,
                                          config.n_paths, config.stream.seed};
        return out;
    }
    const TimeGrid grid = make_grid(0.0, T, config.dt);
    const DriftSpec spec{ProcessKind::x, params, lambda, T, 0.0};
    std::vector<double> values(config.n_paths);
    std::vector<unsigned char> truncated(config.n_paths, 0);
    parallel_blocks(config.n_paths, config.threads,
                    [&](std::size_t first, std::size_t last) {
                        for (std::size_t k = first; k < last; ++k) {
                            const DiffusionPath path =
                                integrate(spec, start, grid, config.policy,
                                          config.stream.substream(k));
                            values[k] = path.exploded()
                                            ? 0.0
                                            : p1.lookup(path.terminal());
                            truncated[k] =
                                path.status == PathStatus::truncated ? 1 : 0;
                        }
                    });
    out.estimate = summarize(values, config.stream.seed);
    std::size_t t_count = 0;
    for (unsigned char c : truncated) t_count += c;
    out.truncated_fraction =
        static_cast<double>(t_count) / static_cast<double>(config.n_paths);
    return out;
}

struct QBoundaryResult {
    double fraction_hit_zero = 0.0;
    double fraction_exploded_given_hit = 0.0;
    std::size_t n_hit = 0;
};

/// Run the q process from a large start; among paths whose first hit of 0
/// happens before the base horizon, report how many explode to -infinity
/// before horizon_factor times that horizon.
inline QBoundaryResult simulate_q_boundary_check(
    const EnsembleParams& params, double lambda, std::size_t n_paths,
    RngStream stream, double horizon_factor = 3.0, double dt = 1e-3,
    unsigned threads = 0) {
    if (!(lambda >= 0.0)) {
        throw std::domain_error("simulate_q_boundary_check: lambda >= 0");
    }
    const double base_horizon =
        lambda > 1.0 ? std::max(1.0, horizon_time(params, lambda)) : 1.0;
    const double t_end = horizon_factor * base_horizon;
    const double q_floor = -1e6;
    const double q_start = 100.0 * std::max(1.0, std::sqrt(lambda));
    const DriftSpec spec{ProcessKind::q, params, lambda, 0.0, 0.0};
    const double step_scale = 0.1;
    std::vector<unsigned char> hit(n_paths, 0);
    std::vector<unsigned char> exploded(n_paths, 0);
    parallel_blocks(n_paths, threads, [&](std::size_t first,
                                          std::size_t last) {
        for (std::size_t k = first; k < last; ++k) {
            CounterRng rng(stream.substream(k));
            double q = q_start;
            double t = 0.0;
            bool h = false;
            while (t < t_end) {
                const double f = drift(spec, t, q);
                double step = std::min(dt, step_scale / (1.0 + std::abs(f)));
                step = std::min(step, t_end - t);
                q += f * step + noise_coefficient(spec, q) *
                                    std::sqrt(step) * rng.next_normal();
                t += step;
                if (!h && q <= 0.0) {
                    if (t > base_horizon) break;  // late hit: not counted
                    h = true;
                }
                if (h && q <= q_floor) {
                    exploded[k] = 1;
                    break;
                }
            }
            hit[k] = h ? 1 : 0;
        }
    });
    QBoundaryResult res;
    std::size_t n_hit = 0;
    std::size_t n_exp = 0;
    for (std::size_t k = 0; k < n_paths; ++k) {
        n_hit += hit[k];
        n_exp += (hit[k] && exploded[k]) ? 1 : 0;
    }
    res.n_hit = n_hit;
    res.fraction_hit_zero =
        static_cast<double>(n_hit) / static_cast<double>(n_paths);
    res.fraction_exploded_given_hit =
        n_hit == 0 ? 0.0
                   : static_cast<double>(n_exp) / static_cast<double>(n_hit);
    return res;
}

}  // namespace hardedge

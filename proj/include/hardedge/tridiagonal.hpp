#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace hardedge {

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
/// below x, by the negative-pivot count of the shifted LDL^T factorization.
inline std::size_t tridiag_count_below(std::span<const double> diag,
                                       std::span<const double> off,
                                       double x) {
    std::size_t count = 0;
    double d = diag[0] - x;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        if (d == 0.0) d = -1e-300;
        d = diag[i] - x - off[i - 1] * off[i - 1] / d;
        if (d < 0.0) ++count;
    }
    return count;
}

/// Smallest eigenvalue of a positive semidefinite symmetric tridiagonal
/// matrix by bisection on the pivot count. Bracket [0, min Gershgorin row
/// bound]; absolute accuracy 1e-12 * (1 + Gershgorin radius).
inline double tridiag_smallest_eigenvalue(std::span<const double> diag,
                                          std::span<const double> off) {
    const std::size_t n = diag.size();
    double hi = std::numeric_limits<double>::infinity();
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < n) r += std::abs(off[i]);
        hi = std::min(hi, diag[i] + r);
        radius = std::max(radius, std::abs(diag[i]) + r);
    }
    double lo = 0.0;
    // Inflate until the bracket provably contains the bottom eigenvalue.
    hi = hi * (1.0 + 4e-16) + 1e-300;
    for (int guard = 0; guard < 128 && tridiag_count_below(diag, off, hi) == 0;
         ++guard) {
        hi = hi * (1.0 + 1e-12) + 1e-300;
    }
    const double tol = 1e-12 * (1.0 + radius);
    for (int it = 0; it < 100 && (hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tridiag_count_below(diag, off, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace hardedge

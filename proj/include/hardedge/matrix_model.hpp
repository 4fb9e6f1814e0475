#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hardedge/estimate.hpp"
#include "hardedge/params.hpp"
#include "hardedge/rng.hpp"
#include "hardedge/tridiagonal.hpp"

namespace hardedge {

/// Lower bidiagonal factor B of the ensemble matrix W = (1/beta) B B^T.
struct BidiagonalMatrix {
    std::size_t n = 0;
    std::vector<double> diag;  // n entries, chi-distributed
    std::vector<double> sub;   // n-1 entries below the diagonal
};

/// Squared singular values of B/sqrt(beta) follow the (beta, a)-Laguerre
/// density. diag[i] ~ chi(beta (a + n - i)), sub[i] ~ chi(beta (n - 1 - i)),
/// all independent; consumption order is diag first, then sub.
inline BidiagonalMatrix sample_bidiagonal(const EnsembleParams& params,
                                          std::size_t n, RngStream stream) {
    if (n < 1) {
        throw std::domain_error("sample_bidiagonal: n must be >= 1");
    }
    CounterRng rng(stream);
    BidiagonalMatrix b;
    b.n = n;
    b.diag.resize(n);
    b.sub.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        b.diag[i] =
            rng.next_chi(params.beta * (params.a + static_cast<double>(n - i)));
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        b.sub[i] = rng.next_chi(params.beta * static_cast<double>(n - 1 - i));
    }
    return b;
}

/// Tridiagonal form of W = (1/beta) B B^T.
inline void tridiagonal_of(const BidiagonalMatrix& b, double beta,
                           std::vector<double>& diag,
                           std::vector<double>& off) {
    const std::size_t n = b.n;
    diag.resize(n);
    off.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double d = b.diag[i] * b.diag[i];
        if (i > 0) d += b.sub[i - 1] * b.sub[i - 1];
        diag[i] = d / beta;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        off[i] = b.diag[i] * b.sub[i] / beta;
    }
}

inline double smallest_eigenvalue(const BidiagonalMatrix& b, double beta) {
    if (b.n == 1) {
        return b.diag[0] * b.diag[0] / beta;
    }
    std::vector<double> diag;
    std::vector<double> off;
    tridiagonal_of(b, beta, diag, off);
    return tridiag_smallest_eigenvalue(diag, off);
}

struct HardEdgeSample {
    std::size_t n = 0;
    double scaled_min = 0.0;  // n * lambda_min(W)
};

/// Independent draws of the scaled smallest eigenvalue n * lambda_min(W).
inline std::vector<HardEdgeSample> sample_hard_edge(
    const EnsembleParams& params, std::size_t n, std::size_t n_samples,
    RngStream stream, unsigned threads = 0) {
    if (n < 1 || n_samples < 1) {
        throw std::domain_error("sample_hard_edge: need n >= 1, n_samples >= 1");
    }
    std::vector<HardEdgeSample> samples(n_samples);
    parallel_blocks(n_samples, threads, [&](std::size_t first,
                                            std::size_t last) {
        std::vector<double> diag;
        std::vector<double> off;
        for (std::size_t k = first; k < last; ++k) {
            const BidiagonalMatrix b =
                sample_bidiagonal(params, n, stream.substream(k));
            double lam;
            if (n == 1) {
                lam = b.diag[0] * b.diag[0] / params.beta;
            } else {
                tridiagonal_of(b, params.beta, diag, off);
                lam = tridiag_smallest_eigenvalue(diag, off);
            }
            samples[k] = HardEdgeSample{n, static_cast<double>(n) * lam};
        }
    });
    return samples;
}

}  // namespace hardedge

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hardedge {

/// Address of an independent random stream: (seed, stream_index) maps to a
/// generator state through a pure function. Sample k of a Monte Carlo loop
/// uses substream(base, k), which makes results independent of how samples
/// are distributed over worker threads.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;

    constexpr RngStream substream(std::uint64_t k) const {
        return RngStream{seed, stream_index + k};
    }
};

/// Philox 4x32-10 counter-based generator. The key holds the seed, the
/// high counter words hold the stream index, the low words count blocks,
/// so every (seed, stream_index) pair is its own full-period stream.
class CounterRng {
  public:
    explicit CounterRng(RngStream stream)
        : key_{static_cast<std::uint32_t>(stream.seed),
               static_cast<std::uint32_t>(stream.seed >> 32)},
          ctr_{0u, 0u, static_cast<std::uint32_t>(stream.stream_index),
               static_cast<std::uint32_t>(stream.stream_index >> 32)} {}

    CounterRng(std::uint64_t seed, std::uint64_t stream_index)
        : CounterRng(RngStream{seed, stream_index}) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            refill();
        }
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    /// Uniform on [0,1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0,1]; safe to pass through log().
    double next_unit_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (the one Gaussian algorithm used
    /// anywhere in this library; both outputs of each pair are consumed).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit_open();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Gamma(shape, scale 1), Marsaglia-Tsang squeeze method.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            const double u = next_unit_open();
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = next_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_unit_open();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) {
                return d * v;
            }
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
                return d * v;
            }
        }
    }

    /// chi(k) = sqrt(chi-square with k degrees of freedom), k > 0 real.
    double next_chi(double k) {
        return std::sqrt(2.0 * next_gamma(0.5 * k));
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static void round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                      std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    }

    void refill() {
        std::array<std::uint32_t, 4> c = ctr_;
        std::uint32_t k0 = key_[0];
        std::uint32_t k1 = key_[1];
        round(c, k0, k1);
        for (int r = 1; r < 10; ++r) {
            k0 += kWeyl0;
            k1 += kWeyl1;
            round(c, k0, k1);
        }
        buf_ = c;
        pos_ = 0;
        if (++ctr_[0] == 0u) {
            ++ctr_[1];
        }
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// One Philox block for known-answer tests.
inline std::array<std::uint32_t, 4> philox4x32_block(
    std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) {
    const std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    const std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    auto one = [&](std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                   std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
             static_cast<std::uint32_t>(p0)};
    };
    one(counter, key[0], key[1]);
    for (int r = 1; r < 10; ++r) {
        key[0] += W0;
        key[1] += W1;
        one(counter, key[0], key[1]);
    }
    return counter;
}

}  // namespace hardedge

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mfbsde {

// Philox4x32-10 counter-based generator. Output depends only on (key, counter),
// so any worker can produce the draw for (path, index) without shared state and
// the stream decomposition is identical under any scheduling.
class Philox4x32 {
  public:
    using Counter = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)) {}

    Counter operator()(Counter ctr) const {
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, k0, k1);
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;

    static Counter single_round(const Counter& c, std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        return Counter{hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    }

    std::uint32_t key0_;
    std::uint32_t key1_;
};

// Standard normal draw addressed by (stream, path, index). Uniforms come from
// one Philox block; Box-Muller maps them to a normal pair and `index` parity
// selects the member, so draw (p, i) is reproducible in isolation.
class NormalSampler {
  public:
    NormalSampler(std::uint64_t seed, std::uint32_t stream = 0)
        : gen_(seed), stream_(stream) {}

    double operator()(std::uint32_t path, std::uint32_t index) const {
        const std::uint32_t pair = index >> 1;
        const auto words = gen_(Philox4x32::Counter{path, pair, stream_, 0});
        const double u1 = to_open_unit(words[0], words[1]);
        const double u2 = to_unit(words[2], words[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        return (index & 1u) ? r * std::sin(angle) : r * std::cos(angle);
    }

  private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    // 53-bit uniform in (0, 1]; strictly positive so log(u1) is finite.
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    Philox4x32 gen_;
    std::uint32_t stream_;
};

// Uniform draw on [lo, hi) addressed the same way; used by randomized
// hypothesis checks so witnesses are reproducible from the seed alone.
class UniformSampler {
  public:
    UniformSampler(std::uint64_t seed, std::uint32_t stream = 0)
        : gen_(seed), stream_(stream) {}

    double operator()(std::uint32_t sample, std::uint32_t index, double lo, double hi) const {
        const auto words = gen_(Philox4x32::Counter{sample, index, stream_, 0x5eedu});
        const std::uint64_t bits =
            ((static_cast<std::uint64_t>(words[0]) << 32) | words[1]) >> 11;
        return lo + (hi - lo) * (static_cast<double>(bits) * 0x1.0p-53);
    }

  private:
    Philox4x32 gen_;
    std::uint32_t stream_;
};

}  // namespace mfbsde

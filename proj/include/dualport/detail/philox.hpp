#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dualport::detail {

/// Philox4x32-10 counter-based generator.  Pure function of (key, counter),
/// so per-path streams are independent and parallel fills reproduce serial
/// ones exactly.
struct Philox4x32 {
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::uint64_t hi_counter,
                                              std::uint64_t lo_counter) {
        std::uint32_t c0 = static_cast<std::uint32_t>(lo_counter);
        std::uint32_t c1 = static_cast<std::uint32_t>(lo_counter >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(hi_counter);
        std::uint32_t c3 = static_cast<std::uint32_t>(hi_counter >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return {c0, c1, c2, c3};
    }
};

/// Uniform double in (0, 1) from two 32-bit words (53 significant bits).
inline double uniform_from_words(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(hi) << 21) ^ (static_cast<std::uint64_t>(lo) >> 11);
    return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1p-53;
}

/// Standard normal draws indexed by (seed, stream, index): one Philox block
/// yields a Box-Muller pair, so consumption is fixed and addressable.
class CounterNormal {
public:
    CounterNormal(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    double operator()(std::uint64_t index) const {
        const std::uint64_t pair = index >> 1;
        const auto w = Philox4x32::block(seed_, stream_, pair);
        const double u1 = uniform_from_words(w[0], w[1]);
        const double u2 = uniform_from_words(w[2], w[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        return (index & 1) ? r * std::sin(angle) : r * std::cos(angle);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace dualport::detail

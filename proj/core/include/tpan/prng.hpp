#pragma once

#include <cmath>
#include <cstdint>

namespace tpan {

// PCG32 (XSH RR variant). Fixed algorithm so generated traces are
// byte-identical across platforms; std:: distributions are not portable.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0xda3e39cb94b95bdbULL) {
        state_ = 0;
        inc_ = (stream << 1u) | 1u;
        next();
        state_ += seed;
        next();
    }

    std::uint32_t next() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    std::uint64_t next64() {
        std::uint64_t hi = next();
        return (hi << 32) | next();
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia polar method; one value per call, the pair partner is cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * m;
        have_cached_ = true;
        return u * m;
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

// Round half to even, as ticks.
inline std::int64_t round_ticks(double x) {
    return static_cast<std::int64_t>(std::nearbyint(x));
}

}  // namespace tpan

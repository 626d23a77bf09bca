// Counter-based RNG: every (seed, stream) pair yields an independent,
// reproducible sequence; thousands of paths can each own a stream without
// storing more than two 64-bit words.  Mixing function is splitmix64.
#pragma once

#include <cmath>
#include <cstdint>

namespace fpf {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

class Rng {
public:
    // stream: path index / substream id.  Draws advance only the counter.
    Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(detail::splitmix64(seed ^ detail::splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform on (0,1): never returns 0 or 1, so log/atanh transforms are safe.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller (the spare is cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform(), v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double c = std::cos(6.283185307179586476925286766559 * v);
        double s = std::sin(6.283185307179586476925286766559 * v);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fpf

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pdet {

// Deterministic randomness. std::mt19937_64's raw output sequence is pinned by
// the C++ standard, but the standard *distributions* (uniform_real, normal) and
// std::shuffle are implementation-defined, which would break the bit-identical
// dataset/checkpoint reproducibility contract across standard libraries. So the
// transforms are done by hand on top of the engine.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53 random mantissa bits
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller; caches the second deviate
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform(); // log(0) guard
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, n); modulo bias is irrelevant for shuffling/index
    // picking at our sizes and keeps the output sequence trivially portable
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    template <typename T>
    void shuffle(std::vector<T>& v) { // Fisher-Yates
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// SplitMix64: derives the per-index stream seed for embarrassingly parallel,
// order-independent sample generation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

} // namespace pdet

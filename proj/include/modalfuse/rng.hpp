#ifndef MODALFUSE_RNG_HPP_
#define MODALFUSE_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace modalfuse {

// Seeded random stream with fully specified transforms, so that a given seed
// produces the same values on every platform and standard library.
//
// Raw bits come from std::mt19937_64 (the algorithm is pinned by the C++
// standard). Distributions are implemented here instead of <random> because
// std::uniform_real_distribution / std::normal_distribution are
// implementation-defined:
//   uniform01: top 53 bits of one draw, scaled by 2^-53
//   normal:    Box-Muller on two uniforms, with the second value cached
//   index(n):  Lemire multiply-shift of one draw
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Uniform index in [0, n). Multiply-shift; bias is < n/2^64.
    size_t index(size_t n) {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Fisher-Yates, swapping from the back.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// splitmix64 finalizer; used to derive independent child seeds
// (e.g. one per epoch) from a run seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace modalfuse

#endif  // MODALFUSE_RNG_HPP_

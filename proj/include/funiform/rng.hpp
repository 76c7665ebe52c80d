#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace funiform {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic xoshiro256** generator.  All draw paths are hand rolled so
/// that identical (seed, stream) pairs give identical sequences on every
/// platform and standard library.
class Rng {
public:
    /// Seeds from a base seed plus any number of stream indices.  Distinct
    /// index tuples give statistically independent streams.
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
        seed_from(seed, stream.begin(), stream.end());
    }

    Rng(std::uint64_t seed, const std::vector<std::uint64_t>& stream) {
        seed_from(seed, stream.begin(), stream.end());
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Binomial draw as a Bernoulli sum; intended for small n.
    int binomial(int n, double p) {
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += (uniform01() < p) ? 1 : 0;
        return hits;
    }

    /// Chi-squared with 4 degrees of freedom, as a sum of two exponentials.
    double chisq4() {
        double u1 = 0.0, u2 = 0.0;
        while (u1 <= 0.0) u1 = uniform01();
        while (u2 <= 0.0) u2 = uniform01();
        return -2.0 * std::log(u1 * u2);
    }

private:
    template <class It>
    void seed_from(std::uint64_t seed, It first, It last) {
        std::uint64_t mix = seed;
        std::uint64_t acc = detail::splitmix64(mix);
        for (; first != last; ++first) {
            mix = acc ^ (*first + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2));
            acc = detail::splitmix64(mix);
        }
        std::uint64_t st = acc;
        for (auto& word : s_) word = detail::splitmix64(st);
        if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace funiform

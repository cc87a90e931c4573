///
/// \file rng.hpp
///
/// Seeded random streams with deterministic substream derivation. Every
/// experiment trial owns a stream derived from (base seed, identifiers),
/// so results do not depend on scheduling order. Only the mt19937_64 raw
/// output is consumed; all variate conversions are implemented here to
/// keep byte-level reproducibility across standard libraries.
///
#ifndef LPPG_RNG_HPP
#define LPPG_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace lppg
{

namespace detail
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Fold a base seed with a list of identifiers (trial index, grid cell,
/// purpose tag, ...) into a fresh stream seed.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = detail::splitmix64(base);
    for (std::uint64_t p : parts)
        h = detail::splitmix64(h ^ detail::splitmix64(p));
    return h;
}

class RandomStream
{
public:
    explicit RandomStream(std::uint64_t seed) : gen_(detail::splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n)
    {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Standard real Gaussian via Box-Muller.
    double gaussian()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    /// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
    std::complex<double> gaussian_complex()
    {
        const double re = gaussian();
        const double im = gaussian();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

    /// k distinct indices from [0, n), uniformly without replacement
    /// (partial Fisher-Yates), returned sorted.
    std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n,
                                                          std::uint64_t k)
    {
        if (k > n)
            throw std::invalid_argument("sample_without_replacement: k > n");
        std::vector<std::uint64_t> pool(n);
        for (std::uint64_t i = 0; i < n; ++i)
            pool[i] = i;
        for (std::uint64_t i = 0; i < k; ++i)
            std::swap(pool[i], pool[i + uniform_index(n - i)]);
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace lppg

#endif // LPPG_RNG_HPP

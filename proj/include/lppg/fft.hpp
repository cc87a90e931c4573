///
/// \file fft.hpp
///
/// Radix-2 FFT and multi-dimensional transforms on column-major grids.
/// All transform lengths are powers of two; callers pad to the next
/// power of two (see lppg::fft::next_pow2).
///
#ifndef LPPG_FFT_HPP
#define LPPG_FFT_HPP

#include <cassert>
#include <complex>
#include <cstddef>
#include <numbers>
#include <unordered_map>
#include <vector>

namespace lppg::fft
{

using Complex = std::complex<double>;

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t m = 1;
    while (m < n)
        m <<= 1;
    return m;
}

namespace detail
{

// Twiddle factors for a given transform length, cached per thread so
// concurrent transforms need no synchronization.
inline const std::vector<Complex> &twiddles(std::size_t n)
{
    thread_local std::unordered_map<std::size_t, std::vector<Complex>> cache;
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    std::vector<Complex> w(n / 2);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k)
        w[k] = std::polar(1.0, step * static_cast<double>(k));
    return cache.emplace(n, std::move(w)).first->second;
}

} // namespace detail

/// In-place iterative Cooley-Tukey transform of length n = 2^k.
/// The inverse transform includes the 1/n scaling.
inline void transform_pow2(Complex *data, std::size_t n, bool inverse)
{
    assert(is_pow2(n));
    if (n <= 1)
        return;

    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(data[i], data[j]);
    }

    const auto &w = detail::twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex tw = w[k * stride];
                if (inverse)
                    tw = std::conj(tw);
                const Complex a = data[i + k];
                const Complex b = data[i + k + len / 2] * tw;
                data[i + k] = a + b;
                data[i + k + len / 2] = a - b;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            data[i] *= scale;
    }
}

/// Transform along every axis of a column-major grid (axis 0 has the
/// smallest stride). Each dims[d] must be a power of two.
inline void transform_nd(Complex *a, const std::vector<std::size_t> &dims,
                         bool inverse)
{
    std::size_t total = 1;
    for (std::size_t d : dims)
        total *= d;

    std::vector<Complex> line;
    std::size_t stride = 1;
    for (std::size_t axis = 0; axis < dims.size(); ++axis) {
        const std::size_t len = dims[axis];
        if (len > 1) {
            if (stride == 1) {
                for (std::size_t base = 0; base < total; base += len)
                    transform_pow2(a + base, len, inverse);
            } else {
                line.resize(len);
                const std::size_t block = stride * len;
                for (std::size_t base = 0; base < total; base += block) {
                    for (std::size_t off = 0; off < stride; ++off) {
                        for (std::size_t k = 0; k < len; ++k)
                            line[k] = a[base + off + k * stride];
                        transform_pow2(line.data(), len, inverse);
                        for (std::size_t k = 0; k < len; ++k)
                            a[base + off + k * stride] = line[k];
                    }
                }
            }
        }
        stride *= len;
    }
}

inline void transform_nd(std::vector<Complex> &a,
                         const std::vector<std::size_t> &dims, bool inverse)
{
    transform_nd(a.data(), dims, inverse);
}

} // namespace lppg::fft

#endif // LPPG_FFT_HPP

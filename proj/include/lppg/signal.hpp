///
/// \file signal.hpp
///
/// Synthetic spectrally sparse signals, sampling masks, additive noise at
/// a target level, and the recovery metric.
///
#ifndef LPPG_SIGNAL_HPP
#define LPPG_SIGNAL_HPP

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lppg/hankel.hpp"
#include "lppg/rng.hpp"

namespace lppg
{

/// Ground-truth model: r components with complex coefficient b_k,
/// per-axis frequency f in [0,1) and damping tau >= 0.
struct SpectralComponents
{
    Index order = 0;
    std::vector<Complex> coeff;
    std::vector<std::vector<double>> freq; // [k][axis]
    std::vector<std::vector<double>> damp; // [k][axis]
};

struct SpectralSignal
{
    std::vector<Index> dims;
    Vec x; // column-major, axis 0 fastest
    std::optional<SpectralComponents> truth;
};

/// Observed index set with its signal length.
struct SampleMask
{
    std::vector<Index> omega; // sorted, unique, in [0, N)
    Index signal_size = 0;

    double ratio() const
    {
        return static_cast<double>(omega.size()) / static_cast<double>(signal_size);
    }
};

struct ObservedData
{
    Vec s; // length N, zero off omega
    SampleMask mask;
    double noise_level = 0.0;
};

/// Assemble x = sum_k b_k y(f_1k,tau_1k) o ... o y(f_dk,tau_dk).
inline Vec assemble_signal(const std::vector<Index> &dims,
                           const SpectralComponents &comp)
{
    Index total = 1;
    for (Index n : dims)
        total *= n;
    Vec x = Vec::Zero(total);
    const std::size_t d = dims.size();
    std::vector<Vec> axis(d);
    for (Index k = 0; k < comp.order; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
            Vec y(dims[l]);
            const double f = comp.freq[static_cast<std::size_t>(k)][l];
            const double tau = comp.damp[static_cast<std::size_t>(k)][l];
            const Complex rate(-tau, 2.0 * std::numbers::pi * f);
            for (Index t = 0; t < dims[l]; ++t)
                y[t] = std::exp(rate * static_cast<double>(t));
            axis[l] = std::move(y);
        }
        std::vector<Index> digit(d, 0);
        for (Index a = 0; a < total; ++a) {
            Complex prod = comp.coeff[static_cast<std::size_t>(k)];
            for (std::size_t l = 0; l < d; ++l)
                prod *= axis[l][digit[l]];
            x[a] += prod;
            for (std::size_t l = 0; l < d; ++l) {
                if (++digit[l] < dims[l])
                    break;
                digit[l] = 0;
            }
        }
    }
    return x;
}

/// Random order-r signal. Frequencies uniform on [0,1) per axis; phases
/// uniform; magnitudes 1 + 10^{0.5 c}, c uniform on [0,1]. With damping,
/// 1/tau is drawn per axis from [8,16], [16,32], [64,128].
/// Draw order per component: frequencies, phase, magnitude, damping.
inline SpectralSignal generate_signal(const std::vector<Index> &dims, Index r,
                                      bool damped, RandomStream &rng)
{
    if (r < 1)
        throw std::invalid_argument("generate_signal: order must be >= 1");
    static constexpr double kInvTauLo[3] = {8.0, 16.0, 64.0};
    static constexpr double kInvTauHi[3] = {16.0, 32.0, 128.0};

    SpectralComponents comp;
    comp.order = r;
    for (Index k = 0; k < r; ++k) {
        std::vector<double> f, tau;
        for (std::size_t l = 0; l < dims.size(); ++l)
            f.push_back(rng.uniform());
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double mag = 1.0 + std::pow(10.0, 0.5 * rng.uniform());
        comp.coeff.push_back(std::polar(mag, phase));
        for (std::size_t l = 0; l < dims.size(); ++l) {
            if (damped) {
                const std::size_t bucket = std::min<std::size_t>(l, 2);
                tau.push_back(1.0 / rng.uniform(kInvTauLo[bucket], kInvTauHi[bucket]));
            } else {
                tau.push_back(0.0);
            }
        }
        comp.freq.push_back(std::move(f));
        comp.damp.push_back(std::move(tau));
    }

    SpectralSignal sig;
    sig.dims = dims;
    sig.x = assemble_signal(dims, comp);
    sig.truth = std::move(comp);
    return sig;
}

/// round(Sp*N) distinct indices, uniform without replacement.
/// Rounding is half-up; Sp must lie in (0, 1].
inline SampleMask sample_uniform(Index n, double sp, RandomStream &rng)
{
    if (!(sp > 0.0) || sp > 1.0)
        throw std::invalid_argument("sample_uniform: ratio out of (0, 1]");
    const auto m = static_cast<std::uint64_t>(
        std::floor(sp * static_cast<double>(n) + 0.5));
    auto idx = rng.sample_without_replacement(static_cast<std::uint64_t>(n), m);
    SampleMask mask;
    mask.signal_size = n;
    mask.omega.assign(idx.begin(), idx.end());
    return mask;
}

/// Restrict a full signal to the mask.
inline ObservedData observe(const Vec &x, SampleMask mask)
{
    ObservedData data;
    data.s = Vec::Zero(x.size());
    for (Index i : mask.omega)
        data.s[i] = x[i];
    data.mask = std::move(mask);
    return data;
}

/// Add e = eta * ||P_Omega s|| * g/||g|| with g complex Gaussian on Omega.
/// The resulting SNR is exactly -20 log10(eta) dB.
inline ObservedData add_noise(const ObservedData &clean, double eta,
                              RandomStream &rng)
{
    if (eta < 0.0)
        throw std::invalid_argument("add_noise: eta must be >= 0");
    ObservedData noisy = clean;
    noisy.noise_level = eta;
    if (eta == 0.0)
        return noisy;
    Vec g = Vec::Zero(clean.s.size());
    for (Index i : clean.mask.omega)
        g[i] = rng.gaussian_complex();
    const double gn = g.norm();
    if (gn > 0.0)
        noisy.s += (eta * clean.s.norm() / gn) * g;
    return noisy;
}

/// Relative l2 recovery error ||est - truth|| / ||truth||.
inline double nmse(const Vec &est, const Vec &truth)
{
    if (est.size() != truth.size())
        throw std::invalid_argument("nmse: size mismatch");
    const double tn = truth.norm();
    if (tn == 0.0)
        throw std::domain_error("nmse: zero reference signal");
    return (est - truth).norm() / tn;
}

} // namespace lppg

#endif // LPPG_SIGNAL_HPP

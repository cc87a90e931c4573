///
/// \file hankel.hpp
///
/// Level-d Hankel operators: the forward map H lifting a length-N signal
/// to a P x Q block-Hankel matrix, its adjoint H*, the weight diagonal
/// W = H*H, and the left inverse S = W^{-1}H*. Matrix-vector products and
/// low-rank adjoints are evaluated through FFT convolutions; the dense
/// embedding exists only as a size-gated oracle.
///
/// Conventions: signals are column-major with level 1 (axis 0) fastest.
/// The (u,v) cell of the level-d matrix decomposes per axis as
/// u = u_1 + u_2*p_1 + ..., v = v_1 + v_2*q_1 + ..., and addresses the
/// signal entry with per-axis index i_l = u_l + v_l.
///
#ifndef LPPG_HANKEL_HPP
#define LPPG_HANKEL_HPP

#include <Eigen/Core>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "lppg/fft.hpp"

namespace lppg
{

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// One axis of the Hankel geometry: signal length n split as p + q = n + 1.
struct HankelLevel
{
    Index n;
    Index p;
    Index q;
};

class HankelShape
{
public:
    explicit HankelShape(std::vector<HankelLevel> levels)
        : levels_(std::move(levels))
    {
        if (levels_.empty())
            throw std::invalid_argument("HankelShape: no levels");
        P_ = Q_ = N_ = 1;
        for (const auto &lv : levels_) {
            if (lv.q < 1 || lv.p < lv.q)
                throw std::invalid_argument("HankelShape: require p >= q >= 1");
            if (lv.p + lv.q != lv.n + 1)
                throw std::invalid_argument("HankelShape: require p + q = n + 1");
            P_ *= lv.p;
            Q_ *= lv.q;
            N_ *= lv.n;
        }
    }

    /// Near-square split p = ceil((n+1)/2), q = n + 1 - p per axis.
    static HankelShape square(const std::vector<Index> &dims)
    {
        std::vector<HankelLevel> lv;
        lv.reserve(dims.size());
        for (Index n : dims) {
            if (n < 1)
                throw std::invalid_argument("HankelShape: dims must be positive");
            const Index p = (n + 2) / 2;
            lv.push_back({n, p, n + 1 - p});
        }
        return HankelShape(std::move(lv));
    }

    Index num_levels() const { return static_cast<Index>(levels_.size()); }
    const HankelLevel &level(Index d) const { return levels_[static_cast<std::size_t>(d)]; }
    const std::vector<HankelLevel> &levels() const { return levels_; }

    Index rows() const { return P_; }
    Index cols() const { return Q_; }
    Index signal_size() const { return N_; }

    std::vector<Index> signal_dims() const
    {
        std::vector<Index> d;
        for (const auto &lv : levels_)
            d.push_back(lv.n);
        return d;
    }

private:
    std::vector<HankelLevel> levels_;
    Index P_, Q_, N_;
};

namespace detail
{

inline void decompose(Index lin, const std::vector<Index> &dims, Index *digits)
{
    for (std::size_t d = 0; d < dims.size(); ++d) {
        digits[d] = lin % dims[d];
        lin /= dims[d];
    }
}

inline std::atomic<long> dense_embed_count{0};

} // namespace detail

/// Thrown when an operation would materialize a dense P x Q matrix above
/// the configured threshold.
class DenseLimitError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Number of dense embeddings performed so far (process-wide). Solver code
/// paths never touch the dense embedding; tests assert this stays flat.
inline long dense_embed_invocations() { return detail::dense_embed_count.load(); }

/// Default ceiling on the signal size for dense embeddings.
inline constexpr Index kDenseEmbedLimit = 4096;

/// Multiplicity of each signal entry in the Hankel matrix: the outer
/// product of the per-axis counts min(i, p-1, q-1, n-1-i) + 1.
inline Eigen::VectorXd hankel_weights(const HankelShape &shape)
{
    Eigen::VectorXd w = Eigen::VectorXd::Ones(shape.signal_size());
    Index stride = 1;
    for (Index d = 0; d < shape.num_levels(); ++d) {
        const auto &lv = shape.level(d);
        Eigen::VectorXd wl(lv.n);
        for (Index i = 0; i < lv.n; ++i) {
            const Index c = std::min({i, lv.p - 1, lv.q - 1, lv.n - 1 - i});
            wl[i] = static_cast<double>(c + 1);
        }
        // multiply the running tensor product in place
        const Index outer = shape.signal_size() / (stride * lv.n);
        Index a = 0;
        for (Index o = 0; o < outer; ++o)
            for (Index i = 0; i < lv.n; ++i)
                for (Index s = 0; s < stride; ++s)
                    w[a++] *= wl[i];
        stride *= lv.n;
    }
    return w;
}

/// Dense P x Q embedding. Test oracle only; refuses signals above
/// `dense_limit` entries.
inline Mat hankel_embed(const Vec &x, const HankelShape &shape,
                        Index dense_limit = kDenseEmbedLimit)
{
    if (x.size() != shape.signal_size())
        throw std::invalid_argument("hankel_embed: signal length mismatch");
    if (shape.signal_size() > dense_limit)
        throw DenseLimitError("hankel_embed: signal size exceeds dense limit");
    detail::dense_embed_count.fetch_add(1);

    const Index d = shape.num_levels();
    std::vector<Index> pdims, qdims, ndims;
    for (const auto &lv : shape.levels()) {
        pdims.push_back(lv.p);
        qdims.push_back(lv.q);
        ndims.push_back(lv.n);
    }
    Mat M(shape.rows(), shape.cols());
    std::vector<Index> ud(static_cast<std::size_t>(d)), vd(static_cast<std::size_t>(d));
    for (Index v = 0; v < shape.cols(); ++v) {
        detail::decompose(v, qdims, vd.data());
        for (Index u = 0; u < shape.rows(); ++u) {
            detail::decompose(u, pdims, ud.data());
            Index a = 0, stride = 1;
            for (Index l = 0; l < d; ++l) {
                a += (ud[static_cast<std::size_t>(l)] + vd[static_cast<std::size_t>(l)]) * stride;
                stride *= ndims[static_cast<std::size_t>(l)];
            }
            M(u, v) = x[a];
        }
    }
    return M;
}

/// Dense adjoint H*: sums every (u,v) cell into its signal entry.
inline Vec hankel_adjoint_dense(const Mat &M, const HankelShape &shape)
{
    if (M.rows() != shape.rows() || M.cols() != shape.cols())
        throw std::invalid_argument("hankel_adjoint_dense: matrix shape mismatch");
    const Index d = shape.num_levels();
    std::vector<Index> pdims, qdims, ndims;
    for (const auto &lv : shape.levels()) {
        pdims.push_back(lv.p);
        qdims.push_back(lv.q);
        ndims.push_back(lv.n);
    }
    Vec out = Vec::Zero(shape.signal_size());
    std::vector<Index> ud(static_cast<std::size_t>(d)), vd(static_cast<std::size_t>(d));
    for (Index v = 0; v < shape.cols(); ++v) {
        detail::decompose(v, qdims, vd.data());
        for (Index u = 0; u < shape.rows(); ++u) {
            detail::decompose(u, pdims, ud.data());
            Index a = 0, stride = 1;
            for (Index l = 0; l < d; ++l) {
                a += (ud[static_cast<std::size_t>(l)] + vd[static_cast<std::size_t>(l)]) * stride;
                stride *= ndims[static_cast<std::size_t>(l)];
            }
            out[a] += M(u, v);
        }
    }
    return out;
}

/// FFT workspace for one Hankel geometry. All products are evaluated as
/// zero-padded circular convolutions on a grid of power-of-two axis
/// lengths. Methods are const and allocate their own output buffers, so
/// one plan may serve concurrent callers.
class HankelPlan
{
public:
    explicit HankelPlan(HankelShape shape) : shape_(std::move(shape))
    {
        for (const auto &lv : shape_.levels()) {
            pad_.push_back(fft::next_pow2(static_cast<std::size_t>(lv.n + lv.p - 1)));
            ndims_.push_back(lv.n);
            pdims_.push_back(lv.p);
            qdims_.push_back(lv.q);
        }
        padded_ = 1;
        for (std::size_t d : pad_)
            padded_ *= static_cast<Index>(d);
    }

    const HankelShape &shape() const { return shape_; }
    Index padded_size() const { return padded_; }

    // --- padded spectra -------------------------------------------------

    Vec signal_spectrum(const Vec &x) const { return spectrum(x, ndims_, false, false); }
    Vec signal_spectrum_conj_rev(const Vec &x) const { return spectrum(x, ndims_, true, true); }
    Vec row_spectrum(const Vec &u) const { return spectrum(u, pdims_, false, false); }
    Vec col_spectrum_conj(const Vec &v) const { return spectrum(v, qdims_, false, true); }
    Vec col_spectrum_rev(const Vec &v) const { return spectrum(v, qdims_, true, false); }

    // --- extraction from a frequency-domain product ---------------------

    /// (Hx)v lives at offsets q_l - 1 of the convolution grid.
    Vec extract_rows(Vec spec) const
    {
        inverse(spec);
        std::vector<Index> offs;
        for (const auto &lv : shape_.levels())
            offs.push_back(lv.q - 1);
        return gather(spec, pdims_, offs, +1);
    }

    /// (Hx)^H u lives at offsets n_l - 1, indexed backwards.
    Vec extract_cols_rev(Vec spec) const
    {
        inverse(spec);
        std::vector<Index> offs;
        for (const auto &lv : shape_.levels())
            offs.push_back(lv.n - 1);
        return gather(spec, qdims_, offs, -1);
    }

    /// H* of a rank-1 product is a plain convolution starting at 0.
    Vec extract_signal(Vec spec) const
    {
        inverse(spec);
        return gather(spec, ndims_, std::vector<Index>(ndims_.size(), 0), +1);
    }

    // --- operator products ----------------------------------------------

    /// (Hx) v for a length-Q vector v.
    Vec matvec(const Vec &x, const Vec &v) const
    {
        check_len(x.size(), shape_.signal_size(), "matvec: signal");
        check_len(v.size(), shape_.cols(), "matvec: vector");
        return extract_rows(signal_spectrum(x).cwiseProduct(col_spectrum_rev(v)));
    }

    /// (Hx)^H u for a length-P vector u.
    Vec rmatvec(const Vec &x, const Vec &u) const
    {
        check_len(x.size(), shape_.signal_size(), "rmatvec: signal");
        check_len(u.size(), shape_.rows(), "rmatvec: vector");
        return extract_cols_rev(signal_spectrum_conj_rev(x).cwiseProduct(row_spectrum(u)));
    }

    /// H*(Uhat V^H) as a sum of r skew-diagonal correlations.
    Vec adjoint_lowrank(const Mat &u_hat, const Mat &v) const
    {
        if (u_hat.rows() != shape_.rows() || v.rows() != shape_.cols() ||
            u_hat.cols() != v.cols())
            throw std::invalid_argument("adjoint_lowrank: factor shape mismatch");
        Vec acc = Vec::Zero(padded_);
        for (Index i = 0; i < u_hat.cols(); ++i)
            acc += row_spectrum(u_hat.col(i)).cwiseProduct(col_spectrum_conj(v.col(i)));
        return extract_signal(std::move(acc));
    }

private:
    static void check_len(Index got, Index want, const char *what)
    {
        if (got != want)
            throw std::invalid_argument(std::string("hankel ") + what + " length mismatch");
    }

    Vec spectrum(const Vec &a, const std::vector<Index> &adims, bool reverse,
                 bool conjugate) const
    {
        Vec buf = Vec::Zero(padded_);
        Index total = 1;
        for (Index d : adims)
            total *= d;
        check_len(a.size(), total, "operand");
        std::vector<Index> digit(adims.size(), 0);
        Index dst = 0;
        // dst tracks the padded linear index of the current source element
        for (Index src = 0; src < total; ++src) {
            Index idx = dst;
            if (reverse) {
                idx = 0;
                Index stride = 1;
                for (std::size_t l = 0; l < adims.size(); ++l) {
                    idx += (adims[l] - 1 - digit[l]) * stride;
                    stride *= static_cast<Index>(pad_[l]);
                }
            }
            buf[idx] = conjugate ? std::conj(a[src]) : a[src];
            // advance mixed-radix counter
            Index stride = 1;
            for (std::size_t l = 0; l < adims.size(); ++l) {
                dst += stride;
                if (++digit[l] < adims[l])
                    break;
                dst -= adims[l] * stride;
                digit[l] = 0;
                stride *= static_cast<Index>(pad_[l]);
                if (l + 1 == adims.size())
                    break;
            }
        }
        fft::transform_nd(reinterpret_cast<Complex *>(buf.data()), pad_, false);
        return buf;
    }

    void inverse(Vec &spec) const
    {
        fft::transform_nd(reinterpret_cast<Complex *>(spec.data()), pad_, true);
    }

    Vec gather(const Vec &grid, const std::vector<Index> &odims,
               const std::vector<Index> &offs, int dir) const
    {
        Index total = 1;
        for (Index d : odims)
            total *= d;
        Vec out(total);
        std::vector<Index> digit(odims.size(), 0);
        for (Index k = 0; k < total; ++k) {
            Index idx = 0;
            Index stride = 1;
            for (std::size_t l = 0; l < odims.size(); ++l) {
                idx += (offs[l] + dir * digit[l]) * stride;
                stride *= static_cast<Index>(pad_[l]);
            }
            out[k] = grid[idx];
            for (std::size_t l = 0; l < odims.size(); ++l) {
                if (++digit[l] < odims[l])
                    break;
                digit[l] = 0;
            }
        }
        return out;
    }

    HankelShape shape_;
    std::vector<std::size_t> pad_;
    std::vector<Index> ndims_, pdims_, qdims_;
    Index padded_;
};

// --- convenience wrappers (one-shot plans) ------------------------------

inline Vec hankel_matvec(const Vec &x, const Vec &v, const HankelShape &shape)
{
    return HankelPlan(shape).matvec(x, v);
}

inline Vec hankel_rmatvec(const Vec &x, const Vec &u, const HankelShape &shape)
{
    return HankelPlan(shape).rmatvec(x, u);
}

inline Vec hankel_adjoint_lowrank(const Mat &u_hat, const Mat &v,
                                  const HankelShape &shape)
{
    return HankelPlan(shape).adjoint_lowrank(u_hat, v);
}

/// S = W^{-1} H* applied to a factored matrix.
inline Vec hankel_left_inverse(const Mat &u_hat, const Mat &v,
                               const HankelShape &shape)
{
    const Eigen::VectorXd w = hankel_weights(shape);
    return hankel_adjoint_lowrank(u_hat, v, shape).cwiseQuotient(w.cast<Complex>());
}

/// S = W^{-1} H* applied to a dense matrix.
inline Vec hankel_left_inverse(const Mat &m, const HankelShape &shape)
{
    const Eigen::VectorXd w = hankel_weights(shape);
    return hankel_adjoint_dense(m, shape).cwiseQuotient(w.cast<Complex>());
}

} // namespace lppg

#endif // LPPG_HANKEL_HPP

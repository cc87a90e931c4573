///
/// \file lanczos.hpp
///
/// Rank-r truncated SVD of a matrix-free operator by Golub-Kahan-Lanczos
/// bidiagonalization with full reorthogonalization.
///
#ifndef LPPG_LANCZOS_HPP
#define LPPG_LANCZOS_HPP

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>

#include "lppg/operator.hpp"
#include "lppg/rng.hpp"

namespace lppg
{

struct TruncatedSvd
{
    Mat u;                  // P x r, orthonormal columns
    Eigen::VectorXd sigma;  // nonincreasing, >= 0
    Mat v;                  // Q x r, orthonormal columns
};

struct LanczosResult
{
    TruncatedSvd svd;
    Eigen::VectorXd residuals; // adjoint-side residual per kept triplet
    Index iterations = 0;
    bool converged = false;
    bool degenerate = false; // sigma_r within 1e-12*sigma_1 of a dropped value
};

namespace detail
{

/// Classical Gram-Schmidt against the first k columns, applied twice.
inline void reorthogonalize(Vec &w, const Mat &basis, Index k)
{
    if (k == 0)
        return;
    for (int pass = 0; pass < 2; ++pass)
        w.noalias() -= basis.leftCols(k) * (basis.leftCols(k).adjoint() * w);
}

inline Vec random_unit(Index n, RandomStream &rng)
{
    Vec v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = rng.gaussian_complex();
    return v / v.norm();
}

/// Rotate each (u, v) pair so the largest-magnitude entry of the u column
/// is real positive; products U Sigma V^H are unchanged.
inline void fix_phases(Mat &u, Mat &v)
{
    for (Index j = 0; j < u.cols(); ++j) {
        Index imax = 0;
        u.col(j).cwiseAbs().maxCoeff(&imax);
        const Complex z = u(imax, j);
        if (std::abs(z) > 0.0) {
            const Complex rot = std::conj(z) / std::abs(z);
            u.col(j) *= rot;
            v.col(j) *= rot;
        }
    }
}

} // namespace detail

/// Computes the top-r singular triplets of `op`. Deterministic for a given
/// seed. `converged` is false if the residual targets were not met within
/// `max_iter` bidiagonalization steps (default 30*r); the best triplets
/// found are still returned.
inline LanczosResult lanczos_truncated_svd(const LinearOperatorHandle &op, Index r,
                                           double tol = 1e-10, Index max_iter = -1,
                                           std::uint64_t seed = 0)
{
    const Index p = op.out_dim;
    const Index q = op.in_dim;
    if (r < 1 || r > std::min(p, q))
        throw std::invalid_argument("lanczos_truncated_svd: invalid rank");
    if (max_iter < 0)
        max_iter = 30 * r;
    const Index cap = std::min(max_iter, std::min(p, q));

    RandomStream rng(derive_seed(seed, {0x6c616e637aULL}));
    Mat ubasis(p, cap), vbasis(q, cap);
    Eigen::VectorXd alpha(cap), beta(cap);

    vbasis.col(0) = detail::random_unit(q, rng);
    Vec work = op.apply(vbasis.col(0));
    alpha[0] = work.norm();
    if (alpha[0] > 0.0)
        ubasis.col(0) = work / alpha[0];
    else
        ubasis.col(0) = detail::random_unit(p, rng);

    LanczosResult res;
    Index k = 0; // number of completed steps
    Eigen::JacobiSVD<Eigen::MatrixXd> small_svd;

    while (true) {
        ++k;
        res.iterations = k;

        // w = A^H u_k - alpha_k v_k, reorthogonalized
        work = op.adjoint_apply(ubasis.col(k - 1));
        detail::reorthogonalize(work, vbasis, k);
        beta[k - 1] = work.norm();
        const bool breakdown = beta[k - 1] <= 1e-14 * std::max(alpha[0], 1.0);

        // convergence test on the adjoint-side residuals of the top-r
        // Ritz triplets of the current bidiagonal factor. A breakdown step
        // is never accepted as converged before the basis is exhausted:
        // an invariant subspace can hide further copies of a degenerate
        // singular value, which the random continuation below probes.
        if (k >= r && (!breakdown || k == cap)) {
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(k, k);
            for (Index j = 0; j < k; ++j) {
                b(j, j) = alpha[j];
                if (j + 1 < k)
                    b(j, j + 1) = beta[j];
            }
            small_svd.compute(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const double s1 = small_svd.singularValues()[0];
            bool ok = true;
            for (Index i = 0; i < r && ok; ++i)
                ok = beta[k - 1] * std::abs(small_svd.matrixU()(k - 1, i)) <= tol * std::max(s1, 1e-300);
            if (ok || k == cap) {
                res.converged = ok;
                res.svd.u.noalias() = ubasis.leftCols(k) * small_svd.matrixU().leftCols(r);
                res.svd.v.noalias() = vbasis.leftCols(k) * small_svd.matrixV().leftCols(r);
                res.svd.sigma = small_svd.singularValues().head(r);
                res.residuals.resize(r);
                for (Index i = 0; i < r; ++i)
                    res.residuals[i] = beta[k - 1] * std::abs(small_svd.matrixU()(k - 1, i));
                if (k > r)
                    res.degenerate =
                        small_svd.singularValues()[r - 1] - small_svd.singularValues()[r] <
                        1e-12 * s1;
                detail::fix_phases(res.svd.u, res.svd.v);
                return res;
            }
        }
        if (k == cap)
            break;

        if (!breakdown) {
            vbasis.col(k) = work / beta[k - 1];
        } else {
            // invariant subspace found; continue in a random complement
            beta[k - 1] = 0.0;
            work = detail::random_unit(q, rng);
            detail::reorthogonalize(work, vbasis, k);
            vbasis.col(k) = work / work.norm();
        }

        // u_{k+1} = A v_{k+1} - beta_k u_k, reorthogonalized
        work = op.apply(vbasis.col(k));
        detail::reorthogonalize(work, ubasis, k);
        alpha[k] = work.norm();
        if (alpha[k] > 1e-14 * std::max(alpha[0], 1.0)) {
            ubasis.col(k) = work / alpha[k];
        } else {
            alpha[k] = 0.0;
            work = detail::random_unit(p, rng);
            detail::reorthogonalize(work, ubasis, k);
            ubasis.col(k) = work / work.norm();
        }
    }

    return res; // unreachable in practice; kept for safety
}

} // namespace lppg

#endif // LPPG_LANCZOS_HPP

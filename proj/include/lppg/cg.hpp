///
/// \file cg.hpp
///
/// Conjugate gradients for a Hermitian positive-definite linear map acting
/// on r x r complex matrices under the Frobenius inner product.
///
#ifndef LPPG_CG_HPP
#define LPPG_CG_HPP

#include <Eigen/Core>

#include <functional>

#include "lppg/hankel.hpp"

namespace lppg
{

struct CgResult
{
    Mat x;
    double rel_residual = 0.0;
    Index iterations = 0;
    bool converged = false;
    bool indefinite = false;
};

/// Frobenius inner product, conjugate-linear in the first argument.
inline Complex frobenius_inner(const Mat &a, const Mat &b)
{
    return (a.conjugate().cwiseProduct(b)).sum();
}

/// Solves map(x) = rhs to ||map(x) - rhs||_F <= tol*||rhs||_F. The
/// iteration cap defaults to r^2 (the dimension of the unknown); one
/// restart from the current iterate is attempted before giving up.
/// Detected negative curvature sets `indefinite` and stops early.
inline CgResult cg_solve(const std::function<Mat(const Mat &)> &map, const Mat &rhs,
                         double tol = 1e-10, Index max_iter = -1)
{
    CgResult res;
    const double rhs_norm = rhs.norm();
    if (max_iter < 0)
        max_iter = rhs.rows() * rhs.cols();
    res.x = Mat::Zero(rhs.rows(), rhs.cols());
    if (rhs_norm == 0.0) {
        res.converged = true;
        return res;
    }

    for (int attempt = 0; attempt < 2; ++attempt) {
        Mat r = rhs - map(res.x);
        Mat p = r;
        double rr = r.squaredNorm();
        res.rel_residual = std::sqrt(rr) / rhs_norm;
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        for (Index it = 0; it < max_iter; ++it) {
            const Mat ap = map(p);
            const double pap = std::real(frobenius_inner(p, ap));
            if (pap <= 0.0) {
                res.indefinite = true;
                return res;
            }
            const double step = rr / pap;
            res.x += step * p;
            r -= step * ap;
            ++res.iterations;
            const double rr_next = r.squaredNorm();
            res.rel_residual = std::sqrt(rr_next) / rhs_norm;
            if (res.rel_residual <= tol) {
                res.converged = true;
                return res;
            }
            p = r + (rr_next / rr) * p;
            rr = rr_next;
        }
    }
    return res;
}

} // namespace lppg

#endif // LPPG_CG_HPP

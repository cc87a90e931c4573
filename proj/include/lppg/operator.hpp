///
/// \file operator.hpp
///
#ifndef LPPG_OPERATOR_HPP
#define LPPG_OPERATOR_HPP

#include <Eigen/Core>

#include <functional>

#include "lppg/hankel.hpp"

namespace lppg
{

/// Matrix-free P x Q linear operator: apply maps C^Q -> C^P and
/// adjoint_apply maps C^P -> C^Q. The adjoint is taken against the inner
/// product that is conjugate-linear in its first argument.
struct LinearOperatorHandle
{
    Index out_dim = 0; // P
    Index in_dim = 0;  // Q
    std::function<Vec(const Vec &)> apply;
    std::function<Vec(const Vec &)> adjoint_apply;
};

/// Wrap an explicit dense matrix (for tests and small problems).
inline LinearOperatorHandle make_dense_operator(Mat m)
{
    auto shared = std::make_shared<Mat>(std::move(m));
    LinearOperatorHandle op;
    op.out_dim = shared->rows();
    op.in_dim = shared->cols();
    op.apply = [shared](const Vec &v) -> Vec { return (*shared) * v; };
    op.adjoint_apply = [shared](const Vec &u) -> Vec { return shared->adjoint() * u; };
    return op;
}

/// Wrap the Hankel embedding of a signal, evaluated through FFTs.
inline LinearOperatorHandle make_hankel_operator(std::shared_ptr<const HankelPlan> plan,
                                                 Vec x)
{
    auto sx = std::make_shared<Vec>(std::move(x));
    LinearOperatorHandle op;
    op.out_dim = plan->shape().rows();
    op.in_dim = plan->shape().cols();
    op.apply = [plan, sx](const Vec &v) -> Vec { return plan->matvec(*sx, v); };
    op.adjoint_apply = [plan, sx](const Vec &u) -> Vec { return plan->rmatvec(*sx, u); };
    return op;
}

} // namespace lppg

#endif // LPPG_OPERATOR_HPP

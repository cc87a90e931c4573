///
/// \file solver.hpp
///
/// Signal reconstruction by low-rank projected proximal gradient descent
/// on the single-variable objective F(H) = f(H) + rank indicator, where
/// f minimizes the data-fidelity + Hankel-mismatch + ridge terms over the
/// signal. Iterates are kept as rank-r factorizations; every large object
/// lives as a (signal vector, low-rank factors) pair.
///
#ifndef LPPG_SOLVER_HPP
#define LPPG_SOLVER_HPP

#include <chrono>
#include <memory>
#include <string>

#include "lppg/cg.hpp"
#include "lppg/hankel.hpp"
#include "lppg/lanczos.hpp"
#include "lppg/signal.hpp"

namespace lppg
{

enum class Variant { Lppg, Mpg, StandardPg };

enum class StopRule { Subgradient, RelChange };

inline const char *variant_name(Variant v)
{
    switch (v) {
    case Variant::Lppg: return "lppg";
    case Variant::Mpg: return "mpg";
    default: return "pg";
    }
}

struct SolverConfig
{
    Index rank = 1;
    double beta = 1.0;   // Hankel enforcement parameter, > 0
    double alpha = 1e-20;
    double gamma = 0.0;  // <= 0 selects the default step size
    double epsilon = 1e-6;
    Index max_iter = 1000;
    Variant variant = Variant::Lppg;
    StopRule stop = StopRule::Subgradient;
    double rel_change_tol = 1e-3;
    double lanczos_tol = 1e-10;
    Index lanczos_max_iter = -1;
    double cg_tol = 1e-10;
    Index cg_max_iter = -1;
    std::uint64_t seed = 0; // Lanczos start vectors
};

/// Default Hankel enforcement parameter for the vector-form objective:
/// beta* = m / (P*Q).
inline double default_beta(const SampleMask &mask, const HankelShape &shape)
{
    return static_cast<double>(mask.omega.size()) /
           (static_cast<double>(shape.rows()) * static_cast<double>(shape.cols()));
}

/// Entrywise inverse of alpha + 1_Omega + beta*w.
struct DiagonalResolvent
{
    Eigen::VectorXd d;
};

inline DiagonalResolvent resolvent(const HankelShape &shape, const SampleMask &mask,
                                   double alpha, double beta)
{
    const Eigen::VectorXd w = hankel_weights(shape);
    Eigen::VectorXd denom = alpha + (beta * w).array();
    for (Index i : mask.omega)
        denom[i] += 1.0;
    return {denom.cwiseInverse()};
}

/// Rank-r iterate H = U Sigma V^H; Sigma is a general r x r matrix.
struct LowRankIterate
{
    Mat u;     // P x r, orthonormal columns
    Mat sigma; // r x r
    Mat v;     // Q x r, orthonormal columns

    double frobenius_norm() const { return sigma.norm(); }
    Index rank() const { return sigma.rows(); }
};

/// tr(A^H B) of two factored iterates without materialization.
inline Complex iterate_inner(const LowRankIterate &a, const LowRankIterate &b)
{
    const Mat cu = a.u.adjoint() * b.u;
    const Mat cv = b.v.adjoint() * a.v;
    return (a.sigma.adjoint() * cu * b.sigma * cv).trace();
}

inline double iterate_distance(const LowRankIterate &a, const LowRankIterate &b)
{
    const double d2 = a.sigma.squaredNorm() + b.sigma.squaredNorm() -
                      2.0 * std::real(iterate_inner(a, b));
    return std::sqrt(std::max(d2, 0.0));
}

/// Gradient of f at a rank-r iterate, kept implicit:
/// grad f(H) = lowrank_coeff * U Sigma V^H + H(hankel_coeff).
struct ImplicitGradient
{
    double lowrank_coeff = 0.0;
    Vec hankel_coeff;
};

/// A member of the subdifferential of F at the post-prox iterate, in
/// Hankel form: element = H(hankel_coeff) with ||element||_F given by the
/// weighted norm of the coefficients.
struct SubgradientElement
{
    Vec hankel_coeff;
    double norm = 0.0;
};

struct ObjectiveValue
{
    double total = 0.0;
    double fidelity = 0.0;        // 1/2 ||s - P_Omega x*||^2
    double hankel_mismatch = 0.0; // beta/2 ||H - H x*||_F^2
    double ridge = 0.0;           // alpha/2 ||x*||^2
    Vec x_star;                   // inner minimizer
    Vec adjoint;                  // H* of the iterate
};

struct IterationRecord
{
    Index iteration = 0;
    double objective = 0.0;
    double fidelity = 0.0;
    double hankel_mismatch = 0.0;
    double subgrad_norm = -1.0; // -1 before the first full iteration
    double nmse = -1.0;         // -1 when no ground truth is known
    double seconds = 0.0;
    Index cg_iterations = 0;
    Index lanczos_iterations = 0;
};

struct SolverTrace
{
    std::vector<IterationRecord> iterations;
    std::string termination; // tolerance | rel_change | max_iter
};

struct SolveResult
{
    Vec x;
    LowRankIterate iterate;
    SolverTrace trace;
};

class SolverError : public std::runtime_error
{
public:
    SolverError(const std::string &what, SolverTrace trace = {})
        : std::runtime_error(what), trace(std::move(trace))
    {
    }
    SolverTrace trace;
};

/// One reconstruction problem instance: geometry, observations and the
/// diagonal machinery shared by all solver steps.
class HankelProblem
{
public:
    HankelProblem(std::shared_ptr<const HankelPlan> plan, ObservedData data,
                  double alpha, double beta)
        : plan_(std::move(plan)),
          data_(std::move(data)),
          alpha_(alpha),
          beta_(beta),
          weights_(hankel_weights(plan_->shape())),
          resolvent_(resolvent(plan_->shape(), data_.mask, alpha, beta))
    {
        if (!(beta > 0.0) || !(alpha > 0.0))
            throw std::invalid_argument("HankelProblem: alpha, beta must be > 0");
    }

    const HankelPlan &plan() const { return *plan_; }
    const HankelShape &shape() const { return plan_->shape(); }
    const ObservedData &data() const { return data_; }
    const Eigen::VectorXd &weights() const { return weights_; }
    const DiagonalResolvent &diagonal() const { return resolvent_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    /// H* of a factored iterate.
    Vec adjoint_of(const LowRankIterate &h) const
    {
        return plan_->adjoint_lowrank(h.u * h.sigma, h.v);
    }

    /// Inner minimizer x* = L(P*_Omega s + beta H* H).
    Vec x_star(const LowRankIterate &h) const { return x_star_from_adjoint(adjoint_of(h)); }

    Vec x_star_from_adjoint(const Vec &adjoint) const
    {
        return resolvent_.d.cast<Complex>().cwiseProduct(data_.s + beta_ * adjoint);
    }

    ImplicitGradient gradient(const LowRankIterate &h) const
    {
        return {beta_, -beta_ * x_star(h)};
    }

    /// F at a rank-r iterate; g contributes zero by construction.
    ObjectiveValue objective(const LowRankIterate &h) const
    {
        ObjectiveValue val;
        val.adjoint = adjoint_of(h);
        val.x_star = x_star_from_adjoint(val.adjoint);

        double fid = 0.0;
        for (Index i : data_.mask.omega)
            fid += std::norm(data_.s[i] - val.x_star[i]);
        val.fidelity = 0.5 * fid;

        const double cross = std::real(val.x_star.conjugate().cwiseProduct(val.adjoint).sum());
        const double hankel_sq =
            (weights_.array() * val.x_star.array().abs2()).sum();
        val.hankel_mismatch =
            0.5 * beta_ * (h.sigma.squaredNorm() - 2.0 * cross + hankel_sq);
        val.ridge = 0.5 * alpha_ * val.x_star.squaredNorm();
        val.total = val.fidelity + val.hankel_mismatch + val.ridge;
        return val;
    }

    /// T_r(a * H + c * H(y)) via Lanczos on the combined implicit operator.
    LowRankIterate truncate(double lowrank_coeff, const LowRankIterate *h,
                            double hankel_coeff, const Vec &y, Index rank,
                            const SolverConfig &cfg, std::uint64_t step_seed,
                            Index *lanczos_iters = nullptr) const
    {
        auto plan = plan_;
        auto fy = std::make_shared<Vec>(plan->signal_spectrum(y));
        auto fyc = std::make_shared<Vec>(plan->signal_spectrum_conj_rev(y));
        const double a = lowrank_coeff;
        const double c = hankel_coeff;

        LinearOperatorHandle op;
        op.out_dim = shape().rows();
        op.in_dim = shape().cols();
        if (h != nullptr && a != 0.0) {
            const LowRankIterate hc = *h;
            op.apply = [plan, fy, a, c, hc](const Vec &vv) -> Vec {
                Vec out = c * plan->extract_rows(fy->cwiseProduct(plan->col_spectrum_rev(vv)));
                out.noalias() += a * (hc.u * (hc.sigma * (hc.v.adjoint() * vv)));
                return out;
            };
            op.adjoint_apply = [plan, fyc, a, c, hc](const Vec &uu) -> Vec {
                Vec out = c * plan->extract_cols_rev(fyc->cwiseProduct(plan->row_spectrum(uu)));
                out.noalias() += a * (hc.v * (hc.sigma.adjoint() * (hc.u.adjoint() * uu)));
                return out;
            };
        } else {
            op.apply = [plan, fy, c](const Vec &vv) -> Vec {
                return c * plan->extract_rows(fy->cwiseProduct(plan->col_spectrum_rev(vv)));
            };
            op.adjoint_apply = [plan, fyc, c](const Vec &uu) -> Vec {
                return c * plan->extract_cols_rev(fyc->cwiseProduct(plan->row_spectrum(uu)));
            };
        }

        auto res = lanczos_truncated_svd(op, rank, cfg.lanczos_tol,
                                         cfg.lanczos_max_iter, step_seed);
        if (lanczos_iters != nullptr)
            *lanczos_iters = res.iterations;
        if (!res.converged)
            throw SolverError("truncated SVD did not converge (residual " +
                              std::to_string(res.residuals.maxCoeff()) + ")");
        return {res.svd.u, res.svd.sigma.cast<Complex>().asDiagonal().toDenseMatrix(),
                res.svd.v};
    }

    /// H_0 = T_r(H s).
    LowRankIterate initial_iterate(Index rank, const SolverConfig &cfg) const
    {
        return truncate(0.0, nullptr, 1.0, data_.s, rank, cfg,
                        derive_seed(cfg.seed, {0x696e6974ULL}));
    }

    /// Modified PG step: T_r(H - gamma grad f(H)). With gamma = 1/beta the
    /// operator collapses to H(x*(H)).
    LowRankIterate mpg_step(const LowRankIterate &h, double gamma,
                            const SolverConfig &cfg, std::uint64_t step_seed,
                            Index *lanczos_iters = nullptr) const
    {
        const Vec xs = x_star(h);
        const double a = 1.0 - gamma * beta_;
        const double c = gamma * beta_;
        return truncate(a, &h, c, xs, h.rank(), cfg, step_seed, lanczos_iters);
    }

    /// Subspace projection: hold U, V and solve
    /// (I - beta P*_{UV} H L H* P_{UV}) Sigma = P*_{UV} H L P*_Omega s by CG.
    LowRankIterate subspace_projection(const LowRankIterate &h,
                                       const SolverConfig &cfg,
                                       CgResult *stats = nullptr) const
    {
        const Index r = h.rank();
        const Index pad = plan_->padded_size();
        Mat su(pad, r), svc(pad, r), svr(pad, r);
        for (Index j = 0; j < r; ++j) {
            su.col(j) = plan_->row_spectrum(h.u.col(j));
            svc.col(j) = plan_->col_spectrum_conj(h.v.col(j));
            svr.col(j) = plan_->col_spectrum_rev(h.v.col(j));
        }
        const Vec dc = resolvent_.d.cast<Complex>();

        auto hankel_sandwich = [&](const Vec &y) -> Mat {
            // U^H H(y) V through r row-extractions sharing one spectrum
            const Vec fy = plan_->signal_spectrum(y);
            Mat g(shape().rows(), r);
            for (Index j = 0; j < r; ++j)
                g.col(j) = plan_->extract_rows(fy.cwiseProduct(svr.col(j)));
            return h.u.adjoint() * g;
        };

        auto map = [&](const Mat &sigma) -> Mat {
            const Mat fuh = su * sigma;
            Vec acc = Vec::Zero(pad);
            for (Index j = 0; j < r; ++j)
                acc += fuh.col(j).cwiseProduct(svc.col(j));
            const Vec z = plan_->extract_signal(std::move(acc));
            return sigma - beta_ * hankel_sandwich(dc.cwiseProduct(z));
        };

        const Mat rhs = hankel_sandwich(dc.cwiseProduct(data_.s));
        auto cg = cg_solve(map, rhs, cfg.cg_tol,
                           cfg.cg_max_iter < 0 ? r * r : cfg.cg_max_iter);
        if (stats != nullptr)
            *stats = cg;
        if (cg.indefinite)
            throw SolverError("subspace projection map is not positive definite");
        return {h.u, cg.x, h.v};
    }

    /// Computable subgradient element beta^2 H L H*(H_half - H_next) of
    /// dF(H_next), returned as Hankel coefficients with its Frobenius norm
    /// evaluated through the weight diagonal.
    SubgradientElement subgradient_element(const LowRankIterate &half,
                                           const LowRankIterate &next) const
    {
        const Vec dz = adjoint_of(half) - adjoint_of(next);
        const Vec coeff =
            (beta_ * beta_) * resolvent_.d.cast<Complex>().cwiseProduct(dz);
        const double norm =
            std::sqrt((weights_.array() * coeff.array().abs2()).sum());
        return {coeff, norm};
    }

private:
    std::shared_ptr<const HankelPlan> plan_;
    ObservedData data_;
    double alpha_, beta_;
    Eigen::VectorXd weights_;
    DiagonalResolvent resolvent_;
};

namespace detail
{

inline double standard_pg_gamma(const SolverConfig &cfg, const HankelShape &shape)
{
    if (cfg.gamma > 0.0)
        return cfg.gamma;
    return 1.0 / (1.0 + cfg.beta * static_cast<double>(std::min(shape.rows(), shape.cols())) +
                  cfg.alpha);
}

/// Two-variable standard PG baseline (small step size).
inline SolveResult solve_standard_pg(const HankelProblem &prob, const SolverConfig &cfg,
                                     const Vec *truth)
{
    using Clock = std::chrono::steady_clock;
    const double gamma = standard_pg_gamma(cfg, prob.shape());
    const double beta = prob.beta();
    const Eigen::VectorXd &w = prob.weights();
    const ObservedData &data = prob.data();

    Eigen::VectorXd diag = (cfg.alpha + (beta * w).array()).matrix();
    for (Index i : data.mask.omega)
        diag[i] += 1.0;

    SolveResult out;
    out.iterate = prob.initial_iterate(cfg.rank, cfg);
    Vec x = data.s;

    auto two_variable_f = [&](const LowRankIterate &h, const Vec &xv) {
        double fid = 0.0;
        for (Index i : data.mask.omega)
            fid += std::norm(data.s[i] - xv[i]);
        const Vec z = prob.adjoint_of(h);
        const double cross = std::real(xv.conjugate().cwiseProduct(z).sum());
        const double hx2 = (w.array() * xv.array().abs2()).sum();
        return 0.5 * fid +
               0.5 * beta * (h.sigma.squaredNorm() - 2.0 * cross + hx2) +
               0.5 * cfg.alpha * xv.squaredNorm();
    };

    auto record_nmse = [&](const Vec &est) {
        return truth != nullptr ? nmse(est, *truth) : -1.0;
    };

    {
        IterationRecord rec;
        rec.iteration = 0;
        rec.objective = two_variable_f(out.iterate, x);
        rec.nmse = record_nmse(x);
        out.trace.iterations.push_back(rec);
    }

    out.trace.termination = "max_iter";
    for (Index k = 1; k <= cfg.max_iter; ++k) {
        const auto t0 = Clock::now();
        const Vec z = prob.adjoint_of(out.iterate);
        Vec grad_x = diag.cast<Complex>().cwiseProduct(x) - data.s - beta * z;
        const Vec x_next = x - gamma * grad_x;

        Index lanczos_iters = 0;
        LowRankIterate h_next =
            prob.truncate(1.0 - gamma * beta, &out.iterate, gamma * beta, x,
                          cfg.rank, cfg, derive_seed(cfg.seed, {0x7067ULL, static_cast<std::uint64_t>(k)}),
                          &lanczos_iters);
        const double rel_change =
            iterate_distance(h_next, out.iterate) /
            std::max(out.iterate.frobenius_norm(), 1e-300);

        x = x_next;
        out.iterate = std::move(h_next);

        IterationRecord rec;
        rec.iteration = k;
        rec.objective = two_variable_f(out.iterate, x);
        rec.nmse = record_nmse(x);
        rec.lanczos_iterations = lanczos_iters;
        rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        out.trace.iterations.push_back(rec);

        const double stop_tol =
            cfg.stop == StopRule::RelChange ? cfg.rel_change_tol : cfg.epsilon;
        if (rel_change < stop_tol) {
            out.trace.termination =
                cfg.stop == StopRule::RelChange ? "rel_change" : "tolerance";
            break;
        }
    }
    out.x = x;
    return out;
}

} // namespace detail

/// Full solver loop. LPPG alternates subspace projection and MPG steps;
/// MPG skips the projection; the standard PG baseline takes joint (H, x)
/// gradient steps with its size-dependent step bound.
inline SolveResult solve(const ObservedData &data, const HankelShape &shape,
                         const SolverConfig &cfg, const Vec *truth = nullptr)
{
    auto plan = std::make_shared<const HankelPlan>(shape);
    HankelProblem prob(plan, data, cfg.alpha, cfg.beta);
    if (cfg.variant == Variant::StandardPg)
        return detail::solve_standard_pg(prob, cfg, truth);

    using Clock = std::chrono::steady_clock;
    const double gamma = cfg.gamma > 0.0 ? cfg.gamma : 1.0 / cfg.beta;
    if (gamma * cfg.beta > 1.0 + 1e-12)
        throw std::invalid_argument("solve: step size must satisfy gamma <= 1/beta");

    SolveResult out;
    out.iterate = prob.initial_iterate(cfg.rank, cfg);
    ObjectiveValue current = prob.objective(out.iterate);

    auto record_nmse = [&](const Vec &est) {
        return truth != nullptr ? nmse(est, *truth) : -1.0;
    };

    {
        IterationRecord rec;
        rec.iteration = 0;
        rec.objective = current.total;
        rec.fidelity = current.fidelity;
        rec.hankel_mismatch = current.hankel_mismatch;
        rec.nmse = record_nmse(current.x_star);
        out.trace.iterations.push_back(rec);
    }

    out.trace.termination = "max_iter";
    for (Index k = 1; k <= cfg.max_iter; ++k) {
        const auto t0 = Clock::now();
        IterationRecord rec;
        rec.iteration = k;

        LowRankIterate half = out.iterate;
        if (cfg.variant == Variant::Lppg) {
            CgResult cg;
            LowRankIterate candidate = prob.subspace_projection(out.iterate, cfg, &cg);
            rec.cg_iterations = cg.iterations;
            const ObjectiveValue cand_val = prob.objective(candidate);
            // the exact solve cannot increase F; an inexact CG result is
            // only accepted when it still decreases the objective
            if (cand_val.total <= current.total * (1.0 + 1e-12) + 1e-300)
                half = std::move(candidate);
        }

        LowRankIterate next =
            prob.mpg_step(half, gamma, cfg,
                          derive_seed(cfg.seed, {0x6d7067ULL, static_cast<std::uint64_t>(k)}),
                          &rec.lanczos_iterations);

        const SubgradientElement sub = prob.subgradient_element(half, next);
        const double rel_change = iterate_distance(next, out.iterate) /
                                  std::max(out.iterate.frobenius_norm(), 1e-300);

        out.iterate = std::move(next);
        current = prob.objective(out.iterate);

        rec.objective = current.total;
        rec.fidelity = current.fidelity;
        rec.hankel_mismatch = current.hankel_mismatch;
        rec.subgrad_norm = sub.norm;
        rec.nmse = record_nmse(current.x_star);
        rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        out.trace.iterations.push_back(rec);

        if (cfg.stop == StopRule::Subgradient) {
            if (sub.norm < cfg.epsilon * out.iterate.frobenius_norm()) {
                out.trace.termination = "tolerance";
                break;
            }
        } else if (rel_change < cfg.rel_change_tol) {
            out.trace.termination = "rel_change";
            break;
        }
    }

    out.x = current.x_star;
    return out;
}

} // namespace lppg

#endif // LPPG_SOLVER_HPP

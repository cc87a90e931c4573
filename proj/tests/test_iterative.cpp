#include <catch2/catch_amalgamated.hpp>

#include <Eigen/SVD>

#include "lppg/cg.hpp"
#include "lppg/hankel.hpp"
#include "lppg/lanczos.hpp"
#include "lppg/signal.hpp"

using namespace lppg;

namespace
{

Mat random_mat(Index rows, Index cols, RandomStream &rng)
{
    Mat m(rows, cols);
    for (Index i = 0; i < m.size(); ++i)
        m(i) = rng.gaussian_complex();
    return m;
}

void check_triplets(const LanczosResult &res, const LinearOperatorHandle &op,
                    double tol)
{
    const Index r = res.svd.sigma.size();
    const Mat gram_u = res.svd.u.adjoint() * res.svd.u;
    const Mat gram_v = res.svd.v.adjoint() * res.svd.v;
    CHECK((gram_u - Mat::Identity(r, r)).norm() < 1e-9);
    CHECK((gram_v - Mat::Identity(r, r)).norm() < 1e-9);
    for (Index i = 0; i + 1 < r; ++i)
        CHECK(res.svd.sigma[i] >= res.svd.sigma[i + 1]);
    for (Index i = 0; i < r; ++i) {
        const Vec av = op.apply(res.svd.v.col(i));
        CHECK((av - res.svd.sigma[i] * res.svd.u.col(i)).norm() <
              tol * std::max(res.svd.sigma[0], 1.0));
    }
}

} // namespace

TEST_CASE("lanczos: diagonal operator")
{
    Mat d = Mat::Zero(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 2;
    d(2, 2) = 1;
    const auto op = make_dense_operator(d);
    const auto res = lanczos_truncated_svd(op, 2, 1e-12, -1, 5);
    REQUIRE(res.converged);
    CHECK(std::abs(res.svd.sigma[0] - 3.0) < 1e-10);
    CHECK(std::abs(res.svd.sigma[1] - 2.0) < 1e-10);
    // phase convention pins each singular vector to +e_i
    CHECK(std::abs(res.svd.u(0, 0) - Complex(1, 0)) < 1e-9);
    CHECK(std::abs(res.svd.u(1, 1) - Complex(1, 0)) < 1e-9);
    check_triplets(res, op, 1e-10);
}

TEST_CASE("lanczos: rank-1 outer product")
{
    RandomStream rng(derive_seed(21, {0}));
    Vec u = random_mat(9, 1, rng);
    Vec v = random_mat(6, 1, rng);
    u /= u.norm();
    v /= v.norm();
    const double sigma = 4.2;
    const auto op = make_dense_operator(sigma * u * v.adjoint());
    const auto res = lanczos_truncated_svd(op, 1, 1e-12, -1, 9);
    REQUIRE(res.converged);
    CHECK(std::abs(res.svd.sigma[0] - sigma) < 1e-10);
    // recovered factors match up to the common phase fix
    CHECK(std::abs(std::abs(u.dot(res.svd.u.col(0))) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(v.dot(res.svd.v.col(0))) - 1.0) < 1e-10);
    check_triplets(res, op, 1e-10);
}

TEST_CASE("lanczos: dense random matrix against full SVD")
{
    RandomStream rng(derive_seed(22, {0}));
    const Mat a = random_mat(40, 30, rng);
    Eigen::JacobiSVD<Mat> svd(a);
    const auto op = make_dense_operator(a);
    const auto res = lanczos_truncated_svd(op, 5, 1e-11, -1, 3);
    REQUIRE(res.converged);
    for (Index i = 0; i < 5; ++i)
        CHECK(std::abs(res.svd.sigma[i] - svd.singularValues()[i]) <
              1e-8 * svd.singularValues()[0]);
    check_triplets(res, op, 1e-8);
}

TEST_CASE("lanczos: implicit Hankel operator")
{
    RandomStream rng(derive_seed(23, {0}));
    const std::vector<Index> dims{63};
    const auto sig = generate_signal(dims, 4, false, rng);
    const HankelShape shape = HankelShape::square(dims);
    auto plan = std::make_shared<const HankelPlan>(shape);
    const auto op = make_hankel_operator(plan, sig.x);

    Eigen::JacobiSVD<Mat> svd(hankel_embed(sig.x, shape));
    const auto res = lanczos_truncated_svd(op, 4, 1e-11, -1, 17);
    REQUIRE(res.converged);
    for (Index i = 0; i < 4; ++i)
        CHECK(std::abs(res.svd.sigma[i] - svd.singularValues()[i]) <
              1e-8 * svd.singularValues()[0]);
    check_triplets(res, op, 1e-8);
}

TEST_CASE("lanczos: repeated singular values are flagged degenerate")
{
    Mat d = Mat::Zero(4, 4);
    d(0, 0) = 2;
    d(1, 1) = 2;
    d(2, 2) = 2;
    d(3, 3) = 1;
    const auto res = lanczos_truncated_svd(make_dense_operator(d), 2, 1e-12, -1, 31);
    CHECK(res.degenerate);
}

TEST_CASE("lanczos rejects invalid ranks")
{
    const auto op = make_dense_operator(Mat::Identity(4, 3));
    CHECK_THROWS_AS(lanczos_truncated_svd(op, 0), std::invalid_argument);
    CHECK_THROWS_AS(lanczos_truncated_svd(op, 4), std::invalid_argument);
}

TEST_CASE("cg: identity and scaled identity")
{
    RandomStream rng(derive_seed(31, {0}));
    const Mat rhs = random_mat(3, 3, rng);
    auto id = [](const Mat &x) { return x; };
    auto res = cg_solve(id, rhs, 1e-12);
    REQUIRE(res.converged);
    CHECK((res.x - rhs).norm() < 1e-10 * rhs.norm());

    auto twice = [](const Mat &x) { return Mat(2.0 * x); };
    res = cg_solve(twice, rhs, 1e-12);
    REQUIRE(res.converged);
    CHECK((res.x - 0.5 * rhs).norm() < 1e-10 * rhs.norm());
}

TEST_CASE("cg: Hermitian positive definite map against a direct solve")
{
    RandomStream rng(derive_seed(32, {0}));
    const Mat b = random_mat(5, 5, rng);
    const Mat p = b.adjoint() * b + 0.5 * Mat::Identity(5, 5); // HPD
    const Mat rhs = random_mat(5, 4, rng);
    auto map = [&p](const Mat &x) { return Mat(p * x); };
    const auto res = cg_solve(map, rhs, 1e-12, 200);
    REQUIRE(res.converged);
    const Mat direct = p.ldlt().solve(rhs);
    CHECK((res.x - direct).norm() < 1e-8 * direct.norm());
    CHECK(res.rel_residual <= 1e-12);
}

TEST_CASE("cg: zero right-hand side returns zero immediately")
{
    auto id = [](const Mat &x) { return x; };
    const auto res = cg_solve(id, Mat::Zero(3, 3), 1e-12);
    REQUIRE(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.x.norm() == 0.0);
}

TEST_CASE("cg: negative curvature is detected")
{
    RandomStream rng(derive_seed(33, {0}));
    const Mat rhs = random_mat(3, 3, rng);
    auto neg = [](const Mat &x) { return Mat(-x); };
    const auto res = cg_solve(neg, rhs, 1e-12);
    CHECK(res.indefinite);
    CHECK_FALSE(res.converged);
}

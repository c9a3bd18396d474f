#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hyperembed/linalg.hpp"
#include "support.hpp"

using namespace hyperembed;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Index rows, Index cols) {
    Eigen::MatrixXd A(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) A(i, j) = rng.normal();
    return A;
}

Eigen::MatrixXd random_symmetric(Rng& rng, Index dim) {
    Eigen::MatrixXd A = random_matrix(rng, dim, dim);
    return 0.5 * (A + A.transpose());
}

/// Sine of the largest principal angle between equal-rank column spaces,
/// via the projection residual (accurate near zero, unlike acos of cosines).
double subspace_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qa(A), qb(B);
    Eigen::MatrixXd Qa = qa.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
    Eigen::MatrixXd Qb = qb.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols());
    Eigen::MatrixXd residual = Qa - Qb * (Qb.transpose() * Qa);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    return svd.singularValues().maxCoeff();
}

}  // namespace

TEST_CASE("operator application is linear") {
    Rng rng(31);
    Eigen::MatrixXd A = random_matrix(rng, 12, 9);
    auto op = dense_operator(A);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x = random_matrix(rng, 9, 1);
        Eigen::VectorXd y = random_matrix(rng, 9, 1);
        Eigen::VectorXd axy(12), ax(12), ay(12);
        op.apply(x + y, axy);
        op.apply(x, ax);
        op.apply(y, ay);
        CHECK((axy - ax - ay).norm() <= 1e-10 * (x.norm() + y.norm()));
    }
}

TEST_CASE("lanczos on small fixed spectra") {
    SUBCASE("algebraically largest selection") {
        auto op = dense_operator(Eigen::Vector3d(5.0, -2.0, 1.0).asDiagonal());
        auto eig = lanczos_eigs(op, 2, {});
        CHECK(eig.values[0] == doctest::Approx(5.0));
        CHECK(eig.values[1] == doctest::Approx(1.0));
    }
    SUBCASE("degenerate spectrum still yields orthonormal vectors") {
        auto op = dense_operator(Eigen::MatrixXd::Identity(4, 4));
        auto eig = lanczos_eigs(op, 2, {});
        CHECK(eig.values[0] == doctest::Approx(1.0));
        CHECK(eig.values[1] == doctest::Approx(1.0));
        Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
        CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("zero operator") {
        auto op = dense_operator(Eigen::MatrixXd::Zero(5, 5));
        auto eig = lanczos_eigs(op, 3, {});
        CHECK(eig.values.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("asymmetric operator rejected") {
        Eigen::MatrixXd A(2, 2);
        A << 0, 1, 0, 0;
        CHECK_THROWS_AS(lanczos_eigs(dense_operator(A), 1, {}), ValidationError);
    }
    SUBCASE("k out of range") {
        auto op = dense_operator(Eigen::MatrixXd::Identity(3, 3));
        CHECK_THROWS_AS(lanczos_eigs(op, 4, {}), ParameterError);
    }
}

TEST_CASE("lanczos matches the dense eigensolver on random symmetric matrices") {
    Rng rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        const Index dim = 40;
        Eigen::MatrixXd A = random_symmetric(rng, dim);
        auto eig = lanczos_eigs(dense_operator(A), 5, {1e-12, 0, 42});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(A);
        for (Index i = 0; i < 5; ++i)
            CHECK(eig.values[i] == doctest::Approx(dense.eigenvalues()[dim - 1 - i]).epsilon(1e-8));
        Eigen::MatrixXd dense_top(dim, 5);
        for (Index i = 0; i < 5; ++i) dense_top.col(i) = dense.eigenvectors().col(dim - 1 - i);
        CHECK(subspace_angle(eig.vectors, dense_top) <= 1e-8);
    }
}

TEST_CASE("lanczos eigenvalues are seed-invariant") {
    Rng rng(33);
    Eigen::MatrixXd Y = random_matrix(rng, 30, 8);
    Eigen::VectorXd theta(8);
    for (Index i = 0; i < 8; ++i) theta[i] = rng.uniform() + 0.2;
    Eigen::MatrixXd G = Y * theta.asDiagonal() * Y.transpose();
    auto op = dense_operator(G);
    auto a = lanczos_eigs(op, 4, {1e-10, 0, 1});
    auto b = lanczos_eigs(op, 4, {1e-10, 0, 999});
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("truncated svd on fixed operators") {
    SUBCASE("diagonal") {
        auto op = dense_operator(Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal());
        auto svd = truncated_svd(op, 2);
        CHECK(svd.S.isApprox(Eigen::Vector2d(3.0, 2.0), 1e-10));
    }
    SUBCASE("rank-1 outer product") {
        Eigen::VectorXd u(4), v(3);
        u << 1, 2, -1, 0.5;
        v << 0.5, -1, 2;
        auto op = dense_operator(u * v.transpose());
        auto svd = truncated_svd(op, 1);
        CHECK(svd.S[0] == doctest::Approx(u.norm() * v.norm()).epsilon(1e-10));
    }
    SUBCASE("rank deficiency shrinks r") {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
        A(0, 0) = 2.0;
        A(1, 1) = 1.0;
        auto svd = truncated_svd(dense_operator(A), 4);
        CHECK(svd.rank() == 2);
        CHECK(svd.S.isApprox(Eigen::Vector2d(2.0, 1.0), 1e-10));
    }
    SUBCASE("r out of range") {
        auto op = dense_operator(Eigen::MatrixXd::Identity(3, 3));
        CHECK_THROWS_AS(truncated_svd(op, 4), ParameterError);
    }
}

TEST_CASE("truncated svd matches the dense oracle") {
    Rng rng(34);
    for (int trial = 0; trial < 4; ++trial) {
        Eigen::MatrixXd A = random_matrix(rng, 50, 30);
        // sparsify to mimic incidence-like operators
        for (Index i = 0; i < A.rows(); ++i)
            for (Index j = 0; j < A.cols(); ++j)
                if (rng.uniform() < 0.7) A(i, j) = 0.0;
        auto svd = truncated_svd(dense_operator(A), 10, {1e-10, 0, 7, 1e-10});
        Eigen::JacobiSVD<Eigen::MatrixXd> dense(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        for (Index i = 0; i < svd.rank(); ++i)
            CHECK(svd.S[i] == doctest::Approx(dense.singularValues()[i]).epsilon(1e-8));
        // orthonormality and residuals of the retained triples
        CHECK((svd.U.transpose() * svd.U - Eigen::MatrixXd::Identity(svd.rank(), svd.rank()))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-8);
        CHECK((svd.V.transpose() * svd.V - Eigen::MatrixXd::Identity(svd.rank(), svd.rank()))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-8);
        for (Index i = 0; i < svd.rank(); ++i) {
            CHECK((A * svd.V.col(i) - svd.S[i] * svd.U.col(i)).norm() <= 1e-8 * svd.S[0]);
            CHECK((A.transpose() * svd.U.col(i) - svd.S[i] * svd.V.col(i)).norm() <=
                  1e-8 * svd.S[0]);
        }
    }
}

TEST_CASE("non-convergence carries achieved residuals") {
    Rng rng(35);
    Eigen::MatrixXd A = random_symmetric(rng, 60);
    EigOptions opts;
    opts.tol = 1e-14;
    opts.max_iters = 8;  // far too few
    try {
        lanczos_eigs(dense_operator(A), 6, opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(std::string(e.what()).find("residual") != std::string::npos);
    }
}

TEST_CASE("parallel reduction mode stays close to sequential") {
    Rng rng(36);
    Eigen::VectorXd a = random_matrix(rng, 200000, 1);
    Eigen::VectorXd b = random_matrix(rng, 200000, 1);
    set_num_threads(4);
    set_reduction_mode(ReductionMode::sequential);
    double seq = reduce_dot(a, b);
    set_reduction_mode(ReductionMode::parallel);
    double par = reduce_dot(a, b);
    set_reduction_mode(ReductionMode::sequential);
    set_num_threads(1);
    CHECK(par == doctest::Approx(seq).epsilon(1e-12));
}

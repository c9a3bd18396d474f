#ifndef HYPEREMBED_LINALG_HPP
#define HYPEREMBED_LINALG_HPP

#include <functional>

#include "hyperembed/types.hpp"

namespace hyperembed {

/// Matrix-free operator. apply computes y = A x; apply_adjoint computes
/// y = A^T x and is required by truncated_svd.
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply_adjoint;
};

LinearOperator dense_operator(const Eigen::MatrixXd& A);

struct SvdTriple {
    Eigen::MatrixXd U;   // rows x r, orthonormal columns
    Eigen::VectorXd S;   // descending, positive
    Eigen::MatrixXd V;   // cols x r, orthonormal columns

    Index rank() const { return S.size(); }
};

struct SvdOptions {
    double tol = 1e-10;        // residual tolerance relative to sigma_1
    Index max_iters = 0;       // 0 = 10 * r
    std::uint64_t seed = 42;
    double drop_tol = 1e-10;   // sigma below drop_tol * sigma_1 are dropped
    bool best_effort = false;  // exhausted budget returns Ritz approximations
};

/// Truncated SVD via Lanczos on the Gram operator A^T A; left vectors are
/// recovered as u = A v / sigma. The returned rank may be smaller than r when
/// trailing singular values fall below drop_tol * sigma_1.
SvdTriple truncated_svd(const LinearOperator& op, Index r, const SvdOptions& opts = {});

struct EigOptions {
    double tol = 1e-9;     // residual tolerance relative to |lambda_max|
    Index max_iters = 0;   // 0 = 10 * k
    std::uint64_t seed = 42;
    bool best_effort = false;  // exhausted budget returns Ritz approximations
};

struct EigResult {
    Eigen::VectorXd values;     // k, algebraically largest, descending
    Eigen::MatrixXd vectors;    // dim x k, orthonormal, sign-canonicalized
    Eigen::VectorXd residuals;  // achieved ||A q - lambda q||
    Index iterations = 0;
};

/// Symmetric Lanczos with full reorthogonalization and deterministic seeded
/// start vector. Selects the k algebraically largest eigenvalues. Breakdowns
/// (invariant subspaces) restart with a fresh orthogonal direction, so
/// degenerate spectra still yield k orthonormal vectors.
EigResult lanczos_eigs(const LinearOperator& op, Index k, const EigOptions& opts = {});

/// Reduction-mode aware dot product; the parallel mode uses deterministic
/// chunked partial sums.
double reduce_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace hyperembed

#endif

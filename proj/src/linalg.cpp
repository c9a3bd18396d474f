#include "hyperembed/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace hyperembed {

namespace {

constexpr Index kDotChunk = 1 << 15;

Eigen::VectorXd random_unit_vector(Rng& rng, Index dim) {
    Eigen::VectorXd v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = rng.normal();
    double nrm = v.norm();
    if (nrm == 0.0) v.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
    else v /= nrm;
    return v;
}

// coeffs = basis(:, 0:j)^T w, column-partitioned; then w -= basis * coeffs,
// row-partitioned. Both deterministic at any thread count.
void orthogonalize_against(const Eigen::MatrixXd& basis, Index j, Eigen::VectorXd& w) {
    if (j == 0) return;
    Eigen::VectorXd coeffs(j);
    parallel_for(0, j, [&](Index lo, Index hi) {
        for (Index c = lo; c < hi; ++c) coeffs[c] = basis.col(c).dot(w);
    });
    if (w.size() >= kDotChunk) {
        parallel_for(0, w.size(), [&](Index lo, Index hi) {
            w.segment(lo, hi - lo).noalias() -=
                basis.block(lo, 0, hi - lo, j) * coeffs;
        });
    } else {
        w.noalias() -= basis.leftCols(j) * coeffs;
    }
}

// full reorthogonalization with a second pass only when the first one
// cancelled heavily ("twice is enough")
void full_reorthogonalize(const Eigen::MatrixXd& basis, Index j, Eigen::VectorXd& w) {
    double before = std::sqrt(reduce_dot(w, w));
    orthogonalize_against(basis, j, w);
    double after = std::sqrt(reduce_dot(w, w));
    if (after < 0.5 * before) orthogonalize_against(basis, j, w);
}

void check_symmetry(const LinearOperator& op, std::uint64_t seed) {
    Rng rng(mix(seed, 0x5ca1ab1e));
    Eigen::VectorXd x = random_unit_vector(rng, op.cols);
    Eigen::VectorXd y = random_unit_vector(rng, op.cols);
    Eigen::VectorXd ax(op.rows), ay(op.rows);
    op.apply(x, ax);
    op.apply(y, ay);
    double scale = std::max({ax.norm(), ay.norm(), 1e-300});
    if (std::abs(ax.dot(y) - x.dot(ay)) > 1e-8 * scale)
        throw ValidationError("lanczos_eigs: operator is not symmetric");
}

struct TridiagEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // j x j
};

TridiagEig solve_tridiagonal(const std::vector<double>& diag, const std::vector<double>& sub) {
    const Index j = static_cast<Index>(diag.size());
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), j);
    Eigen::VectorXd s =
        j > 1 ? Eigen::Map<const Eigen::VectorXd>(sub.data(), j - 1) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(d, s);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("tridiagonal eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

void canonicalize_sign(Eigen::MatrixXd& vectors) {
    for (Index c = 0; c < vectors.cols(); ++c)
        for (Index i = 0; i < vectors.rows(); ++i) {
            if (vectors(i, c) != 0.0) {
                if (vectors(i, c) < 0.0) vectors.col(c) = -vectors.col(c);
                break;
            }
        }
}

}  // namespace

double reduce_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (reduction_mode() == ReductionMode::sequential || a.size() < 2 * kDotChunk)
        return a.dot(b);
    const Index n = a.size();
    const Index chunks = (n + kDotChunk - 1) / kDotChunk;
    std::vector<double> partial(chunks, 0.0);
    parallel_for(0, chunks, [&](Index lo, Index hi) {
        for (Index c = lo; c < hi; ++c) {
            Index s = c * kDotChunk;
            Index len = std::min<Index>(kDotChunk, n - s);
            partial[c] = a.segment(s, len).dot(b.segment(s, len));
        }
    });
    return std::accumulate(partial.begin(), partial.end(), 0.0);
}

LinearOperator dense_operator(const Eigen::MatrixXd& A) {
    LinearOperator op;
    op.rows = A.rows();
    op.cols = A.cols();
    op.apply = [A](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y.noalias() = A * x; };
    op.apply_adjoint = [A](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y.noalias() = A.transpose() * x;
    };
    return op;
}

EigResult lanczos_eigs(const LinearOperator& op, Index k, const EigOptions& opts) {
    if (op.rows != op.cols) throw ParameterError("lanczos_eigs: operator must be square");
    const Index dim = op.rows;
    if (k < 1 || k > dim) throw ParameterError("lanczos_eigs: k must be in [1, dim]");
    check_symmetry(op, opts.seed);
    // achievable residual floor under full reorthogonalization
    const double tol = std::max(opts.tol, 4.0 * std::numeric_limits<double>::epsilon() *
                                              static_cast<double>(dim));

    const Index max_basis = std::min<Index>(dim, std::max<Index>(opts.max_iters > 0
                                                                     ? opts.max_iters
                                                                     : 10 * k,
                                                                 k));
    Rng rng(opts.seed);
    Eigen::MatrixXd basis(dim, max_basis);
    std::vector<double> diag, sub;
    diag.reserve(max_basis);
    sub.reserve(max_basis);

    basis.col(0) = random_unit_vector(rng, dim);
    Eigen::VectorXd w(dim);
    double scale_est = 0.0;
    Index j = 0;

    auto extract = [&](Index size) -> TridiagEig {
        std::vector<double> s(sub.begin(), sub.begin() + (size > 1 ? size - 1 : 0));
        std::vector<double> d(diag.begin(), diag.begin() + size);
        return solve_tridiagonal(d, s);
    };

    TridiagEig ritz;
    bool estimates_ok = false;
    while (j < max_basis) {
        op.apply(basis.col(j), w);
        double a = reduce_dot(w, basis.col(j));
        diag.push_back(a);
        scale_est = std::max(scale_est, std::abs(a));
        w.noalias() -= a * basis.col(j);
        if (j > 0 && sub[j - 1] != 0.0) w.noalias() -= sub[j - 1] * basis.col(j - 1);
        full_reorthogonalize(basis, j + 1, w);
        double b = std::sqrt(std::max(reduce_dot(w, w), 0.0));
        ++j;
        if (j == max_basis) break;

        const double breakdown = 1e-13 * std::max(scale_est, 1e-300);
        if (b <= breakdown) {
            // invariant subspace: continue with a fresh orthogonal direction
            if (j >= dim) break;
            Eigen::VectorXd fresh = random_unit_vector(rng, dim);
            orthogonalize_against(basis, j, fresh);
            orthogonalize_against(basis, j, fresh);
            double fn = fresh.norm();
            if (fn < 1e-8) break;  // space exhausted numerically
            basis.col(j) = fresh / fn;
            sub.push_back(0.0);
        } else {
            basis.col(j) = w / b;
            sub.push_back(b);
            scale_est = std::max(scale_est, b);
        }

        // convergence estimate on the k largest Ritz pairs
        if (j >= k && (j % 8 == 0 || j == max_basis - 1)) {
            ritz = extract(j);
            double theta_max = std::max(std::abs(ritz.values[0]), std::abs(ritz.values[j - 1]));
            double last_beta = sub.empty() ? 0.0 : std::abs(sub.back());
            bool ok = true;
            for (Index i = 0; i < k; ++i) {
                double est = last_beta * std::abs(ritz.vectors(j - 1, j - 1 - i));
                if (est > tol * std::max(theta_max, 1e-300)) { ok = false; break; }
            }
            if (ok) { estimates_ok = true; break; }
        }
    }

    ritz = extract(j);
    (void)estimates_ok;

    // k algebraically largest Ritz values (ascending solver order)
    EigResult out;
    out.iterations = j;
    out.values.resize(k);
    out.vectors.resize(dim, k);
    for (Index i = 0; i < k; ++i) {
        const Index src = j - 1 - i;
        out.values[i] = ritz.values[src];
        Eigen::VectorXd s = ritz.vectors.col(src);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
        parallel_for(0, dim, [&](Index lo, Index hi) {
            q.segment(lo, hi - lo).noalias() = basis.block(lo, 0, hi - lo, j) * s;
        });
        out.vectors.col(i) = q;
    }
    canonicalize_sign(out.vectors);

    out.residuals.resize(k);
    double lambda_scale = 0.0;
    for (Index i = 0; i < k; ++i) lambda_scale = std::max(lambda_scale, std::abs(out.values[i]));
    lambda_scale = std::max(lambda_scale,
                            std::max(std::abs(ritz.values[0]), std::abs(ritz.values[j - 1])));
    Eigen::VectorXd aq(dim);
    double worst = 0.0;
    for (Index i = 0; i < k; ++i) {
        op.apply(out.vectors.col(i), aq);
        out.residuals[i] = (aq - out.values[i] * out.vectors.col(i)).norm();
        worst = std::max(worst, out.residuals[i]);
    }
    if (!opts.best_effort && lambda_scale > 0.0 && worst > tol * lambda_scale && j < dim) {
        std::ostringstream msg;
        msg << "lanczos_eigs: not converged after " << j << " iterations; worst residual " << worst
            << " vs bound " << tol * lambda_scale;
        throw ConvergenceError(msg.str());
    }
    return out;
}

SvdTriple truncated_svd(const LinearOperator& op, Index r, const SvdOptions& opts) {
    if (!op.apply || !op.apply_adjoint)
        throw ParameterError("truncated_svd: operator needs apply and apply_adjoint");
    if (r < 1 || r > std::min(op.rows, op.cols))
        throw ParameterError("truncated_svd: r must be in [1, min(rows, cols)]");

    LinearOperator gram;
    gram.rows = gram.cols = op.cols;
    Eigen::VectorXd mid(op.rows);
    gram.apply = [&op, &mid](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        op.apply(x, mid);
        op.apply_adjoint(mid, y);
    };
    gram.apply_adjoint = gram.apply;

    EigOptions eig_opts;
    eig_opts.tol = std::max(opts.tol * opts.tol, 1e-14);
    eig_opts.max_iters = opts.max_iters > 0 ? opts.max_iters : 10 * r;
    eig_opts.seed = opts.seed;
    eig_opts.best_effort = opts.best_effort;
    EigResult eig = lanczos_eigs(gram, r, eig_opts);

    Eigen::VectorXd sigma(r);
    for (Index i = 0; i < r; ++i) sigma[i] = std::sqrt(std::max(eig.values[i], 0.0));
    const double sigma1 = sigma.size() ? sigma[0] : 0.0;
    const double floor = std::max(opts.drop_tol, 1e-14) * sigma1;
    Index kept = 0;
    while (kept < r && sigma[kept] > floor) ++kept;
    if (kept == 0) throw ConvergenceError("truncated_svd: no singular value above the drop floor");

    SvdTriple out;
    out.S = sigma.head(kept);
    out.V = eig.vectors.leftCols(kept);
    out.U.resize(op.rows, kept);
    Eigen::VectorXd av(op.rows);
    for (Index i = 0; i < kept; ++i) {
        op.apply(out.V.col(i), av);
        out.U.col(i) = av / out.S[i];
    }
    return out;
}

}  // namespace hyperembed

#include "hyperembed/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

#include "hyperembed/extend.hpp"

namespace hyperembed {

namespace {

void check_cap(Index dim, Index cap, const char* what) {
    if (dim > cap)
        throw ParameterError(std::string(what) + ": dimension " + std::to_string(dim) +
                             " exceeds the dense cap " + std::to_string(cap) +
                             "; use the sketched pipeline (sahe) instead");
}

Eigen::MatrixXd dense_incidence(const ExtendedHypergraph& ext) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(ext.num_rows(), ext.num_nodes());
    const auto& inc = ext.incidence;
    for (Index r = 0; r < inc.n_rows; ++r)
        for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
            H(r, inc.col_indices[p]) = inc.values[p];
    return H;
}

// C = A * B with the row range of C split across threads.
Eigen::MatrixXd threaded_product(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd C(A.rows(), B.cols());
    parallel_for(0, A.rows(), [&](Index lo, Index hi) {
        C.middleRows(lo, hi - lo).noalias() = A.middleRows(lo, hi - lo) * B;
    });
    return C;
}

}  // namespace

TransitionMatrix node_transition(const ExtendedHypergraph& ext, Index dense_cap) {
    check_cap(ext.num_nodes(), dense_cap, "node_transition");
    Eigen::MatrixXd H = dense_incidence(ext);
    Eigen::MatrixXd right = (ext.edge_weights.array() / ext.edge_degrees.array())
                                .matrix()
                                .asDiagonal() *
                            H;  // W De^-1 H
    TransitionMatrix P;
    P.data = ext.node_degrees.cwiseInverse().asDiagonal() *
             threaded_product(H.transpose(), right);
    return P;
}

TransitionMatrix edge_transition(const ExtendedHypergraph& ext, Index dense_cap) {
    check_cap(ext.num_rows(), dense_cap, "edge_transition");
    Eigen::MatrixXd H = dense_incidence(ext);
    Eigen::MatrixXd right = ext.node_degrees.cwiseInverse().asDiagonal() * H.transpose();
    right = right * ext.edge_weights.asDiagonal();  // Dv^-1 H^T W
    TransitionMatrix P;
    P.data = ext.edge_degrees.cwiseInverse().asDiagonal() * threaded_product(H, right);
    return P;
}

RwrMatrix rwr_matrix(const TransitionMatrix& P, double alpha, Index T) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("alpha must be in [0, 1)");
    if (T < 0) throw ParameterError("step count must be >= 0");
    const Index n = P.dim();
    RwrMatrix out;
    out.alpha = alpha;
    out.steps = T;
    out.data = Eigen::MatrixXd::Identity(n, n);
    for (Index t = 0; t < T; ++t) {
        Eigen::MatrixXd next = threaded_product(out.data, P.data);
        out.data = alpha * Eigen::MatrixXd::Identity(n, n) + (1.0 - alpha) * next;
    }
    return out;
}

SimilarityMatrix node_similarity_matrix(const ExtendedHypergraph& ext, double alpha, Index T,
                                        Index dense_cap) {
    RwrMatrix walk = rwr_matrix(node_transition(ext, dense_cap), alpha, T);
    SimilarityMatrix sim;
    sim.data = ext.volume * (walk.data * ext.node_degrees.cwiseInverse().asDiagonal());
    sim.data = sim.data.unaryExpr([](double x) { return truncated_log(x); });
    return sim;
}

SimilarityMatrix edge_similarity_matrix_full(const ExtendedHypergraph& ext, double alpha, Index T,
                                             Index dense_cap) {
    RwrMatrix walk = rwr_matrix(edge_transition(ext, dense_cap), alpha, T);
    Eigen::VectorXd scale =
        (ext.edge_degrees.array() * ext.edge_weights.array()).inverse().matrix();
    SimilarityMatrix sim;
    sim.data = ext.volume * (walk.data * scale.asDiagonal());
    sim.data = sim.data.unaryExpr([](double x) { return truncated_log(x); });
    return sim;
}

SimilarityMatrix edge_similarity_matrix(const ExtendedHypergraph& ext, double alpha, Index T,
                                        Index dense_cap) {
    SimilarityMatrix full = edge_similarity_matrix_full(ext, alpha, T, dense_cap);
    SimilarityMatrix sim;
    sim.data = full.data.topLeftCorner(ext.m_original, ext.m_original);
    return sim;
}

EmbeddingMatrix factorize_similarity(const SimilarityMatrix& sim, Index k) {
    const Index n = sim.dim();
    if (k < 1 || k > n) throw ParameterError("embedding dimension k must be in [1, dim]");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sim.data);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("dense eigendecomposition failed");
    // solver returns ascending order; take the k algebraically largest
    EmbeddingMatrix emb;
    emb.eigenvalues.resize(k);
    emb.data.resize(n, k);
    for (Index j = 0; j < k; ++j) {
        const Index src = n - 1 - j;
        const double lambda = std::max(solver.eigenvalues()[src], 0.0);
        Eigen::VectorXd q = solver.eigenvectors().col(src);
        for (Index i = 0; i < n; ++i) {
            if (q[i] != 0.0) {
                if (q[i] < 0.0) q = -q;
                break;
            }
        }
        emb.eigenvalues[j] = lambda;
        emb.data.col(j) = q * std::sqrt(lambda);
    }
    return emb;
}

std::pair<EmbeddingMatrix, EmbeddingMatrix> base_embed(const AttributedHypergraph& hg,
                                                       const BaseParams& params) {
    ExtendedHypergraph ext = extend_hypergraph(hg, params.K, params.beta);
    check_cap(params.node_only ? ext.num_nodes() : ext.num_rows(), params.dense_cap, "base_embed");
    SimilarityMatrix node_sim =
        node_similarity_matrix(ext, params.alpha, params.T, params.dense_cap);
    EmbeddingMatrix node_emb = factorize_similarity(node_sim, params.k);
    EmbeddingMatrix edge_emb;
    if (!params.node_only) {
        SimilarityMatrix edge_sim =
            edge_similarity_matrix(ext, params.alpha, params.T, params.dense_cap);
        edge_emb = factorize_similarity(edge_sim, std::min(params.k, ext.m_original));
    }
    return {std::move(node_emb), std::move(edge_emb)};
}

}  // namespace hyperembed

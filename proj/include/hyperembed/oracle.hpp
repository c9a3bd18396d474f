#ifndef HYPEREMBED_ORACLE_HPP
#define HYPEREMBED_ORACLE_HPP

#include <utility>

#include "hyperembed/types.hpp"

namespace hyperembed {

inline constexpr Index kDefaultDenseCap = 20000;

/// Row-stochastic dense transition matrix.
struct TransitionMatrix {
    Eigen::MatrixXd data;

    Index dim() const { return data.rows(); }
};

struct RwrMatrix {
    Eigen::MatrixXd data;
    double alpha = 0.0;
    Index steps = 0;

    Index dim() const { return data.rows(); }
};

/// Node-to-node transition matrix Dv^-1 H^T W De^-1 H (n x n).
TransitionMatrix node_transition(const ExtendedHypergraph& ext, Index dense_cap = kDefaultDenseCap);

/// Hyperedge-to-hyperedge transition matrix De^-1 H Dv^-1 H^T W on the dual
/// structure (rows x rows).
TransitionMatrix edge_transition(const ExtendedHypergraph& ext, Index dense_cap = kDefaultDenseCap);

/// T-step restart walk: identity at T=0, then alpha*I + (1-alpha)*Pi*P.
RwrMatrix rwr_matrix(const TransitionMatrix& P, double alpha, Index T);

/// Node similarity matrix: truncated log of vol * Pi^(T) * Dv^-1.
SimilarityMatrix node_similarity_matrix(const ExtendedHypergraph& ext, double alpha, Index T,
                                        Index dense_cap = kDefaultDenseCap);

/// Full dual similarity matrix (rows x rows): truncated log of
/// vol * Pi'^(T) * De^-1 * W^-1.
SimilarityMatrix edge_similarity_matrix_full(const ExtendedHypergraph& ext, double alpha, Index T,
                                             Index dense_cap = kDefaultDenseCap);

/// Dual similarity restricted to the original hyperedges (m x m).
SimilarityMatrix edge_similarity_matrix(const ExtendedHypergraph& ext, double alpha, Index T,
                                        Index dense_cap = kDefaultDenseCap);

/// Factorizes a symmetric similarity matrix: takes the k algebraically
/// largest eigenvalues, clamps negatives to zero, returns Q * Lambda^(1/2)
/// with eigenvector signs canonicalized (first nonzero component positive).
EmbeddingMatrix factorize_similarity(const SimilarityMatrix& sim, Index k);

struct BaseParams {
    Index K = 10;
    double beta = 1.0;
    double alpha = 0.1;
    Index T = 10;
    Index k = 32;
    Index dense_cap = kDefaultDenseCap;
    bool node_only = false;  // skip the hyperedge path (used by harnesses)
};

/// Exact dense pipeline: extend, similarity matrices, eigendecomposition.
/// Returns (node embeddings, hyperedge embeddings); the hyperedge matrix is
/// empty when node_only is set.
std::pair<EmbeddingMatrix, EmbeddingMatrix> base_embed(const AttributedHypergraph& hg,
                                                       const BaseParams& params);

}  // namespace hyperembed

#endif

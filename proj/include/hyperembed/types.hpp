#ifndef HYPEREMBED_TYPES_HPP
#define HYPEREMBED_TYPES_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hyperembed/common.hpp"

namespace hyperembed {

/// Row-compressed weighted incidence matrix. Rows are hyperedges, columns are
/// nodes; entry (e, v) holds the hyperedge-dependent node weight gamma(v, e).
struct SparseIncidence {
    Index n_rows = 0;
    Index n_cols = 0;
    std::vector<Index> row_offsets;   // n_rows + 1, non-decreasing
    std::vector<Index> col_indices;   // sorted and unique within each row
    std::vector<double> values;       // strictly positive

    Index nnz() const { return static_cast<Index>(col_indices.size()); }
    Index row_size(Index r) const { return row_offsets[r + 1] - row_offsets[r]; }

    /// Throws ValidationError/DimensionError if any structural invariant fails.
    void validate() const;
};

/// The raw input: incidence over original hyperedges, dense node attributes,
/// optional per-node / per-hyperedge labels.
struct AttributedHypergraph {
    SparseIncidence incidence;          // m x n
    Eigen::MatrixXd attributes;         // n x q
    std::optional<std::vector<int>> node_labels;  // length n
    std::optional<std::vector<int>> edge_labels;  // length m

    Index num_nodes() const { return incidence.n_cols; }
    Index num_edges() const { return incidence.n_rows; }

    void validate() const;
};

/// Incidence of the attribute-extended hypergraph together with its diagonal
/// degree data. Rows [0, m_original) are the input hyperedges, the remaining
/// rows are attribute-based.
struct ExtendedHypergraph {
    SparseIncidence incidence;      // rows x n
    Eigen::VectorXd node_degrees;   // n, all positive
    Eigen::VectorXd edge_degrees;   // rows, all positive
    Eigen::VectorXd edge_weights;   // rows, all positive
    double volume = 0.0;
    Index m_original = 0;

    Index num_nodes() const { return incidence.n_cols; }
    Index num_rows() const { return incidence.n_rows; }
};

struct EmbeddingMatrix {
    Eigen::MatrixXd data;         // rows x k
    Eigen::VectorXd eigenvalues;  // k, sorted descending, clamped >= 0

    Index rows() const { return data.rows(); }
    Index dim() const { return data.cols(); }
};

struct SimilarityMatrix {
    Eigen::MatrixXd data;  // dim x dim, symmetric to 1e-10

    Index dim() const { return data.rows(); }
};

struct Degrees {
    Eigen::VectorXd node;  // Dv
    Eigen::VectorXd edge;  // De
    double volume = 0.0;
};

/// Generalized degrees: node[i] = sum_e w(e) gamma(v_i, e),
/// edge[j] = sum_{v in e_j} gamma(v, e_j), volume = sum_i node[i].
/// Throws DegenerateStructureError on any zero degree.
Degrees degrees_and_volume(const SparseIncidence& incidence, const Eigen::VectorXd& weights);

/// Assembles an ExtendedHypergraph from incidence + weights, computing the
/// degree data. Validates structure.
ExtendedHypergraph make_extended(SparseIncidence incidence, Eigen::VectorXd weights,
                                 Index m_original);

/// Builder used by parsers and generators: collects rows then freezes to CSR.
class IncidenceBuilder {
public:
    explicit IncidenceBuilder(Index n_cols) : n_cols_(n_cols) { offsets_.push_back(0); }

    /// Entries must have unique column indices; they are sorted here.
    void add_row(std::vector<std::pair<Index, double>> entries);

    SparseIncidence finish();

private:
    Index n_cols_;
    std::vector<Index> offsets_;
    std::vector<Index> cols_;
    std::vector<double> vals_;
};

}  // namespace hyperembed

#endif

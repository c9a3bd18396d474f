#ifndef HYPEREMBED_EXTEND_HPP
#define HYPEREMBED_EXTEND_HPP

#include "hyperembed/types.hpp"

namespace hyperembed {

/// Per-node top-K attribute neighbors, sorted by cosine descending (ties by
/// ascending node id). Every node has exactly list_len = min(K, n-1) entries;
/// non-positive cosines are kept here and filtered by the consumer.
struct KnnResult {
    Index n = 0;
    Index list_len = 0;
    std::vector<Index> neighbors;   // n * list_len, row-major
    std::vector<double> cosines;    // n * list_len

    Index neighbor(Index node, Index j) const { return neighbors[node * list_len + j]; }
    double cosine(Index node, Index j) const { return cosines[node * list_len + j]; }
};

/// Exact brute-force cosine KNN over attribute rows. Zero-norm rows have
/// cosine 0 against everything. Binary {0,1} matrices take a bit-packed
/// popcount path; results are identical to the dense path.
KnnResult cosine_knn(const Eigen::MatrixXd& attributes, Index K);

/// Builds the attribute-extended hypergraph: appends one attribute-based
/// hyperedge per node (its top-K neighbors plus itself, entries weighted by
/// cosine similarity, self weight 1; neighbors with cosine <= 0 skipped), and
/// assigns a uniform weight to attribute hyperedges so their volume is beta
/// times the original volume.
ExtendedHypergraph extend_hypergraph(const AttributedHypergraph& hg, Index K, double beta);

}  // namespace hyperembed

#endif

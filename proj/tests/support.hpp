// Shared helpers for unit and acceptance tests: instance generators and
// dense reference computations kept independent of the library's solvers.
#ifndef HYPEREMBED_TESTS_SUPPORT_HPP
#define HYPEREMBED_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "hyperembed/extend.hpp"
#include "hyperembed/types.hpp"

namespace hyperembed::testing {

/// Random attributed hypergraph with non-negative attributes (all pairwise
/// cosines positive, so extension never drops neighbors).
inline AttributedHypergraph random_hypergraph(Rng& rng, Index max_n, Index max_m, Index max_q) {
    const Index n = 4 + static_cast<Index>(rng.uniform_int(max_n - 3));
    const Index m = 2 + static_cast<Index>(rng.uniform_int(max_m - 1));
    const Index q = 2 + static_cast<Index>(rng.uniform_int(max_q - 1));
    IncidenceBuilder builder(n);
    for (Index e = 0; e < m; ++e) {
        Index size = 2 + static_cast<Index>(rng.uniform_int(std::min<Index>(4, n - 1)));
        std::set<Index> members;
        while (static_cast<Index>(members.size()) < size)
            members.insert(static_cast<Index>(rng.uniform_int(n)));
        std::vector<std::pair<Index, double>> entries;
        for (Index v : members) entries.emplace_back(v, 1.0);
        builder.add_row(std::move(entries));
    }
    AttributedHypergraph hg;
    hg.incidence = builder.finish();
    hg.attributes.resize(n, q);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < q; ++j) hg.attributes(i, j) = 0.05 + rng.uniform();
    hg.validate();
    return hg;
}

/// Random valid extended structure built directly (not via attribute KNN);
/// exercises ops on arbitrary positive incidence values and weights.
inline ExtendedHypergraph random_extended(Rng& rng, Index max_n, Index max_rows) {
    const Index n = 3 + static_cast<Index>(rng.uniform_int(max_n - 2));
    const Index rows = 2 + static_cast<Index>(rng.uniform_int(max_rows - 1));
    std::vector<std::set<Index>> members(rows);
    for (Index e = 0; e < rows; ++e) {
        Index size = 2 + static_cast<Index>(rng.uniform_int(std::min<Index>(4, n - 1)));
        while (static_cast<Index>(members[e].size()) < size)
            members[e].insert(static_cast<Index>(rng.uniform_int(n)));
    }
    // cover leftover nodes so no degree is zero
    std::set<Index> covered;
    for (const auto& row : members) covered.insert(row.begin(), row.end());
    for (Index v = 0; v < n; ++v)
        if (!covered.count(v)) members[rng.uniform_int(rows)].insert(v);

    IncidenceBuilder builder(n);
    for (Index e = 0; e < rows; ++e) {
        std::vector<std::pair<Index, double>> entries;
        for (Index v : members[e]) entries.emplace_back(v, 0.2 + rng.uniform());
        builder.add_row(std::move(entries));
    }
    Eigen::VectorXd weights(rows);
    for (Index e = 0; e < rows; ++e) weights[e] = 0.2 + rng.uniform();
    return make_extended(builder.finish(), std::move(weights), rows);
}

inline Eigen::MatrixXd dense_incidence(const ExtendedHypergraph& ext) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(ext.num_rows(), ext.num_nodes());
    const auto& inc = ext.incidence;
    for (Index r = 0; r < inc.n_rows; ++r)
        for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
            H(r, inc.col_indices[p]) = inc.values[p];
    return H;
}

inline Eigen::MatrixXd dense_normalized_incidence(const ExtendedHypergraph& ext) {
    Eigen::MatrixXd H = dense_incidence(ext);
    Eigen::VectorXd row_scale =
        (ext.edge_weights.array() / ext.edge_degrees.array()).sqrt().matrix();
    Eigen::VectorXd col_scale = ext.node_degrees.array().rsqrt().matrix();
    return row_scale.asDiagonal() * H * col_scale.asDiagonal();
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

/// Largest entrywise difference allowing per-column sign flips.
inline double column_sign_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (Index c = 0; c < a.cols(); ++c) {
        double same = (a.col(c) - b.col(c)).cwiseAbs().maxCoeff();
        double flipped = (a.col(c) + b.col(c)).cwiseAbs().maxCoeff();
        worst = std::max(worst, std::min(same, flipped));
    }
    return worst;
}

}  // namespace hyperembed::testing

#endif

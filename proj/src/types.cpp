#include "hyperembed/types.hpp"

#include <algorithm>
#include <utility>

namespace hyperembed {

void SparseIncidence::validate() const {
    if (static_cast<Index>(row_offsets.size()) != n_rows + 1)
        throw DimensionError("incidence: row_offsets length must be n_rows + 1");
    if (row_offsets.front() != 0 || row_offsets.back() != nnz())
        throw ValidationError("incidence: row_offsets must start at 0 and end at nnz");
    if (values.size() != col_indices.size())
        throw DimensionError("incidence: values/col_indices length mismatch");
    for (Index r = 0; r < n_rows; ++r) {
        if (row_offsets[r] > row_offsets[r + 1])
            throw ValidationError("incidence: row_offsets must be non-decreasing");
        for (Index p = row_offsets[r]; p < row_offsets[r + 1]; ++p) {
            if (col_indices[p] < 0 || col_indices[p] >= n_cols)
                throw ValidationError("incidence: column index out of range");
            if (p > row_offsets[r] && col_indices[p] <= col_indices[p - 1])
                throw ValidationError("incidence: row columns must be sorted and unique");
            if (!(values[p] > 0.0))
                throw ValidationError("incidence: values must be strictly positive");
        }
    }
}

void AttributedHypergraph::validate() const {
    incidence.validate();
    for (Index r = 0; r < incidence.n_rows; ++r)
        if (incidence.row_size(r) < 2)
            throw ValidationError("hyperedge " + std::to_string(r) + " has fewer than 2 nodes");
    if (attributes.rows() != incidence.n_cols)
        throw DimensionError("attribute row count " + std::to_string(attributes.rows()) +
                             " does not match node count " + std::to_string(incidence.n_cols));
    if (node_labels && static_cast<Index>(node_labels->size()) != incidence.n_cols)
        throw DimensionError("node label count does not match node count");
    if (edge_labels && static_cast<Index>(edge_labels->size()) != incidence.n_rows)
        throw DimensionError("edge label count does not match hyperedge count");
}

Degrees degrees_and_volume(const SparseIncidence& incidence, const Eigen::VectorXd& weights) {
    if (weights.size() != incidence.n_rows)
        throw DimensionError("weights length must equal the number of hyperedges");
    Degrees d;
    d.node = Eigen::VectorXd::Zero(incidence.n_cols);
    d.edge = Eigen::VectorXd::Zero(incidence.n_rows);
    for (Index r = 0; r < incidence.n_rows; ++r) {
        double edge_sum = 0.0;
        for (Index p = incidence.row_offsets[r]; p < incidence.row_offsets[r + 1]; ++p) {
            edge_sum += incidence.values[p];
            d.node[incidence.col_indices[p]] += weights[r] * incidence.values[p];
        }
        d.edge[r] = edge_sum;
        if (edge_sum == 0.0)
            throw DegenerateStructureError("hyperedge " + std::to_string(r) + " is empty");
    }
    for (Index i = 0; i < incidence.n_cols; ++i)
        if (d.node[i] <= 0.0)
            throw DegenerateStructureError("node " + std::to_string(i) +
                                           " is isolated (zero generalized degree)");
    d.volume = d.node.sum();
    return d;
}

ExtendedHypergraph make_extended(SparseIncidence incidence, Eigen::VectorXd weights,
                                 Index m_original) {
    incidence.validate();
    if (m_original < 0 || m_original > incidence.n_rows)
        throw ParameterError("m_original out of range");
    for (Index r = 0; r < incidence.n_rows; ++r)
        if (!(weights[r] > 0.0))
            throw ValidationError("hyperedge weights must be strictly positive");
    Degrees d = degrees_and_volume(incidence, weights);
    ExtendedHypergraph ext;
    ext.incidence = std::move(incidence);
    ext.edge_weights = std::move(weights);
    ext.node_degrees = std::move(d.node);
    ext.edge_degrees = std::move(d.edge);
    ext.volume = d.volume;
    ext.m_original = m_original;
    return ext;
}

void IncidenceBuilder::add_row(std::vector<std::pair<Index, double>> entries) {
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].first == entries[i - 1].first)
            throw ValidationError("duplicate node " + std::to_string(entries[i].first) +
                                  " within a hyperedge");
    for (const auto& [col, val] : entries) {
        if (col < 0 || col >= n_cols_)
            throw ValidationError("node index out of range: " + std::to_string(col));
        cols_.push_back(col);
        vals_.push_back(val);
    }
    offsets_.push_back(static_cast<Index>(cols_.size()));
}

SparseIncidence IncidenceBuilder::finish() {
    SparseIncidence inc;
    inc.n_rows = static_cast<Index>(offsets_.size()) - 1;
    inc.n_cols = n_cols_;
    inc.row_offsets = std::move(offsets_);
    inc.col_indices = std::move(cols_);
    inc.values = std::move(vals_);
    inc.validate();
    return inc;
}

}  // namespace hyperembed

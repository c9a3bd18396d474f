#include "hyperembed/extend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace hyperembed {

namespace {

constexpr Index kRowTile = 512;
constexpr Index kColTile = 4096;

struct TopK {
    // (cosine desc, id asc) order; fixed capacity. `floor` lets callers skip
    // candidates strictly below the current boundary without a call.
    Index cap;
    double floor = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, Index>> items;

    explicit TopK(Index k) : cap(k) { items.reserve(k + 1); }

    static bool better(const std::pair<double, Index>& a, const std::pair<double, Index>& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    }

    void offer(double cs, Index id) {
        std::pair<double, Index> cand{cs, id};
        if (static_cast<Index>(items.size()) == cap && !better(cand, items.back())) return;
        auto pos = std::lower_bound(items.begin(), items.end(), cand, better);
        items.insert(pos, cand);
        if (static_cast<Index>(items.size()) > cap) items.pop_back();
        if (static_cast<Index>(items.size()) == cap) floor = items.back().first;
    }
};

bool is_binary(const Eigen::MatrixXd& X) {
    for (Index j = 0; j < X.cols(); ++j)
        for (Index i = 0; i < X.rows(); ++i) {
            double v = X(i, j);
            if (v != 0.0 && v != 1.0) return false;
        }
    return true;
}

void knn_dense(const Eigen::MatrixXd& X, Index L, KnnResult& out) {
    const Index n = X.rows();
    Eigen::VectorXd inv_norm(n);
    for (Index i = 0; i < n; ++i) {
        double nrm = X.row(i).norm();
        inv_norm[i] = nrm > 0.0 ? 1.0 / nrm : 0.0;  // zero-norm rows: cosine 0 everywhere
    }
    parallel_for(0, (n + kRowTile - 1) / kRowTile, [&](Index tb, Index te) {
        Eigen::MatrixXd gram;
        for (Index t = tb; t < te; ++t) {
            const Index r0 = t * kRowTile, r1 = std::min(n, r0 + kRowTile);
            std::vector<TopK> heaps(r1 - r0, TopK(L));
            for (Index c0 = 0; c0 < n; c0 += kColTile) {
                const Index c1 = std::min(n, c0 + kColTile);
                gram.noalias() = X.middleRows(r0, r1 - r0) * X.middleRows(c0, c1 - c0).transpose();
                for (Index i = r0; i < r1; ++i) {
                    auto& heap = heaps[i - r0];
                    for (Index j = c0; j < c1; ++j) {
                        if (j == i) continue;
                        double cs = gram(i - r0, j - c0) * inv_norm[i] * inv_norm[j];
                        if (cs < heap.floor) continue;
                        heap.offer(cs, j);
                    }
                }
            }
            for (Index i = r0; i < r1; ++i)
                for (Index j = 0; j < L; ++j) {
                    out.neighbors[i * L + j] = heaps[i - r0].items[j].second;
                    out.cosines[i * L + j] = heaps[i - r0].items[j].first;
                }
        }
    });
}

// Exact fast path for {0,1} attributes: dot products are popcounts of packed
// rows, cosines computed from the same integers the dense path would produce.
void knn_binary(const Eigen::MatrixXd& X, Index L, KnnResult& out) {
    const Index n = X.rows(), q = X.cols();
    const Index words = (q + 63) / 64;
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(n) * words, 0);
    std::vector<std::int32_t> ones(n, 0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < q; ++j)
            if (X(i, j) != 0.0) {
                bits[i * words + j / 64] |= 1ULL << (j % 64);
                ++ones[i];
            }
    }
    Eigen::VectorXd inv_norm(n);
    for (Index i = 0; i < n; ++i)
        inv_norm[i] = ones[i] > 0 ? 1.0 / std::sqrt(static_cast<double>(ones[i])) : 0.0;

    parallel_for(0, n, [&](Index rb, Index re) {
        for (Index i = rb; i < re; ++i) {
            TopK heap(L);
            const std::uint64_t* wi = &bits[i * words];
            const double inv_i = inv_norm[i];
            if (words <= 2) {
                const std::uint64_t a0 = wi[0];
                const std::uint64_t a1 = words == 2 ? wi[1] : 0;
                const std::uint64_t* wj = bits.data();
                for (Index j = 0; j < n; ++j, wj += words) {
                    std::int64_t common = __builtin_popcountll(a0 & wj[0]);
                    if (words == 2) common += __builtin_popcountll(a1 & wj[1]);
                    double cs = static_cast<double>(common) * inv_i * inv_norm[j];
                    if (cs < heap.floor || j == i) continue;
                    heap.offer(cs, j);
                }
            } else {
                for (Index j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const std::uint64_t* wj = &bits[j * words];
                    std::int64_t common = 0;
                    for (Index w = 0; w < words; ++w)
                        common += __builtin_popcountll(wi[w] & wj[w]);
                    double cs = static_cast<double>(common) * inv_i * inv_norm[j];
                    if (cs < heap.floor) continue;
                    heap.offer(cs, j);
                }
            }
            for (Index j = 0; j < L; ++j) {
                out.neighbors[i * L + j] = heap.items[j].second;
                out.cosines[i * L + j] = heap.items[j].first;
            }
        }
    });
}

}  // namespace

KnnResult cosine_knn(const Eigen::MatrixXd& attributes, Index K) {
    const Index n = attributes.rows();
    if (K < 1) throw ParameterError("K must be >= 1");
    if (n < 2) throw ParameterError("need at least 2 nodes for attribute neighbors");
    KnnResult out;
    out.n = n;
    out.list_len = std::min(K, n - 1);
    out.neighbors.resize(n * out.list_len);
    out.cosines.resize(n * out.list_len);
    if (is_binary(attributes))
        knn_binary(attributes, out.list_len, out);
    else
        knn_dense(attributes, out.list_len, out);
    return out;
}

ExtendedHypergraph extend_hypergraph(const AttributedHypergraph& hg, Index K, double beta) {
    if (!(beta > 0.0)) throw ParameterError("beta must be positive");
    hg.validate();
    const Index m = hg.num_edges(), n = hg.num_nodes();
    KnnResult knn = cosine_knn(hg.attributes, K);

    // attribute rows first as (node, entries); assembled after the originals
    std::vector<std::vector<std::pair<Index, double>>> attr_rows(n);
    double attr_gamma_sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        auto& row = attr_rows[i];
        row.emplace_back(i, 1.0);
        for (Index j = 0; j < knn.list_len; ++j) {
            double cs = knn.cosine(i, j);
            if (cs > 0.0) row.emplace_back(knn.neighbor(i, j), cs);
        }
        if (row.size() < 2)
            throw DegenerateStructureError(
                "node " + std::to_string(i) +
                ": no attribute neighbor with positive cosine similarity");
        for (const auto& [col, val] : row) attr_gamma_sum += val;
    }

    double original_volume = 0.0;  // unit weights and gammas on input hyperedges
    for (double v : hg.incidence.values) original_volume += v;
    const double attr_weight = beta * original_volume / attr_gamma_sum;

    IncidenceBuilder builder(n);
    const auto& inc = hg.incidence;
    for (Index r = 0; r < m; ++r) {
        std::vector<std::pair<Index, double>> entries;
        entries.reserve(inc.row_size(r));
        for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
            entries.emplace_back(inc.col_indices[p], inc.values[p]);
        builder.add_row(std::move(entries));
    }
    for (Index i = 0; i < n; ++i) builder.add_row(std::move(attr_rows[i]));

    Eigen::VectorXd weights(m + n);
    weights.head(m).setOnes();
    weights.tail(n).setConstant(attr_weight);
    return make_extended(builder.finish(), std::move(weights), m);
}

}  // namespace hyperembed

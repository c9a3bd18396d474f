#include "hyperembed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <unordered_set>

namespace hyperembed {

namespace {

std::vector<Index> permutation(Index count, std::uint64_t seed, Index repeat) {
    std::vector<Index> perm(count);
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(mix(seed, static_cast<std::uint64_t>(repeat) + 0x9e37));
    for (Index i = count - 1; i > 0; --i) {
        Index j = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<int> label_values(const std::vector<int>& labels) {
    std::set<int> values(labels.begin(), labels.end());
    return {values.begin(), values.end()};
}

TaskReport classification_eval(const EmbeddingMatrix& embeddings, const std::vector<int>& labels,
                               const SplitSpec& split) {
    const Index count = embeddings.rows();
    if (static_cast<Index>(labels.size()) != count)
        throw DimensionError("label count does not match embedding rows");
    if (split.repeats < 1) throw ParameterError("repeats must be >= 1");
    TaskReport report;
    for (Index rep = 0; rep < split.repeats; ++rep) {
        auto [train, test] = split_indices(count, split.train_fraction, split.seed, rep);
        Eigen::MatrixXd x_train(train.size(), embeddings.dim());
        std::vector<int> y_train(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) {
            x_train.row(i) = embeddings.data.row(train[i]);
            y_train[i] = labels[train[i]];
        }
        auto model = LinearClassifier::train(x_train, y_train);
        Eigen::MatrixXd x_test(test.size(), embeddings.dim());
        std::vector<int> y_test(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            x_test.row(i) = embeddings.data.row(test[i]);
            y_test[i] = labels[test[i]];
        }
        auto predicted = model.predict(x_test);
        report["MiF1"].values.push_back(micro_f1(y_test, predicted));
        report["MaF1"].values.push_back(macro_f1(y_test, predicted));
    }
    return report;
}

using EdgeKey = std::vector<Index>;

struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& key) const {
        std::uint64_t h = 0x243f6a8885a308d3ULL;
        for (Index v : key) {
            std::uint64_t s = h ^ static_cast<std::uint64_t>(v);
            h = splitmix64(s);
        }
        return static_cast<std::size_t>(h);
    }
};

EdgeKey edge_key(const SparseIncidence& inc, Index row) {
    EdgeKey key;
    for (Index p = inc.row_offsets[row]; p < inc.row_offsets[row + 1]; ++p)
        key.push_back(inc.col_indices[p]);
    return key;  // already sorted in CSR rows
}

Eigen::VectorXd max_min_features(const EmbeddingMatrix& emb, const std::vector<Index>& members) {
    Eigen::VectorXd hi = emb.data.row(members[0]);
    Eigen::VectorXd lo = hi;
    for (std::size_t i = 1; i < members.size(); ++i) {
        hi = hi.cwiseMax(emb.data.row(members[i]).transpose());
        lo = lo.cwiseMin(emb.data.row(members[i]).transpose());
    }
    return hi - lo;
}

}  // namespace

double MetricSeries::mean() const {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double MetricSeries::stddev() const {
    if (values.size() < 2) return 0.0;
    double m = mean();
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

std::string report_to_json(const TaskReport& report) {
    nlohmann::json j;
    for (const auto& [name, series] : report) {
        j[name] = {{"mean", series.mean()}, {"stddev", series.stddev()},
                   {"values", series.values}};
    }
    return j.dump(2);
}

LinearClassifier LinearClassifier::train(const Eigen::MatrixXd& features,
                                         const std::vector<int>& labels, Index epochs,
                                         double learning_rate, double l2, std::uint64_t seed) {
    (void)seed;  // zero init; retained so callers can pin the interface
    const Index count = features.rows(), dim = features.cols();
    if (static_cast<Index>(labels.size()) != count)
        throw DimensionError("train: label count does not match feature rows");
    LinearClassifier model;
    model.classes_ = label_values(labels);
    const Index n_classes = static_cast<Index>(model.classes_.size());
    if (n_classes < 2) throw ValidationError("train: need at least two classes in training data");

    model.mu_ = features.colwise().mean();
    Eigen::VectorXd var = (features.rowwise() - model.mu_.transpose()).array().square().colwise()
                              .mean();
    model.scale_ = var.array().sqrt().max(1e-12).matrix();
    for (Index j = 0; j < dim; ++j)
        if (var[j] == 0.0) model.scale_[j] = 1.0;
    Eigen::MatrixXd X = (features.rowwise() - model.mu_.transpose()).array().rowwise() /
                        model.scale_.transpose().array();

    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(count, n_classes);
    std::map<int, Index> class_index;
    for (Index c = 0; c < n_classes; ++c) class_index[model.classes_[c]] = c;
    for (Index i = 0; i < count; ++i) targets(i, class_index[labels[i]]) = 1.0;

    model.weights_ = Eigen::MatrixXd::Zero(n_classes, dim);
    model.bias_ = Eigen::VectorXd::Zero(n_classes);
    const double inv_count = 1.0 / static_cast<double>(count);
    for (Index epoch = 0; epoch < epochs; ++epoch) {
        Eigen::MatrixXd z = X * model.weights_.transpose();
        z.rowwise() += model.bias_.transpose();
        Eigen::MatrixXd p = z.unaryExpr([](double v) { return sigmoid(v); });
        Eigen::MatrixXd diff = p - targets;
        Eigen::MatrixXd grad_w = diff.transpose() * X * inv_count + l2 * model.weights_;
        Eigen::VectorXd grad_b = diff.colwise().sum().transpose() * inv_count;
        model.weights_ -= learning_rate * grad_w;
        model.bias_ -= learning_rate * grad_b;
    }
    return model;
}

Eigen::MatrixXd LinearClassifier::scores(const Eigen::MatrixXd& features) const {
    Eigen::MatrixXd X = (features.rowwise() - mu_.transpose()).array().rowwise() /
                        scale_.transpose().array();
    Eigen::MatrixXd z = X * weights_.transpose();
    z.rowwise() += bias_.transpose();
    return z.unaryExpr([](double v) { return sigmoid(v); });
}

std::vector<int> LinearClassifier::predict(const Eigen::MatrixXd& features) const {
    Eigen::MatrixXd s = scores(features);
    std::vector<int> out(s.rows());
    for (Index i = 0; i < s.rows(); ++i) {
        Index best = 0;
        for (Index c = 1; c < s.cols(); ++c)
            if (s(i, c) > s(i, best)) best = c;
        out[i] = classes_[best];
    }
    return out;
}

double micro_f1(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size() || truth.empty())
        throw DimensionError("micro_f1: size mismatch or empty input");
    // single-label multiclass: aggregated TP/FP/FN make micro-F1 equal accuracy
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == predicted[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

double macro_f1(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size() || truth.empty())
        throw DimensionError("macro_f1: size mismatch or empty input");
    auto classes = label_values(truth);  // absent classes are excluded
    double total = 0.0;
    for (int cls : classes) {
        Index tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            bool t = truth[i] == cls, p = predicted[i] == cls;
            tp += t && p;
            fp += !t && p;
            fn += t && !p;
        }
        double denom = static_cast<double>(2 * tp + fp + fn);
        total += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    return total / static_cast<double>(classes.size());
}

double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DimensionError("auc: size mismatch or empty input");
    std::vector<Index> order(scores.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return scores[a] < scores[b]; });
    // average ranks over ties
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }
    double pos_ranks = 0.0;
    Index pos = 0, neg = 0;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] == 1) {
            pos_ranks += rank[t];
            ++pos;
        } else {
            ++neg;
        }
    }
    if (pos == 0 || neg == 0) throw ValidationError("auc: need both classes");
    return (pos_ranks - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1)) /
           (static_cast<double>(pos) * static_cast<double>(neg));
}

std::pair<std::vector<Index>, std::vector<Index>> split_indices(Index count, double train_fraction,
                                                                std::uint64_t seed, Index repeat) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ParameterError("train fraction must be in (0, 1)");
    auto perm = permutation(count, seed, repeat);
    Index n_train = static_cast<Index>(std::lround(train_fraction * static_cast<double>(count)));
    n_train = std::clamp<Index>(n_train, 1, count - 1);
    return {std::vector<Index>(perm.begin(), perm.begin() + n_train),
            std::vector<Index>(perm.begin() + n_train, perm.end())};
}

TaskReport node_classification_eval(const EmbeddingMatrix& embeddings,
                                    const std::vector<int>& labels, const SplitSpec& split) {
    return classification_eval(embeddings, labels, split);
}

TaskReport hyperedge_classification_eval(const EmbeddingMatrix& embeddings,
                                         const std::vector<int>& labels, const SplitSpec& split) {
    return classification_eval(embeddings, labels, split);
}

TaskReport link_prediction_eval(const AttributedHypergraph& hg, const NodeEmbedder& embedder,
                                const SplitSpec& split, std::uint64_t negative_seed) {
    const Index m = hg.num_edges(), n = hg.num_nodes();
    if (m < 2) throw ValidationError("link prediction needs at least 2 hyperedges");

    std::unordered_set<EdgeKey, EdgeKeyHash> real_edges;
    for (Index e = 0; e < m; ++e) real_edges.insert(edge_key(hg.incidence, e));

    TaskReport report;
    for (Index rep = 0; rep < split.repeats; ++rep) {
        auto [train_rows, test_rows] = split_indices(m, split.train_fraction, split.seed, rep);
        if (test_rows.empty()) throw ValidationError("link prediction: empty test split");

        // training hypergraph keeps all nodes and attributes
        IncidenceBuilder builder(n);
        for (Index row : train_rows) {
            std::vector<std::pair<Index, double>> entries;
            const auto& inc = hg.incidence;
            for (Index p = inc.row_offsets[row]; p < inc.row_offsets[row + 1]; ++p)
                entries.emplace_back(inc.col_indices[p], inc.values[p]);
            builder.add_row(std::move(entries));
        }
        AttributedHypergraph train_hg;
        train_hg.incidence = builder.finish();
        train_hg.attributes = hg.attributes;
        EmbeddingMatrix emb = embedder(train_hg);

        Rng neg_rng(mix(negative_seed, static_cast<std::uint64_t>(rep)));
        auto negative_members = [&](std::size_t size) {
            while (true) {
                std::set<Index> picked;
                while (picked.size() < size)
                    picked.insert(
                        static_cast<Index>(neg_rng.uniform_int(static_cast<std::uint64_t>(n))));
                EdgeKey key(picked.begin(), picked.end());
                if (!real_edges.count(key)) return key;
            }
        };

        auto build_set = [&](const std::vector<Index>& rows, Eigen::MatrixXd& X,
                             std::vector<int>& y) {
            X.resize(2 * static_cast<Index>(rows.size()), emb.dim());
            y.assign(2 * rows.size(), 0);
            Index at = 0;
            for (Index row : rows) {
                EdgeKey members = edge_key(hg.incidence, row);
                X.row(at) = max_min_features(emb, members);
                y[at++] = 1;
                EdgeKey neg = negative_members(members.size());
                X.row(at) = max_min_features(emb, neg);
                y[at++] = 0;
            }
        };

        Eigen::MatrixXd x_train, x_test;
        std::vector<int> y_train, y_test;
        build_set(train_rows, x_train, y_train);
        build_set(test_rows, x_test, y_test);

        auto model = LinearClassifier::train(x_train, y_train);
        Eigen::MatrixXd s = model.scores(x_test);
        Index pos_col = model.classes()[0] == 1 ? 0 : 1;
        std::vector<double> score(s.rows());
        std::vector<int> predicted(s.rows());
        for (Index i = 0; i < s.rows(); ++i) {
            score[i] = s(i, pos_col);
            predicted[i] = score[i] >= 0.5 ? 1 : 0;
        }
        report["Acc"].values.push_back(micro_f1(y_test, predicted));
        report["AUC"].values.push_back(auc_score(score, y_test));
    }
    return report;
}

double similarity_mae(const EmbeddingMatrix& embeddings, const SimilarityMatrix& similarity) {
    const Index dim = similarity.dim();
    if (embeddings.rows() != dim)
        throw DimensionError("similarity_mae: embedding rows do not match similarity dim");
    double sim_diag = similarity.data.diagonal().mean();
    double emb_diag = embeddings.data.rowwise().squaredNorm().mean();
    if (sim_diag == 0.0 || emb_diag == 0.0)
        throw ValidationError("similarity_mae: zero diagonal mean");
    double acc = 0.0;
    for (Index i = 0; i < dim; ++i) {
        Eigen::VectorXd dots = embeddings.data * embeddings.data.row(i).transpose();
        acc += (similarity.data.col(i) / sim_diag - dots / emb_diag).cwiseAbs().sum();
    }
    return acc / (static_cast<double>(dim) * static_cast<double>(dim));
}

AttributedHypergraph synth_uniform(Index n, Index arity, Index n_edges, Index q,
                                   std::uint64_t seed) {
    if (n < arity) throw ParameterError("synth_uniform: n must be >= arity");
    if (n_edges < 0) n_edges = n;
    Rng rng(seed);
    IncidenceBuilder builder(n);
    for (Index e = 0; e < n_edges; ++e) {
        std::set<Index> picked;
        while (static_cast<Index>(picked.size()) < arity)
            picked.insert(static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n))));
        std::vector<std::pair<Index, double>> entries;
        for (Index v : picked) entries.emplace_back(v, 1.0);
        builder.add_row(std::move(entries));
    }
    AttributedHypergraph hg;
    hg.incidence = builder.finish();
    hg.attributes.resize(n, q);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < q; ++j) hg.attributes(i, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;
    hg.validate();
    return hg;
}

AttributedHypergraph synth_planted(Index n, Index n_classes, Index edges_per_class,
                                   Index attr_dim, double noise, std::uint64_t seed) {
    if (n_classes < 1 || n < n_classes) throw ParameterError("synth_planted: bad class count");
    if (!(noise >= 0.0 && noise <= 1.0)) throw ParameterError("synth_planted: noise in [0,1]");
    Rng rng(seed);
    const Index base = n / n_classes;
    auto class_of = [&](Index v) { return std::min(v / base, n_classes - 1); };
    auto class_range = [&](Index c) -> std::pair<Index, Index> {
        Index lo = c * base;
        Index hi = c == n_classes - 1 ? n : (c + 1) * base;
        return {lo, hi};
    };

    std::vector<int> node_labels(n);
    for (Index v = 0; v < n; ++v) node_labels[v] = static_cast<int>(class_of(v));

    IncidenceBuilder builder(n);
    std::vector<int> edge_labels;
    for (Index c = 0; c < n_classes; ++c) {
        auto [lo, hi] = class_range(c);
        for (Index e = 0; e < edges_per_class; ++e) {
            Index size = 3 + static_cast<Index>(rng.uniform_int(3));  // 3..5
            std::set<Index> picked;
            while (static_cast<Index>(picked.size()) < size) {
                Index v;
                if (rng.uniform() < noise)
                    v = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
                else
                    v = lo + static_cast<Index>(
                                 rng.uniform_int(static_cast<std::uint64_t>(hi - lo)));
                picked.insert(v);
            }
            std::vector<std::pair<Index, double>> entries;
            std::map<int, int> votes;
            for (Index v : picked) {
                entries.emplace_back(v, 1.0);
                ++votes[node_labels[v]];
            }
            builder.add_row(std::move(entries));
            int best_label = votes.begin()->first;
            for (const auto& [label, count] : votes)
                if (count > votes[best_label]) best_label = label;
            edge_labels.push_back(best_label);
        }
    }

    Eigen::MatrixXd templates(n_classes, attr_dim);
    for (Index c = 0; c < n_classes; ++c)
        for (Index j = 0; j < attr_dim; ++j) templates(c, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;

    AttributedHypergraph hg;
    hg.incidence = builder.finish();
    hg.attributes.resize(n, attr_dim);
    for (Index v = 0; v < n; ++v)
        for (Index j = 0; j < attr_dim; ++j) {
            double bit = templates(class_of(v), j);
            if (rng.uniform() < noise) bit = 1.0 - bit;
            hg.attributes(v, j) = bit;
        }
    hg.node_labels = node_labels;
    hg.edge_labels = edge_labels;
    hg.validate();
    return hg;
}

}  // namespace hyperembed

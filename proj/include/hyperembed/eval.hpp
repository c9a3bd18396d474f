#ifndef HYPEREMBED_EVAL_HPP
#define HYPEREMBED_EVAL_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hyperembed/types.hpp"

namespace hyperembed {

struct SplitSpec {
    double train_fraction = 0.2;
    Index repeats = 10;
    std::uint64_t seed = 42;
};

struct MetricSeries {
    std::vector<double> values;

    double mean() const;
    double stddev() const;
};

/// metric name -> per-repeat values
using TaskReport = std::map<std::string, MetricSeries>;

std::string report_to_json(const TaskReport& report);

/// One-vs-rest logistic regression trained by full-batch gradient descent on
/// standardized features (500 epochs, lr 0.1, L2 1e-4).
class LinearClassifier {
public:
    /// labels may be arbitrary ints; at least two distinct values required.
    static LinearClassifier train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                  Index epochs = 500, double learning_rate = 0.1,
                                  double l2 = 1e-4, std::uint64_t seed = 0);

    std::vector<int> predict(const Eigen::MatrixXd& features) const;
    /// Per-class sigmoid scores, columns ordered like classes().
    Eigen::MatrixXd scores(const Eigen::MatrixXd& features) const;
    const std::vector<int>& classes() const { return classes_; }

private:
    Eigen::MatrixXd weights_;  // classes x dim
    Eigen::VectorXd bias_;     // classes
    Eigen::VectorXd mu_, scale_;
    std::vector<int> classes_;
};

/// Micro-F1 (= accuracy for single-label data) and Macro-F1; macro averages
/// over classes present in the reference labels.
double micro_f1(const std::vector<int>& truth, const std::vector<int>& predicted);
double macro_f1(const std::vector<int>& truth, const std::vector<int>& predicted);
/// Probability a positive outranks a negative; ties count half.
double auc_score(const std::vector<double>& scores, const std::vector<int>& labels);

/// Deterministic index split: permutation is a function of (seed, repeat).
std::pair<std::vector<Index>, std::vector<Index>> split_indices(Index count, double train_fraction,
                                                                std::uint64_t seed, Index repeat);

TaskReport node_classification_eval(const EmbeddingMatrix& embeddings,
                                    const std::vector<int>& labels, const SplitSpec& split);

TaskReport hyperedge_classification_eval(const EmbeddingMatrix& embeddings,
                                         const std::vector<int>& labels, const SplitSpec& split);

/// Re-embeds per repeat from the training hyperedges only (the embedder gets
/// a hypergraph whose incidence holds just those rows), aggregates member
/// node embeddings by elementwise max minus min, and scores real hyperedges
/// against size-matched random negatives (resampled on collision with any
/// real hyperedge).
using NodeEmbedder = std::function<EmbeddingMatrix(const AttributedHypergraph&)>;
TaskReport link_prediction_eval(const AttributedHypergraph& hg, const NodeEmbedder& embedder,
                                const SplitSpec& split, std::uint64_t negative_seed);

/// Mean absolute difference between S and Z Z^T after normalizing each by its
/// own diagonal mean.
double similarity_mae(const EmbeddingMatrix& embeddings, const SimilarityMatrix& similarity);

/// Uniform random hypergraph: n_edges hyperedges of `arity` distinct nodes,
/// fair-coin binary attributes.
AttributedHypergraph synth_uniform(Index n, Index arity = 3, Index n_edges = -1, Index q = 100,
                                   std::uint64_t seed = 42);

/// Planted-partition hypergraph with class labels: hyperedges of size 3-5
/// sample members within one class (crossing with probability `noise`);
/// attributes are per-class binary templates with per-bit flip probability
/// `noise`. Hyperedge labels are the most frequent member label.
AttributedHypergraph synth_planted(Index n, Index n_classes, Index edges_per_class,
                                   Index attr_dim, double noise, std::uint64_t seed);

}  // namespace hyperembed

#endif

#ifndef HYPEREMBED_PTS_HPP
#define HYPEREMBED_PTS_HPP

#include <functional>
#include <vector>

#include "hyperembed/types.hpp"

namespace hyperembed {

struct PtsOptions {
    Index tau = 3;   // polynomial degree
    Index b = 128;   // sketch dimension, power of two
    Index c = 10;    // off-diagonal regression samples
    std::uint64_t seed = 42;
    bool identity_sketch = false;  // debug: hash i -> i, sign +1 (needs b >= cols)
};

/// Low-rank surrogate for tlog applied entrywise to a Gram matrix:
/// Gamma = Y * diag(theta) * Y^T. Column block 0 of Y is all-ones (constant
/// term); block j holds the degree-j tensor sketch scaled by coefficient j.
struct PtsFactor {
    Eigen::MatrixXd Y;             // rows x (tau*b + 1)
    Eigen::VectorXd theta;         // tau*b + 1
    Eigen::VectorXd coefficients;  // tau + 1
    Index tau = 0;
    Index b = 0;
    std::uint64_t seed = 0;
    bool degenerate_fit = false;

    Index rows() const { return Y.rows(); }
};

/// Degree-1..tau tensor sketch blocks of the rows of F (each rows x b).
/// Block j estimates degree-j Gram powers: the expected inner product of two
/// sketched rows is <x,y>^j. Degree 1 is a plain count sketch; higher degrees
/// combine independent count sketches by elementwise product in the Fourier
/// domain (circular convolution).
std::vector<Eigen::MatrixXd> tensor_sketch(const Eigen::MatrixXd& F, Index tau, Index b,
                                           std::uint64_t seed, bool identity_sketch = false);

struct FitResult {
    Eigen::VectorXd coefficients;  // tau + 1, ascending powers
    bool degenerate = false;       // interpolation fallback was used
};

/// Least-squares fit of sum_j c_j x^j to target(x) over sampled Gram entries
/// of F (the full diagonal plus c uniform off-diagonal pairs). A degenerate
/// design falls back to interpolation at tau+1 spread points of the sampled
/// range.
FitResult fit_coefficients(const Eigen::MatrixXd& F, const std::function<double(double)>& target,
                           Index tau, Index c, std::uint64_t seed);

PtsFactor build_pts(const Eigen::MatrixXd& F, const PtsOptions& opts);

/// y = Y (theta . (Y^T v)); linear in rows.
Eigen::VectorXd pts_apply(const PtsFactor& factor, const Eigen::VectorXd& v);

/// Debug materialization of Gamma; refuses above the cap.
Eigen::MatrixXd pts_materialize(const PtsFactor& factor, Index dense_cap = 20000);

}  // namespace hyperembed

#endif

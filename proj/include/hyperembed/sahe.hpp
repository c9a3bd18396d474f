#ifndef HYPEREMBED_SAHE_HPP
#define HYPEREMBED_SAHE_HPP

#include <map>
#include <string>
#include <utility>

#include "hyperembed/linalg.hpp"
#include "hyperembed/pts.hpp"
#include "hyperembed/types.hpp"

namespace hyperembed {

/// Matrix-free normalized incidence W^(1/2) De^(-1/2) H Dv^(-1/2); all
/// singular values lie in [0, 1], the top one is 1.
LinearOperator normalize_incidence(const ExtendedHypergraph& ext);

/// Per-singular-value weight of the T-step restart walk:
/// sum_{i<T} alpha (1-alpha)^i s^(2i) + (1-alpha)^T s^(2T), computed by the
/// recurrence w <- alpha + (1-alpha) s^2 w. Maps s = 1 to exactly 1.
Eigen::VectorXd rwr_sigma_weights(const Eigen::VectorXd& singular_values, double alpha, Index T);

/// Shared spectral state of both embedding paths.
struct SpectralCore {
    SvdTriple svd;
    Eigen::VectorXd sigma_weights;  // rwr_sigma_weights of svd.S
    double volume = 0.0;
    Index effective_r = 0;          // may be below the requested r
    double alpha = 0.0;
    Index steps = 0;
};

SpectralCore build_spectral_core(const ExtendedHypergraph& ext, Index r, double alpha, Index T,
                                 const SvdOptions& svd_opts = {});

/// Rank-r factorization of the similarity arguments, split as
/// diag + factor*factor^T. The diagonal carries the restart mass (the alpha*I
/// term of the walk sum), which a reduced singular basis cannot represent;
/// with the split the reconstruction is exact at full rank on both paths.
struct Factors {
    Eigen::MatrixXd node_factor;  // n x r
    Eigen::VectorXd node_diag;    // alpha * vol / Dv
    Eigen::MatrixXd edge_factor;  // (m+n) x r
    Eigen::VectorXd edge_diag;    // alpha * vol / (De W)
};

Factors factors(const SpectralCore& core, const ExtendedHypergraph& ext);

struct EmbedDiagnostics {
    Eigen::VectorXd pts_coefficients;
    bool degenerate_fit = false;
    double max_lanczos_residual = 0.0;
    Index lanczos_iterations = 0;
    Index clamped_eigenvalues = 0;
};

/// Embeds one factor: PTS surrogate of tlog(diag + F F^T) (exact dense
/// materialization when exact_mode), Lanczos for the k leading eigenpairs,
/// negative eigenvalues clamped to zero, returns Q Lambda^(1/2).
EmbeddingMatrix embed_factor(const Eigen::MatrixXd& factor, const Eigen::VectorXd& diagonal,
                             Index k, const PtsOptions& pts_opts, const EigOptions& eig_opts,
                             bool exact_mode = false, Index dense_cap = 20000,
                             EmbedDiagnostics* diag = nullptr);

struct SaheParams {
    Index K = 10;
    double beta = 1.0;
    double alpha = 0.1;
    Index T = 10;
    Index r = 32;
    Index k = 32;
    Index tau = 3;
    Index b = 128;
    Index c = 10;
    std::uint64_t seed = 42;
    bool exact_mode = false;
    Index dense_cap = 20000;
    double svd_tol = 1e-10;
    Index svd_max_iters = 0;
    double lanczos_tol = 1e-9;
    Index lanczos_max_iters = 0;
};

/// Run record emitted next to the embeddings.
struct RunManifest {
    SaheParams params;
    Index effective_r = 0;
    EmbedDiagnostics node;
    EmbedDiagnostics edge;
    std::map<std::string, double> stage_seconds;
    long long peak_rss_bytes = 0;
    int threads = 1;

    std::string to_json() const;
};

/// Full pipeline: extend, shared truncated SVD, factor split, PTS + Lanczos
/// per path. Stage failures are rethrown with a stage label.
std::pair<EmbeddingMatrix, EmbeddingMatrix> sahe_embed(const AttributedHypergraph& hg,
                                                       const SaheParams& params,
                                                       RunManifest* manifest = nullptr);

/// Peak resident set size of this process, in bytes (0 when unavailable).
long long peak_rss_bytes();

}  // namespace hyperembed

#endif

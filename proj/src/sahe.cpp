#include "hyperembed/sahe.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hyperembed/extend.hpp"

namespace hyperembed {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// CSR of H plus a CSC mirror so both apply directions parallelize by rows.
struct NormalizedIncidence {
    Index rows, cols;
    std::vector<Index> row_offsets, row_cols;
    std::vector<double> row_vals;
    std::vector<Index> col_offsets, col_rows;
    std::vector<double> col_vals;
};

std::shared_ptr<NormalizedIncidence> build_normalized(const ExtendedHypergraph& ext) {
    auto data = std::make_shared<NormalizedIncidence>();
    const auto& inc = ext.incidence;
    data->rows = inc.n_rows;
    data->cols = inc.n_cols;
    Eigen::VectorXd row_scale =
        (ext.edge_weights.array() / ext.edge_degrees.array()).sqrt().matrix();
    Eigen::VectorXd col_scale = ext.node_degrees.array().rsqrt().matrix();

    data->row_offsets = inc.row_offsets;
    data->row_cols = inc.col_indices;
    data->row_vals.resize(inc.nnz());
    for (Index r = 0; r < inc.n_rows; ++r)
        for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
            data->row_vals[p] = row_scale[r] * inc.values[p] * col_scale[inc.col_indices[p]];

    data->col_offsets.assign(inc.n_cols + 1, 0);
    for (Index c : inc.col_indices) ++data->col_offsets[c + 1];
    for (Index c = 0; c < inc.n_cols; ++c) data->col_offsets[c + 1] += data->col_offsets[c];
    data->col_rows.resize(inc.nnz());
    data->col_vals.resize(inc.nnz());
    std::vector<Index> cursor(data->col_offsets.begin(), data->col_offsets.end() - 1);
    for (Index r = 0; r < inc.n_rows; ++r)
        for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p) {
            Index c = inc.col_indices[p];
            data->col_rows[cursor[c]] = r;
            data->col_vals[cursor[c]] = data->row_vals[p];
            ++cursor[c];
        }
    return data;
}

template <typename Fn>
void staged(const char* stage, std::map<std::string, double>* times, Fn&& fn) {
    auto start = Clock::now();
    try {
        fn();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string(stage) + ": " + e.what());
    }
    if (times) (*times)[stage] = seconds_since(start);
}

}  // namespace

LinearOperator normalize_incidence(const ExtendedHypergraph& ext) {
    auto data = build_normalized(ext);
    LinearOperator op;
    op.rows = data->rows;
    op.cols = data->cols;
    op.apply = [data](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        if (x.size() != data->cols) throw DimensionError("normalized incidence: bad apply length");
        y.resize(data->rows);
        parallel_for(0, data->rows, [&](Index lo, Index hi) {
            for (Index r = lo; r < hi; ++r) {
                double acc = 0.0;
                for (Index p = data->row_offsets[r]; p < data->row_offsets[r + 1]; ++p)
                    acc += data->row_vals[p] * x[data->row_cols[p]];
                y[r] = acc;
            }
        });
    };
    op.apply_adjoint = [data](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        if (x.size() != data->rows)
            throw DimensionError("normalized incidence: bad adjoint length");
        y.resize(data->cols);
        parallel_for(0, data->cols, [&](Index lo, Index hi) {
            for (Index c = lo; c < hi; ++c) {
                double acc = 0.0;
                for (Index p = data->col_offsets[c]; p < data->col_offsets[c + 1]; ++p)
                    acc += data->col_vals[p] * x[data->col_rows[p]];
                y[c] = acc;
            }
        });
    };
    return op;
}

Eigen::VectorXd rwr_sigma_weights(const Eigen::VectorXd& singular_values, double alpha, Index T) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ParameterError("alpha must be in [0, 1)");
    if (T < 0) throw ParameterError("step count must be >= 0");
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(singular_values.size());
    Eigen::ArrayXd s2 = singular_values.array().square();
    for (Index t = 0; t < T; ++t)
        weights = (alpha + (1.0 - alpha) * s2 * weights.array()).matrix();
    return weights;
}

SpectralCore build_spectral_core(const ExtendedHypergraph& ext, Index r, double alpha, Index T,
                                 const SvdOptions& svd_opts) {
    SpectralCore core;
    LinearOperator op = normalize_incidence(ext);
    core.svd = truncated_svd(op, std::min(r, std::min(op.rows, op.cols)), svd_opts);
    core.effective_r = core.svd.rank();
    core.sigma_weights = rwr_sigma_weights(core.svd.S, alpha, T);
    core.volume = ext.volume;
    core.alpha = alpha;
    core.steps = T;
    return core;
}

Factors factors(const SpectralCore& core, const ExtendedHypergraph& ext) {
    const double vol = core.volume;
    const double alpha = core.alpha;
    const Index r = core.effective_r;
    // Restart-free weights; at sigma = 0 they vanish, so dropped null-space
    // triples cost nothing.
    Eigen::VectorXd w = (core.sigma_weights.array() - alpha).cwiseMax(0.0).sqrt().matrix();

    Factors f;
    Eigen::VectorXd node_scale = (std::sqrt(vol) * ext.node_degrees.array().rsqrt()).matrix();
    f.node_factor = node_scale.asDiagonal() * core.svd.V.leftCols(r) * w.asDiagonal();
    f.node_diag = (alpha * vol / ext.node_degrees.array()).matrix();

    Eigen::VectorXd edge_scale =
        (std::sqrt(vol) * (ext.edge_degrees.array() * ext.edge_weights.array()).rsqrt()).matrix();
    f.edge_factor = edge_scale.asDiagonal() * core.svd.U.leftCols(r) * w.asDiagonal();
    f.edge_diag =
        (alpha * vol / (ext.edge_degrees.array() * ext.edge_weights.array())).matrix();
    return f;
}

EmbeddingMatrix embed_factor(const Eigen::MatrixXd& factor, const Eigen::VectorXd& diagonal,
                             Index k, const PtsOptions& pts_opts, const EigOptions& eig_opts,
                             bool exact_mode, Index dense_cap, EmbedDiagnostics* diag) {
    const Index rows = factor.rows();
    if (k < 1 || k > rows) throw ParameterError("embed_factor: k must be in [1, rows]");
    if (diagonal.size() != rows)
        throw DimensionError("embed_factor: diagonal length does not match factor rows");

    EigResult eig;
    if (exact_mode) {
        if (rows > dense_cap)
            throw ParameterError("embed_factor: exact mode exceeds the dense cap");
        Eigen::MatrixXd M(rows, rows);
        parallel_for(0, rows, [&](Index lo, Index hi) {
            M.middleRows(lo, hi - lo).noalias() = factor.middleRows(lo, hi - lo) *
                                                  factor.transpose();
        });
        M.diagonal() += diagonal;
        M = M.unaryExpr([](double x) { return truncated_log(x); });
        eig = lanczos_eigs(dense_operator(M), k, eig_opts);
        if (diag) {
            diag->pts_coefficients.resize(0);
            diag->degenerate_fit = false;
        }
    } else {
        PtsFactor pf = build_pts(factor, pts_opts);
        // diag only shifts diagonal entries of the tlog argument
        Eigen::VectorXd delta(rows);
        for (Index i = 0; i < rows; ++i) {
            double g = factor.row(i).squaredNorm();
            delta[i] = truncated_log(diagonal[i] + g) - truncated_log(g);
        }
        LinearOperator op;
        op.rows = op.cols = rows;
        op.apply = [&pf, &delta](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            y = pts_apply(pf, x);
            y.array() += delta.array() * x.array();
        };
        op.apply_adjoint = op.apply;
        eig = lanczos_eigs(op, k, eig_opts);
        if (diag) {
            diag->pts_coefficients = pf.coefficients;
            diag->degenerate_fit = pf.degenerate_fit;
        }
    }

    EmbeddingMatrix emb;
    emb.eigenvalues.resize(k);
    emb.data.resize(rows, k);
    Index clamped = 0;
    for (Index j = 0; j < k; ++j) {
        double lambda = eig.values[j];
        if (lambda < 0.0) {
            lambda = 0.0;
            ++clamped;
        }
        emb.eigenvalues[j] = lambda;
        emb.data.col(j) = eig.vectors.col(j) * std::sqrt(lambda);
    }
    if (diag) {
        diag->max_lanczos_residual = eig.residuals.size() ? eig.residuals.maxCoeff() : 0.0;
        diag->lanczos_iterations = eig.iterations;
        diag->clamped_eigenvalues = clamped;
    }
    return emb;
}

std::pair<EmbeddingMatrix, EmbeddingMatrix> sahe_embed(const AttributedHypergraph& hg,
                                                       const SaheParams& params,
                                                       RunManifest* manifest) {
    if (!(params.alpha >= 0.0 && params.alpha < 1.0))
        throw ParameterError("alpha must be in [0, 1)");
    if (!(params.beta > 0.0)) throw ParameterError("beta must be positive");
    if (params.K < 1) throw ParameterError("K must be >= 1");
    if (params.T < 1) throw ParameterError("T must be >= 1");
    if (params.k < 1) throw ParameterError("k must be >= 1");
    if (params.r < 1) throw ParameterError("r must be >= 1");

    std::map<std::string, double>* times = manifest ? &manifest->stage_seconds : nullptr;
    if (manifest) {
        manifest->params = params;
        manifest->threads = num_threads();
    }

    ExtendedHypergraph ext;
    staged("extend", times, [&] { ext = extend_hypergraph(hg, params.K, params.beta); });

    SvdOptions svd_opts;
    svd_opts.tol = params.svd_tol;
    // single-shot Krylov budget; residuals land in the manifest
    svd_opts.max_iters = params.svd_max_iters > 0 ? params.svd_max_iters : 4 * params.r;
    svd_opts.seed = mix(params.seed, 3);
    // the iteration budget, not the tolerance, bounds the work; achieved
    // residuals land in the manifest (verification mode stays strict)
    svd_opts.best_effort = !params.exact_mode;
    SpectralCore core;
    staged("svd", times, [&] {
        core = build_spectral_core(ext, params.r, params.alpha, params.T, svd_opts);
    });
    if (manifest) manifest->effective_r = core.effective_r;

    Factors f;
    staged("factors", times, [&] { f = factors(core, ext); });

    const Index n = ext.num_nodes();
    const Index m = ext.m_original;
    EigOptions eig_opts;
    eig_opts.tol = params.lanczos_tol;
    eig_opts.max_iters =
        params.lanczos_max_iters > 0 ? params.lanczos_max_iters : 4 * params.k;
    eig_opts.seed = mix(params.seed, 3);
    eig_opts.best_effort = !params.exact_mode;

    EmbeddingMatrix node_emb;
    staged("node_embed", times, [&] {
        PtsOptions pts_opts{params.tau, params.b, params.c, mix(params.seed, 1), false};
        node_emb = embed_factor(f.node_factor, f.node_diag, std::min(params.k, n), pts_opts,
                                eig_opts, params.exact_mode, params.dense_cap,
                                manifest ? &manifest->node : nullptr);
    });

    EmbeddingMatrix edge_emb;
    staged("edge_embed", times, [&] {
        PtsOptions pts_opts{params.tau, params.b, params.c, mix(params.seed, 2), false};
        edge_emb = embed_factor(f.edge_factor.topRows(m), f.edge_diag.head(m),
                                std::min(params.k, m), pts_opts, eig_opts, params.exact_mode,
                                params.dense_cap, manifest ? &manifest->edge : nullptr);
    });

    if (manifest) manifest->peak_rss_bytes = peak_rss_bytes();
    return {std::move(node_emb), std::move(edge_emb)};
}

long long peak_rss_bytes() {
    struct rusage usage;
    if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
    return usage.ru_maxrss * 1024LL;  // ru_maxrss is in kilobytes on Linux
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["parameters"] = {{"K", params.K},         {"beta", params.beta},
                       {"alpha", params.alpha}, {"T", params.T},
                       {"r", params.r},         {"k", params.k},
                       {"tau", params.tau},     {"b", params.b},
                       {"c", params.c},         {"seed", params.seed},
                       {"exact_mode", params.exact_mode}, {"dense_cap", params.dense_cap}};
    j["effective_r"] = effective_r;
    j["threads"] = threads;
    j["peak_rss_bytes"] = peak_rss_bytes;
    j["stage_seconds"] = stage_seconds;
    auto path = [](const EmbedDiagnostics& d) {
        nlohmann::json p;
        p["pts_coefficients"] = std::vector<double>(
            d.pts_coefficients.data(), d.pts_coefficients.data() + d.pts_coefficients.size());
        p["degenerate_fit"] = d.degenerate_fit;
        p["max_lanczos_residual"] = d.max_lanczos_residual;
        p["lanczos_iterations"] = d.lanczos_iterations;
        p["clamped_eigenvalues"] = d.clamped_eigenvalues;
        return p;
    };
    j["node_path"] = path(node);
    j["edge_path"] = path(edge);
    return j.dump(2);
}

}  // namespace hyperembed

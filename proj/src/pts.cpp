#include "hyperembed/pts.hpp"

#include <fftw3.h>

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace hyperembed {

namespace {

bool power_of_two(Index b) { return b >= 1 && (b & (b - 1)) == 0; }

struct SketchHash {
    std::vector<Index> bucket;  // column index per input coordinate
    std::vector<double> sign;   // +-1 per input coordinate
};

SketchHash make_hash(Index r, Index b, std::uint64_t seed, bool identity) {
    SketchHash h;
    h.bucket.resize(r);
    h.sign.resize(r);
    if (identity) {
        for (Index i = 0; i < r; ++i) {
            h.bucket[i] = i;
            h.sign[i] = 1.0;
        }
        return h;
    }
    for (Index i = 0; i < r; ++i) {
        std::uint64_t u = mix(seed, static_cast<std::uint64_t>(i));
        h.bucket[i] = static_cast<Index>(u & static_cast<std::uint64_t>(b - 1));
        h.sign[i] = (u >> 63) ? -1.0 : 1.0;
    }
    return h;
}

// FFTW plan creation is not thread-safe; executions on private buffers are.
std::mutex g_fftw_mutex;

struct FftPlans {
    Index b;
    fftw_plan forward;
    fftw_plan inverse;
    double* real_buf;
    fftw_complex* cplx_buf;

    explicit FftPlans(Index size) : b(size) {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        real_buf = fftw_alloc_real(b);
        cplx_buf = fftw_alloc_complex(b / 2 + 1);
        forward = fftw_plan_dft_r2c_1d(static_cast<int>(b), real_buf, cplx_buf, FFTW_ESTIMATE);
        inverse = fftw_plan_dft_c2r_1d(static_cast<int>(b), cplx_buf, real_buf, FFTW_ESTIMATE);
    }
    ~FftPlans() {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(forward);
        fftw_destroy_plan(inverse);
        fftw_free(real_buf);
        fftw_free(cplx_buf);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
};

}  // namespace

std::vector<Eigen::MatrixXd> tensor_sketch(const Eigen::MatrixXd& F, Index tau, Index b,
                                           std::uint64_t seed, bool identity_sketch) {
    if (tau < 1) throw ParameterError("tensor_sketch: tau must be >= 1");
    if (!power_of_two(b)) throw ParameterError("tensor_sketch: b must be a power of two");
    const Index n = F.rows(), r = F.cols();
    if (identity_sketch && b < r)
        throw ParameterError("tensor_sketch: identity sketch needs b >= cols");

    std::vector<SketchHash> hashes;
    hashes.reserve(tau);
    for (Index t = 0; t < tau; ++t)
        hashes.push_back(make_hash(r, b, mix(seed, static_cast<std::uint64_t>(t + 1)),
                                   identity_sketch));

    std::vector<Eigen::MatrixXd> blocks(tau, Eigen::MatrixXd::Zero(n, b));
    const Index fb = b / 2 + 1;

    parallel_for(0, n, [&](Index lo, Index hi) {
        FftPlans plans(b);
        std::vector<std::complex<double>> prod(fb), freq(fb);
        Eigen::VectorXd cs(b);
        for (Index i = lo; i < hi; ++i) {
            for (Index t = 0; t < tau; ++t) {
                cs.setZero();
                const auto& h = hashes[t];
                for (Index c = 0; c < r; ++c) cs[h.bucket[c]] += h.sign[c] * F(i, c);
                if (t == 0) {
                    blocks[0].row(i) = cs;  // degree 1: plain count sketch
                    if (tau == 1) continue;
                }
                std::copy(cs.data(), cs.data() + b, plans.real_buf);
                fftw_execute_dft_r2c(plans.forward, plans.real_buf, plans.cplx_buf);
                for (Index f = 0; f < fb; ++f)
                    freq[f] = {plans.cplx_buf[f][0], plans.cplx_buf[f][1]};
                if (t == 0) {
                    std::copy(freq.begin(), freq.end(), prod.begin());
                    continue;
                }
                for (Index f = 0; f < fb; ++f) prod[f] *= freq[f];
                for (Index f = 0; f < fb; ++f) {
                    plans.cplx_buf[f][0] = prod[f].real();
                    plans.cplx_buf[f][1] = prod[f].imag();
                }
                fftw_execute_dft_c2r(plans.inverse, plans.cplx_buf, plans.real_buf);
                const double scale = 1.0 / static_cast<double>(b);
                for (Index col = 0; col < b; ++col)
                    blocks[t](i, col) = plans.real_buf[col] * scale;
            }
        }
    });
    return blocks;
}

FitResult fit_coefficients(const Eigen::MatrixXd& F, const std::function<double(double)>& target,
                           Index tau, Index c, std::uint64_t seed) {
    if (c < tau + 1) throw ParameterError("fit_coefficients: sample count must be >= tau + 1");
    const Index n = F.rows();
    std::vector<double> xs;
    xs.reserve(n + c);
    for (Index i = 0; i < n; ++i) xs.push_back(F.row(i).squaredNorm());
    Rng rng(mix(seed, 0xf17));
    for (Index s = 0; s < c; ++s) {
        Index i = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        Index j = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        if (n > 1) {
            while (j == i) j = static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        }
        xs.push_back(F.row(i).dot(F.row(j)));
    }

    auto vandermonde = [tau](const std::vector<double>& pts) {
        Eigen::MatrixXd V(static_cast<Index>(pts.size()), tau + 1);
        for (Index row = 0; row < V.rows(); ++row) {
            double p = 1.0;
            for (Index col = 0; col <= tau; ++col) {
                V(row, col) = p;
                p *= pts[row];
            }
        }
        return V;
    };

    Eigen::MatrixXd V = vandermonde(xs);
    Eigen::VectorXd y(V.rows());
    for (Index row = 0; row < V.rows(); ++row) y[row] = target(xs[row]);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
    FitResult out;
    if (qr.rank() == tau + 1) {
        out.coefficients = qr.solve(y);
        return out;
    }

    // Degenerate design: interpolate at tau+1 spread points of the sampled range.
    out.degenerate = true;
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it, hi = *hi_it;
    out.coefficients = Eigen::VectorXd::Zero(tau + 1);
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        out.coefficients[0] = target(lo);  // single-point fit: constant polynomial
        return out;
    }
    std::vector<double> pts(tau + 1);
    for (Index i = 0; i <= tau; ++i)
        pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(tau);
    Eigen::MatrixXd Vi = vandermonde(pts);
    Eigen::VectorXd yi(tau + 1);
    for (Index i = 0; i <= tau; ++i) yi[i] = target(pts[i]);
    out.coefficients = Vi.colPivHouseholderQr().solve(yi);
    return out;
}

PtsFactor build_pts(const Eigen::MatrixXd& F, const PtsOptions& opts) {
    FitResult fit = fit_coefficients(
        F, [](double x) { return truncated_log(x); }, opts.tau, opts.c, opts.seed);
    auto blocks = tensor_sketch(F, opts.tau, opts.b, opts.seed, opts.identity_sketch);

    PtsFactor factor;
    factor.tau = opts.tau;
    factor.b = opts.b;
    factor.seed = opts.seed;
    factor.coefficients = fit.coefficients;
    factor.degenerate_fit = fit.degenerate;
    const Index n = F.rows();
    factor.Y.resize(n, opts.tau * opts.b + 1);
    factor.Y.col(0).setOnes();
    factor.theta.resize(opts.tau * opts.b + 1);
    factor.theta[0] = fit.coefficients[0];
    for (Index j = 0; j < opts.tau; ++j) {
        factor.Y.middleCols(1 + j * opts.b, opts.b) = blocks[j];
        factor.theta.segment(1 + j * opts.b, opts.b).setConstant(fit.coefficients[j + 1]);
    }
    return factor;
}

Eigen::VectorXd pts_apply(const PtsFactor& factor, const Eigen::VectorXd& v) {
    if (v.size() != factor.rows())
        throw DimensionError("pts_apply: vector length does not match factor rows");
    const Index n = factor.rows();
    const Index cols = factor.Y.cols();
    // row-blocked so the output segment stays cache-resident while the wide
    // factor streams once per pass; fixed blocks keep the accumulation order
    // independent of the thread count
    constexpr Index kBlock = 16384;
    const Index blocks = (n + kBlock - 1) / kBlock;
    if (blocks <= 1) {
        Eigen::VectorXd inner = factor.Y.transpose() * v;
        inner.array() *= factor.theta.array();
        return factor.Y * inner;
    }
    Eigen::MatrixXd partial(cols, blocks);
    parallel_for(0, blocks, [&](Index lo, Index hi) {
        for (Index c = lo; c < hi; ++c) {
            Index s = c * kBlock;
            Index len = std::min<Index>(kBlock, n - s);
            partial.col(c).noalias() =
                factor.Y.middleRows(s, len).transpose() * v.segment(s, len);
        }
    });
    Eigen::VectorXd inner = Eigen::VectorXd::Zero(cols);
    for (Index c = 0; c < blocks; ++c) inner += partial.col(c);
    inner.array() *= factor.theta.array();
    Eigen::VectorXd out(n);
    parallel_for(0, blocks, [&](Index lo, Index hi) {
        for (Index c = lo; c < hi; ++c) {
            Index s = c * kBlock;
            Index len = std::min<Index>(kBlock, n - s);
            out.segment(s, len).noalias() = factor.Y.middleRows(s, len) * inner;
        }
    });
    return out;
}

Eigen::MatrixXd pts_materialize(const PtsFactor& factor, Index dense_cap) {
    if (factor.rows() > dense_cap)
        throw ParameterError("pts_materialize: rows exceed the dense cap");
    return factor.Y * factor.theta.asDiagonal() * factor.Y.transpose();
}

}  // namespace hyperembed

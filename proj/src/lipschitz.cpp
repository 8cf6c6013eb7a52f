#include "harmonics/lipschitz.hpp"

#include <cmath>

#include "harmonics/kernels.hpp"

namespace harmonics {

double spectral_norm(const Mat& w, double tol, int max_iter) {
    require(w.rows >= 1 && w.cols >= 1, "spectral_norm: empty matrix");
    double frob = 0.0;
    for (double x : w.a) frob += x * x;
    require(frob > 0.0, "spectral_norm: zero matrix");

    Vec v(w.cols, 1.0 / std::sqrt(static_cast<double>(w.cols)));
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        // u = W v, v' = W^T u
        Vec u(w.rows, 0.0);
        for (int i = 0; i < w.rows; ++i) {
            const double* row = w.row(i);
            double s = 0.0;
            for (int j = 0; j < w.cols; ++j) s += row[j] * v[j];
            u[i] = s;
        }
        Vec v2(w.cols, 0.0);
        for (int i = 0; i < w.rows; ++i) {
            const double* row = w.row(i);
            for (int j = 0; j < w.cols; ++j) v2[j] += row[j] * u[i];
        }
        double norm2 = 0.0;
        for (double x : v2) norm2 += x * x;
        const double lambda = std::sqrt(norm2); // eigenvalue of W^T W along v
        if (lambda == 0.0) return 0.0;          // start vector in the null space of W
        for (size_t j = 0; j < v2.size(); ++j) v2[j] /= lambda;
        v = std::move(v2);
        const double sigma = std::sqrt(lambda);
        if (it > 0 && std::abs(sigma - prev) <= tol * std::max(1.0, sigma)) return sigma;
        prev = sigma;
    }
    throw std::runtime_error("spectral_norm: no convergence after iteration cap, residual " +
                             std::to_string(prev));
}

namespace {

double activation_lipschitz(Activation a) {
    return a == Activation::sigmoid ? 0.25 : 1.0;
}

} // namespace

double lipschitz_upper_bound(const DenseNetwork& net) {
    double bound = 1.0;
    for (const DenseLayer& layer : net.layers)
        bound *= spectral_norm(layer.weight) * activation_lipschitz(layer.act);
    return bound;
}

double empirical_lipschitz(const DenseNetwork& net, const std::vector<Vec>& sample_points) {
    require(!sample_points.empty(), "empirical_lipschitz: empty sample set");
    const int d_out = net.output_dim();
    const int d_in = net.input_dim();
    const int np = static_cast<int>(sample_points.size());
    Vec norms(np, 0.0);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < np; ++p) {
        GradientTape tape;
        forward(net, sample_points[p], tape);
        Mat jac(d_out, d_in);
        for (int o = 0; o < d_out; ++o) {
            Mat seed(1, d_out);
            seed(0, o) = 1.0;
            jac.set_row(o, backward(tape, seed).d_input.row_vec(0));
        }
        norms[p] = spectral_norm(jac);
    }
    // deterministic max reduction over the stored per-point norms
    double best = 0.0;
    for (double n : norms) best = std::max(best, n);
    return best;
}

LipschitzEstimate estimate_lipschitz(const DenseNetwork& net, const GaussianMeasure& input_dist,
                                     long n_points, uint64_t seed) {
    require(n_points >= 1, "estimate_lipschitz: need at least one point");
    Rng rng(seed);
    std::vector<Vec> pts;
    pts.reserve(n_points);
    for (long i = 0; i < n_points; ++i) pts.push_back(input_dist.sample(rng));
    LipschitzEstimate est;
    est.upper_bound = lipschitz_upper_bound(net);
    est.empirical_lower_bound = empirical_lipschitz(net, pts);
    est.method = LipschitzMethod::norm_product;
    est.sample_count = n_points;
    return est;
}

PoincareCheck poincare_check(double var_f, double lipschitz_constant, const GaussianMeasure& m,
                             double var_std_error) {
    require(var_f >= 0.0 && lipschitz_constant >= 0.0, "poincare_check: negative inputs");
    const double s = m.spectral_scale();
    const double rhs = lipschitz_constant * lipschitz_constant * s * s;
    PoincareCheck chk;
    chk.slack = rhs - var_f;
    chk.holds = var_f <= rhs + 3.0 * var_std_error;
    return chk;
}

} // namespace harmonics

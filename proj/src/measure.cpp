#include "harmonics/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "harmonics/quadrature.hpp"

namespace harmonics {

namespace {

void validate_diag(const Vec& mean, const Vec& scale) {
    require(!mean.empty(), "GaussianMeasure: dimension must be >= 1");
    require(mean.size() == scale.size(), "GaussianMeasure: mean/scale length mismatch");
    for (double s : scale) require(s > 0.0, "GaussianMeasure: scale entries must be positive");
}

} // namespace

GaussianMeasure GaussianMeasure::standard(int n) {
    require(n >= 1, "GaussianMeasure: dimension must be >= 1");
    return diagonal(Vec(n, 0.0), Vec(n, 1.0));
}

GaussianMeasure GaussianMeasure::diagonal(Vec mean, Vec scale) {
    validate_diag(mean, scale);
    GaussianMeasure m;
    m.mean = std::move(mean);
    m.scale = std::move(scale);
    return m;
}

GaussianMeasure GaussianMeasure::full(Vec mean, const Mat& covariance) {
    require(!mean.empty(), "GaussianMeasure: dimension must be >= 1");
    const int n = static_cast<int>(mean.size());
    require(covariance.rows == n && covariance.cols == n,
            "GaussianMeasure: covariance shape mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            require(std::abs(covariance(i, j) - covariance(j, i)) <= 1e-12,
                    "GaussianMeasure: covariance not symmetric");
    GaussianMeasure m;
    m.mean = std::move(mean);
    m.full_covariance = covariance;
    whiten(covariance, m.whiten_rows, m.whiten_eigs); // throws on non-PD
    m.scale.resize(n);
    for (int i = 0; i < n; ++i) m.scale[i] = std::sqrt(covariance(i, i));
    return m;
}

double GaussianMeasure::spectral_scale() const {
    if (full_covariance) return std::sqrt(whiten_eigs.front()); // descending order
    return *std::max_element(scale.begin(), scale.end());
}

Vec GaussianMeasure::standardize(const Vec& x) const {
    require(static_cast<int>(x.size()) == dim(), "standardize: dimension mismatch");
    const int n = dim();
    Vec out(n);
    if (full_covariance) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += whiten_rows(i, j) * (x[j] - mean[j]);
            out[i] = s / std::sqrt(whiten_eigs[i]);
        }
    } else {
        for (int i = 0; i < n; ++i) out[i] = (x[i] - mean[i]) / scale[i];
    }
    return out;
}

Vec GaussianMeasure::unstandardize(const Vec& x_hat) const {
    require(static_cast<int>(x_hat.size()) == dim(), "unstandardize: dimension mismatch");
    const int n = dim();
    Vec out(n);
    if (full_covariance) {
        for (int j = 0; j < n; ++j) {
            double s = mean[j];
            for (int i = 0; i < n; ++i) s += whiten_rows(i, j) * std::sqrt(whiten_eigs[i]) * x_hat[i];
            out[j] = s;
        }
    } else {
        for (int i = 0; i < n; ++i) out[i] = mean[i] + scale[i] * x_hat[i];
    }
    return out;
}

Vec GaussianMeasure::sample(Rng& rng) const {
    return unstandardize(rng.gauss_vec(dim()));
}

double hermite_eval(int k, double t) {
    require(k >= 0, "hermite_eval: degree must be non-negative");
    if (k == 0) return 1.0;
    double prev = 1.0, cur = t;
    for (int j = 1; j < k; ++j) {
        const double next = t * cur - static_cast<double>(j) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_eval_general(int k, double x, double mu, double sigma) {
    require(sigma > 0.0, "hermite_eval_general: sigma must be positive");
    return hermite_eval(k, (x - mu) / sigma);
}

double hermite_eval_multi(const MultiIndex& alpha, const Vec& x, const GaussianMeasure& m) {
    require(alpha.dim() == m.dim(), "hermite_eval_multi: dimension mismatch");
    const Vec x_hat = m.standardize(x);
    double p = 1.0;
    for (int i = 0; i < alpha.dim(); ++i) p *= hermite_eval(alpha.degrees[i], x_hat[i]);
    return p;
}

EstimatorConfig EstimatorConfig::auto_for(int dim, uint64_t seed) {
    EstimatorConfig cfg;
    cfg.kind = dim <= 2 ? EstimatorKind::quadrature : EstimatorKind::monte_carlo;
    cfg.seed = seed;
    return cfg;
}

namespace {

// Shared evaluation plan: standardized points, physical points, and either
// quadrature weights (summing to 1) or equal Monte Carlo weights with a
// std-error flag. Hermite values are read from per-dimension tables.
struct EvalPlan {
    std::vector<Vec> x_hat;
    std::vector<Vec> x;
    Vec weight;
    bool monte_carlo = false;
    long samples_or_nodes = 0;
    // table[i][p*(max_deg+1) + k] = H_k(x_hat_p[i])
    int max_deg = 0;
    std::vector<Vec> table;

    void build_tables(int up_to_degree) {
        max_deg = up_to_degree;
        const int n = static_cast<int>(x_hat.empty() ? 0 : x_hat.front().size());
        table.assign(n, Vec());
        for (int i = 0; i < n; ++i) {
            Vec& tab = table[i];
            tab.resize(x_hat.size() * (max_deg + 1));
            for (size_t p = 0; p < x_hat.size(); ++p) {
                const double t = x_hat[p][i];
                double prev = 1.0, cur = t;
                tab[p * (max_deg + 1)] = 1.0;
                if (max_deg >= 1) tab[p * (max_deg + 1) + 1] = t;
                for (int k = 2; k <= max_deg; ++k) {
                    const double next = t * cur - static_cast<double>(k - 1) * prev;
                    prev = cur;
                    cur = next;
                    tab[p * (max_deg + 1) + k] = next;
                }
            }
        }
    }

    double basis(size_t p, const MultiIndex& alpha) const {
        double v = 1.0;
        for (int i = 0; i < alpha.dim(); ++i) v *= table[i][p * (max_deg + 1) + alpha.degrees[i]];
        return v;
    }
};

EvalPlan make_plan(const GaussianMeasure& m, const EstimatorConfig& cfg) {
    EvalPlan plan;
    const int n = m.dim();
    if (cfg.kind == EstimatorKind::quadrature) {
        require(cfg.quadrature_nodes > 0, "estimator config: zero quadrature nodes");
        require(n <= 4, "quadrature estimator limited to dimension <= 4");
        const GaussHermiteRule rule = gauss_hermite(cfg.quadrature_nodes);
        const int nn = cfg.quadrature_nodes;
        size_t total = 1;
        for (int i = 0; i < n; ++i) total *= static_cast<size_t>(nn);
        plan.x_hat.reserve(total);
        plan.weight.reserve(total);
        std::vector<int> idx(n, 0);
        for (size_t p = 0; p < total; ++p) {
            Vec t(n);
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
                t[i] = rule.nodes[idx[i]];
                w *= rule.weights[idx[i]];
            }
            plan.x_hat.push_back(std::move(t));
            plan.weight.push_back(w);
            for (int i = n - 1; i >= 0; --i) {
                if (++idx[i] < nn) break;
                idx[i] = 0;
            }
        }
        plan.samples_or_nodes = static_cast<long>(nn);
    } else {
        require(cfg.mc_samples > 0, "estimator config: zero Monte Carlo samples");
        Rng rng(cfg.seed);
        plan.monte_carlo = true;
        plan.x_hat.reserve(cfg.mc_samples);
        for (long s = 0; s < cfg.mc_samples; ++s) plan.x_hat.push_back(rng.gauss_vec(n));
        plan.weight.assign(cfg.mc_samples, 1.0 / static_cast<double>(cfg.mc_samples));
        plan.samples_or_nodes = cfg.mc_samples;
    }
    plan.x.reserve(plan.x_hat.size());
    for (const Vec& t : plan.x_hat) plan.x.push_back(m.unstandardize(t));
    return plan;
}

CoefficientEstimate reduce_coefficient(const EvalPlan& plan, const Vec& fvals,
                                       const MultiIndex& alpha, EstimatorKind kind) {
    CoefficientEstimate est;
    est.estimator = kind;
    est.samples_or_nodes = plan.samples_or_nodes;
    double acc = 0.0;
    for (size_t p = 0; p < fvals.size(); ++p) acc += plan.weight[p] * fvals[p] * plan.basis(p, alpha);
    est.value = acc;
    if (plan.monte_carlo) {
        double ss = 0.0;
        for (size_t p = 0; p < fvals.size(); ++p) {
            const double d = fvals[p] * plan.basis(p, alpha) - acc;
            ss += d * d;
        }
        const double nsamp = static_cast<double>(fvals.size());
        est.std_error = std::sqrt(ss / (nsamp - 1.0) / nsamp);
    }
    return est;
}

} // namespace

CoefficientEstimate hermite_coefficient(const ScalarField& f, const MultiIndex& alpha,
                                        const GaussianMeasure& m, const EstimatorConfig& cfg) {
    require(alpha.dim() == m.dim(), "hermite_coefficient: dimension mismatch");
    EvalPlan plan = make_plan(m, cfg);
    plan.build_tables(std::max(1, *std::max_element(alpha.degrees.begin(), alpha.degrees.end())));
    Vec fvals(plan.x.size());
    const int np = static_cast<int>(plan.x.size());
#pragma omp parallel for schedule(static)
    for (int p = 0; p < np; ++p) fvals[p] = f(plan.x[p]);
    return reduce_coefficient(plan, fvals, alpha, cfg.kind);
}

VarianceDecomposition variance_decomposition(const ScalarField& f, const GaussianMeasure& m,
                                             int max_degree, const EstimatorConfig& cfg) {
    auto one = variance_decomposition_multi(
        [&f](const Vec& x) { return Vec{f(x)}; }, 1, m, max_degree, cfg);
    return std::move(one.front());
}

std::vector<VarianceDecomposition> variance_decomposition_multi(
    const std::function<Vec(const Vec&)>& f, int output_dim, const GaussianMeasure& m,
    int max_degree, const EstimatorConfig& cfg) {
    require(max_degree >= 1, "variance_decomposition: max_degree >= 1 required");
    require(max_degree <= 20, "variance_decomposition: exact factorials limited to degree 20");
    EvalPlan plan = make_plan(m, cfg);
    plan.build_tables(max_degree);

    const auto all = enumerate_multi_indices(m.dim(), max_degree);
    std::vector<MultiIndex> indices(all.begin() + 1, all.end()); // drop |alpha| = 0

    const int np = static_cast<int>(plan.x.size());
    Mat fvals(np, output_dim);
#pragma omp parallel for schedule(static)
    for (int p = 0; p < np; ++p) fvals.set_row(p, f(plan.x[p]));

    std::vector<VarianceDecomposition> out(output_dim);
    for (int o = 0; o < output_dim; ++o) {
        VarianceDecomposition& vd = out[o];
        vd.indices = indices;
        vd.truncation_degree = max_degree;
        vd.contributions.resize(indices.size());
        vd.std_errors.resize(indices.size());
    }
    const int na = static_cast<int>(indices.size());
#pragma omp parallel for schedule(static)
    for (int ia = 0; ia < na; ++ia) {
        const double fact = static_cast<double>(indices[ia].factorial());
        for (int o = 0; o < output_dim; ++o) {
            Vec col(np);
            for (int p = 0; p < np; ++p) col[p] = fvals(p, o);
            const CoefficientEstimate est = reduce_coefficient(plan, col, indices[ia], cfg.kind);
            out[o].contributions[ia] = est.value * est.value / fact;
            // first-order error propagation through c^2/alpha!
            out[o].std_errors[ia] = 2.0 * std::abs(est.value) * est.std_error / fact;
        }
    }
    for (int o = 0; o < output_dim; ++o) {
        double tot = 0.0;
        for (double c : out[o].contributions) tot += c;
        out[o].total = tot;
    }
    return out;
}

Vec VarianceDecomposition::by_total_degree() const {
    Vec agg(truncation_degree, 0.0);
    for (size_t i = 0; i < indices.size(); ++i) agg[indices[i].total_degree() - 1] += contributions[i];
    return agg;
}

double VarianceDecomposition::mass_at_degree_or_above(int min_degree) const {
    if (total <= 0.0) return 0.0;
    double m = 0.0;
    for (size_t i = 0; i < indices.size(); ++i)
        if (indices[i].total_degree() >= min_degree) m += contributions[i];
    return m / total;
}

std::string VarianceDecomposition::to_csv() const {
    std::ostringstream os;
    os << "alpha,contribution,std_error\n";
    os.precision(12);
    for (size_t i = 0; i < indices.size(); ++i)
        os << indices[i].to_string() << "," << contributions[i] << "," << std_errors[i] << "\n";
    return os.str();
}

std::complex<double> gaussian_measure_fourier(const GaussianMeasure& m, const Vec& omega) {
    require(static_cast<int>(omega.size()) == m.dim(), "gaussian_measure_fourier: dimension mismatch");
    double phase = 0.0, quad = 0.0;
    const int n = m.dim();
    for (int i = 0; i < n; ++i) phase -= omega[i] * m.mean[i];
    if (m.full_covariance) {
        const Mat& C = *m.full_covariance;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) quad += omega[i] * C(i, j) * omega[j];
    } else {
        for (int i = 0; i < n; ++i) {
            const double so = m.scale[i] * omega[i];
            quad += so * so;
        }
    }
    return std::exp(-0.5 * quad) * std::complex<double>(std::cos(phase), std::sin(phase));
}

void whiten(const Mat& C, Mat& O_out, Vec& D_out) {
    require(C.rows == C.cols && C.rows >= 1, "whiten: square matrix required");
    const int n = C.rows;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = C(i, j);
    require((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "whiten: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    O_out = Mat(n, n);
    D_out.resize(n);
    // Eigen sorts ascending; flip to descending.
    for (int i = 0; i < n; ++i) {
        const int src = n - 1 - i;
        const double lambda = es.eigenvalues()(src);
        require(lambda > 0.0, "whiten: matrix not positive definite");
        D_out[i] = lambda;
        for (int j = 0; j < n; ++j) O_out(i, j) = es.eigenvectors()(j, src);
    }
}

} // namespace harmonics

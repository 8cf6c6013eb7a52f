#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "harmonics/core.hpp"
#include "harmonics/multi_index.hpp"
#include "harmonics/rng.hpp"

namespace harmonics {

/// The measure N(mu, S^2) of a Gaussian space. Diagonal by default; an
/// optional full covariance switches standardization to the whitened path
/// x_hat = D^{-1/2} O (x - mu) with O C O^T = D.
struct GaussianMeasure {
    Vec mean;
    Vec scale; // diag(S), all entries > 0
    std::optional<Mat> full_covariance;

    // Whitening factors, populated when full_covariance is set.
    Mat whiten_rows;   // O, rows are eigenvectors, eigenvalues descending
    Vec whiten_eigs;   // diag(D)

    static GaussianMeasure standard(int n);
    static GaussianMeasure diagonal(Vec mean, Vec scale);
    static GaussianMeasure full(Vec mean, const Mat& covariance);

    int dim() const { return static_cast<int>(mean.size()); }

    /// ||S||_2: largest scale entry, or sqrt of the top covariance eigenvalue.
    double spectral_scale() const;

    Vec standardize(const Vec& x) const;
    Vec unstandardize(const Vec& x_hat) const;

    Vec sample(Rng& rng) const;
};

/// Probabilists' Hermite polynomial H_k(t) by the three-term recurrence.
double hermite_eval(int k, double t);

/// H_k((x - mu) / sigma).
double hermite_eval_general(int k, double x, double mu, double sigma);

/// Tensorised basis value prod_i H_{alpha_i}(x_hat_i) under the measure.
double hermite_eval_multi(const MultiIndex& alpha, const Vec& x, const GaussianMeasure& m);

enum class EstimatorKind { quadrature, monte_carlo };

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::quadrature;
    int quadrature_nodes = 64;  // per dimension
    long mc_samples = 100000;
    uint64_t seed = 0;

    /// Quadrature for n <= 2 (64 nodes/dim), Monte Carlo otherwise:
    /// tensor quadrature cost grows as nodes^n.
    static EstimatorConfig auto_for(int dim, uint64_t seed = 0);
};

struct CoefficientEstimate {
    double value = 0.0;
    double std_error = 0.0; // 0 for quadrature
    EstimatorKind estimator = EstimatorKind::quadrature;
    long samples_or_nodes = 0;
};

using ScalarField = std::function<double(const Vec&)>;

/// f_hat(alpha) = E_{gamma(x_hat)}[ f(x) H_alpha(x_hat) ].
CoefficientEstimate hermite_coefficient(const ScalarField& f, const MultiIndex& alpha,
                                        const GaussianMeasure& m, const EstimatorConfig& cfg);

struct VarianceDecomposition {
    std::vector<MultiIndex> indices;     // graded-lex, 1 <= |alpha| <= truncation_degree
    Vec contributions;                   // |f_hat(alpha)|^2 / alpha!
    Vec std_errors;
    int truncation_degree = 0;
    double total = 0.0;

    /// Contribution mass aggregated by total degree, entry d-1 holds |alpha| = d.
    Vec by_total_degree() const;

    /// Share of total at |alpha| >= min_degree; 0 when total is 0.
    double mass_at_degree_or_above(int min_degree) const;

    /// CSV with columns alpha (semicolon-joined degrees), contribution, std_error.
    std::string to_csv() const;
};

VarianceDecomposition variance_decomposition(const ScalarField& f, const GaussianMeasure& m,
                                             int max_degree, const EstimatorConfig& cfg);

/// Vector-valued variant sharing one evaluation grid/sample set across all
/// outputs; returns one decomposition per output dimension.
std::vector<VarianceDecomposition> variance_decomposition_multi(
    const std::function<Vec(const Vec&)>& f, int output_dim, const GaussianMeasure& m,
    int max_degree, const EstimatorConfig& cfg);

/// Characteristic-function-convention Fourier transform of the measure:
/// exp(-i omega . mu) exp(-||S omega||^2 / 2).
std::complex<double> gaussian_measure_fourier(const GaussianMeasure& m, const Vec& omega);

/// Eigendecomposition O C O^T = D of a symmetric PD matrix, eigenvalues
/// descending in D. Throws on non-PD input.
void whiten(const Mat& C, Mat& O_out, Vec& D_out);

} // namespace harmonics

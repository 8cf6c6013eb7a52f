#pragma once

#include "harmonics/autodiff.hpp"
#include "harmonics/measure.hpp"

namespace harmonics {

enum class LipschitzMethod { norm_product, gradient_sampling };

struct LipschitzEstimate {
    double upper_bound = 0.0;
    double empirical_lower_bound = 0.0;
    LipschitzMethod method = LipschitzMethod::norm_product;
    long sample_count = 0;
};

/// Largest singular value by power iteration on W^T W, all-ones start vector.
/// Throws if the relative change has not converged within the iteration cap.
double spectral_norm(const Mat& w, double tol = 1e-10, int max_iter = 10000);

/// Product of layer spectral norms times activation Lipschitz constants
/// (sigmoid 1/4, the rest 1).
double lipschitz_upper_bound(const DenseNetwork& net);

/// Max over sample points of the input-Jacobian operator norm; a certified
/// lower bound on the Lipschitz constant.
double empirical_lipschitz(const DenseNetwork& net, const std::vector<Vec>& sample_points);

/// Convenience: both bounds, with points drawn from the given measure.
LipschitzEstimate estimate_lipschitz(const DenseNetwork& net, const GaussianMeasure& input_dist,
                                     long n_points, uint64_t seed);

struct PoincareCheck {
    bool holds = false;
    double slack = 0.0; // L^2 ||S||_2^2 - var_f
};

/// Prop-style variance bound Var(f) <= L^2 ||S||_2^2; var_std_error widens
/// the test by 3 standard errors for Monte Carlo variance estimates.
PoincareCheck poincare_check(double var_f, double lipschitz_constant, const GaussianMeasure& m,
                             double var_std_error = 0.0);

} // namespace harmonics

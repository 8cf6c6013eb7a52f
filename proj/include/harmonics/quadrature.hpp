#pragma once

#include "harmonics/core.hpp"

namespace harmonics {

/// Gauss-Hermite rule for the probabilists' convention: nodes t_i and
/// weights w_i with sum_i w_i f(t_i) ~ E[f(X)], X ~ N(0,1). Exact for
/// polynomials of degree <= 2n-1. Weights sum to 1.
struct GaussHermiteRule {
    Vec nodes;
    Vec weights;
};

GaussHermiteRule gauss_hermite(int n);

} // namespace harmonics

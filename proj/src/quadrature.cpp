#include "harmonics/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace harmonics {

// Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence
// He_{k+1}(t) = t He_k(t) - k He_{k-1}(t): zero diagonal, off-diagonal sqrt(k).
GaussHermiteRule gauss_hermite(int n) {
    require(n >= 1, "gauss_hermite: need at least one node");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = v0 * v0; // total mass 1 under N(0,1)
    }
    return rule;
}

} // namespace harmonics

#include <doctest.h>

#include <cmath>

#include "harmonics/lipschitz.hpp"
#include "harmonics/rng.hpp"

using namespace harmonics;

TEST_CASE("spectral norm of a 2x2 matrix matches the closed form") {
    Mat w(2, 2);
    w.a = {1.0, 2.0, 3.0, 4.0};
    // singular values of [[1,2],[3,4]]: sqrt(15 +- sqrt(221))
    CHECK(spectral_norm(w) == doctest::Approx(std::sqrt(15.0 + std::sqrt(221.0))).epsilon(1e-10));
}

TEST_CASE("spectral norm of a diagonal matrix is the largest entry") {
    Mat w(3, 3);
    w(0, 0) = 0.5;
    w(1, 1) = -2.0;
    w(2, 2) = 1.0;
    CHECK(spectral_norm(w) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("upper bound of a linear network is the product of layer norms") {
    DenseNetwork net = DenseNetwork::make(2, {3}, 2, Activation::identity,
                                          Activation::identity, 5);
    const double expect = spectral_norm(net.layers[0].weight) * spectral_norm(net.layers[1].weight);
    CHECK(lipschitz_upper_bound(net) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("sigmoid layers contribute a quarter factor") {
    DenseNetwork lin = DenseNetwork::make(2, {3}, 2, Activation::identity,
                                          Activation::identity, 5);
    DenseNetwork sig = lin;
    sig.layers[0].act = Activation::sigmoid;
    CHECK(lipschitz_upper_bound(sig) ==
          doctest::Approx(0.25 * lipschitz_upper_bound(lin)).epsilon(1e-10));
}

TEST_CASE("empirical lipschitz of a linear map equals its spectral norm") {
    DenseNetwork net = DenseNetwork::make(3, {}, 2, Activation::identity, Activation::identity, 8);
    Rng rng(2);
    std::vector<Vec> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(rng.gauss_vec(3));
    CHECK(empirical_lipschitz(net, pts) ==
          doctest::Approx(spectral_norm(net.layers[0].weight)).epsilon(1e-8));
}

TEST_CASE("empirical lower bound never exceeds the upper bound") {
    Rng rng(17);
    for (uint64_t seed : {1u, 2u, 3u}) {
        DenseNetwork net = DenseNetwork::make(4, {16, 16}, 3, Activation::sigmoid,
                                              Activation::identity, seed);
        std::vector<Vec> pts;
        for (int i = 0; i < 20; ++i) pts.push_back(rng.gauss_vec(4));
        CHECK(empirical_lipschitz(net, pts) <= lipschitz_upper_bound(net) + 1e-12);
    }
}

TEST_CASE("estimate_lipschitz is deterministic and ordered") {
    DenseNetwork net = DenseNetwork::make(3, {8}, 2, Activation::tanh, Activation::identity, 4);
    const GaussianMeasure m = GaussianMeasure::standard(3);
    const LipschitzEstimate a = estimate_lipschitz(net, m, 50, 21);
    const LipschitzEstimate b = estimate_lipschitz(net, m, 50, 21);
    CHECK(a.upper_bound == b.upper_bound);
    CHECK(a.empirical_lower_bound == b.empirical_lower_bound);
    CHECK(a.empirical_lower_bound <= a.upper_bound);
    CHECK(a.sample_count == 50);
}

TEST_CASE("poincare check compares variance against the scaled bound") {
    const GaussianMeasure m = GaussianMeasure::diagonal({0.0, 0.0}, {0.5, 0.3});
    // bound = L^2 ||S||_2^2 = 4 * 0.25 = 1
    CHECK(poincare_check(0.9, 2.0, m).holds);
    CHECK(poincare_check(0.9, 2.0, m).slack == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_FALSE(poincare_check(1.1, 2.0, m).holds);
    // a standard error widens the tolerance by 3 SE
    CHECK(poincare_check(1.1, 2.0, m, 0.05).holds);
}

TEST_CASE("variance of a lipschitz function satisfies the poincare bound") {
    // f(x) = sin(x): L = 1; under N(0,1), Var = (1 - e^-2)/2 < 1
    const GaussianMeasure m = GaussianMeasure::standard(1);
    const double var = 0.5 * (1.0 - std::exp(-2.0));
    CHECK(poincare_check(var, 1.0, m).holds);
}

#include <doctest.h>

#include <cmath>

#include "harmonics/measure.hpp"
#include "harmonics/quadrature.hpp"

using namespace harmonics;

TEST_CASE("probabilists' Hermite polynomials match closed forms") {
    const double t = 1.3;
    CHECK(hermite_eval(0, t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hermite_eval(1, t) == doctest::Approx(t).epsilon(1e-15));
    CHECK(hermite_eval(2, t) == doctest::Approx(t * t - 1.0).epsilon(1e-14));
    CHECK(hermite_eval(3, t) == doctest::Approx(t * t * t - 3.0 * t).epsilon(1e-14));
    CHECK(hermite_eval(4, t) ==
          doctest::Approx(t * t * t * t - 6.0 * t * t + 3.0).epsilon(1e-14));
}

TEST_CASE("general-measure Hermite evaluation standardizes the argument") {
    CHECK(hermite_eval_general(3, 2.0, 2.0, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(hermite_eval_general(2, 3.0, 2.0, 0.5) ==
          doctest::Approx(hermite_eval(2, 2.0)).epsilon(1e-14));
}

TEST_CASE("Gauss-Hermite rule integrates moments of N(0,1)") {
    const GaussHermiteRule rule = gauss_hermite(16);
    double w_sum = 0.0, m2 = 0.0, m4 = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        w_sum += rule.weights[i];
        m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    CHECK(w_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Hermite orthogonality under a shifted, scaled measure") {
    const GaussianMeasure m = GaussianMeasure::diagonal({2.0}, {0.5});
    EstimatorConfig cfg; // 64-node quadrature
    for (int k = 0; k <= 5; ++k) {
        for (int j = 0; j <= 5; ++j) {
            const auto f = [&](const Vec& x) { return hermite_eval_general(k, x[0], 2.0, 0.5); };
            const auto est = hermite_coefficient(f, MultiIndex({j}), m, cfg);
            const double expect = k == j ? MultiIndex({k}).factorial() : 0.0;
            CHECK(std::abs(est.value - expect) <= 1e-9 * std::max(1.0, expect));
        }
    }
}

TEST_CASE("Hermite coefficient of x^2 under N(0,1)") {
    const GaussianMeasure m = GaussianMeasure::standard(1);
    EstimatorConfig cfg;
    const auto f = [](const Vec& x) { return x[0] * x[0]; };
    // E[x^2 H_2(x)] = E[x^4 - x^2] = 2
    CHECK(hermite_coefficient(f, MultiIndex({2}), m, cfg).value ==
          doctest::Approx(2.0).epsilon(1e-10));
    CHECK(hermite_coefficient(f, MultiIndex({1}), m, cfg).value ==
          doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("variance decomposition recovers Var(sin) under N(0,1)") {
    const double oracle = 0.5 * (1.0 - std::exp(-2.0)); // sum over odd k of 1/(e k!) ... closed form
    const GaussianMeasure m = GaussianMeasure::standard(1);
    EstimatorConfig cfg;
    const auto d = variance_decomposition([](const Vec& x) { return std::sin(x[0]); }, m, 15, cfg);
    CHECK(d.total == doctest::Approx(oracle).epsilon(1e-6));
    // sin is odd: even-degree contributions vanish
    const Vec by_deg = d.by_total_degree();
    REQUIRE(by_deg.size() == 15);
    CHECK(by_deg[1] <= 1e-12); // |alpha| = 2
    CHECK(by_deg[3] <= 1e-12); // |alpha| = 4
    CHECK(d.mass_at_degree_or_above(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.mass_at_degree_or_above(2) < 0.2);
}

TEST_CASE("variance decomposition of a linear map is all degree one") {
    const GaussianMeasure m = GaussianMeasure::diagonal({0.0, 1.0}, {1.0, 2.0});
    EstimatorConfig cfg;
    const auto d = variance_decomposition(
        [](const Vec& x) { return 3.0 * x[0] - x[1]; }, m, 4, cfg);
    // Var = 9 * 1 + 1 * 4
    CHECK(d.total == doctest::Approx(13.0).epsilon(1e-10));
    CHECK(d.mass_at_degree_or_above(2) <= 1e-12);
}

TEST_CASE("Monte Carlo estimator agrees with quadrature within 3 standard errors") {
    const GaussianMeasure m = GaussianMeasure::standard(1);
    const auto f = [](const Vec& x) { return std::sin(x[0]); };
    EstimatorConfig quad;
    EstimatorConfig mc;
    mc.kind = EstimatorKind::monte_carlo;
    mc.mc_samples = 200000;
    mc.seed = 99;
    const MultiIndex alpha({1});
    const auto a = hermite_coefficient(f, alpha, m, quad);
    const auto b = hermite_coefficient(f, alpha, m, mc);
    CHECK(b.std_error > 0.0);
    CHECK(std::abs(a.value - b.value) <= 3.0 * b.std_error);
}

TEST_CASE("estimator auto-selection switches to Monte Carlo above two dimensions") {
    CHECK(EstimatorConfig::auto_for(1).kind == EstimatorKind::quadrature);
    CHECK(EstimatorConfig::auto_for(2).kind == EstimatorKind::quadrature);
    CHECK(EstimatorConfig::auto_for(3).kind == EstimatorKind::monte_carlo);
}

TEST_CASE("whitening diagonalizes a full covariance") {
    Mat c(2, 2);
    c.a = {2.0, 1.0, 1.0, 2.0};
    Mat o;
    Vec d;
    whiten(c, o, d);
    REQUIRE(d.size() == 2);
    CHECK(d[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));
    // reconstruction O^T D O = C
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double v = 0.0;
            for (int k = 0; k < 2; ++k) v += o(k, i) * d[k] * o(k, j);
            CHECK(v == doctest::Approx(c(i, j)).epsilon(1e-10));
        }
}

TEST_CASE("whiten rejects non-positive-definite input") {
    Mat c(2, 2);
    c.a = {1.0, 2.0, 2.0, 1.0}; // eigenvalues 3, -1
    Mat o;
    Vec d;
    CHECK_THROWS_AS(whiten(c, o, d), std::invalid_argument);
}

TEST_CASE("full-covariance standardization round-trips") {
    Mat c(2, 2);
    c.a = {2.0, 1.0, 1.0, 2.0};
    const GaussianMeasure m = GaussianMeasure::full({1.0, -1.0}, c);
    const Vec x = {0.3, 0.7};
    const Vec back = m.unstandardize(m.standardize(x));
    CHECK(back[0] == doctest::Approx(x[0]).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(x[1]).epsilon(1e-12));
    CHECK(m.spectral_scale() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("measure Fourier transform decays with frequency and scale") {
    const GaussianMeasure std1 = GaussianMeasure::standard(1);
    // standard: |F|(w) = exp(-w^2 / 2)
    CHECK(std::abs(gaussian_measure_fourier(std1, {1.0})) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    double prev = 1.0;
    for (double w : {0.5, 1.0, 2.0, 4.0}) {
        const double amp = std::abs(gaussian_measure_fourier(std1, {w}));
        CHECK(amp < prev);
        prev = amp;
    }
    // larger scale -> pointwise smaller amplitude at every nonzero frequency
    const GaussianMeasure wide = GaussianMeasure::diagonal({0.0}, {2.0});
    for (double w : {0.5, 1.0, 3.0})
        CHECK(std::abs(gaussian_measure_fourier(wide, {w})) <
              std::abs(gaussian_measure_fourier(std1, {w})));
    // mean contributes only a phase
    const GaussianMeasure shifted = GaussianMeasure::diagonal({3.0}, {1.0});
    CHECK(std::abs(gaussian_measure_fourier(shifted, {1.0})) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("measure sampling is deterministic given the rng seed") {
    const GaussianMeasure m = GaussianMeasure::diagonal({1.0, 2.0}, {0.5, 1.5});
    Rng a(5), b(5);
    CHECK(m.sample(a) == m.sample(b));
}

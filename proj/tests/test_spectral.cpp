#include <doctest.h>

#include <cmath>

#include "harmonics/dataset.hpp"
#include "harmonics/kernels.hpp"
#include "harmonics/rng.hpp"
#include "harmonics/spectral.hpp"

using namespace harmonics;

TEST_CASE("dft of a constant series is DC only") {
    const Spectrum s = dft(Vec(8, 2.0));
    CHECK(std::abs(s.amplitudes[0] - std::complex<double>(16.0, 0.0)) <= 1e-12);
    for (size_t k = 1; k < s.amplitudes.size(); ++k) CHECK(std::abs(s.amplitudes[k]) <= 1e-12);
}

TEST_CASE("dft of a cosine peaks at the matching bins") {
    const int n = 32, k0 = 5;
    Vec y(n);
    for (int j = 0; j < n; ++j) y[j] = std::cos(2.0 * M_PI * k0 * j / n);
    const Spectrum s = dft(y);
    for (int k = 0; k < n; ++k) {
        const double amp = std::abs(s.amplitudes[k]);
        if (k == k0 || k == n - k0)
            CHECK(amp == doctest::Approx(n / 2.0).epsilon(1e-9));
        else
            CHECK(amp <= 1e-9);
    }
}

TEST_CASE("fft path matches the naive direct sum") {
    Rng rng(8);
    for (int n : {64, 128, 100, 37}) { // power-of-two and direct paths
        Vec y(n);
        for (double& v : y) v = rng.gauss();
        const Spectrum s = dft(y);
        const auto naive = kernels::serial::dft_direct(y);
        double max_amp = 0.0;
        for (const auto& a : naive) max_amp = std::max(max_amp, std::abs(a));
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(s.amplitudes[k] - naive[k]) <= 1e-9 * std::max(1.0, max_amp));
    }
}

TEST_CASE("parseval holds to 1e-9 relative") {
    Rng rng(19);
    Vec y(256);
    for (double& v : y) v = rng.gauss();
    double time_energy = 0.0;
    for (double v : y) time_energy += v * v;
    const Spectrum s = dft(y);
    double freq_energy = 0.0;
    for (const auto& a : s.amplitudes) freq_energy += std::norm(a);
    freq_energy /= y.size();
    CHECK(std::abs(time_energy - freq_energy) <= 1e-9 * time_energy);
}

TEST_CASE("nudft on a uniform grid reproduces the dft") {
    Rng rng(4);
    const int n = 48;
    const double dt = 0.125;
    Vec t(n), y(n);
    for (int i = 0; i < n; ++i) {
        t[i] = i * dt;
        y[i] = rng.gauss();
    }
    const Spectrum a = dft(y, dt);
    Vec omega(n);
    for (int k = 0; k < n; ++k) omega[k] = 2.0 * M_PI * k / (n * dt);
    const Spectrum b = nudft(t, y, omega);
    for (int k = 0; k < n; ++k) {
        CHECK(std::abs(a.amplitudes[k] - b.amplitudes[k]) <= 1e-9 * n);
        CHECK(a.frequencies[k] == doctest::Approx(b.frequencies[k]).epsilon(1e-12));
    }
}

TEST_CASE("high frequency fraction on tone spectra") {
    Spectrum s;
    s.frequencies = {0.0, 1.0, 3.0};
    s.amplitudes = {{5.0, 0.0}, {2.0, 0.0}, {2.0, 0.0}};
    CHECK(high_frequency_fraction(s, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(high_frequency_fraction(s, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(high_frequency_fraction(s, 4.0) == doctest::Approx(0.0).epsilon(1e-12));

    Spectrum dc;
    dc.frequencies = {0.0, 1.0};
    dc.amplitudes = {{3.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(high_frequency_fraction(dc, 0.5), std::invalid_argument);
}

TEST_CASE("high frequency fraction folds above-Nyquist bins") {
    Spectrum s;
    s.frequencies = {0.0, 1.0, 7.0}; // sampling rate 8: bin at 7 aliases to 1
    s.amplitudes = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}};
    s.folding_rate = 8.0;
    CHECK(high_frequency_fraction(s, 2.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("polynomial fit recovers a noiseless cubic") {
    Rng rng(3);
    Vec t(40), y(40);
    for (int i = 0; i < 40; ++i) {
        t[i] = rng.uniform(-2.0, 2.0);
        y[i] = 1.0 - 0.5 * t[i] + 0.25 * t[i] * t[i] * t[i];
    }
    const PolyFit fit = polyfit(t, y, 3);
    for (int i = 0; i < 40; ++i) CHECK(std::abs(fit.eval(t[i]) - y[i]) <= 1e-8);
}

TEST_CASE("degree selection finds the generating degree") {
    Rng rng(6);
    Vec t(80), cubic(80), linear(80);
    for (int i = 0; i < 80; ++i) {
        t[i] = rng.uniform(-1.0, 1.0);
        cubic[i] = 2.0 * t[i] * t[i] * t[i] - t[i] + 0.5;
        linear[i] = 3.0 * t[i] - 1.0;
    }
    CHECK(optimal_poly_degree(t, cubic, 10, 10, 1).k_star == 3);
    CHECK(optimal_poly_degree(t, linear, 10, 10, 1).k_star == 1);
}

TEST_CASE("degree selection is invariant to permutation of the pairs") {
    Rng rng(12);
    const int n = 64;
    Vec t(n), y(n);
    for (int i = 0; i < n; ++i) {
        t[i] = rng.uniform(-1.0, 1.0);
        y[i] = std::sin(3.0 * t[i]) + 0.1 * rng.gauss();
    }
    const DegreeSelectionResult a = optimal_poly_degree(t, y, 8, 10, 7);
    Vec t2(t.rbegin(), t.rend()), y2(y.rbegin(), y.rend());
    const DegreeSelectionResult b = optimal_poly_degree(t2, y2, 8, 10, 7);
    CHECK(a.k_star == b.k_star);
    CHECK(a.cv_error_per_degree == b.cv_error_per_degree);
}

TEST_CASE("reconstruction spectrum of a constant decoder is DC only") {
    const Dataset data = gen_sinc(24);
    VaeModel m = VaeModel::make(data.input_dim(), 1, {4}, Activation::sigmoid, 0.1, Vec{0.5}, 2);
    m.unflatten_params(Vec(m.flatten_params().size(), 0.0));
    const auto spectra = reconstruction_spectrum(m, data);
    REQUIRE(spectra.size() == 1);
    for (size_t k = 1; k < spectra[0].amplitudes.size(); ++k)
        CHECK(std::abs(spectra[0].amplitudes[k]) <= 1e-10);
}

TEST_CASE("spectra accept both input conventions") {
    const Dataset data = gen_sinc(24);
    const VaeModel pair_model =
        VaeModel::make(data.input_dim(), 1, {4}, Activation::tanh, 0.1, Vec{0.5}, 3);
    const VaeModel target_model =
        VaeModel::make(data.dim(), 1, {4}, Activation::tanh, 0.1, Vec{0.5}, 3);
    CHECK(reconstruction_spectrum(pair_model, data).size() == 1);
    CHECK(reconstruction_spectrum(target_model, data).size() == 1);
    CHECK(encoder_mean_spectrum(pair_model, data).size() == 1);
    CHECK(encoder_mean_spectrum(target_model, data).size() == 1);
    const VaeModel bad = VaeModel::make(5, 1, {4}, Activation::tanh, 0.1, Vec{0.5}, 3);
    CHECK_THROWS_AS(reconstruction_spectrum(bad, data), std::invalid_argument);
}

TEST_CASE("encoder spectrum is deterministic") {
    const Dataset data = gen_sinc(16);
    const VaeModel m = VaeModel::make(data.input_dim(), 2, {6}, Activation::sigmoid, 0.1,
                                      std::nullopt, 9);
    const auto a = encoder_mean_spectrum(m, data);
    const auto b = encoder_mean_spectrum(m, data);
    REQUIRE(a.size() == 2); // one per latent dimension
    for (size_t j = 0; j < a.size(); ++j) CHECK(a[j].amplitudes == b[j].amplitudes);
}

TEST_CASE("mean amplitude profile averages absolute amplitudes") {
    Spectrum s1, s2;
    s1.frequencies = s2.frequencies = {0.0, 1.0};
    s1.amplitudes = {{3.0, 4.0}, {1.0, 0.0}}; // |.| = 5, 1
    s2.amplitudes = {{1.0, 0.0}, {0.0, 3.0}}; // |.| = 1, 3
    const Spectrum p = mean_amplitude_profile({s1, s2});
    CHECK(std::abs(p.amplitudes[0]) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(p.amplitudes[1]) == doctest::Approx(2.0).epsilon(1e-12));
}

#pragma once

#include <complex>

#include "harmonics/core.hpp"
#include "harmonics/vae.hpp"

namespace harmonics {

enum class SpectrumSource { reconstruction, encoder_mean, raw_series };

struct Spectrum {
    Vec frequencies;                        // cycles per unit of the input coordinate
    std::vector<std::complex<double>> amplitudes;
    SpectrumSource source = SpectrumSource::raw_series;
    // Full-circle DFT grids set this to the sampling rate so energy above
    // Nyquist folds back to its alias; 0 means no folding.
    double folding_rate = 0.0;

    /// CSV: frequency, amplitude_real, amplitude_imag, amplitude_abs.
    std::string to_csv() const;
};

/// DFT X_k = sum_j y_j exp(-2 pi i j k / N); frequencies k / (N dt).
/// Uses a radix-2 FFT for power-of-two N, direct summation otherwise.
Spectrum dft(const Vec& y, double dt = 1.0);

/// X(omega_k) = sum_j y_j exp(-i omega_k t_j) by direct summation; omega is
/// angular, stored frequencies are omega / (2 pi).
Spectrum nudft(const Vec& t, const Vec& y, const Vec& omega);

/// Default angular frequency grid mirroring an N-bin DFT over the t span.
Vec nudft_default_grid(const Vec& t);

struct Dataset; // dataset.hpp

/// Reconstruct every input row (the [t, y] pair or the bare y row, whichever
/// matches the model width), order by t, and transform each target dimension
/// (dft on uniform grids, nudft otherwise). A reconstructed coordinate
/// channel is dropped; one spectrum per y dimension.
std::vector<Spectrum> reconstruction_spectrum(const VaeModel& model, const Dataset& data);

/// Same procedure with mu_phi(x) per latent dimension in place of
/// reconstructions.
std::vector<Spectrum> encoder_mean_spectrum(const VaeModel& model, const Dataset& data);

/// Per-bin mean of |amplitude| across spectra (the multivariate summary profile).
Spectrum mean_amplitude_profile(const std::vector<Spectrum>& spectra);

/// Share of non-DC spectral energy above the cutoff frequency.
/// Throws when the non-DC energy is zero.
double high_frequency_fraction(const Spectrum& s, double cutoff);

struct DegreeSelectionResult {
    int k_star = 0;
    Vec cv_error_per_degree; // index = degree
    int splits = 0;
    uint64_t seed = 0;

    /// CSV: degree, mean_cv_mse.
    std::string to_csv() const;
};

/// Least-squares polynomial fit on t rescaled to [-1, 1] (QR based);
/// coefficients in the scaled coordinate, lowest degree first.
struct PolyFit {
    Vec coeffs;
    double t_lo = -1.0;
    double t_hi = 1.0;
    double eval(double t) const;
};
PolyFit polyfit(const Vec& t, const Vec& y, int degree);

/// Cross-validated degree selection: random 80/20 splits, mean held-out MSE
/// per degree 0..k_max, arg-min with ties to the smallest degree. A degree
/// ties the minimum when it comes within 1% of the degree-0 baseline error,
/// a parsimony margin that keeps noiseless fits from picking spurious extra
/// degrees on rounding noise.
DegreeSelectionResult optimal_poly_degree(const Vec& t, const Vec& y, int k_max, int n_splits,
                                          uint64_t seed);

} // namespace harmonics

#include "harmonics/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "harmonics/dataset.hpp"
#include "harmonics/kernels.hpp"

namespace harmonics {

using cplx = std::complex<double>;

std::string Spectrum::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "frequency,amplitude_real,amplitude_imag,amplitude_abs\n";
    for (size_t i = 0; i < frequencies.size(); ++i)
        os << frequencies[i] << "," << amplitudes[i].real() << "," << amplitudes[i].imag() << ","
           << std::abs(amplitudes[i]) << "\n";
    return os.str();
}

namespace {

bool is_pow2(size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, forward transform (negative exponent).
std::vector<cplx> fft_pow2(const Vec& y) {
    const size_t n = y.size();
    std::vector<cplx> a(n);
    for (size_t i = 0; i < n; ++i) a[i] = y[i];
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    return a;
}

} // namespace

Spectrum dft(const Vec& y, double dt) {
    require(y.size() >= 2, "dft: need at least 2 samples");
    require(dt > 0.0, "dft: sample spacing must be positive");
    Spectrum s;
    s.amplitudes = is_pow2(y.size()) ? fft_pow2(y) : kernels::dft_direct(y);
    const double n = static_cast<double>(y.size());
    s.frequencies.resize(y.size());
    for (size_t k = 0; k < y.size(); ++k) s.frequencies[k] = static_cast<double>(k) / (n * dt);
    s.folding_rate = 1.0 / dt;
    return s;
}

Spectrum nudft(const Vec& t, const Vec& y, const Vec& omega) {
    require(t.size() == y.size(), "nudft: length mismatch");
    require(t.size() >= 2, "nudft: need at least 2 samples");
    Spectrum s;
    s.amplitudes = kernels::nudft(t, y, omega);
    s.frequencies.resize(omega.size());
    for (size_t k = 0; k < omega.size(); ++k) s.frequencies[k] = omega[k] / (2.0 * M_PI);
    return s;
}

Vec nudft_default_grid(const Vec& t) {
    require(t.size() >= 2, "nudft_default_grid: need at least 2 samples");
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    const double span = *hi - *lo;
    require(span > 0.0, "nudft_default_grid: degenerate t span");
    const size_t n = t.size();
    const double dt = span / static_cast<double>(n - 1);
    Vec omega(n);
    for (size_t k = 0; k < n; ++k)
        omega[k] = 2.0 * M_PI * static_cast<double>(k) / (static_cast<double>(n) * dt);
    return omega;
}

namespace {

// Order by t, evaluate `probe` per point, transform each output dimension.
std::vector<Spectrum> function_spectra(const Dataset& data, int row_width, SpectrumSource source,
                                       const std::function<Vec(const Vec&)>& probe, int out_dim) {
    require(data.size() >= 2, "spectrum: dataset too small");
    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return data.t[a] < data.t[b]; });

    Vec t_sorted(data.size());
    Mat values(data.size(), out_dim);
    for (int i = 0; i < data.size(); ++i) {
        t_sorted[i] = data.t[order[i]];
        values.set_row(i, probe(data.row_for(order[i], row_width)));
    }

    const bool uniform = [&] {
        const double step = (t_sorted.back() - t_sorted.front()) / (data.size() - 1);
        for (int i = 1; i < data.size(); ++i)
            if (std::abs(t_sorted[i] - t_sorted[i - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
                return false;
        return step > 0.0;
    }();

    std::vector<Spectrum> out;
    for (int j = 0; j < out_dim; ++j) {
        Vec col(data.size());
        for (int i = 0; i < data.size(); ++i) col[i] = values(i, j);
        Spectrum s;
        if (uniform) {
            const double step = (t_sorted.back() - t_sorted.front()) / (data.size() - 1);
            s = dft(col, step);
        } else {
            s = nudft(t_sorted, col, nudft_default_grid(t_sorted));
        }
        s.source = source;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

std::vector<Spectrum> reconstruction_spectrum(const VaeModel& model, const Dataset& data) {
    const bool with_coord = model.data_dim == data.input_dim();
    require(with_coord || model.data_dim == data.dim(),
            "reconstruction_spectrum: model input dim matches neither [t, y] nor y rows");
    return function_spectra(
        data, model.data_dim, SpectrumSource::reconstruction,
        [&](const Vec& x) {
            Vec out = reconstruct(model, x);
            // models fed [t, y] also reconstruct the coordinate; drop it
            return with_coord ? Vec(out.begin() + 1, out.end()) : out;
        },
        data.dim());
}

std::vector<Spectrum> encoder_mean_spectrum(const VaeModel& model, const Dataset& data) {
    return function_spectra(data, model.data_dim, SpectrumSource::encoder_mean,
                            [&](const Vec& x) { return forward(model.encoder_mean, x); },
                            model.latent_dim);
}

Spectrum mean_amplitude_profile(const std::vector<Spectrum>& spectra) {
    require(!spectra.empty(), "mean_amplitude_profile: no spectra");
    Spectrum out;
    out.frequencies = spectra.front().frequencies;
    out.source = spectra.front().source;
    out.folding_rate = spectra.front().folding_rate;
    out.amplitudes.assign(out.frequencies.size(), cplx(0.0, 0.0));
    for (const Spectrum& s : spectra) {
        require(s.frequencies.size() == out.frequencies.size(),
                "mean_amplitude_profile: mismatched grids");
        for (size_t k = 0; k < s.amplitudes.size(); ++k)
            out.amplitudes[k] += std::abs(s.amplitudes[k]);
    }
    for (cplx& a : out.amplitudes) a /= static_cast<double>(spectra.size());
    return out;
}

double high_frequency_fraction(const Spectrum& s, double cutoff) {
    require(cutoff >= 0.0, "high_frequency_fraction: negative cutoff");
    double total = 0.0, high = 0.0;
    for (size_t k = 0; k < s.frequencies.size(); ++k) {
        double f = s.frequencies[k];
        if (f == 0.0) continue; // DC excluded
        if (s.folding_rate > 0.0) f = std::min(f, std::abs(s.folding_rate - f));
        const double e = std::norm(s.amplitudes[k]);
        total += e;
        if (f > cutoff) high += e;
    }
    require(total > 0.0, "high_frequency_fraction: zero non-DC energy");
    return high / total;
}

double PolyFit::eval(double t) const {
    const double u = t_hi > t_lo ? 2.0 * (t - t_lo) / (t_hi - t_lo) - 1.0 : 0.0;
    double v = 0.0;
    for (size_t k = coeffs.size(); k-- > 0;) v = v * u + coeffs[k];
    return v;
}

PolyFit polyfit(const Vec& t, const Vec& y, int degree) {
    require(t.size() == y.size() && !t.empty(), "polyfit: shape mismatch");
    require(degree >= 0, "polyfit: negative degree");
    const std::set<double> distinct(t.begin(), t.end());
    require(static_cast<int>(distinct.size()) >= degree + 1,
            "polyfit: degenerate design matrix (too few distinct t)");
    PolyFit fit;
    fit.t_lo = *std::min_element(t.begin(), t.end());
    fit.t_hi = *std::max_element(t.begin(), t.end());
    const int n = static_cast<int>(t.size());
    Eigen::MatrixXd A(n, degree + 1);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double u = fit.t_hi > fit.t_lo ? 2.0 * (t[i] - fit.t_lo) / (fit.t_hi - fit.t_lo) - 1.0
                                             : 0.0;
        double p = 1.0;
        for (int k = 0; k <= degree; ++k) {
            A(i, k) = p;
            p *= u;
        }
        b(i) = y[i];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    fit.coeffs.assign(c.data(), c.data() + degree + 1);
    return fit;
}

std::string DegreeSelectionResult::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "degree,mean_cv_mse\n";
    for (size_t k = 0; k < cv_error_per_degree.size(); ++k)
        os << k << "," << cv_error_per_degree[k] << "\n";
    return os.str();
}

DegreeSelectionResult optimal_poly_degree(const Vec& t, const Vec& y, int k_max, int n_splits,
                                          uint64_t seed) {
    require(t.size() == y.size(), "optimal_poly_degree: shape mismatch");
    require(static_cast<int>(t.size()) >= 4 * (k_max + 1),
            "optimal_poly_degree: too few points for k_max");
    require(n_splits >= 1, "optimal_poly_degree: need at least one split");

    // sort pairs so split assignment is invariant to input permutation
    const int n = static_cast<int>(t.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return t[a] != t[b] ? t[a] < t[b] : y[a] < y[b];
    });
    Vec ts(n), ys(n);
    for (int i = 0; i < n; ++i) {
        ts[i] = t[order[i]];
        ys[i] = y[order[i]];
    }

    DegreeSelectionResult res;
    res.splits = n_splits;
    res.seed = seed;
    res.cv_error_per_degree.assign(k_max + 1, 0.0);

    const int n_test = std::max(1, n / 5); // 80/20
    std::vector<int> idx(n);
    for (int split = 0; split < n_splits; ++split) {
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(derive_seed(seed, split));
        std::shuffle(idx.begin(), idx.end(), rng.gen);
        Vec t_train, y_train;
        for (int i = n_test; i < n; ++i) {
            t_train.push_back(ts[idx[i]]);
            y_train.push_back(ys[idx[i]]);
        }
        for (int k = 0; k <= k_max; ++k) {
            const PolyFit fit = polyfit(t_train, y_train, k);
            double mse = 0.0;
            for (int i = 0; i < n_test; ++i) {
                const double r = fit.eval(ts[idx[i]]) - ys[idx[i]];
                mse += r * r;
            }
            res.cv_error_per_degree[k] += mse / n_test;
        }
    }
    for (double& e : res.cv_error_per_degree) e /= n_splits;

    // Smallest degree whose error ties the minimum. "Tie" allows a parsimony
    // margin of 1% of the degree-0 baseline error, so noiseless data where
    // all degrees >= k_true differ only by rounding selects k_true, and
    // scaling y rescales nothing.
    const double best = *std::min_element(res.cv_error_per_degree.begin(),
                                          res.cv_error_per_degree.end());
    const double margin = 0.01 * res.cv_error_per_degree[0];
    for (int k = 0; k <= k_max; ++k) {
        if (res.cv_error_per_degree[k] <= best + margin) {
            res.k_star = k;
            break;
        }
    }
    return res;
}

} // namespace harmonics

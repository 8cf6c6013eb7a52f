#pragma once

#include <optional>

#include "harmonics/autodiff.hpp"
#include "harmonics/measure.hpp"

namespace harmonics {

/// Encoder mean network, encoder scale source (network or fixed vector),
/// decoder network, Gaussian likelihood scale. Prior is N(0, I).
struct VaeModel {
    DenseNetwork encoder_mean;                      // d -> n
    std::optional<DenseNetwork> encoder_scale_net;  // d -> n, learned-scale mode
    Vec fixed_sigma_phi;                            // length n, fixed-scale mode
    DenseNetwork decoder;                           // n -> d
    double sigma_theta = 0.1;
    int data_dim = 0;
    int latent_dim = 0;

    bool learned_scale() const { return encoder_scale_net.has_value(); }

    static VaeModel make(int data_dim, int latent_dim, const std::vector<int>& hidden,
                         Activation act, double sigma_theta,
                         const std::optional<Vec>& fixed_sigma_phi, uint64_t seed);

    Vec flatten_params() const;
    void unflatten_params(const Vec& p);
};

struct Posterior {
    Vec mu;
    Vec sigma;
};

/// Encoder scale positivity map: sigma = exp(u) clamped to [1e-4, 1e2].
double scale_positivity(double u);

Posterior encode(const VaeModel& model, const Vec& x);

/// z = mu + sigma o epsilon.
Vec reparameterize(const Vec& mu, const Vec& sigma, const Vec& epsilon);

/// KL(N(mu, diag(sigma^2)) || N(0, I)) = 1/2 sum(sigma^2 + mu^2 - 1 - log sigma^2).
double kl_diag_gaussian(const Vec& mu, const Vec& sigma);

struct ElboReport {
    double reconstruction_term = 0.0;
    double kl_term = 0.0;
    double elbo = 0.0;
};

ElboReport elbo(const VaeModel& model, const Vec& x, double beta, const Vec& epsilon);

Vec add_input_noise(const Vec& x, double sigma, Rng& rng);

struct TrainConfig {
    double beta = 1.0;
    double input_noise_sigma = 0.0;
    int epochs = 100;
    int batch_size = 256;
    uint64_t seed = 0;
    double learning_rate = 0.001;
};

struct EpochLog {
    int epoch = 0;
    double elbo = 0.0;
    double reconstruction_term = 0.0;
    double kl_term = 0.0;
};

/// Maximizes the single-sample Monte Carlo ELBO with Adam. Dataset rows are
/// examples (already preprocessed to [-1, 1]). Deterministic given cfg.seed.
/// Throws on a non-finite loss, naming the epoch.
std::vector<EpochLog> train(VaeModel& model, const Mat& dataset, const TrainConfig& cfg);

/// Deterministic reconstruction g_theta(mu_phi(x)).
Vec reconstruct(const VaeModel& model, const Vec& x);

struct BiasVariance {
    double bias_sq = 0.0;
    double variance = 0.0;
    double bias_sq_se = 0.0;
    double variance_se = 0.0;
};

/// Monte Carlo bias-variance split of E_q ||g(z) - x||^2 over z ~ q(z|x).
BiasVariance bias_variance_likelihood(const VaeModel& model, const Vec& x, long n_samples,
                                      uint64_t seed);

struct PerDimVariance {
    Vec mean;
    Vec variance;
    Vec std_error; // of the variance estimate
};

/// Per-output-dimension Monte Carlo Var_q(g_i(z)), z ~ q(z|x).
PerDimVariance decoder_output_variance(const VaeModel& model, const Vec& x, long n_samples,
                                       uint64_t seed);

/// Hermite variance decomposition of each decoder output under the posterior
/// measure N(mu_phi(x), diag sigma_phi(x)^2), derivative-free estimator.
std::vector<VarianceDecomposition> decoder_hermite_variance(const VaeModel& model, const Vec& x,
                                                            int max_degree,
                                                            const EstimatorConfig& cfg);

std::string training_log_csv(const std::vector<EpochLog>& log);

} // namespace harmonics

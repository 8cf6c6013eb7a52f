#include "harmonics/vae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace harmonics {

namespace {
constexpr double kScaleFloor = 1e-4;
constexpr double kScaleCeil = 1e2;
} // namespace

double scale_positivity(double u) {
    return std::clamp(std::exp(u), kScaleFloor, kScaleCeil);
}

VaeModel VaeModel::make(int data_dim, int latent_dim, const std::vector<int>& hidden,
                        Activation act, double sigma_theta,
                        const std::optional<Vec>& fixed_sigma_phi, uint64_t seed) {
    require(sigma_theta > 0.0, "VaeModel: sigma_theta must be positive");
    VaeModel m;
    m.data_dim = data_dim;
    m.latent_dim = latent_dim;
    m.sigma_theta = sigma_theta;
    m.encoder_mean = DenseNetwork::make(data_dim, hidden, latent_dim, act, Activation::identity,
                                        derive_seed(seed, 1));
    if (fixed_sigma_phi) {
        require(static_cast<int>(fixed_sigma_phi->size()) == latent_dim,
                "VaeModel: fixed_sigma_phi length mismatch");
        for (double s : *fixed_sigma_phi) require(s > 0.0, "VaeModel: fixed_sigma_phi must be positive");
        m.fixed_sigma_phi = *fixed_sigma_phi;
    } else {
        m.encoder_scale_net = DenseNetwork::make(data_dim, hidden, latent_dim, act,
                                                 Activation::identity, derive_seed(seed, 2));
    }
    m.decoder = DenseNetwork::make(latent_dim, hidden, data_dim, act, Activation::identity,
                                   derive_seed(seed, 3));
    return m;
}

Vec VaeModel::flatten_params() const {
    Vec p = encoder_mean.flatten_params();
    if (encoder_scale_net) {
        const Vec q = encoder_scale_net->flatten_params();
        p.insert(p.end(), q.begin(), q.end());
    }
    const Vec d = decoder.flatten_params();
    p.insert(p.end(), d.begin(), d.end());
    return p;
}

void VaeModel::unflatten_params(const Vec& p) {
    size_t off = 0;
    auto take = [&](DenseNetwork& net) {
        const size_t n = net.parameter_count();
        net.unflatten_params(Vec(p.begin() + off, p.begin() + off + n));
        off += n;
    };
    take(encoder_mean);
    if (encoder_scale_net) take(*encoder_scale_net);
    take(decoder);
    require(off == p.size(), "VaeModel::unflatten_params: size mismatch");
}

Posterior encode(const VaeModel& model, const Vec& x) {
    Posterior post;
    post.mu = forward(model.encoder_mean, x);
    if (model.learned_scale()) {
        const Vec u = forward(*model.encoder_scale_net, x);
        post.sigma.resize(u.size());
        for (size_t i = 0; i < u.size(); ++i) post.sigma[i] = scale_positivity(u[i]);
    } else {
        post.sigma = model.fixed_sigma_phi;
    }
    return post;
}

Vec reparameterize(const Vec& mu, const Vec& sigma, const Vec& epsilon) {
    require(mu.size() == sigma.size() && mu.size() == epsilon.size(),
            "reparameterize: shape mismatch");
    Vec z(mu.size());
    for (size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + sigma[i] * epsilon[i];
    return z;
}

double kl_diag_gaussian(const Vec& mu, const Vec& sigma) {
    require(mu.size() == sigma.size(), "kl_diag_gaussian: shape mismatch");
    double kl = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) {
        require(sigma[i] > 0.0, "kl_diag_gaussian: sigma must be positive");
        const double s2 = sigma[i] * sigma[i];
        kl += s2 + mu[i] * mu[i] - 1.0 - std::log(s2);
    }
    return 0.5 * kl;
}

namespace {

double reconstruction_log_likelihood(const Vec& x, const Vec& x_hat, double sigma_theta) {
    double sq = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - x_hat[i];
        sq += d * d;
    }
    const double d = static_cast<double>(x.size());
    return -sq / (2.0 * sigma_theta * sigma_theta)
           - 0.5 * d * std::log(2.0 * M_PI * sigma_theta * sigma_theta);
}

} // namespace

ElboReport elbo(const VaeModel& model, const Vec& x, double beta, const Vec& epsilon) {
    require(static_cast<int>(x.size()) == model.data_dim, "elbo: data dimension mismatch");
    const Posterior post = encode(model, x);
    const Vec z = reparameterize(post.mu, post.sigma, epsilon);
    const Vec x_hat = forward(model.decoder, z);
    ElboReport rep;
    rep.reconstruction_term = reconstruction_log_likelihood(x, x_hat, model.sigma_theta);
    rep.kl_term = kl_diag_gaussian(post.mu, post.sigma);
    rep.elbo = rep.reconstruction_term - beta * rep.kl_term;
    require(std::isfinite(rep.elbo), "elbo: non-finite value");
    return rep;
}

Vec add_input_noise(const Vec& x, double sigma, Rng& rng) {
    require(sigma >= 0.0, "add_input_noise: sigma must be non-negative");
    if (sigma == 0.0) return x;
    Vec out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + sigma * rng.gauss();
    return out;
}

std::vector<EpochLog> train(VaeModel& model, const Mat& dataset, const TrainConfig& cfg) {
    require(dataset.rows >= 1, "train: empty dataset");
    require(dataset.cols == model.data_dim, "train: data dimension mismatch");
    require(cfg.epochs >= 1 && cfg.batch_size >= 1, "train: bad epochs/batch size");

    const int n_data = dataset.rows;
    const int d = model.data_dim;
    const int n_lat = model.latent_dim;
    const bool learned = model.learned_scale();
    const double inv_st2 = 1.0 / (model.sigma_theta * model.sigma_theta);

    Vec params = model.flatten_params();
    AdamState adam(params.size(), cfg.learning_rate);

    std::vector<EpochLog> log;
    log.reserve(cfg.epochs);

    std::vector<int> order(n_data);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0xA1, epoch));
        Rng noise_rng(derive_seed(cfg.seed, 0xB2, epoch));
        Rng eps_rng(derive_seed(cfg.seed, 0xC3, epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng.gen);

        double ep_elbo = 0.0, ep_recon = 0.0, ep_kl = 0.0;
        int n_batches = 0;

        for (int start = 0; start < n_data; start += cfg.batch_size) {
            const int bsz = std::min(cfg.batch_size, n_data - start);
            Mat xb(bsz, d);
            for (int b = 0; b < bsz; ++b) {
                Vec x = dataset.row_vec(order[start + b]);
                if (cfg.input_noise_sigma > 0.0)
                    x = add_input_noise(x, cfg.input_noise_sigma, noise_rng);
                xb.set_row(b, x);
            }
            Mat eps(bsz, n_lat);
            for (double& e : eps.a) e = eps_rng.gauss();

            GradientTape tape_mu, tape_scale, tape_dec;
            const Mat mu = forward(model.encoder_mean, xb, tape_mu);
            Mat sigma(bsz, n_lat);
            Mat scale_pre; // raw encoder_scale outputs, for the clamp mask
            if (learned) {
                scale_pre = forward(*model.encoder_scale_net, xb, tape_scale);
                for (size_t i = 0; i < sigma.a.size(); ++i)
                    sigma.a[i] = scale_positivity(scale_pre.a[i]);
            } else {
                for (int b = 0; b < bsz; ++b) sigma.set_row(b, model.fixed_sigma_phi);
            }
            Mat z(bsz, n_lat);
            for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = mu.a[i] + sigma.a[i] * eps.a[i];
            const Mat x_hat = forward(model.decoder, z, tape_dec);

            // batch-mean negative ELBO and its seed gradients
            const double inv_b = 1.0 / static_cast<double>(bsz);
            double batch_recon = 0.0, batch_kl = 0.0;
            Mat seed_dec(bsz, d);
            for (int b = 0; b < bsz; ++b) {
                double sq = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double diff = x_hat(b, j) - xb(b, j);
                    sq += diff * diff;
                    seed_dec(b, j) = inv_b * inv_st2 * diff;
                }
                batch_recon += -0.5 * sq * inv_st2
                               - 0.5 * d * std::log(2.0 * M_PI / inv_st2);
                batch_kl += kl_diag_gaussian(mu.row_vec(b), sigma.row_vec(b));
            }
            batch_recon *= inv_b;
            batch_kl *= inv_b;
            const double batch_elbo = batch_recon - cfg.beta * batch_kl;
            if (!std::isfinite(batch_elbo))
                throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));

            NetGrads g_dec = backward(tape_dec, seed_dec);
            const Mat& dz = g_dec.d_input; // B x n_lat

            Mat seed_mu(bsz, n_lat);
            for (size_t i = 0; i < seed_mu.a.size(); ++i)
                seed_mu.a[i] = dz.a[i] + cfg.beta * inv_b * mu.a[i]; // dKL/dmu = mu
            NetGrads g_mu = backward(tape_mu, seed_mu);

            Vec grads = g_mu.flatten();
            if (learned) {
                Mat seed_scale(bsz, n_lat);
                for (size_t i = 0; i < seed_scale.a.size(); ++i) {
                    const double s = sigma.a[i];
                    const double dL_ds = dz.a[i] * eps.a[i]
                                         + cfg.beta * inv_b * (s - 1.0 / s); // dKL/dsigma
                    const bool clamped = s <= kScaleFloor || s >= kScaleCeil;
                    seed_scale.a[i] = clamped ? 0.0 : dL_ds * s; // d/du exp(u) = sigma
                }
                NetGrads g_scale = backward(tape_scale, seed_scale);
                const Vec gs = g_scale.flatten();
                grads.insert(grads.end(), gs.begin(), gs.end());
            }
            const Vec gd = g_dec.flatten();
            grads.insert(grads.end(), gd.begin(), gd.end());

            if (adam_step(params, grads, adam)) model.unflatten_params(params);
            // non-finite gradients: step skipped, reported via the epoch log only

            ep_elbo += batch_elbo;
            ep_recon += batch_recon;
            ep_kl += batch_kl;
            ++n_batches;
        }
        log.push_back({epoch, ep_elbo / n_batches, ep_recon / n_batches, ep_kl / n_batches});
    }
    return log;
}

Vec reconstruct(const VaeModel& model, const Vec& x) {
    return forward(model.decoder, forward(model.encoder_mean, x));
}

namespace {

// Decoder outputs over n_samples posterior draws, one row per draw.
Mat posterior_decoder_samples(const VaeModel& model, const Vec& x, long n_samples, uint64_t seed) {
    const Posterior post = encode(model, x);
    Rng rng(seed);
    Mat z(static_cast<int>(n_samples), model.latent_dim);
    for (int s = 0; s < z.rows; ++s)
        for (int i = 0; i < model.latent_dim; ++i)
            z(s, i) = post.mu[i] + post.sigma[i] * rng.gauss();
    GradientTape tape;
    return forward(model.decoder, z, tape);
}

} // namespace

BiasVariance bias_variance_likelihood(const VaeModel& model, const Vec& x, long n_samples,
                                      uint64_t seed) {
    require(n_samples >= 2, "bias_variance_likelihood: need at least 2 samples");
    const Mat g = posterior_decoder_samples(model, x, n_samples, seed);
    const int d = g.cols;
    const double n = static_cast<double>(g.rows);
    Vec mean(d, 0.0);
    for (int s = 0; s < g.rows; ++s)
        for (int j = 0; j < d; ++j) mean[j] += g(s, j);
    for (double& m : mean) m /= n;

    BiasVariance bv;
    for (int j = 0; j < d; ++j) {
        const double diff = mean[j] - x[j];
        bv.bias_sq += diff * diff;
    }
    // variance term plus the per-sample statistics needed for both SEs
    Vec sq_dist(g.rows);
    Vec bias_proj(g.rows);
    for (int s = 0; s < g.rows; ++s) {
        double sq = 0.0, proj = 0.0;
        for (int j = 0; j < d; ++j) {
            const double c = g(s, j) - mean[j];
            sq += c * c;
            proj += 2.0 * (mean[j] - x[j]) * c; // delta-method direction for bias_sq
        }
        sq_dist[s] = sq;
        bias_proj[s] = proj;
    }
    double v = 0.0;
    for (double s : sq_dist) v += s;
    bv.variance = v / (n - 1.0);

    auto sd = [&](const Vec& vals, double mean_val) {
        double ss = 0.0;
        for (double s : vals) ss += (s - mean_val) * (s - mean_val);
        return std::sqrt(ss / (n - 1.0));
    };
    bv.variance_se = sd(sq_dist, v / n) / std::sqrt(n);
    bv.bias_sq_se = sd(bias_proj, 0.0) / std::sqrt(n);
    return bv;
}

PerDimVariance decoder_output_variance(const VaeModel& model, const Vec& x, long n_samples,
                                       uint64_t seed) {
    require(n_samples >= 2, "decoder_output_variance: need at least 2 samples");
    const Mat g = posterior_decoder_samples(model, x, n_samples, seed);
    const int d = g.cols;
    const double n = static_cast<double>(g.rows);
    PerDimVariance out;
    out.mean.assign(d, 0.0);
    out.variance.assign(d, 0.0);
    out.std_error.assign(d, 0.0);
    for (int s = 0; s < g.rows; ++s)
        for (int j = 0; j < d; ++j) out.mean[j] += g(s, j);
    for (double& m : out.mean) m /= n;
    Vec m2(d, 0.0), m4(d, 0.0);
    for (int s = 0; s < g.rows; ++s)
        for (int j = 0; j < d; ++j) {
            const double c = g(s, j) - out.mean[j];
            m2[j] += c * c;
            m4[j] += c * c * c * c;
        }
    for (int j = 0; j < d; ++j) {
        out.variance[j] = m2[j] / (n - 1.0);
        const double central4 = m4[j] / n;
        const double var_of_var = std::max(0.0, central4 - out.variance[j] * out.variance[j]) / n;
        out.std_error[j] = std::sqrt(var_of_var);
    }
    return out;
}

std::vector<VarianceDecomposition> decoder_hermite_variance(const VaeModel& model, const Vec& x,
                                                            int max_degree,
                                                            const EstimatorConfig& cfg) {
    const Posterior post = encode(model, x);
    // enumeration budget: C(n + degree, degree) <= 1e4
    double count = 1.0;
    for (int i = 1; i <= max_degree; ++i)
        count *= static_cast<double>(model.latent_dim + i) / static_cast<double>(i);
    require(count <= 1e4, "decoder_hermite_variance: enumeration budget exceeded");
    const GaussianMeasure m = GaussianMeasure::diagonal(post.mu, post.sigma);
    return variance_decomposition_multi(
        [&model](const Vec& z) { return forward(model.decoder, z); }, model.data_dim, m,
        max_degree, cfg);
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
    std::ostringstream os;
    os.precision(12);
    os << "epoch,elbo,reconstruction_term,kl_term\n";
    for (const EpochLog& e : log)
        os << e.epoch << "," << e.elbo << "," << e.reconstruction_term << "," << e.kl_term << "\n";
    return os.str();
}

} // namespace harmonics

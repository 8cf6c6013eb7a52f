#include "harmonics/attack.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace harmonics {

namespace {

double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Euclidean-ball projection; identity when already inside.
void project_ball(Vec& delta, double radius) {
    const double n = norm2(delta);
    if (n <= radius || n == 0.0) return;
    const double f = radius / n;
    for (double& d : delta) d *= f;
}

// Stochastic surrogate || g(mu(u) + eta o sigma(u)) - target ||, u = x + delta,
// and its gradient w.r.t. delta.
double surrogate_objective(const VaeModel& model, const Vec& x, const Vec& delta, const Vec& eta,
                           const Vec& target, Vec* grad_out) {
    Vec u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = x[i] + delta[i];

    GradientTape tape_mu, tape_scale, tape_dec;
    const Vec mu = forward(model.encoder_mean, u, tape_mu);
    Vec sigma(mu.size());
    Vec scale_pre;
    if (model.learned_scale()) {
        scale_pre = forward(*model.encoder_scale_net, u, tape_scale);
        for (size_t i = 0; i < sigma.size(); ++i) sigma[i] = scale_positivity(scale_pre[i]);
    } else {
        sigma = model.fixed_sigma_phi;
    }
    Vec z(mu.size());
    for (size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + eta[i] * sigma[i];
    const Vec out = forward(model.decoder, z, tape_dec);

    Vec r(out.size());
    double dist = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
        r[i] = out[i] - target[i];
        dist += r[i] * r[i];
    }
    dist = std::sqrt(dist);
    if (!grad_out) return dist;

    grad_out->assign(x.size(), 0.0);
    if (dist == 0.0) return dist;
    Mat seed_dec(1, static_cast<int>(out.size()));
    for (size_t i = 0; i < out.size(); ++i) seed_dec(0, i) = r[i] / dist;
    NetGrads g_dec = backward(tape_dec, seed_dec);
    const Vec dz = g_dec.d_input.row_vec(0);

    Mat seed_mu(1, static_cast<int>(mu.size()));
    for (size_t i = 0; i < mu.size(); ++i) seed_mu(0, i) = dz[i];
    Vec du = backward(tape_mu, seed_mu).d_input.row_vec(0);
    if (model.learned_scale()) {
        Mat seed_scale(1, static_cast<int>(mu.size()));
        for (size_t i = 0; i < mu.size(); ++i) {
            const double s = sigma[i];
            const bool clamped = s <= 1e-4 || s >= 1e2;
            seed_scale(0, i) = clamped ? 0.0 : dz[i] * eta[i] * s;
        }
        const Vec du_s = backward(tape_scale, seed_scale).d_input.row_vec(0);
        for (size_t i = 0; i < du.size(); ++i) du[i] += du_s[i];
    }
    *grad_out = std::move(du);
    return dist;
}

double displacement(const VaeModel& model, const Vec& x, const Vec& delta, const Vec& base) {
    Vec u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = x[i] + delta[i];
    const Vec rec = reconstruct(model, u);
    double s = 0.0;
    for (size_t i = 0; i < rec.size(); ++i) s += (rec[i] - base[i]) * (rec[i] - base[i]);
    return std::sqrt(s);
}

} // namespace

AttackResult maximum_damage_attack(const VaeModel& model, const Vec& x, const AttackConfig& cfg,
                                   const std::vector<Vec>& warm_starts) {
    require(cfg.max_norm >= 0.0, "attack: max_norm must be non-negative");
    require(cfg.steps >= 1 && cfg.restarts >= 1, "attack: bad steps/restarts");
    require(static_cast<int>(x.size()) == model.data_dim, "attack: dimension mismatch");

    AttackResult best;
    best.delta.assign(x.size(), 0.0);
    if (cfg.max_norm == 0.0) return best;

    const double step = cfg.step_size > 0.0 ? cfg.step_size : cfg.max_norm / 20.0;
    const Vec base = reconstruct(model, x);
    const Vec target = base; // attack displaces the clean mean reconstruction

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Rng rng(derive_seed(cfg.seed, restart));
        Vec eta = rng.gauss_vec(model.latent_dim); // frozen per restart

        Vec delta(x.size(), 0.0);
        if (restart > 0) {
            delta = rng.gauss_vec(static_cast<int>(x.size()));
            const double r = cfg.max_norm * std::pow(rng.uniform(), 1.0 / x.size());
            const double n = norm2(delta);
            for (double& d : delta) d *= r / n;
        }

        // best-of over the iterate path, by deterministic displacement
        Vec best_delta = delta;
        double best_disp = displacement(model, x, delta, base);
        bool aborted = false;
        for (int it = 0; it < cfg.steps; ++it) {
            Vec grad;
            surrogate_objective(model, x, delta, eta, target, &grad);
            const double gn = norm2(grad);
            for (double g : grad)
                if (!std::isfinite(g)) {
                    aborted = true; // this restart is abandoned
                    break;
                }
            if (aborted || gn == 0.0) break;
            for (size_t i = 0; i < delta.size(); ++i) delta[i] += step * grad[i] / gn;
            project_ball(delta, cfg.max_norm);
            const double disp = displacement(model, x, delta, base);
            if (disp > best_disp) {
                best_disp = disp;
                best_delta = delta;
            }
        }
        if (best_disp > best.objective) {
            best.objective = best_disp;
            best.delta = best_delta;
        }
    }

    for (const Vec& warm : warm_starts) {
        Vec delta = warm;
        project_ball(delta, cfg.max_norm);
        const double disp = displacement(model, x, delta, base);
        if (disp > best.objective) {
            best.objective = disp;
            best.delta = delta;
        }
    }

    best.norm_used = norm2(best.delta);
    best.degradation = likelihood_degradation(model, x, best.delta);
    return best;
}

double likelihood_degradation(const VaeModel& model, const Vec& x, const Vec& delta) {
    require(x.size() == delta.size(), "likelihood_degradation: shape mismatch");
    Vec u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = x[i] + delta[i];
    const Vec z = forward(model.encoder_mean, x);
    const Vec z_star = forward(model.encoder_mean, u);

    auto log_lik = [&](const Vec& latent) {
        const Vec rec = forward(model.decoder, latent);
        double sq = 0.0;
        for (size_t i = 0; i < x.size(); ++i) sq += (x[i] - rec[i]) * (x[i] - rec[i]);
        const double st2 = model.sigma_theta * model.sigma_theta;
        return -sq / (2.0 * st2)
               - 0.5 * static_cast<double>(x.size()) * std::log(2.0 * M_PI * st2);
    };
    const double base = log_lik(z);
    require(std::abs(base) >= 1e-12, "likelihood_degradation: degenerate baseline likelihood");
    return std::abs(log_lik(z_star) - base) / std::abs(base);
}

std::vector<RobustnessPoint> robustness_curve(const VaeModel& model,
                                              const std::vector<Vec>& points, const Vec& c_grid,
                                              const AttackConfig& cfg) {
    require(!points.empty(), "robustness_curve: empty point set");
    std::vector<RobustnessPoint> curve;
    Vec grid = c_grid;
    std::sort(grid.begin(), grid.end()); // warm-start from smaller budgets

    const int np = static_cast<int>(points.size());
    std::vector<Vec> prev_delta(np);
    for (double c : grid) {
        Vec degr(np, 0.0);
#pragma omp parallel for schedule(dynamic)
        for (int p = 0; p < np; ++p) {
            AttackConfig local = cfg;
            local.max_norm = c;
            local.seed = derive_seed(cfg.seed, static_cast<uint64_t>(p));
            std::vector<Vec> warm;
            if (!prev_delta[p].empty()) warm.push_back(prev_delta[p]);
            const AttackResult res = maximum_damage_attack(model, points[p], local, warm);
            prev_delta[p] = res.delta;
            degr[p] = res.degradation;
        }
        RobustnessPoint pt;
        pt.max_norm = c;
        pt.n_points = np;
        for (double d : degr) pt.mean_degradation += d;
        pt.mean_degradation /= np;
        for (double d : degr)
            pt.var_degradation += (d - pt.mean_degradation) * (d - pt.mean_degradation);
        pt.var_degradation /= np;
        curve.push_back(pt);
    }
    return curve;
}

std::string robustness_csv(const std::vector<RobustnessPoint>& curve, double sigma_phi,
                           double input_noise_sigma) {
    std::ostringstream os;
    os.precision(12);
    os << "C,mean_degradation,var_degradation,n_points,sigma_phi,input_noise_sigma\n";
    for (const RobustnessPoint& p : curve)
        os << p.max_norm << "," << p.mean_degradation << "," << p.var_degradation << ","
           << p.n_points << "," << sigma_phi << "," << input_noise_sigma << "\n";
    return os.str();
}

} // namespace harmonics

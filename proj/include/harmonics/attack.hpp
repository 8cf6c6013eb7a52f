#pragma once

#include "harmonics/vae.hpp"

namespace harmonics {

struct AttackConfig {
    double max_norm = 1.0; // C, Euclidean budget for the perturbation
    int steps = 100;
    double step_size = 0.0; // 0 means C / 20
    int restarts = 5;       // first restart starts at delta = 0, rest random in the ball
    uint64_t seed = 0;
};

struct AttackResult {
    Vec delta;
    double objective = 0.0;   // || g(mu(x + delta)) - g(mu(x)) ||_2, reconstruction displacement
    double degradation = 0.0; // relative log-likelihood degradation at delta
    double norm_used = 0.0;
};

/// Projected gradient ascent on the maximum-damage objective
/// || g(mu(x+d) + eta o sigma(x+d)) - g(mu(x)) ||_2 with one frozen eta draw
/// per restart; Euclidean-ball projection after every step; the restart with
/// the largest reconstruction displacement wins. Optional warm starts are
/// injected as extra candidate iterates (for nested-budget sweeps).
AttackResult maximum_damage_attack(const VaeModel& model, const Vec& x, const AttackConfig& cfg,
                                   const std::vector<Vec>& warm_starts = {});

/// |log p(x|z*) - log p(x|z)| / |log p(x|z)| with z = mu(x), z* = mu(x+delta).
/// Throws when the baseline |log p(x|z)| is below 1e-12.
double likelihood_degradation(const VaeModel& model, const Vec& x, const Vec& delta);

struct RobustnessPoint {
    double max_norm = 0.0;
    double mean_degradation = 0.0;
    double var_degradation = 0.0;
    int n_points = 0;
};

/// Attacks every point at every budget in C_grid (ascending, warm-started
/// from the smaller budget's solution); aggregates degradation moments.
std::vector<RobustnessPoint> robustness_curve(const VaeModel& model,
                                              const std::vector<Vec>& points, const Vec& c_grid,
                                              const AttackConfig& cfg);

std::string robustness_csv(const std::vector<RobustnessPoint>& curve, double sigma_phi,
                           double input_noise_sigma);

} // namespace harmonics

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "harmonics/attack.hpp"
#include "harmonics/dataset.hpp"
#include "harmonics/vae.hpp"

namespace harmonics {

struct DatasetSpec {
    std::string kind = "sinc"; // or "multisine", or "file"
    int size = 1024;
    uint64_t seed = 0;
    bool sinc_normalized = true;
    std::string path; // kind == "file"
};

struct ModelSpec {
    std::vector<int> hidden = {256, 256, 256};
    std::string activation = "sigmoid";
    int latent_dim = 1;
    double sigma_theta = 0.1;
    // "pair": the model autoencodes [t, y] rows, so reconstructions trace a
    // curve over t. "targets": it autoencodes the bare y rows, so the encoder
    // is a function of the signal values alone.
    std::string inputs = "pair";
};

struct AttackSpec {
    bool enabled = false;
    Vec c_grid = {0.5, 1.0, 2.0};
    int steps = 100;
    int restarts = 5;
    int points = 25;
    uint64_t seed = 0;
};

struct AnalysisSpec {
    bool spectra = true;
    double spectral_cutoff_fraction = 0.25; // of the Nyquist frequency
    bool degree_selection = true;
    int k_max = 15;
    int cv_splits = 10;
    uint64_t cv_seed = 0;
    bool lipschitz = true;
    long lipschitz_samples = 1000;
    long poincare_samples = 2000;
    int hermite_max_degree = 0; // 0 disables the decoder Hermite profile
    AttackSpec attack;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    ModelSpec model;
    TrainConfig train;
    std::optional<double> fixed_sigma_phi; // absent = learned encoder scale
    AnalysisSpec analysis;
    std::string out_dir;

    static ExperimentConfig from_json_text(const std::string& text); // strict keys
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_text() const;
    uint64_t config_hash() const;
};

/// Scalar summary of one experiment, echoed into the manifest.
struct ExperimentSummary {
    double final_elbo = 0.0;
    double hf_fraction_reconstruction = -1.0;
    double hf_fraction_encoder = -1.0;
    int k_star = -1;
    double decoder_upper_bound = -1.0;
    double decoder_lower_bound = -1.0;
    double encoder_upper_bound = -1.0;
    double encoder_lower_bound = -1.0;
    double poincare_slack_min = 0.0;
    long poincare_violations = -1;
    Vec attack_mean_degradation; // aligned with the attack c_grid
};

struct ExperimentResult {
    std::filesystem::path dir;
    ExperimentSummary summary;
    bool ok = false;
    std::string failed_stage; // empty when ok
};

/// Full pipeline: dataset -> train -> checkpoint/logs -> analyses -> manifest.
/// A stage failure is recorded in the manifest; earlier outputs are retained.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SweepSpec {
    ExperimentConfig base;
    std::string parameter; // fixed_sigma_phi | input_noise_sigma | beta
    Vec values;
    std::vector<uint64_t> seeds;
    std::string out_dir;

    static SweepSpec from_json_file(const std::string& path);
};

/// Runs every (value, seed) pair under out_dir and writes a combined
/// trend.csv; returns per-run results in (value-major, seed-minor) order.
std::vector<ExperimentResult> run_sweep(const SweepSpec& spec);

/// Aggregates a sweep's trend.csv into per-value medians (report.csv).
void write_sweep_report(const std::filesystem::path& sweep_dir);

} // namespace harmonics

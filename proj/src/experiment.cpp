#include "harmonics/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "harmonics/checkpoint.hpp"
#include "harmonics/lipschitz.hpp"
#include "harmonics/spectral.hpp"

namespace harmonics {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Unknown keys are config errors (anti-typo).
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    require(j.is_object(), "config: '" + where + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

DatasetSpec parse_dataset(const json& j) {
    check_keys(j, {"kind", "size", "seed", "sinc_normalized", "path"}, "dataset");
    DatasetSpec d;
    get_if(j, "kind", d.kind);
    get_if(j, "size", d.size);
    get_if(j, "seed", d.seed);
    get_if(j, "sinc_normalized", d.sinc_normalized);
    get_if(j, "path", d.path);
    return d;
}

ModelSpec parse_model(const json& j) {
    check_keys(j, {"hidden", "activation", "latent_dim", "sigma_theta", "inputs"}, "model");
    ModelSpec m;
    get_if(j, "hidden", m.hidden);
    get_if(j, "activation", m.activation);
    get_if(j, "latent_dim", m.latent_dim);
    get_if(j, "sigma_theta", m.sigma_theta);
    get_if(j, "inputs", m.inputs);
    require(m.inputs == "pair" || m.inputs == "targets",
            "config: model.inputs must be 'pair' or 'targets'");
    return m;
}

AttackSpec parse_attack(const json& j) {
    check_keys(j, {"c_grid", "steps", "restarts", "points", "seed"}, "analysis.attack");
    AttackSpec a;
    a.enabled = true;
    get_if(j, "c_grid", a.c_grid);
    get_if(j, "steps", a.steps);
    get_if(j, "restarts", a.restarts);
    get_if(j, "points", a.points);
    get_if(j, "seed", a.seed);
    return a;
}

AnalysisSpec parse_analysis(const json& j) {
    check_keys(j,
               {"spectra", "spectral_cutoff_fraction", "degree_selection", "k_max", "cv_splits",
                "cv_seed", "lipschitz", "lipschitz_samples", "poincare_samples",
                "hermite_max_degree", "attack"},
               "analysis");
    AnalysisSpec a;
    get_if(j, "spectra", a.spectra);
    get_if(j, "spectral_cutoff_fraction", a.spectral_cutoff_fraction);
    get_if(j, "degree_selection", a.degree_selection);
    get_if(j, "k_max", a.k_max);
    get_if(j, "cv_splits", a.cv_splits);
    get_if(j, "cv_seed", a.cv_seed);
    get_if(j, "lipschitz", a.lipschitz);
    get_if(j, "lipschitz_samples", a.lipschitz_samples);
    get_if(j, "poincare_samples", a.poincare_samples);
    get_if(j, "hermite_max_degree", a.hermite_max_degree);
    if (j.contains("attack")) a.attack = parse_attack(j.at("attack"));
    return a;
}

TrainConfig parse_train(const json& j, std::optional<double>& fixed_sigma_phi) {
    check_keys(j,
               {"beta", "input_noise_sigma", "epochs", "batch_size", "seed", "learning_rate",
                "fixed_sigma_phi"},
               "train");
    TrainConfig t;
    get_if(j, "beta", t.beta);
    get_if(j, "input_noise_sigma", t.input_noise_sigma);
    get_if(j, "epochs", t.epochs);
    get_if(j, "batch_size", t.batch_size);
    get_if(j, "seed", t.seed);
    get_if(j, "learning_rate", t.learning_rate);
    if (j.contains("fixed_sigma_phi")) fixed_sigma_phi = j.at("fixed_sigma_phi").get<double>();
    return t;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(j, {"dataset", "model", "train", "analysis", "out_dir"}, "config root");
    ExperimentConfig cfg;
    if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));
    if (j.contains("model")) cfg.model = parse_model(j.at("model"));
    if (j.contains("train")) cfg.train = parse_train(j.at("train"), cfg.fixed_sigma_phi);
    if (j.contains("analysis")) cfg.analysis = parse_analysis(j.at("analysis"));
    get_if(j, "out_dir", cfg.out_dir);
    require(!cfg.out_dir.empty(), "config: out_dir is required");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "config: cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return from_json_text(os.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["dataset"] = {{"kind", dataset.kind},
                    {"size", dataset.size},
                    {"seed", dataset.seed},
                    {"sinc_normalized", dataset.sinc_normalized},
                    {"path", dataset.path}};
    j["model"] = {{"hidden", model.hidden},
                  {"activation", model.activation},
                  {"latent_dim", model.latent_dim},
                  {"sigma_theta", model.sigma_theta},
                  {"inputs", model.inputs}};
    j["train"] = {{"beta", train.beta},
                  {"input_noise_sigma", train.input_noise_sigma},
                  {"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"seed", train.seed},
                  {"learning_rate", train.learning_rate}};
    if (fixed_sigma_phi) j["train"]["fixed_sigma_phi"] = *fixed_sigma_phi;
    j["analysis"] = {{"spectra", analysis.spectra},
                     {"spectral_cutoff_fraction", analysis.spectral_cutoff_fraction},
                     {"degree_selection", analysis.degree_selection},
                     {"k_max", analysis.k_max},
                     {"cv_splits", analysis.cv_splits},
                     {"cv_seed", analysis.cv_seed},
                     {"lipschitz", analysis.lipschitz},
                     {"lipschitz_samples", analysis.lipschitz_samples},
                     {"poincare_samples", analysis.poincare_samples},
                     {"hermite_max_degree", analysis.hermite_max_degree}};
    if (analysis.attack.enabled)
        j["analysis"]["attack"] = {{"c_grid", analysis.attack.c_grid},
                                   {"steps", analysis.attack.steps},
                                   {"restarts", analysis.attack.restarts},
                                   {"points", analysis.attack.points},
                                   {"seed", analysis.attack.seed}};
    j["out_dir"] = out_dir;
    return j.dump(2);
}

uint64_t ExperimentConfig::config_hash() const {
    // stable because nlohmann::json keeps keys sorted
    const std::string s = to_json_text();
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p);
    require(f.good(), "cannot write " + p.string());
    f << content;
}

std::string hex64(uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Dataset make_dataset(const DatasetSpec& spec) {
    if (spec.kind == "file") return Dataset::load(spec.path);
    return gen_dataset(spec.kind, spec.size, spec.sinc_normalized);
}

double quarter_cutoff(const Spectrum& s, double fraction) {
    require(s.folding_rate > 0.0, "spectral cutoff needs a sampling rate");
    return fraction * s.folding_rate / 2.0; // fraction of the Nyquist frequency
}

std::vector<Vec> subsample_points(const Dataset& data, int count, int width) {
    std::vector<Vec> pts;
    const int n = std::min(count, data.size());
    for (int i = 0; i < n; ++i) {
        const int idx = static_cast<int>(static_cast<long>(i) * data.size() / n);
        pts.push_back(data.row_for(idx, width));
    }
    return pts;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult result;
    result.dir = fs::path(cfg.out_dir);
    fs::create_directories(result.dir);

    json manifest;
    manifest["config_hash"] = hex64(cfg.config_hash());
    manifest["stages"] = json::array();
    manifest["outputs"] = json::array();

    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(result.dir / name, content);
        manifest["outputs"].push_back(name);
    };
    auto flush_manifest = [&] { write_file(result.dir / "manifest.json", manifest.dump(2)); };
    auto stage_ok = [&](const std::string& name) {
        manifest["stages"].push_back({{"name", name}, {"status", "ok"}});
        flush_manifest();
    };
    auto stage_failed = [&](const std::string& name, const std::string& err) {
        manifest["stages"].push_back({{"name", name}, {"status", "failed"}, {"error", err}});
        result.failed_stage = name;
        flush_manifest();
    };

    emit("config.json", cfg.to_json_text());

    Dataset data;
    VaeModel model;
    ExperimentSummary& summary = result.summary;
    std::string stage = "dataset";
    try {
        data = make_dataset(cfg.dataset);
        emit("dataset.csv", data.to_csv());
        stage_ok(stage);

        stage = "train";
        std::optional<Vec> fixed;
        if (cfg.fixed_sigma_phi) fixed = Vec(cfg.model.latent_dim, *cfg.fixed_sigma_phi);
        const int in_dim = cfg.model.inputs == "pair" ? data.input_dim() : data.dim();
        model = VaeModel::make(in_dim, cfg.model.latent_dim, cfg.model.hidden,
                               activation_from_string(cfg.model.activation),
                               cfg.model.sigma_theta, fixed, cfg.train.seed);
        const std::vector<EpochLog> log = train(model, data.rows_for(in_dim), cfg.train);
        summary.final_elbo = log.back().elbo;
        emit("training_log.csv", training_log_csv(log));
        std::map<std::string, std::string> meta = {
            {"beta", std::to_string(cfg.train.beta)},
            {"input_noise_sigma", std::to_string(cfg.train.input_noise_sigma)},
            {"epochs", std::to_string(cfg.train.epochs)},
            {"batch_size", std::to_string(cfg.train.batch_size)},
            {"seed", std::to_string(cfg.train.seed)},
            {"learning_rate", std::to_string(cfg.train.learning_rate)},
        };
        checkpoint::save_model(model, (result.dir / "checkpoint.txt").string(), meta);
        manifest["outputs"].push_back("checkpoint.txt");
        stage_ok(stage);

        if (cfg.analysis.spectra) {
            stage = "spectra";
            const auto recon = reconstruction_spectrum(model, data);
            const auto enc = encoder_mean_spectrum(model, data);
            for (size_t jdx = 0; jdx < recon.size(); ++jdx)
                emit("spectrum_reconstruction_" + std::to_string(jdx) + ".csv",
                     recon[jdx].to_csv());
            for (size_t jdx = 0; jdx < enc.size(); ++jdx)
                emit("spectrum_encoder_" + std::to_string(jdx) + ".csv", enc[jdx].to_csv());
            const Spectrum recon_profile = mean_amplitude_profile(recon);
            const Spectrum enc_profile = mean_amplitude_profile(enc);
            summary.hf_fraction_reconstruction = high_frequency_fraction(
                recon_profile, quarter_cutoff(recon_profile, cfg.analysis.spectral_cutoff_fraction));
            summary.hf_fraction_encoder = high_frequency_fraction(
                enc_profile, quarter_cutoff(enc_profile, cfg.analysis.spectral_cutoff_fraction));
            stage_ok(stage);
        }

        if (cfg.analysis.degree_selection) {
            stage = "degree_selection";
            Vec recon0(data.size());
            const int y0 = model.data_dim == data.input_dim() ? 1 : 0; // first target channel
            for (int i = 0; i < data.size(); ++i)
                recon0[i] = reconstruct(model, data.row_for(i, model.data_dim))[y0];
            const DegreeSelectionResult deg = optimal_poly_degree(
                data.t, recon0, cfg.analysis.k_max, cfg.analysis.cv_splits, cfg.analysis.cv_seed);
            summary.k_star = deg.k_star;
            emit("degree_selection.csv", deg.to_csv());
            stage_ok(stage);
        }

        if (cfg.analysis.lipschitz) {
            stage = "lipschitz";
            // encoder: gradient sampling over the data distribution
            std::vector<Vec> enc_pts = subsample_points(
                data, static_cast<int>(cfg.analysis.lipschitz_samples), model.data_dim);
            summary.encoder_upper_bound = lipschitz_upper_bound(model.encoder_mean);
            summary.encoder_lower_bound = empirical_lipschitz(model.encoder_mean, enc_pts);
            // decoder: gradient sampling over the aggregate posterior
            Rng zrng(derive_seed(cfg.train.seed, 0xD4));
            std::vector<Vec> dec_pts;
            for (long i = 0; i < cfg.analysis.lipschitz_samples; ++i) {
                const Posterior post = encode(model, data.row_for(
                    static_cast<int>(i % data.size()), model.data_dim));
                dec_pts.push_back(reparameterize(post.mu, post.sigma,
                                                 zrng.gauss_vec(model.latent_dim)));
            }
            summary.decoder_upper_bound = lipschitz_upper_bound(model.decoder);
            summary.decoder_lower_bound = empirical_lipschitz(model.decoder, dec_pts);

            // Poincare certification: Var_q(g_i) vs U^2 ||sigma_phi(x)||_2^2
            summary.poincare_violations = 0;
            double slack_min = 0.0;
            double var_max = 0.0;
            bool first = true;
            for (int i = 0; i < data.size(); ++i) {
                const Vec x = data.row_for(i, model.data_dim);
                const Posterior post = encode(model, x);
                const GaussianMeasure q = GaussianMeasure::diagonal(post.mu, post.sigma);
                const PerDimVariance pv = decoder_output_variance(
                    model, x, cfg.analysis.poincare_samples, derive_seed(cfg.train.seed, 0xE5, i));
                for (int jdx = 0; jdx < model.data_dim; ++jdx) {
                    const PoincareCheck chk = poincare_check(
                        pv.variance[jdx], summary.decoder_upper_bound, q, pv.std_error[jdx]);
                    if (!chk.holds) ++summary.poincare_violations;
                    if (first || chk.slack < slack_min) slack_min = chk.slack;
                    var_max = std::max(var_max, pv.variance[jdx]);
                    first = false;
                }
            }
            summary.poincare_slack_min = slack_min;
            std::ostringstream os;
            os.precision(12);
            os << "network_id,sigma_phi_or_sigma,upper_bound,empirical_lower_bound,var_max,"
                  "poincare_slack_min\n";
            const double sigma_phi_label = cfg.fixed_sigma_phi ? *cfg.fixed_sigma_phi : -1.0;
            os << "decoder," << sigma_phi_label << "," << summary.decoder_upper_bound << ","
               << summary.decoder_lower_bound << "," << var_max << "," << slack_min << "\n";
            os << "encoder_mean," << cfg.train.input_noise_sigma << ","
               << summary.encoder_upper_bound << "," << summary.encoder_lower_bound << ",,\n";
            emit("lipschitz.csv", os.str());
            stage_ok(stage);
        }

        if (cfg.analysis.hermite_max_degree > 0) {
            stage = "hermite";
            const Vec x = data.row_for(data.size() / 2, model.data_dim);
            const auto decomp = decoder_hermite_variance(
                model, x, cfg.analysis.hermite_max_degree,
                EstimatorConfig::auto_for(model.latent_dim, derive_seed(cfg.train.seed, 0xF6)));
            for (size_t jdx = 0; jdx < decomp.size(); ++jdx)
                emit("hermite_output_" + std::to_string(jdx) + ".csv", decomp[jdx].to_csv());
            stage_ok(stage);
        }

        if (cfg.analysis.attack.enabled) {
            stage = "attack";
            AttackConfig acfg;
            acfg.steps = cfg.analysis.attack.steps;
            acfg.restarts = cfg.analysis.attack.restarts;
            acfg.seed = cfg.analysis.attack.seed;
            const std::vector<Vec> pts = subsample_points(data, cfg.analysis.attack.points, model.data_dim);
            const auto curve = robustness_curve(model, pts, cfg.analysis.attack.c_grid, acfg);
            for (const RobustnessPoint& p : curve)
                summary.attack_mean_degradation.push_back(p.mean_degradation);
            emit("robustness.csv",
                 robustness_csv(curve, cfg.fixed_sigma_phi ? *cfg.fixed_sigma_phi : -1.0,
                                cfg.train.input_noise_sigma));
            stage_ok(stage);
        }
    } catch (const std::exception& e) {
        stage_failed(stage, e.what());
        return result;
    }

    manifest["summary"] = {{"final_elbo", summary.final_elbo},
                           {"hf_fraction_reconstruction", summary.hf_fraction_reconstruction},
                           {"hf_fraction_encoder", summary.hf_fraction_encoder},
                           {"k_star", summary.k_star},
                           {"decoder_upper_bound", summary.decoder_upper_bound},
                           {"decoder_lower_bound", summary.decoder_lower_bound},
                           {"encoder_upper_bound", summary.encoder_upper_bound},
                           {"encoder_lower_bound", summary.encoder_lower_bound},
                           {"poincare_slack_min", summary.poincare_slack_min},
                           {"poincare_violations", summary.poincare_violations},
                           {"attack_mean_degradation", summary.attack_mean_degradation}};
    flush_manifest();
    result.ok = true;
    return result;
}

SweepSpec SweepSpec::from_json_file(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "sweep config: cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    json j;
    try {
        j = json::parse(os.str());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep config: invalid JSON: ") + e.what());
    }
    check_keys(j, {"base", "sweep", "out_dir"}, "sweep root");
    require(j.contains("base") && j.contains("sweep") && j.contains("out_dir"),
            "sweep config: base, sweep and out_dir are required");
    SweepSpec spec;
    json base = j.at("base");
    if (!base.contains("out_dir")) base["out_dir"] = "placeholder";
    spec.base = ExperimentConfig::from_json_text(base.dump());
    const json& sw = j.at("sweep");
    check_keys(sw, {"parameter", "values", "seeds"}, "sweep");
    spec.parameter = sw.at("parameter").get<std::string>();
    spec.values = sw.at("values").get<Vec>();
    spec.seeds = sw.at("seeds").get<std::vector<uint64_t>>();
    spec.out_dir = j.at("out_dir").get<std::string>();
    require(spec.parameter == "fixed_sigma_phi" || spec.parameter == "input_noise_sigma" ||
                spec.parameter == "beta",
            "sweep config: parameter must be fixed_sigma_phi, input_noise_sigma or beta");
    require(!spec.values.empty() && !spec.seeds.empty(), "sweep config: empty values or seeds");
    return spec;
}

namespace {

std::string trim_zeros(double v) {
    std::ostringstream os;
    os << v;
    std::string s = os.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

} // namespace

std::vector<ExperimentResult> run_sweep(const SweepSpec& spec) {
    fs::create_directories(spec.out_dir);
    std::vector<ExperimentResult> results;
    std::ostringstream trend;
    trend.precision(12);
    trend << "parameter,value,seed,final_elbo,hf_fraction_reconstruction,hf_fraction_encoder,"
             "k_star,decoder_upper_bound,decoder_lower_bound,encoder_upper_bound,"
             "encoder_lower_bound,poincare_violations\n";
    for (double value : spec.values) {
        for (uint64_t seed : spec.seeds) {
            ExperimentConfig cfg = spec.base;
            if (spec.parameter == "fixed_sigma_phi")
                cfg.fixed_sigma_phi = value;
            else if (spec.parameter == "input_noise_sigma")
                cfg.train.input_noise_sigma = value;
            else
                cfg.train.beta = value;
            cfg.train.seed = seed;
            // all entries of one sweep share the dataset seed from base
            cfg.out_dir = (fs::path(spec.out_dir) /
                           (spec.parameter + "_" + trim_zeros(value) + "_seed_" +
                            std::to_string(seed)))
                              .string();
            ExperimentResult r = run_experiment(cfg);
            const ExperimentSummary& s = r.summary;
            trend << spec.parameter << "," << value << "," << seed << "," << s.final_elbo << ","
                  << s.hf_fraction_reconstruction << "," << s.hf_fraction_encoder << ","
                  << s.k_star << "," << s.decoder_upper_bound << "," << s.decoder_lower_bound
                  << "," << s.encoder_upper_bound << "," << s.encoder_lower_bound << ","
                  << s.poincare_violations << "\n";
            results.push_back(std::move(r));
        }
    }
    write_file(fs::path(spec.out_dir) / "trend.csv", trend.str());
    write_sweep_report(spec.out_dir);
    return results;
}

void write_sweep_report(const fs::path& sweep_dir) {
    std::ifstream f(sweep_dir / "trend.csv");
    require(f.good(), "report: missing trend.csv in " + sweep_dir.string());
    std::string header;
    std::getline(f, header);
    std::vector<std::string> cols;
    {
        std::istringstream hs(header);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    // value -> column -> samples
    std::map<double, std::vector<Vec>> groups;
    std::string param;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, param, ',');
        std::getline(ls, cell, ',');
        const double value = std::stod(cell);
        auto& g = groups[value];
        if (g.empty()) g.resize(cols.size() - 2);
        size_t idx = 0;
        while (std::getline(ls, cell, ',')) g[idx++].push_back(std::stod(cell));
    }
    auto median = [](Vec v) {
        std::sort(v.begin(), v.end());
        const size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::ostringstream os;
    os.precision(12);
    os << "parameter,value";
    for (size_t c = 2; c < cols.size(); ++c) os << ",median_" << cols[c];
    os << "\n";
    for (const auto& [value, samples] : groups) {
        os << param << "," << value;
        for (const Vec& col : samples) os << "," << median(col);
        os << "\n";
    }
    write_file(sweep_dir / "report.csv", os.str());
}

} // namespace harmonics

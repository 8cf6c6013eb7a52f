// vaeharm: harmonic analysis toolkit for small Gaussian-latent autoencoders.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "harmonics/attack.hpp"
#include "harmonics/checkpoint.hpp"
#include "harmonics/dataset.hpp"
#include "harmonics/experiment.hpp"
#include "harmonics/lipschitz.hpp"
#include "harmonics/measure.hpp"
#include "harmonics/spectral.hpp"

using namespace harmonics;
namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& content) {
    if (const fs::path parent = fs::path(path).parent_path(); !parent.empty())
        fs::create_directories(parent);
    std::ofstream f(path);
    require(f.good(), "cannot write " + path);
    f << content;
}

struct CommonArgs {
    uint64_t seed = 0;
    std::string out;
    std::string config;
};

int run(CLI::App& app, int argc, char** argv, CommonArgs& common) {
    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
    std::string gen_kind = "sinc";
    int gen_size = 1024;
    bool gen_unnormalized = false;
    gen->add_option("--kind", gen_kind, "sinc or multisine");
    gen->add_option("--size", gen_size, "number of grid points");
    gen->add_flag("--unnormalized-sinc", gen_unnormalized, "use sin(u)/u instead of sin(pi u)/(pi u)");

    CLI::App* train_cmd = app.add_subcommand("train", "run a full experiment from a JSON config");

    CLI::App* spec_cmd = app.add_subcommand("spectrum", "spectra of reconstructions and encoder means");
    std::string model_path, data_path;
    spec_cmd->add_option("--model", model_path, "checkpoint file")->required();
    spec_cmd->add_option("--data", data_path, "dataset CSV")->required();

    CLI::App* herm_cmd = app.add_subcommand("hermite", "decoder Hermite variance decomposition");
    std::string h_model, h_data;
    int h_degree = 10;
    int h_point = -1;
    herm_cmd->add_option("--model", h_model, "checkpoint file")->required();
    herm_cmd->add_option("--data", h_data, "dataset CSV")->required();
    herm_cmd->add_option("--max-degree", h_degree, "truncation degree");
    herm_cmd->add_option("--point", h_point, "dataset row index (default: middle row)");

    CLI::App* lip_cmd = app.add_subcommand("lipschitz", "Lipschitz bounds for encoder and decoder");
    std::string l_model, l_data;
    long l_samples = 1000;
    lip_cmd->add_option("--model", l_model, "checkpoint file")->required();
    lip_cmd->add_option("--data", l_data, "dataset CSV")->required();
    lip_cmd->add_option("--samples", l_samples, "gradient sample count");

    CLI::App* atk_cmd = app.add_subcommand("attack", "maximum-damage robustness curve");
    std::string a_model, a_data;
    Vec a_grid = {0.5, 1.0, 2.0};
    int a_steps = 100, a_restarts = 5, a_points = 25;
    atk_cmd->add_option("--model", a_model, "checkpoint file")->required();
    atk_cmd->add_option("--data", a_data, "dataset CSV")->required();
    atk_cmd->add_option("--c-grid", a_grid, "perturbation budgets");
    atk_cmd->add_option("--steps", a_steps, "ascent steps per restart");
    atk_cmd->add_option("--restarts", a_restarts, "random restarts");
    atk_cmd->add_option("--points", a_points, "dataset points to attack");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep from a JSON config");

    CLI::App* report_cmd = app.add_subcommand("report", "aggregate a sweep's trend.csv into report.csv");
    std::string report_dir;
    report_cmd->add_option("--dir", report_dir, "sweep output directory")->required();

    app.require_subcommand(1);
    app.parse(argc, argv);

    if (*gen) {
        const Dataset d = gen_dataset(gen_kind, gen_size, !gen_unnormalized);
        require(!common.out.empty(), "gen-data: --out is required");
        write_text(common.out, d.to_csv());
        std::cout << "wrote " << common.out << " (" << d.size() << " x " << d.dim() << ")\n";
        return 0;
    }
    if (*train_cmd) {
        require(!common.config.empty(), "train: --config is required");
        ExperimentConfig cfg = ExperimentConfig::from_json_file(common.config);
        if (!common.out.empty()) cfg.out_dir = common.out;
        if (common.seed != 0) cfg.train.seed = common.seed;
        const ExperimentResult r = run_experiment(cfg);
        if (!r.ok) {
            std::cerr << "experiment failed at stage '" << r.failed_stage << "', see "
                      << (r.dir / "manifest.json").string() << "\n";
            return 2;
        }
        std::cout << "experiment complete, outputs in " << r.dir.string() << "\n";
        return 0;
    }
    if (*spec_cmd) {
        const VaeModel model = checkpoint::load_model(model_path);
        const Dataset data = Dataset::load(data_path);
        require(!common.out.empty(), "spectrum: --out directory is required");
        fs::create_directories(common.out);
        const auto recon = reconstruction_spectrum(model, data);
        const auto enc = encoder_mean_spectrum(model, data);
        for (size_t j = 0; j < recon.size(); ++j)
            write_text((fs::path(common.out) / ("spectrum_reconstruction_" + std::to_string(j) + ".csv")).string(),
                       recon[j].to_csv());
        for (size_t j = 0; j < enc.size(); ++j)
            write_text((fs::path(common.out) / ("spectrum_encoder_" + std::to_string(j) + ".csv")).string(),
                       enc[j].to_csv());
        std::cout << "wrote " << recon.size() + enc.size() << " spectra to " << common.out << "\n";
        return 0;
    }
    if (*herm_cmd) {
        const VaeModel model = checkpoint::load_model(h_model);
        const Dataset data = Dataset::load(h_data);
        const int row = h_point >= 0 ? h_point : data.size() / 2;
        require(row < data.size(), "hermite: --point out of range");
        require(!common.out.empty(), "hermite: --out directory is required");
        fs::create_directories(common.out);
        const auto decomp = decoder_hermite_variance(
            model, data.row_for(row, model.data_dim), h_degree,
            EstimatorConfig::auto_for(model.latent_dim, common.seed));
        for (size_t j = 0; j < decomp.size(); ++j)
            write_text((fs::path(common.out) / ("hermite_output_" + std::to_string(j) + ".csv")).string(),
                       decomp[j].to_csv());
        std::cout << "wrote " << decomp.size() << " decompositions to " << common.out << "\n";
        return 0;
    }
    if (*lip_cmd) {
        const VaeModel model = checkpoint::load_model(l_model);
        const Dataset data = Dataset::load(l_data);
        std::vector<Vec> xs;
        for (int i = 0; i < data.size(); ++i) xs.push_back(data.row_for(i, model.data_dim));
        Rng zrng(derive_seed(common.seed, 0xD4));
        std::vector<Vec> zs;
        for (long i = 0; i < l_samples; ++i) {
            const Posterior post = encode(model, xs[static_cast<size_t>(i) % xs.size()]);
            zs.push_back(reparameterize(post.mu, post.sigma, zrng.gauss_vec(model.latent_dim)));
        }
        std::ostringstream os;
        os.precision(12);
        os << "network_id,upper_bound,empirical_lower_bound\n";
        os << "encoder_mean," << lipschitz_upper_bound(model.encoder_mean) << ","
           << empirical_lipschitz(model.encoder_mean, xs) << "\n";
        os << "decoder," << lipschitz_upper_bound(model.decoder) << ","
           << empirical_lipschitz(model.decoder, zs) << "\n";
        if (common.out.empty())
            std::cout << os.str();
        else
            write_text(common.out, os.str());
        return 0;
    }
    if (*atk_cmd) {
        const VaeModel model = checkpoint::load_model(a_model);
        const Dataset data = Dataset::load(a_data);
        AttackConfig cfg;
        cfg.steps = a_steps;
        cfg.restarts = a_restarts;
        cfg.seed = common.seed;
        std::vector<Vec> pts;
        const int n = std::min(a_points, data.size());
        for (int i = 0; i < n; ++i)
            pts.push_back(data.row_for(static_cast<int>(static_cast<long>(i) * data.size() / n), model.data_dim));
        const auto curve = robustness_curve(model, pts, a_grid, cfg);
        const std::string csv = robustness_csv(curve, -1.0, -1.0);
        if (common.out.empty())
            std::cout << csv;
        else
            write_text(common.out, csv);
        return 0;
    }
    if (*sweep_cmd) {
        require(!common.config.empty(), "sweep: --config is required");
        SweepSpec spec = SweepSpec::from_json_file(common.config);
        if (!common.out.empty()) spec.out_dir = common.out;
        const auto results = run_sweep(spec);
        int failed = 0;
        for (const auto& r : results)
            if (!r.ok) ++failed;
        std::cout << results.size() - failed << "/" << results.size() << " runs succeeded, outputs in "
                  << spec.out_dir << "\n";
        return failed == 0 ? 0 : 2;
    }
    if (*report_cmd) {
        write_sweep_report(report_dir);
        std::cout << "wrote " << (fs::path(report_dir) / "report.csv").string() << "\n";
        return 0;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic analysis of variational autoencoders"};
    app.fallthrough();
    CommonArgs common;
    app.add_option("--seed", common.seed, "master RNG seed");
    app.add_option("--out", common.out, "output file or directory");
    app.add_option("--config", common.config, "JSON config file");
    try {
        return run(app, argc, argv, common);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
}

// Command-line front end: configure a scenario (preset, JSON file, flag
// overrides, in that order), run the Monte Carlo sweep, and write the CSV
// outputs plus a companion plot script.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "beamkal/harness.hpp"
#include "beamkal/matrix_io.hpp"
#include "beamkal/training.hpp"

namespace {

using beamkal::ExperimentConfig;
using beamkal::GroupProfile;
using nlohmann::json;

beamkal::AngularSector parse_sector(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("config: a sector is a [lower, upper] pair in degrees");
    return {j[0].get<double>(), j[1].get<double>()};
}

GroupProfile parse_group(const json& j, int default_id) {
    GroupProfile g;
    g.group_id = j.value("group_id", default_id);
    g.user_count = j.at("user_count").get<int>();
    g.sectors.clear();
    for (const auto& s : j.at("sectors")) g.sectors.push_back(parse_sector(s));
    g.memory = static_cast<int>(g.sectors.size());
    g.pdp = j.contains("pdp") ? j.at("pdp").get<std::vector<double>>()
                              : GroupProfile::uniform_pdp(g.memory);
    g.relative_power = j.value("relative_power", 1.0);
    return g;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    const json j = json::parse(in);
    if (j.contains("antennas")) cfg.geometry.element_count = j.at("antennas").get<int>();
    if (j.contains("element_spacing"))
        cfg.geometry.element_spacing = j.at("element_spacing").get<double>();
    if (j.contains("serving")) cfg.serving = parse_group(j.at("serving"), 0);
    if (j.contains("interferers")) {
        cfg.interferers.clear();
        int next_id = 1;
        for (const auto& g : j.at("interferers"))
            cfg.interferers.push_back(parse_group(g, next_id++));
    }
    if (j.contains("snr_db")) cfg.snr_db = j.at("snr_db").get<double>();
    if (j.contains("noise_power")) cfg.noise_power = j.at("noise_power").get<double>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("block_length")) cfg.block_length = j.at("block_length").get<int>();
    if (j.contains("training_length")) cfg.training_length = j.at("training_length").get<int>();
    if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("kinds")) {
        cfg.kinds.clear();
        for (const auto& k : j.at("kinds"))
            cfg.kinds.push_back(beamkal::beamformer_kind_from_string(k.get<std::string>()));
    }
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("schedule"))
        cfg.schedule = beamkal::schedule_from_string(j.at("schedule").get<std::string>());
    if (j.contains("train_symbols")) cfg.train_symbols = j.at("train_symbols").get<int>();
    if (j.contains("quadrature_points"))
        cfg.quadrature_points = j.at("quadrature_points").get<int>();
}

std::string describe(const ExperimentConfig& cfg) {
    std::string kinds;
    for (const auto k : cfg.kinds) {
        if (!kinds.empty()) kinds += ",";
        kinds += beamkal::to_string(k);
    }
    std::string dims;
    for (const int d : cfg.dims) {
        if (!dims.empty()) dims += ",";
        dims += std::to_string(d);
    }
    return "N=" + std::to_string(cfg.geometry.element_count) +
           " K=" + std::to_string(cfg.serving.user_count) +
           " L=" + std::to_string(cfg.serving.memory) + " kinds=" + kinds + " dims=" + dims +
           " T=" + std::to_string(cfg.training_length) +
           " trials=" + std::to_string(cfg.trials);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced-dimension pilot tracking simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep and write CSV outputs");
    std::string preset = "desk";
    std::string config_path;
    std::string out_dir = "out";
    int antennas = 0, trials = 0, block_length = 0, training_length = 0, train_symbols = 0;
    int quadrature = 0;
    double snr_db = 0.0, alpha = 0.0, noise_power = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> dims;
    std::vector<std::string> kinds;
    std::string schedule_name;
    bool dump_matrices = false;

    run->add_option("--preset", preset, "Scenario preset to start from")
        ->check(CLI::IsMember({"desk", "reference"}))
        ->capture_default_str();
    run->add_option("--config", config_path, "JSON file overriding the preset")
        ->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory")->capture_default_str();
    auto* antennas_opt = run->add_option("--antennas", antennas, "Array size N");
    auto* trials_opt = run->add_option("--trials", trials, "Monte Carlo trials");
    auto* seed_opt = run->add_option("--seed", seed, "Base RNG seed");
    auto* snr_opt = run->add_option("--snr-db", snr_db, "Pilot SNR in dB");
    auto* noise_opt = run->add_option("--noise-power", noise_power, "Noise power N_0");
    auto* alpha_opt = run->add_option("--alpha", alpha, "Channel memory coefficient");
    auto* block_opt = run->add_option("--block-length", block_length, "Symbols per block M");
    auto* train_opt =
        run->add_option("--training-length", training_length, "Simulated training symbols T");
    auto* dims_opt = run->add_option("--dims", dims, "Beamspace dimensions to sweep");
    auto* kinds_opt = run->add_option(
        "--kinds", kinds, "Beamformers to run (geb-seq, geb-fixed, dft, identity)");
    auto* schedule_opt = run->add_option(
        "--schedule", schedule_name, "train-every-symbol or train-then-predict");
    auto* symbols_opt = run->add_option(
        "--train-symbols", train_symbols,
        "Measured epochs under train-then-predict (rest are pure predictions)");
    auto* quad_opt = run->add_option("--quadrature", quadrature,
                                     "Quadrature points per covariance integral");
    run->add_flag("--dump-matrices", dump_matrices,
                  "Also write the scenario covariance matrices as .bin files");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = preset == "reference" ? beamkal::build_reference_scenario()
                                                     : beamkal::build_desk_scenario();
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (antennas_opt->count()) cfg.geometry.element_count = antennas;
        if (trials_opt->count()) cfg.trials = trials;
        if (seed_opt->count()) cfg.seed = seed;
        if (snr_opt->count()) cfg.snr_db = snr_db;
        if (noise_opt->count()) cfg.noise_power = noise_power;
        if (alpha_opt->count()) cfg.alpha = alpha;
        if (block_opt->count()) cfg.block_length = block_length;
        if (train_opt->count()) cfg.training_length = training_length;
        if (dims_opt->count()) cfg.dims = dims;
        if (kinds_opt->count()) {
            cfg.kinds.clear();
            for (const auto& k : kinds)
                cfg.kinds.push_back(beamkal::beamformer_kind_from_string(k));
        }
        if (schedule_opt->count()) cfg.schedule = beamkal::schedule_from_string(schedule_name);
        if (symbols_opt->count()) cfg.train_symbols = train_symbols;
        if (quad_opt->count()) cfg.quadrature_points = quadrature;
        cfg.validate();

        std::cout << "running " << describe(cfg) << "\n";
        const beamkal::RunResult result = beamkal::run_experiment(cfg);
        beamkal::write_outputs(result, out_dir);
        beamkal::emit_plot_script(out_dir);

        namespace fs = std::filesystem;
        const beamkal::PilotBook book = beamkal::build_pilot_book(
            cfg.training_length, cfg.serving.user_count, cfg.symbol_energy());
        beamkal::export_pilot_book(book, (fs::path(out_dir) / "pilots.txt").string());

        if (dump_matrices) {
            const beamkal::Scenario sc = beamkal::build_scenario(cfg);
            beamkal::save_matrix((fs::path(out_dir) / "interference_covariance.bin").string(),
                                 sc.interference);
            for (std::size_t l = 0; l < sc.spatial.size(); ++l)
                beamkal::save_matrix(
                    (fs::path(out_dir) / ("spatial_covariance_delay" + std::to_string(l) + ".bin"))
                        .string(),
                    sc.spatial[l]);
        }

        std::cout << "wrote " << result.rows.size() << " rows to " << out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

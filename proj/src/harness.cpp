#include "beamkal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "beamkal/channel.hpp"
#include "beamkal/kalman.hpp"

namespace beamkal {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

std::string to_string(BeamformerKind kind) {
    switch (kind) {
        case BeamformerKind::sequential_geb: return "geb-seq";
        case BeamformerKind::fixed_geb: return "geb-fixed";
        case BeamformerKind::dft: return "dft";
        case BeamformerKind::identity: return "identity";
    }
    throw std::invalid_argument("to_string: unknown beamformer kind");
}

std::string to_string(Schedule schedule) {
    switch (schedule) {
        case Schedule::train_every_symbol: return "train-every-symbol";
        case Schedule::train_then_predict: return "train-then-predict";
    }
    throw std::invalid_argument("to_string: unknown schedule");
}

BeamformerKind beamformer_kind_from_string(const std::string& name) {
    if (name == "geb-seq") return BeamformerKind::sequential_geb;
    if (name == "geb-fixed") return BeamformerKind::fixed_geb;
    if (name == "dft") return BeamformerKind::dft;
    if (name == "identity") return BeamformerKind::identity;
    throw std::invalid_argument("unknown beamformer kind: " + name +
                                " (expected geb-seq|geb-fixed|dft|identity)");
}

Schedule schedule_from_string(const std::string& name) {
    if (name == "train-every-symbol") return Schedule::train_every_symbol;
    if (name == "train-then-predict") return Schedule::train_then_predict;
    throw std::invalid_argument("unknown schedule: " + name +
                                " (expected train-every-symbol|train-then-predict)");
}

double ExperimentConfig::symbol_energy() const {
    return noise_power * std::pow(10.0, snr_db / 10.0);
}

void ExperimentConfig::validate() const {
    geometry.validate();
    serving.validate();
    for (const auto& g : interferers) g.validate();
    if (!std::isfinite(snr_db)) throw std::invalid_argument("config: snr_db must be finite");
    if (!(noise_power > 0.0)) throw std::invalid_argument("config: noise_power must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("config: alpha must lie in [0, 1]");
    if (block_length < 1) throw std::invalid_argument("config: block_length must be >= 1");
    if (training_length < 1 || training_length > 63)
        throw std::invalid_argument("config: training_length must lie in [1, 63], the pilot "
                                    "code period");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (kinds.empty()) throw std::invalid_argument("config: no beamformer kinds selected");
    if (dims.empty()) throw std::invalid_argument("config: no dimensions selected");
    if (schedule == Schedule::train_then_predict && train_symbols > training_length)
        throw std::invalid_argument("config: train_symbols exceeds training_length");
    const int n = geometry.element_count;
    const int full = n * serving.memory;
    for (BeamformerKind kind : kinds) {
        if (kind == BeamformerKind::identity) continue;
        for (int d : dims) {
            if (d < 1) throw std::invalid_argument("config: dimensions must be >= 1");
            if (kind == BeamformerKind::dft && d > n)
                throw std::invalid_argument("config: dft dimension exceeds the antenna count");
            if (kind != BeamformerKind::dft && d > full)
                throw std::invalid_argument("config: beamspace dimension exceeds N*L");
        }
    }
}

Scenario build_scenario(const ExperimentConfig& config) {
    config.validate();
    Scenario sc;
    sc.spatial.reserve(static_cast<std::size_t>(config.serving.memory));
    for (const auto& sector : config.serving.sectors)
        sc.spatial.push_back(sector_covariance(config.geometry, sector, config.quadrature_points));
    sc.interference = interference_covariance(config.geometry, config.serving, config.interferers,
                                              config.symbol_energy(), config.noise_power,
                                              config.quadrature_points);
    sc.prior = extended_covariance(config.serving, sc.spatial);
    const int n = config.geometry.element_count;
    sc.summed_spatial = Mat::Zero(n, n);
    for (int l = 0; l < config.serving.memory; ++l)
        sc.summed_spatial += config.serving.pdp[static_cast<std::size_t>(l)] *
                             sc.spatial[static_cast<std::size_t>(l)];
    sc.book = build_pilot_book(config.training_length, config.serving.user_count,
                               config.symbol_energy());
    return sc;
}

namespace {

ExperimentConfig scenario_preset(int antennas) {
    ExperimentConfig cfg;
    cfg.geometry = {antennas, 0.5};
    cfg.serving.group_id = 0;
    cfg.serving.user_count = 2;
    cfg.serving.memory = 3;
    cfg.serving.sectors = {{-1.0, 1.0}, {-1.0, 1.0}, {5.0, 7.0}};
    cfg.serving.pdp = GroupProfile::uniform_pdp(3);
    cfg.serving.relative_power = 1.0;
    const std::vector<AngularSector> interferer_sectors = {
        {-29.0, -26.0}, {-21.0, -19.0}, {-12.0, -9.0}, {-5.5, -3.5},
        {9.5, 12.5},    {15.0, 17.0},   {24.0, 27.0}};
    int id = 1;
    for (const auto& sector : interferer_sectors) {
        GroupProfile g;
        g.group_id = id++;
        g.user_count = 3;
        g.memory = 3;
        g.sectors = {sector, sector, sector};
        g.pdp = GroupProfile::uniform_pdp(3);
        g.relative_power = 1.0;
        cfg.interferers.push_back(std::move(g));
    }
    cfg.snr_db = 30.0;
    cfg.noise_power = 1.0;
    cfg.alpha = 0.9999;
    cfg.block_length = 5;
    cfg.training_length = 50;
    cfg.trials = 20;
    cfg.seed = 1;
    return cfg;
}

}  // namespace

ExperimentConfig build_reference_scenario() {
    ExperimentConfig cfg = scenario_preset(100);
    cfg.dims = {2, 4, 6, 8, 12};
    return cfg;
}

ExperimentConfig build_desk_scenario() {
    ExperimentConfig cfg = scenario_preset(32);
    cfg.dims = {4, 6, 8, 12};
    return cfg;
}

namespace {

// Everything a single (kind, dimension) sweep shares across trials: the
// per-block beamformers and the precomputed filter trajectory. Gains are
// deterministic given the schedule, so trials only replay them.
struct SweepPlan {
    BeamformerKind kind;
    int dim = 0;
    std::vector<Beamformer> per_block;       // one entry, or one per block
    std::vector<Mat> gains;                  // per epoch; empty on predict-only epochs
    std::vector<double> mse;                 // trace(P)/K per epoch
    std::vector<double> det_log;             // log pseudo-det of P per epoch
    std::vector<double> captured;            // per epoch, from the active block
    std::vector<char> trained;               // per epoch

    const Beamformer& active(int epoch, int block_length) const {
        const std::size_t b = static_cast<std::size_t>(epoch / block_length);
        return per_block[std::min(b, per_block.size() - 1)];
    }
};

bool is_geb(BeamformerKind kind) {
    return kind == BeamformerKind::sequential_geb || kind == BeamformerKind::fixed_geb;
}

SweepPlan make_plan(const ExperimentConfig& config, const Scenario& sc,
                    const BeamformerDesigner* designer, BeamformerKind kind, int dim) {
    const int t_total = config.training_length;
    const int blocks = (t_total + config.block_length - 1) / config.block_length;
    const double es = config.symbol_energy();
    const int n = config.geometry.element_count;

    SweepPlan plan;
    plan.kind = kind;
    plan.dim = dim;
    switch (kind) {
        case BeamformerKind::sequential_geb:
            plan.per_block = designer->sequential_geb(dim, config.serving.user_count, es,
                                                      config.block_length, config.alpha, blocks);
            break;
        case BeamformerKind::fixed_geb:
            plan.per_block = {designer->fixed_geb(dim)};
            break;
        case BeamformerKind::dft:
            plan.per_block = {dft_beamspace(sc.spatial, config.serving.pdp, dim)};
            break;
        case BeamformerKind::identity: {
            Beamformer b;
            b.columns = Mat::Identity(n, n);
            plan.per_block = {std::move(b)};
            break;
        }
    }

    std::vector<double> captured_per_block;
    captured_per_block.reserve(plan.per_block.size());
    for (const auto& b : plan.per_block)
        captured_per_block.push_back(captured_power(b.columns, sc.summed_spatial));

    const int train_limit = (config.schedule == Schedule::train_then_predict &&
                             config.train_symbols > 0)
                                ? config.train_symbols
                                : t_total;

    KalmanFilter filter(sc.prior, config.alpha);
    plan.gains.resize(static_cast<std::size_t>(t_total));
    plan.mse.reserve(static_cast<std::size_t>(t_total));
    for (int epoch = 0; epoch < t_total; ++epoch) {
        const Beamformer& active = plan.active(epoch, config.block_length);
        const bool train = epoch < train_limit;
        plan.trained.push_back(train ? 1 : 0);
        if (train) {
            const Vec x = training_vector(sc.book, epoch, config.serving.memory);
            InnovationRecord rec = filter.measurement_update(
                Vec::Zero(active.dimension()), x, active.columns, sc.interference);
            plan.gains[static_cast<std::size_t>(epoch)] = std::move(rec.gain);
            plan.mse.push_back(filter.mse());
        } else {
            plan.mse.push_back(filter.covariance().trace().real() / config.serving.user_count);
        }
        plan.det_log.push_back(filter.log_det_covariance());
        const std::size_t b = static_cast<std::size_t>(epoch / config.block_length);
        plan.captured.push_back(captured_per_block[std::min(b, captured_per_block.size() - 1)]);
        if (epoch + 1 < t_total) filter.predict();
    }
    return plan;
}

std::vector<ResultRow> replay_trial(const ExperimentConfig& config, const Scenario& sc,
                                    const ArModel& model, const GaussianInterference& noise_model,
                                    const SweepPlan& plan, int trial) {
    Rng rng(config.seed + static_cast<std::uint64_t>(trial));
    // The draw sequence below depends only on the scenario and schedule, so
    // equal trial ids see identical channels and noise under every beamformer.
    GaussianInterference noise = noise_model;
    const int t_total = config.training_length;
    const int k_g = config.serving.user_count;
    ChannelState state = sample_initial(model, rng);
    Vec estimate = Vec::Zero(model.dim());

    std::vector<ResultRow> rows;
    rows.reserve(static_cast<std::size_t>(t_total));
    for (int epoch = 0; epoch < t_total; ++epoch) {
        if (epoch > 0) state = evolve(state, model, rng);
        if (plan.trained[static_cast<std::size_t>(epoch)]) {
            const Vec x = training_vector(sc.book, epoch, config.serving.memory);
            const Beamformer& active = plan.active(epoch, config.block_length);
            const Vec y_full = observe_full(state, x, noise, rng);
            const Vec z = active.columns.adjoint() * y_full -
                          apply_measurement_adjoint(x, active.columns, estimate);
            estimate += plan.gains[static_cast<std::size_t>(epoch)] * z;
        }
        ResultRow row;
        row.epoch = epoch;
        row.dim = plan.dim;
        row.kind = plan.kind;
        row.trial = trial;
        row.mse = plan.mse[static_cast<std::size_t>(epoch)];
        row.det_log = plan.det_log[static_cast<std::size_t>(epoch)];
        row.captured_power = plan.captured[static_cast<std::size_t>(epoch)];
        row.emp_mse = (state.h - estimate).squaredNorm() / k_g;
        rows.push_back(row);
        if (epoch + 1 < t_total) estimate *= config.alpha;
    }
    return rows;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const Scenario sc = build_scenario(config);
    const int n = config.geometry.element_count;

    std::unique_ptr<BeamformerDesigner> designer;
    for (BeamformerKind kind : config.kinds) {
        if (is_geb(kind) && !designer)
            designer = std::make_unique<BeamformerDesigner>(sc.spatial, config.serving.pdp,
                                                            sc.interference);
    }

    std::vector<SweepPlan> plans;
    for (BeamformerKind kind : config.kinds) {
        // The identity beamformer performs no reduction; it always runs at the
        // full antenna dimension regardless of the requested sweep.
        const std::vector<int> dims =
            kind == BeamformerKind::identity ? std::vector<int>{n} : config.dims;
        for (int dim : dims) plans.push_back(make_plan(config, sc, designer.get(), kind, dim));
    }

    RunResult result;
    for (const auto& plan : plans) {
        if (plan.kind == BeamformerKind::sequential_geb || plan.kind == BeamformerKind::fixed_geb) {
            for (std::size_t b = 0; b < plan.per_block.size(); ++b) {
                const auto& bf = plan.per_block[b];
                for (const auto& s : bf.selection)
                    result.selections.push_back({plan.kind, plan.dim, static_cast<int>(b), s.delay,
                                                 s.index});
            }
        }
        std::vector<double> grid;
        for (double az = -89.75; az <= 89.75 + 1e-9; az += 0.25) grid.push_back(az);
        const auto gains = beam_pattern(plan.per_block.front(), config.geometry, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            result.patterns.push_back({plan.kind, plan.dim, grid[i], gains[i]});
    }

    const ArModel model(config.alpha, sc.prior);
    const GaussianInterference noise_model(sc.interference);

    for (const auto& plan : plans) {
        std::vector<std::vector<ResultRow>> per_trial(static_cast<std::size_t>(config.trials));
        const unsigned hw = std::thread::hardware_concurrency();
        const int workers = std::max(1, std::min(config.trials, hw ? static_cast<int>(hw) : 1));
        auto work = [&](int worker_id) {
            for (int t = worker_id; t < config.trials; t += workers)
                per_trial[static_cast<std::size_t>(t)] =
                    replay_trial(config, sc, model, noise_model, plan, t);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        for (auto& rows : per_trial)
            result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }

    auto key = [](const ResultRow& r) {
        return std::make_tuple(to_string(r.kind), r.dim, r.trial, r.epoch);
    };
    std::sort(result.rows.begin(), result.rows.end(),
              [&](const ResultRow& a, const ResultRow& b) { return key(a) < key(b); });
    return result;
}

void emit_rows_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_rows_csv: cannot open " + path);
    out << "beamformer,dim,trial,epoch,mse,det_log,captured_power,emp_mse\n";
    for (const auto& r : rows) {
        out << to_string(r.kind) << ',' << r.dim << ',' << r.trial << ',' << r.epoch << ','
            << fmt(r.mse) << ',' << fmt(r.det_log) << ',' << fmt(r.captured_power) << ','
            << fmt(r.emp_mse) << '\n';
    }
    if (!out) throw std::runtime_error("emit_rows_csv: write failed for " + path);
}

std::vector<ResultRow> parse_rows_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_rows_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_rows_csv: empty file " + path);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 8)
            throw std::runtime_error("parse_rows_csv: malformed row in " + path);
        ResultRow r;
        r.kind = beamformer_kind_from_string(fields[0]);
        r.dim = std::stoi(fields[1]);
        r.trial = std::stoi(fields[2]);
        r.epoch = std::stoi(fields[3]);
        r.mse = std::stod(fields[4]);
        r.det_log = std::stod(fields[5]);
        r.captured_power = std::stod(fields[6]);
        r.emp_mse = std::stod(fields[7]);
        rows.push_back(r);
    }
    return rows;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    emit_rows_csv(result.rows, (fs::path(out_dir) / "mse_vs_time.csv").string());

    // Final-epoch summary per (beamformer, dim), with the spread of the
    // realized per-trial error.
    int final_epoch = 0;
    for (const auto& r : result.rows) final_epoch = std::max(final_epoch, r.epoch);
    struct Agg {
        int trials = 0;
        double mse_sum = 0.0, emp_sum = 0.0, emp_sq_sum = 0.0;
    };
    std::vector<std::pair<std::pair<std::string, int>, Agg>> groups;
    for (const auto& r : result.rows) {
        if (r.epoch != final_epoch) continue;
        const auto id = std::make_pair(to_string(r.kind), r.dim);
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == id; });
        if (it == groups.end()) {
            groups.push_back({id, {}});
            it = groups.end() - 1;
        }
        it->second.trials += 1;
        it->second.mse_sum += r.mse;
        it->second.emp_sum += r.emp_mse;
        it->second.emp_sq_sum += r.emp_mse * r.emp_mse;
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream dim_out(fs::path(out_dir) / "mse_vs_dim.csv");
    if (!dim_out) throw std::runtime_error("write_outputs: cannot open mse_vs_dim.csv");
    dim_out << "beamformer,dim,trials,mean_mse,mean_emp_mse,se_emp_mse\n";
    for (const auto& [id, agg] : groups) {
        const double mean_mse = agg.mse_sum / agg.trials;
        const double mean_emp = agg.emp_sum / agg.trials;
        double se = 0.0;
        if (agg.trials > 1) {
            const double var =
                (agg.emp_sq_sum - agg.trials * mean_emp * mean_emp) / (agg.trials - 1);
            se = std::sqrt(std::max(var, 0.0) / agg.trials);
        }
        dim_out << id.first << ',' << id.second << ',' << agg.trials << ',' << fmt(mean_mse) << ','
                << fmt(mean_emp) << ',' << fmt(se) << '\n';
    }

    std::ofstream pat_out(fs::path(out_dir) / "beam_pattern.csv");
    if (!pat_out) throw std::runtime_error("write_outputs: cannot open beam_pattern.csv");
    pat_out << "beamformer,dim,azimuth_deg,gain_db\n";
    for (const auto& p : result.patterns)
        pat_out << to_string(p.kind) << ',' << p.dim << ',' << fmt(p.azimuth_deg) << ','
                << fmt(p.gain_db) << '\n';

    std::ofstream sel_out(fs::path(out_dir) / "selection_trace.csv");
    if (!sel_out) throw std::runtime_error("write_outputs: cannot open selection_trace.csv");
    sel_out << "beamformer,dim,block,delay,eigen_index\n";
    for (const auto& s : result.selections)
        sel_out << to_string(s.kind) << ',' << s.dim << ',' << s.block << ',' << s.delay << ','
                << s.eigen_index << '\n';
}

void emit_plot_script(const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "plot_results.py");
    if (!out) throw std::runtime_error("emit_plot_script: cannot open plot_results.py");
    out << R"PY(#!/usr/bin/env python3
"""Plots for the simulator CSV outputs (run from the output directory)."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read(path):
    with open(path) as f:
        return list(csv.DictReader(f))


def main():
    dim_rows = read("mse_vs_dim.csv")
    fig, ax = plt.subplots()
    series = defaultdict(list)
    for r in dim_rows:
        series[r["beamformer"]].append((int(r["dim"]), float(r["mean_emp_mse"]),
                                        float(r["se_emp_mse"])))
    for kind, pts in sorted(series.items()):
        pts.sort()
        dims = [p[0] for p in pts]
        ax.errorbar(dims, [p[1] for p in pts], yerr=[3 * p[2] for p in pts], label=kind,
                    marker="o")
    ax.set_xlabel("beamspace dimension D")
    ax.set_ylabel("final-epoch MSE per user")
    ax.set_yscale("log")
    ax.legend()
    fig.savefig("mse_vs_dim.png", dpi=150, bbox_inches="tight")

    time_rows = read("mse_vs_time.csv")
    fig, ax = plt.subplots()
    traj = defaultdict(dict)
    for r in time_rows:
        if int(r["trial"]) != 0:
            continue
        traj[(r["beamformer"], int(r["dim"]))][int(r["epoch"])] = float(r["mse"])
    for (kind, dim), pts in sorted(traj.items()):
        epochs = sorted(pts)
        ax.plot(epochs, [pts[e] for e in epochs], label=f"{kind} D={dim}")
    ax.set_xlabel("training symbol")
    ax.set_ylabel("trace(P)/K")
    ax.set_yscale("log")
    ax.legend(fontsize=7)
    fig.savefig("mse_vs_time.png", dpi=150, bbox_inches="tight")

    pat_rows = read("beam_pattern.csv")
    fig, ax = plt.subplots()
    pats = defaultdict(list)
    for r in pat_rows:
        pats[(r["beamformer"], int(r["dim"]))].append((float(r["azimuth_deg"]),
                                                       float(r["gain_db"])))
    for (kind, dim), pts in sorted(pats.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"{kind} D={dim}", linewidth=0.8)
    ax.set_xlabel("azimuth (deg)")
    ax.set_ylabel("gain (dB)")
    ax.set_ylim(-60, None)
    ax.legend(fontsize=7)
    fig.savefig("beam_pattern.png", dpi=150, bbox_inches="tight")


if __name__ == "__main__":
    main()
)PY";
    if (!out) throw std::runtime_error("emit_plot_script: write failed");
}

}  // namespace beamkal

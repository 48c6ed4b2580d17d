// Experiment orchestration: scenario construction, Monte Carlo runs over
// beamformer kinds and dimensions, and CSV emission.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamkal/beamspace.hpp"
#include "beamkal/covariance.hpp"
#include "beamkal/training.hpp"
#include "beamkal/types.hpp"

namespace beamkal {

enum class BeamformerKind { sequential_geb, fixed_geb, dft, identity };
enum class Schedule { train_every_symbol, train_then_predict };

std::string to_string(BeamformerKind kind);
std::string to_string(Schedule schedule);
BeamformerKind beamformer_kind_from_string(const std::string& name);
Schedule schedule_from_string(const std::string& name);

struct ExperimentConfig {
    ArrayGeometry geometry{100, 0.5};
    GroupProfile serving;
    std::vector<GroupProfile> interferers;
    double snr_db = 30.0;       // E_s / N_0
    double noise_power = 1.0;   // N_0
    double alpha = 0.9999;
    int block_length = 5;       // M, symbols between beamformer updates
    int training_length = 50;   // T, simulated epochs (at most the pilot period 63)
    std::vector<int> dims{4, 6, 8, 12};
    std::vector<BeamformerKind> kinds{BeamformerKind::sequential_geb, BeamformerKind::fixed_geb,
                                      BeamformerKind::dft};
    int trials = 20;
    std::uint64_t seed = 1;
    Schedule schedule = Schedule::train_every_symbol;
    int train_symbols = -1;     // epochs with measurements under train_then_predict; <=0 means all
    int quadrature_points = 360;

    double symbol_energy() const;
    void validate() const;
};

struct ResultRow {
    int epoch = 0;
    int dim = 0;
    BeamformerKind kind = BeamformerKind::fixed_geb;
    int trial = 0;
    double mse = 0.0;             // trace(P)/K_g, trial independent
    double det_log = 0.0;         // log pseudo-det of P
    double captured_power = 0.0;  // span quality of the active beamformer
    double emp_mse = 0.0;         // realized ||h - h_hat||^2 / K_g for this trial

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct SelectionTraceRow {
    BeamformerKind kind = BeamformerKind::sequential_geb;
    int dim = 0;
    int block = 0;
    int delay = 0;
    int eigen_index = 0;
};

struct BeamPatternRow {
    BeamformerKind kind = BeamformerKind::fixed_geb;
    int dim = 0;
    double azimuth_deg = 0.0;
    double gain_db = 0.0;
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<SelectionTraceRow> selections;
    std::vector<BeamPatternRow> patterns;
};

// Precomputed second-order scene shared by every trial.
struct Scenario {
    std::vector<Mat> spatial;         // serving R_l, unit trace
    Mat interference;                 // R_eta
    ExtendedChannelCovariance prior;  // R_h blocks
    Mat summed_spatial;               // sum_l rho_l R_l
    PilotBook book;
};

Scenario build_scenario(const ExperimentConfig& config);

// The reference wide-array configuration: N = 100 antennas, two served users
// with three delay taps (sectors [-1,1], [-1,1], [5,7] degrees), seven
// interfering groups of three users each, snr 30 dB, alpha 0.9999, M = 5.
ExperimentConfig build_reference_scenario();
// Same scene shrunk to N = 32 so a full sweep stays interactive.
ExperimentConfig build_desk_scenario();

RunResult run_experiment(const ExperimentConfig& config);

// Row-level CSV with a stable header; parse_rows inverts it exactly (values
// are printed with round-trip precision).
void emit_rows_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_rows_csv(const std::string& path);

// Writes mse_vs_time.csv, mse_vs_dim.csv, beam_pattern.csv,
// selection_trace.csv into the directory (created if needed).
void write_outputs(const RunResult& result, const std::string& out_dir);

// Companion matplotlib script that plots the CSVs above.
void emit_plot_script(const std::string& out_dir);

}  // namespace beamkal

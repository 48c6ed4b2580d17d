// Pre-beamformer construction. The generalized-eigenvector beamformer (GEB)
// whitens interference per delay tap; the sequential variant re-allocates
// beams every block by tracking post-measurement eigenvalues in a scalar
// ledger. A dominant-eigenvector baseline and pattern/power diagnostics are
// included.

#pragma once

#include <vector>

#include "beamkal/types.hpp"

namespace beamkal {

// Solution of A*V = B*V*diag(values) for a Hermitian PSD A and Hermitian PD
// B. Columns are B-orthonormal (v^H B v = 1), values sorted descending with
// entries below 1e-14 clamped to zero.
struct GeneralizedEigenPair {
    Mat vectors;
    RealVec values;
};

GeneralizedEigenPair generalized_eigendecomposition(const Mat& A, const Mat& B);

// One chosen beam: delay tap and eigenvector index within that tap.
struct Selection {
    int delay = 0;
    int index = 0;

    friend bool operator==(const Selection&, const Selection&) = default;
};

// N x D pre-beamformer with its selection bookkeeping. Columns are grouped by
// delay (all chosen beams of tap 0 first, then tap 1, ...); selection[c]
// labels column c.
struct Beamformer {
    Mat columns;
    std::vector<Selection> selection;

    Eigen::Index dimension() const { return columns.cols(); }
    // Columns belonging to one delay tap, in eigen-index order.
    Mat delay_block(int delay) const;
    std::vector<int> block_sizes(int memory) const;
};

// Per-delay eigenvalue state driving the sequential design. Under the
// whitened beamformer the projected error statistics stay diagonal, so one
// nonnegative scalar per (delay, eigenvector) suffices.
struct SnrLedger {
    std::vector<RealVec> current;
    std::vector<RealVec> initial;
    int block = 0;

    int memory() const { return static_cast<int>(current.size()); }
    Eigen::Index per_delay() const { return current.empty() ? 0 : current.front().size(); }
};

// Pooled candidate order: descending eigenvalue, ties broken by lower delay
// then lower index.
std::vector<Selection> pooled_order(const SnrLedger& ledger);

// Top-D beams across all delays. The block objective
// prod_l prod_{i in I_l} (1 + E_s*M*lambda)^K_g is separable and increasing
// in each eigenvalue, so the pooled top-D is the exact argmax; the
// constants are accepted to state the objective but cannot change it.
std::vector<Selection> allocate_dimensions(const SnrLedger& ledger, int dimension, int user_count,
                                           double symbol_energy, int block_length);

// Post-block ledger step: measured entries shrink as
// lambda <- lambda / (1 + E_s*M*lambda), then every entry relaxes toward its
// initial value with rate alpha^(2M).
void update_ledger(SnrLedger& ledger, const std::vector<Selection>& selected,
                   double symbol_energy, int block_length, double alpha);

// Holds the per-delay generalized eigendecompositions of (rho_l*R_l, R_eta)
// and assembles beamformers from ledger state.
class BeamformerDesigner {
public:
    BeamformerDesigner(const std::vector<Mat>& spatial, const std::vector<double>& pdp,
                       const Mat& interference);

    int memory() const { return static_cast<int>(pairs_.size()); }
    Eigen::Index antenna_count() const { return interference_.rows(); }
    const GeneralizedEigenPair& pair(int delay) const { return pairs_.at(delay); }

    SnrLedger initial_ledger() const;

    // Walks the pooled candidate order and accepts beams until `dimension`
    // columns survive. Identical sectors on different taps yield duplicate
    // generalized eigenvectors; a candidate whose component orthogonal to the
    // accepted set (in the R_eta inner product) falls below tolerance is
    // skipped and the walk continues down the pool, so the result always
    // satisfies S^H R_eta S = I. Requesting the full dimension N*L returns
    // every eigenvector unmodified instead (the stacked basis is linearly
    // dependent, so no whitened set of that size exists).
    Beamformer assemble(const SnrLedger& ledger, int dimension) const;

    // Beamformer from the stationary eigenvalues, fixed for the whole run.
    Beamformer fixed_geb(int dimension) const;

    // One beamformer per block: assemble, shrink the measured beams, relax.
    std::vector<Beamformer> sequential_geb(int dimension, int user_count, double symbol_energy,
                                           int block_length, double alpha, int blocks) const;

private:
    std::vector<GeneralizedEigenPair> pairs_;
    Mat interference_;
};

// Baseline that ignores interference color: the top-D orthonormal
// eigenvectors of sum_l rho_l * R_l (asymptotically DFT columns for a
// uniform linear array).
Beamformer dft_beamspace(const std::vector<Mat>& spatial, const std::vector<double>& pdp,
                         int dimension);

// ||S^H a(theta)||^2 in dB on the azimuth grid, floored at -300 dB.
std::vector<double> beam_pattern(const Beamformer& beamformer, const ArrayGeometry& geometry,
                                 const std::vector<double>& azimuth_grid_deg);

// Fraction of trace(R_total) captured by the orthogonal projection onto the
// column span; columns must be linearly independent.
double captured_power(const Mat& columns, const Mat& total_covariance);

// Per-delay error-covariance blocks evolved under the idealized pilot Gram
// (the empirical pilot correlation over a block replaced by its expectation
// E_s*M*I). This is the matrix consistency reference for the scalar ledger
// and for the error-volume identity; the estimation path never uses it.
class IdealizedBlockRecursion {
public:
    IdealizedBlockRecursion(const std::vector<Mat>& spatial, const std::vector<double>& pdp);

    int memory() const { return static_cast<int>(blocks_.size()); }
    const Mat& block(int delay) const { return blocks_.at(delay); }

    // Block measurement update on every tap:
    //   A <- A - E_s*M * A*S * (S^H R_eta S + E_s*M * S^H A S)^-1 * S^H*A.
    void measure(const Mat& beamformer, const Mat& interference, double symbol_energy,
                 int block_length);
    // A <- alpha^(2M) * A + (1 - alpha^(2M)) * A_initial.
    void relax(double alpha, int block_length);

    // Whitened projected error statistics of one tap:
    //   (S^H R_eta S)^-1 (S^H A_l S).
    Mat projected_snr(int delay, const Mat& beamformer, const Mat& interference) const;

private:
    std::vector<Mat> blocks_;
    std::vector<Mat> initial_;
};

}  // namespace beamkal

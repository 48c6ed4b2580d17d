// Time-varying channel simulation: first-order Gauss-Markov evolution of the
// stacked group channel, pilot observations at the array, and interference
// generation (either drawn from its covariance or physically simulated).

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "beamkal/covariance.hpp"
#include "beamkal/rng.hpp"
#include "beamkal/types.hpp"

namespace beamkal {

// Stationary AR(1) generator: h_n = alpha*h_{n-1} + sqrt(1-alpha^2)*C*w with
// C*C^H equal to the stationary covariance. The factor comes from a Hermitian
// eigendecomposition with negative eigenvalues clipped at zero, so
// rank-deficient covariances are handled.
class ArModel {
public:
    ArModel(double alpha, const Mat& covariance);
    // Block form: one factor per delay tap, replicated over users. Cheaper to
    // draw from and distributionally identical to the dense constructor.
    ArModel(double alpha, const ExtendedChannelCovariance& covariance);

    double alpha() const { return alpha_; }
    Eigen::Index dim() const { return dim_; }

    // C * w for a fresh standard complex normal w.
    Vec draw(Rng& rng) const;

private:
    double alpha_ = 1.0;
    Eigen::Index dim_ = 0;
    std::vector<Mat> roots_;  // one entry in dense mode, L entries in block mode
    int repeats_ = 1;         // user replication count in block mode
};

struct ChannelState {
    Vec h;
    long epoch = 0;
};

ChannelState sample_initial(const ArModel& model, Rng& rng);
ChannelState evolve(const ChannelState& state, const ArModel& model, Rng& rng);

// Additive interference-plus-noise process at the array.
class InterferenceSource {
public:
    virtual ~InterferenceSource() = default;
    virtual Vec sample(Rng& rng) = 0;
    virtual Eigen::Index dim() const = 0;
};

// Noise-free, interference-free receiver (testing aid).
class NoInterference : public InterferenceSource {
public:
    explicit NoInterference(Eigen::Index n) : n_(n) {}
    Vec sample(Rng&) override { return Vec::Zero(n_); }
    Eigen::Index dim() const override { return n_; }

private:
    Eigen::Index n_;
};

// Draws eta ~ CN(0, R) through a Cholesky factor; R must be positive definite.
class GaussianInterference : public InterferenceSource {
public:
    explicit GaussianInterference(const Mat& covariance);
    Vec sample(Rng& rng) override;
    Eigen::Index dim() const override { return root_.rows(); }

private:
    Mat root_;
};

// Physically simulates every interfering group: per-user Gauss-Markov
// channels convolved with random symbols, plus white noise. The long-run
// sample covariance converges to interference_covariance of the same groups.
class ExplicitInterference : public InterferenceSource {
public:
    using SymbolGenerator = std::function<cplx(Rng&)>;

    ExplicitInterference(const ArrayGeometry& geometry,
                         const std::vector<GroupProfile>& interferers, double symbol_energy,
                         double noise_power, double alpha,
                         SymbolGenerator symbols = SymbolGenerator(),
                         int quadrature_points = 360);

    Vec sample(Rng& rng) override;
    Eigen::Index dim() const override { return n_; }

    static SymbolGenerator qpsk(double symbol_energy);

private:
    struct Group {
        GroupProfile profile;
        std::unique_ptr<ArModel> model;
        ChannelState state;                     // stacked over users and delays
        std::vector<std::vector<cplx>> taps;    // per user, most recent symbol first
        double amplitude = 1.0;                 // sqrt(gamma)
    };

    Eigen::Index n_ = 0;
    double noise_power_ = 0.0;
    SymbolGenerator symbols_;
    std::vector<Group> groups_;
    bool primed_ = false;
};

// Received pilot snapshot y = sum_j conj(x_j) * h_block_j + eta, computed
// from the blocks of h directly; the Kronecker-structured measurement matrix
// is never materialized. x is the stacked training vector of length L*K.
Vec observe_full(const ChannelState& state, const Vec& training, InterferenceSource& interference,
                 Rng& rng);

}  // namespace beamkal

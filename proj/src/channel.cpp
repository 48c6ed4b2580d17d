#include "beamkal/channel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace beamkal {

namespace {

// U * sqrt(max(eig, 0)) for a Hermitian matrix; tolerates rank deficiency.
Mat hermitian_root(const Mat& covariance) {
    if (covariance.rows() != covariance.cols())
        throw std::invalid_argument("ArModel: covariance must be square");
    Eigen::SelfAdjointEigenSolver<Mat> eig(covariance);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("ArModel: eigendecomposition of the covariance failed");
    // Clip relative to the dominant eigenvalue so numerical noise around zero
    // cannot leak into the factor's range.
    const double floor = 1e-14 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
    const RealVec vals =
        (eig.eigenvalues().array() > floor).select(eig.eigenvalues(), RealVec::Zero(covariance.rows()));
    return eig.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("ArModel: alpha must lie in [0, 1]");
}

}  // namespace

ArModel::ArModel(double alpha, const Mat& covariance) : alpha_(alpha) {
    check_alpha(alpha);
    roots_.push_back(hermitian_root(covariance));
    dim_ = covariance.rows();
    repeats_ = 1;
}

ArModel::ArModel(double alpha, const ExtendedChannelCovariance& covariance) : alpha_(alpha) {
    check_alpha(alpha);
    if (covariance.blocks.empty())
        throw std::invalid_argument("ArModel: extended covariance has no blocks");
    roots_.reserve(covariance.blocks.size());
    for (const auto& block : covariance.blocks) roots_.push_back(hermitian_root(block));
    repeats_ = covariance.user_count;
    dim_ = covariance.dim();
}

Vec ArModel::draw(Rng& rng) const {
    if (repeats_ == 1 && roots_.size() == 1) {
        return roots_.front() * rng.cnormal_vector(roots_.front().cols());
    }
    Vec h(dim_);
    Eigen::Index off = 0;
    for (int k = 0; k < repeats_; ++k) {
        for (const auto& root : roots_) {
            h.segment(off, root.rows()) = root * rng.cnormal_vector(root.cols());
            off += root.rows();
        }
    }
    return h;
}

ChannelState sample_initial(const ArModel& model, Rng& rng) {
    return ChannelState{model.draw(rng), 0};
}

ChannelState evolve(const ChannelState& state, const ArModel& model, Rng& rng) {
    if (state.h.size() != model.dim())
        throw std::invalid_argument("evolve: state dimension does not match the model");
    const double alpha = model.alpha();
    const double innovation_scale = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    ChannelState next;
    next.h = alpha * state.h + innovation_scale * model.draw(rng);
    next.epoch = state.epoch + 1;
    return next;
}

GaussianInterference::GaussianInterference(const Mat& covariance) {
    if (covariance.rows() != covariance.cols())
        throw std::invalid_argument("GaussianInterference: covariance must be square");
    Eigen::LLT<Mat> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "GaussianInterference: covariance is not positive definite, factorization failed");
    root_ = llt.matrixL();
}

Vec GaussianInterference::sample(Rng& rng) { return root_ * rng.cnormal_vector(root_.cols()); }

ExplicitInterference::SymbolGenerator ExplicitInterference::qpsk(double symbol_energy) {
    const double a = std::sqrt(symbol_energy / 2.0);
    return [a](Rng& rng) {
        const std::uint64_t b = rng.bits();
        return cplx(b & 1 ? a : -a, b & 2 ? a : -a);
    };
}

ExplicitInterference::ExplicitInterference(const ArrayGeometry& geometry,
                                           const std::vector<GroupProfile>& interferers,
                                           double symbol_energy, double noise_power, double alpha,
                                           SymbolGenerator symbols, int quadrature_points)
    : n_(geometry.element_count),
      noise_power_(noise_power),
      symbols_(symbols ? std::move(symbols) : qpsk(symbol_energy)) {
    geometry.validate();
    if (noise_power < 0.0)
        throw std::invalid_argument("ExplicitInterference: noise_power must be nonnegative");
    if (!(symbol_energy >= 0.0))
        throw std::invalid_argument("ExplicitInterference: symbol_energy must be nonnegative");
    for (const auto& profile : interferers) {
        profile.validate();
        std::vector<Mat> spatial;
        spatial.reserve(static_cast<std::size_t>(profile.memory));
        for (const auto& sector : profile.sectors)
            spatial.push_back(sector_covariance(geometry, sector, quadrature_points));
        Group group;
        group.profile = profile;
        group.model = std::make_unique<ArModel>(alpha, extended_covariance(profile, spatial));
        group.amplitude = std::sqrt(profile.relative_power);
        group.taps.assign(static_cast<std::size_t>(profile.user_count),
                          std::vector<cplx>(static_cast<std::size_t>(profile.memory), cplx(0, 0)));
        groups_.push_back(std::move(group));
    }
}

Vec ExplicitInterference::sample(Rng& rng) {
    if (!primed_) {
        // Stationary start: draw the channels and a full symbol history so the
        // very first sample already has every tap active.
        for (auto& group : groups_) {
            group.state = sample_initial(*group.model, rng);
            for (auto& user : group.taps)
                for (auto& tap : user) tap = symbols_(rng);
        }
        primed_ = true;
    } else {
        for (auto& group : groups_) {
            group.state = evolve(group.state, *group.model, rng);
            for (auto& user : group.taps) {
                for (std::size_t l = user.size(); l-- > 1;) user[l] = user[l - 1];
                user[0] = symbols_(rng);
            }
        }
    }
    Vec y = std::sqrt(noise_power_) * rng.cnormal_vector(n_);
    for (const auto& group : groups_) {
        const int memory = group.profile.memory;
        for (int k = 0; k < group.profile.user_count; ++k) {
            for (int l = 0; l < memory; ++l) {
                const Eigen::Index off = (static_cast<Eigen::Index>(k) * memory + l) * n_;
                y += group.amplitude * group.taps[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] *
                     group.state.h.segment(off, n_);
            }
        }
    }
    return y;
}

Vec observe_full(const ChannelState& state, const Vec& training, InterferenceSource& interference,
                 Rng& rng) {
    if (training.size() == 0 || state.h.size() % training.size() != 0)
        throw std::invalid_argument("observe_full: channel length is not a multiple of the "
                                    "training vector length");
    const Eigen::Index n = state.h.size() / training.size();
    if (interference.dim() != n)
        throw std::invalid_argument("observe_full: interference dimension does not match");
    Vec y = interference.sample(rng);
    for (Eigen::Index j = 0; j < training.size(); ++j)
        y += std::conj(training(j)) * state.h.segment(j * n, n);
    return y;
}

}  // namespace beamkal

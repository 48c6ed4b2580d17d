#include "beamkal/kalman.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamkal/training.hpp"

namespace beamkal {

namespace {

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

// P * (x (x) I_N): accumulate the column blocks of P weighted by x.
Mat right_kron_apply(const Mat& p, const Vec& x, Eigen::Index n) {
    Mat out = Mat::Zero(p.rows(), n);
    for (Eigen::Index j = 0; j < x.size(); ++j) out += x(j) * p.middleCols(j * n, n);
    return out;
}

}  // namespace

KalmanFilter::KalmanFilter(const ExtendedChannelCovariance& prior, double alpha,
                           const KalmanOptions& options)
    : KalmanFilter(prior.dense(), prior.user_count, alpha, options) {}

KalmanFilter::KalmanFilter(const Mat& prior, int user_count, double alpha,
                           const KalmanOptions& options)
    : R_h_(prior), P_(prior), alpha_(alpha), user_count_(user_count), options_(options) {
    if (prior.rows() != prior.cols())
        throw std::invalid_argument("KalmanFilter: prior covariance must be square");
    if (user_count < 1) throw std::invalid_argument("KalmanFilter: user_count must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("KalmanFilter: alpha must lie in [0, 1]");
    h_ = Vec::Zero(prior.rows());
}

InnovationRecord KalmanFilter::measurement_update(const Vec& y, const Vec& training,
                                                  const Mat& beamformer, const Mat& interference) {
    if (phase_ != Phase::predicted)
        throw std::logic_error("measurement_update: filter is not in the predicted phase");
    const Eigen::Index n = beamformer.rows();
    const Eigen::Index d = beamformer.cols();
    if (training.size() * n != P_.rows())
        throw std::invalid_argument("measurement_update: training/beamformer dimensions do not "
                                    "match the state");
    if (y.size() != d)
        throw std::invalid_argument("measurement_update: observation must already live in the "
                                    "beamspace");
    if (interference.rows() != n || interference.cols() != n)
        throw std::invalid_argument("measurement_update: interference covariance must be N x N");

    prior_P_ = P_;
    have_prior_ = true;

    const Mat projected_interference = hermitize(beamformer.adjoint() * interference * beamformer);
    const Mat pxi = right_kron_apply(P_, training, n);  // P (x (x) I)
    const Mat w = pxi * beamformer;                     // P Psi
    // (x (x) I)^H P (x (x) I), then squeeze through S on both sides.
    Mat mid = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < training.size(); ++j)
        mid += std::conj(training(j)) * pxi.middleRows(j * n, n);
    const Mat e = hermitize(beamformer.adjoint() * mid * beamformer) + projected_interference;

    Eigen::LDLT<Mat> ldlt(e);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("measurement_update: innovation covariance factorization failed");
    const RealVec pivots = ldlt.vectorD().real();
    if (pivots.minCoeff() <= 1e-12 * pivots.maxCoeff())
        throw std::runtime_error("measurement_update: innovation covariance is numerically "
                                 "singular; check that the beamformer has full column rank");

    const Vec z = y - apply_measurement_adjoint(training, beamformer, h_);
    const Mat gain = ldlt.solve(w.adjoint()).adjoint();  // P Psi E^-1

    h_ += gain * z;
    if (options_.joseph_form) {
        const Mat a = P_ - gain * w.adjoint();  // (I - K Psi^H) P
        const Mat b = right_kron_apply(a, training, n) * beamformer;  // A Psi
        P_ = hermitize(a - b * gain.adjoint() + gain * projected_interference * gain.adjoint());
    } else {
        P_ = hermitize(P_ - gain * w.adjoint());
    }
    phase_ = Phase::updated;
    return InnovationRecord{z, e, gain};
}

void KalmanFilter::predict() {
    const double decay = alpha_ * alpha_;
    P_ = decay * P_ + (1.0 - decay) * R_h_;
    h_ *= alpha_;
    epoch_ += 1;
    phase_ = Phase::predicted;
}

void KalmanFilter::multi_step_predict(int steps) {
    if (steps < 1) throw std::invalid_argument("multi_step_predict: steps must be >= 1");
    const double decay = std::pow(alpha_, 2.0 * steps);
    P_ = decay * P_ + (1.0 - decay) * R_h_;
    h_ *= std::pow(alpha_, steps);
    epoch_ += steps;
    phase_ = Phase::predicted;
}

double KalmanFilter::mse() const {
    if (phase_ != Phase::updated)
        throw std::logic_error("mse: defined for the post-update covariance");
    return P_.trace().real() / user_count_;
}

double KalmanFilter::log_det_covariance() const {
    Eigen::LDLT<Mat> ldlt(P_);
    const RealVec pivots = ldlt.vectorD().real();
    const double cutoff = 1e-12 * pivots.maxCoeff();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < pivots.size(); ++i)
        if (pivots(i) > cutoff) log_det += std::log(pivots(i));
    return log_det;
}

double KalmanFilter::information_form_check(const Vec& training, const Mat& beamformer,
                                            const Mat& interference) const {
    if (!have_prior_ || phase_ != Phase::updated)
        throw std::logic_error("information_form_check: call right after a measurement update");
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::FullPivLU<Mat> post(P_);
    Eigen::FullPivLU<Mat> prior(prior_P_);
    if (!post.isInvertible() || !prior.isInvertible()) return inf;
    const Mat projected_interference =
        hermitize(beamformer.adjoint() * interference * beamformer);
    Eigen::LDLT<Mat> c(projected_interference);
    if (c.info() != Eigen::Success) return inf;
    const Mat psi = measurement_matrix(training, beamformer);
    const Mat lhs = post.inverse();
    const Mat rhs = prior.inverse() + psi * c.solve(psi.adjoint());
    return (lhs - rhs).norm() / lhs.norm();
}

Vec batch_mmse_oracle(const std::vector<Vec>& observations, const std::vector<Vec>& trainings,
                      const Mat& prior, const Mat& interference, double alpha) {
    if (alpha != 1.0)
        throw std::invalid_argument("batch_mmse_oracle: defined for the static channel only "
                                    "(alpha = 1)");
    if (observations.size() != trainings.size())
        throw std::invalid_argument("batch_mmse_oracle: one training vector per observation");
    const Eigen::Index dim = prior.rows();
    if (dim > 64)
        throw std::invalid_argument("batch_mmse_oracle: guarded to total dimension <= 64");
    if (observations.empty()) return Vec::Zero(dim);

    const Eigen::Index n = interference.rows();
    const Eigen::Index t = static_cast<Eigen::Index>(observations.size());
    Mat phi = Mat::Zero(dim, n * t);  // stacked x_j (x) I_N blocks
    Vec stacked(n * t);
    for (Eigen::Index j = 0; j < t; ++j) {
        const Vec& x = trainings[static_cast<std::size_t>(j)];
        if (x.size() * n != dim)
            throw std::invalid_argument("batch_mmse_oracle: training length does not match");
        for (Eigen::Index b = 0; b < x.size(); ++b)
            phi.block(b * n, j * n, n, n) = x(b) * Mat::Identity(n, n);
        stacked.segment(j * n, n) = observations[static_cast<std::size_t>(j)];
    }
    Mat gram = phi.adjoint() * prior * phi;
    for (Eigen::Index j = 0; j < t; ++j) gram.block(j * n, j * n, n, n) += interference;
    return prior * (phi * gram.ldlt().solve(stacked));
}

}  // namespace beamkal

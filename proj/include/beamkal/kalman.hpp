// Reduced-rank Kalman tracker for the stacked group channel. Observations
// arrive already projected into the beamspace; every product with the
// measurement matrix x (x) S exploits the Kronecker structure, so the
// N*L*K x N map is never materialized.

#pragma once

#include <vector>

#include "beamkal/covariance.hpp"
#include "beamkal/types.hpp"

namespace beamkal {

struct KalmanOptions {
    // Joseph-form covariance update; costlier, better conditioned.
    bool joseph_form = false;
};

struct InnovationRecord {
    Vec innovation;            // z = y - (x (x) S)^H h_hat
    Mat innovation_covariance; // E, Hermitian positive definite
    Mat gain;                  // K, dim x D
};

class KalmanFilter {
public:
    enum class Phase { predicted, updated };

    KalmanFilter(const ExtendedChannelCovariance& prior, double alpha,
                 const KalmanOptions& options = {});
    KalmanFilter(const Mat& prior, int user_count, double alpha,
                 const KalmanOptions& options = {});

    Phase phase() const { return phase_; }
    long epoch() const { return epoch_; }
    const Vec& estimate() const { return h_; }
    const Mat& covariance() const { return P_; }

    // One beamspace observation: innovation, gain solve (Hermitian
    // factorization, never an explicit inverse), state and covariance
    // update with symmetrization.
    InnovationRecord measurement_update(const Vec& y, const Vec& training, const Mat& beamformer,
                                        const Mat& interference);

    // h <- alpha*h, P <- alpha^2*P + (1-alpha^2)*R_h. Composes freely, so it
    // is accepted in either phase.
    void predict();
    // Closed form for M prediction steps.
    void multi_step_predict(int steps);

    // trace(P)/K_g after an update.
    double mse() const;
    // Natural-log pseudo-determinant of P (pivots below 1e-12 of the largest
    // are skipped), usable in either phase.
    double log_det_covariance() const;

    // Residual of the information-form identity
    //   P_post^-1 = P_prior^-1 + Psi (S^H R_eta S)^-1 Psi^H
    // relative to ||P_post^-1||_F, for the most recent update. Returns
    // infinity when either covariance is singular. Diagnostic only.
    double information_form_check(const Vec& training, const Mat& beamformer,
                                  const Mat& interference) const;

private:
    Mat R_h_;
    Mat P_;
    Mat prior_P_;
    Vec h_;
    double alpha_ = 1.0;
    int user_count_ = 1;
    long epoch_ = 0;
    Phase phase_ = Phase::predicted;
    bool have_prior_ = false;
    KalmanOptions options_;
};

// Linear MMSE estimate from all observations of a static channel (alpha = 1),
// solved in one shot on the stacked model. Validation oracle; guarded to
// total dimension <= 64.
Vec batch_mmse_oracle(const std::vector<Vec>& observations, const std::vector<Vec>& trainings,
                      const Mat& prior, const Mat& interference, double alpha);

}  // namespace beamkal

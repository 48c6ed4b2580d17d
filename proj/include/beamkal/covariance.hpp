// Second-order statistics: array steering, per-sector spatial covariances,
// the aggregate interference-plus-noise covariance and the block-diagonal
// covariance of the stacked group channel.

#pragma once

#include <vector>

#include "beamkal/types.hpp"

namespace beamkal {

// Array response for a plane wave from the given azimuth (degrees,
// strictly inside (-90, 90)). Entry n is exp(i*2*pi*spacing*n*sin(az)).
Vec steering_vector(const ArrayGeometry& geometry, double azimuth_deg);

// One-ring sector covariance: uniform angular power over the sector,
// discretized by the midpoint rule, normalized to unit trace.
// Hermitian PSD by construction; a zero-width sector gives a rank-1 matrix.
Mat sector_covariance(const ArrayGeometry& geometry, const AngularSector& sector,
                      int quadrature_points = 360);

// Interference-plus-noise covariance seen by the serving group:
//   R_eta = E_s * sum_g' gamma_g' * K_g' * sum_l rho_l * R_l^(g') + N_0 * I.
// N_0 must be positive so the result is invertible.
Mat interference_covariance(const ArrayGeometry& geometry, const GroupProfile& serving,
                            const std::vector<GroupProfile>& interferers, double symbol_energy,
                            double noise_power, int quadrature_points = 360);

// Covariance of the stacked group channel vector. Delay taps are mutually
// uncorrelated and users share statistics, so the full matrix is
// block-diagonal: user_count repetitions of diag(rho_0*R_0, ..., rho_{L-1}*R_{L-1}).
// Only the per-delay blocks are stored.
struct ExtendedChannelCovariance {
    std::vector<Mat> blocks;  // rho_l * R_l, each N x N
    int user_count = 1;

    Eigen::Index antenna_count() const { return blocks.empty() ? 0 : blocks.front().rows(); }
    int memory() const { return static_cast<int>(blocks.size()); }
    Eigen::Index dim() const { return antenna_count() * memory() * user_count; }
    double trace() const;
    Mat dense() const;
};

ExtendedChannelCovariance extended_covariance(const GroupProfile& profile,
                                              const std::vector<Mat>& spatial);

}  // namespace beamkal

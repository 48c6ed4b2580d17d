// Common scalar/matrix aliases and the geometric/statistical descriptors
// shared by all modules.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace beamkal {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

// Uniform linear array along one axis; spacing is measured in wavelengths.
struct ArrayGeometry {
    int element_count = 1;
    double element_spacing = 0.5;

    void validate() const {
        if (element_count < 1)
            throw std::invalid_argument("ArrayGeometry: element_count must be >= 1");
        if (!(element_spacing > 0.0))
            throw std::invalid_argument("ArrayGeometry: element_spacing must be > 0");
    }
};

// Azimuth support of one multipath component, in degrees.
// Endpoints must stay strictly inside (-90, 90); zero width is allowed.
struct AngularSector {
    double lower_deg = 0.0;
    double upper_deg = 0.0;

    void validate() const {
        if (lower_deg > upper_deg)
            throw std::invalid_argument("AngularSector: lower bound exceeds upper bound");
        if (lower_deg <= -90.0 || upper_deg >= 90.0)
            throw std::invalid_argument("AngularSector: bounds must lie inside (-90, 90) degrees");
    }

    double center() const { return 0.5 * (lower_deg + upper_deg); }
};

// Second-order description of one user group: per-delay angular sectors,
// power-delay profile, user count and channel memory.
struct GroupProfile {
    int group_id = 0;
    int user_count = 1;                  // K_g
    int memory = 1;                      // L_g, number of delay taps
    std::vector<AngularSector> sectors;  // one per delay
    std::vector<double> pdp;             // rho_l, sums to 1
    double relative_power = 1.0;         // gamma, received power relative to the served group

    void validate() const {
        if (user_count < 1)
            throw std::invalid_argument("GroupProfile: user_count must be >= 1");
        if (memory < 1)
            throw std::invalid_argument("GroupProfile: memory must be >= 1");
        if (static_cast<int>(sectors.size()) != memory)
            throw std::invalid_argument("GroupProfile: need one sector per delay tap");
        if (static_cast<int>(pdp.size()) != memory)
            throw std::invalid_argument("GroupProfile: need one pdp entry per delay tap");
        for (const auto& s : sectors) s.validate();
        double total = 0.0;
        for (double p : pdp) {
            if (p < 0.0)
                throw std::invalid_argument("GroupProfile: pdp entries must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("GroupProfile: pdp must sum to 1");
        if (relative_power < 0.0)
            throw std::invalid_argument("GroupProfile: relative_power must be nonnegative");
    }

    // Uniform profile 1/L, the default when nothing else is known.
    static std::vector<double> uniform_pdp(int memory) {
        return std::vector<double>(static_cast<std::size_t>(memory), 1.0 / memory);
    }
};

}  // namespace beamkal

#include "beamkal/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace beamkal {

Vec steering_vector(const ArrayGeometry& geometry, double azimuth_deg) {
    geometry.validate();
    if (azimuth_deg <= -90.0 || azimuth_deg >= 90.0)
        throw std::invalid_argument("steering_vector: azimuth must lie inside (-90, 90) degrees");
    const double s = std::sin(azimuth_deg * M_PI / 180.0);
    Vec a(geometry.element_count);
    for (int n = 0; n < geometry.element_count; ++n) {
        const double phase = 2.0 * M_PI * geometry.element_spacing * n * s;
        a(n) = cplx(std::cos(phase), std::sin(phase));
    }
    return a;
}

Mat sector_covariance(const ArrayGeometry& geometry, const AngularSector& sector,
                      int quadrature_points) {
    geometry.validate();
    sector.validate();
    if (quadrature_points < 1)
        throw std::invalid_argument("sector_covariance: quadrature_points must be >= 1");
    const int n = geometry.element_count;
    Mat r = Mat::Zero(n, n);
    const double width = sector.upper_deg - sector.lower_deg;
    for (int q = 0; q < quadrature_points; ++q) {
        const double theta = sector.lower_deg + (q + 0.5) * width / quadrature_points;
        const Vec a = steering_vector(geometry, theta);
        r.selfadjointView<Eigen::Lower>().rankUpdate(a, 1.0 / quadrature_points);
    }
    r = r.selfadjointView<Eigen::Lower>();
    return r / r.trace().real();
}

Mat interference_covariance(const ArrayGeometry& geometry, const GroupProfile& serving,
                            const std::vector<GroupProfile>& interferers, double symbol_energy,
                            double noise_power, int quadrature_points) {
    geometry.validate();
    serving.validate();
    if (!(noise_power > 0.0))
        throw std::invalid_argument(
            "interference_covariance: noise_power must be positive so the result is invertible");
    if (!(symbol_energy >= 0.0))
        throw std::invalid_argument("interference_covariance: symbol_energy must be nonnegative");
    const int n = geometry.element_count;
    Mat r = noise_power * Mat::Identity(n, n);
    for (const auto& group : interferers) {
        group.validate();
        if (group.group_id == serving.group_id)
            throw std::invalid_argument(
                "interference_covariance: interferer list contains the serving group");
        Mat mix = Mat::Zero(n, n);
        for (int l = 0; l < group.memory; ++l)
            mix += group.pdp[l] * sector_covariance(geometry, group.sectors[l], quadrature_points);
        r += symbol_energy * group.relative_power * group.user_count * mix;
    }
    return r;
}

double ExtendedChannelCovariance::trace() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace().real();
    return t * user_count;
}

Mat ExtendedChannelCovariance::dense() const {
    const Eigen::Index n = antenna_count();
    const int l_count = memory();
    Mat full = Mat::Zero(dim(), dim());
    for (int k = 0; k < user_count; ++k) {
        for (int l = 0; l < l_count; ++l) {
            const Eigen::Index off = (static_cast<Eigen::Index>(k) * l_count + l) * n;
            full.block(off, off, n, n) = blocks[static_cast<std::size_t>(l)];
        }
    }
    return full;
}

ExtendedChannelCovariance extended_covariance(const GroupProfile& profile,
                                              const std::vector<Mat>& spatial) {
    profile.validate();
    if (static_cast<int>(spatial.size()) != profile.memory)
        throw std::invalid_argument("extended_covariance: need one spatial covariance per delay");
    ExtendedChannelCovariance out;
    out.user_count = profile.user_count;
    out.blocks.reserve(spatial.size());
    for (int l = 0; l < profile.memory; ++l) {
        const Mat& r = spatial[static_cast<std::size_t>(l)];
        if (r.rows() != r.cols() || (l > 0 && r.rows() != out.blocks.front().rows()))
            throw std::invalid_argument("extended_covariance: spatial covariances must be square "
                                        "and equally sized");
        out.blocks.push_back(profile.pdp[static_cast<std::size_t>(l)] * r);
    }
    return out;
}

}  // namespace beamkal

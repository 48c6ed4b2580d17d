// Seedable random stream with a portable normal generator.
//
// std::normal_distribution is implementation-defined, so reproducibility
// across standard libraries requires rolling the transform by hand; the
// Box-Muller pair on top of mt19937_64 is deterministic everywhere.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "beamkal/types.hpp"

namespace beamkal {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double uniform() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Standard circular complex normal: unit variance split over both parts.
    cplx cnormal() {
        const double re = normal();
        const double im = normal();
        return cplx(re * M_SQRT1_2, im * M_SQRT1_2);
    }

    Vec cnormal_vector(Eigen::Index n) {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
        return v;
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace beamkal

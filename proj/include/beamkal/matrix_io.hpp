// Flat-file exchange format for complex matrices, used to cache scenario
// covariances and to dump trajectories for inspection.
//
// Layout: one ASCII header line "cmatrix <rows> <cols> complex128\n"
// followed by rows*cols little-endian doubles in row-major order with
// real and imaginary parts interleaved.

#pragma once

#include <string>

#include "beamkal/types.hpp"

namespace beamkal {

void save_matrix(const std::string& path, const Mat& m);
Mat load_matrix(const std::string& path);

}  // namespace beamkal

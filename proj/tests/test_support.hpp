// Shared helpers for the unit tests: seeded random matrices and a few dense
// reference computations kept independent of the library internals.

#pragma once

#include <algorithm>
#include <cmath>

#include "beamkal/rng.hpp"
#include "beamkal/types.hpp"

namespace testutil {

using beamkal::Mat;
using beamkal::Vec;
using beamkal::cplx;

inline Mat rand_mat(beamkal::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.cnormal();
    return m;
}

inline Vec rand_vec(beamkal::Rng& rng, Eigen::Index n) { return rng.cnormal_vector(n); }

inline Mat rand_psd(beamkal::Rng& rng, Eigen::Index n, Eigen::Index rank = -1) {
    if (rank < 0) rank = n;
    const Mat f = rand_mat(rng, n, rank);
    return f * f.adjoint() / static_cast<double>(n);
}

inline Mat rand_pd(beamkal::Rng& rng, Eigen::Index n, double ridge = 0.1) {
    return rand_psd(rng, n) + ridge * Mat::Identity(n, n);
}

// Dense Kronecker product, written out so library code never supplies its own
// reference value.
inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

template <class A, class B>
double rel_err(const A& a, const B& b) {
    const double scale = b.norm();
    return (a - b).norm() / (scale > 0 ? scale : 1.0);
}

template <class A>
double max_abs(const A& a) {
    return a.cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Mat& hermitian) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
    return es.eigenvalues().minCoeff();
}

}  // namespace testutil

#include "beamkal/beamspace.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamkal/covariance.hpp"

namespace beamkal {

namespace {

constexpr double kEigenvalueClip = 1e-14;
// Squared residual norm (in the interference inner product) below which a
// candidate beam is treated as already covered by the accepted set.
constexpr double kDuplicateTol = 1e-6;

Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

GeneralizedEigenPair generalized_eigendecomposition(const Mat& A, const Mat& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw std::invalid_argument("generalized_eigendecomposition: matrices must be square and "
                                    "equally sized");
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(A, B,
                                                         Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("generalized_eigendecomposition: factorization failed; the "
                                 "right-hand matrix must be positive definite");
    const Eigen::Index n = A.rows();
    GeneralizedEigenPair out;
    out.values = RealVec(n);
    out.vectors = Mat(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = solver.eigenvalues()(n - 1 - i);
        out.values(i) = v < kEigenvalueClip ? 0.0 : v;
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

Mat Beamformer::delay_block(int delay) const {
    if (selection.empty())
        throw std::invalid_argument("Beamformer::delay_block: no per-delay bookkeeping available");
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < dimension(); ++c)
        if (selection[static_cast<std::size_t>(c)].delay == delay) cols.push_back(c);
    Mat block(columns.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i)
        block.col(static_cast<Eigen::Index>(i)) = columns.col(cols[i]);
    return block;
}

std::vector<int> Beamformer::block_sizes(int memory) const {
    std::vector<int> sizes(static_cast<std::size_t>(memory), 0);
    for (const auto& s : selection) sizes.at(static_cast<std::size_t>(s.delay)) += 1;
    return sizes;
}

std::vector<Selection> pooled_order(const SnrLedger& ledger) {
    std::vector<std::pair<double, Selection>> pool;
    for (int l = 0; l < ledger.memory(); ++l) {
        const RealVec& values = ledger.current[static_cast<std::size_t>(l)];
        for (Eigen::Index i = 0; i < values.size(); ++i)
            pool.push_back({values(i), Selection{l, static_cast<int>(i)}});
    }
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        if (a.second.delay != b.second.delay) return a.second.delay < b.second.delay;
        return a.second.index < b.second.index;
    });
    std::vector<Selection> order;
    order.reserve(pool.size());
    for (const auto& entry : pool) order.push_back(entry.second);
    return order;
}

std::vector<Selection> allocate_dimensions(const SnrLedger& ledger, int dimension, int user_count,
                                           double symbol_energy, int block_length) {
    if (user_count < 1 || block_length < 1 || !(symbol_energy >= 0.0))
        throw std::invalid_argument("allocate_dimensions: invalid objective constants");
    const auto order = pooled_order(ledger);
    if (dimension < 0 || dimension > static_cast<int>(order.size()))
        throw std::invalid_argument("allocate_dimensions: dimension exceeds the candidate pool");
    return {order.begin(), order.begin() + dimension};
}

void update_ledger(SnrLedger& ledger, const std::vector<Selection>& selected, double symbol_energy,
                   int block_length, double alpha) {
    const double excitation = symbol_energy * block_length;
    for (const auto& s : selected) {
        double& v = ledger.current.at(static_cast<std::size_t>(s.delay))(s.index);
        v = v / (1.0 + excitation * v);
    }
    const double memory_factor = std::pow(alpha, 2.0 * block_length);
    for (int l = 0; l < ledger.memory(); ++l) {
        ledger.current[static_cast<std::size_t>(l)] =
            memory_factor * ledger.current[static_cast<std::size_t>(l)] +
            (1.0 - memory_factor) * ledger.initial[static_cast<std::size_t>(l)];
    }
    ledger.block += 1;
}

BeamformerDesigner::BeamformerDesigner(const std::vector<Mat>& spatial,
                                       const std::vector<double>& pdp, const Mat& interference)
    : interference_(interference) {
    if (spatial.empty() || spatial.size() != pdp.size())
        throw std::invalid_argument("BeamformerDesigner: need one spatial covariance and pdp "
                                    "weight per delay");
    pairs_.reserve(spatial.size());
    for (std::size_t l = 0; l < spatial.size(); ++l)
        pairs_.push_back(generalized_eigendecomposition(pdp[l] * spatial[l], interference));
}

SnrLedger BeamformerDesigner::initial_ledger() const {
    SnrLedger ledger;
    for (const auto& pair : pairs_) {
        ledger.current.push_back(pair.values);
        ledger.initial.push_back(pair.values);
    }
    return ledger;
}

Beamformer BeamformerDesigner::assemble(const SnrLedger& ledger, int dimension) const {
    const Eigen::Index n = antenna_count();
    const int pool_size = memory() * static_cast<int>(n);
    if (dimension < 1 || dimension > pool_size)
        throw std::invalid_argument("assemble: dimension must lie in [1, N*L]");

    if (dimension == pool_size) {
        // Full-dimension request: return the entire eigenbasis of every tap.
        Beamformer full;
        full.columns = Mat(n, pool_size);
        for (int l = 0; l < memory(); ++l) {
            full.columns.middleCols(static_cast<Eigen::Index>(l) * n, n) =
                pairs_[static_cast<std::size_t>(l)].vectors;
            for (int i = 0; i < static_cast<int>(n); ++i) full.selection.push_back({l, i});
        }
        return full;
    }

    std::vector<std::vector<std::pair<int, Vec>>> accepted(
        static_cast<std::size_t>(memory()));  // per delay: (eigen index, column)
    std::vector<const Vec*> basis;            // acceptance order, for orthogonalization
    std::vector<Vec> storage;
    storage.reserve(static_cast<std::size_t>(dimension));

    int taken = 0;
    for (const auto& cand : pooled_order(ledger)) {
        if (taken == dimension) break;
        Vec v = pairs_[static_cast<std::size_t>(cand.delay)].vectors.col(cand.index);
        // Two Gram-Schmidt passes in the interference inner product keep the
        // accepted set orthonormal to machine precision.
        for (int pass = 0; pass < 2; ++pass)
            for (const Vec* b : basis) v -= (*b) * (b->dot(interference_ * v));
        const double norm2 = std::real(v.dot(interference_ * v));
        if (norm2 < kDuplicateTol) continue;  // direction already covered
        v /= std::sqrt(norm2);
        storage.push_back(std::move(v));
        basis.push_back(&storage.back());
        accepted[static_cast<std::size_t>(cand.delay)].push_back(
            {cand.index, storage.back()});
        ++taken;
    }
    if (taken < dimension)
        throw std::runtime_error("assemble: candidate pool exhausted before reaching the "
                                 "requested dimension");

    Beamformer out;
    out.columns = Mat(n, dimension);
    Eigen::Index c = 0;
    for (int l = 0; l < memory(); ++l) {
        auto& group = accepted[static_cast<std::size_t>(l)];
        std::sort(group.begin(), group.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [index, column] : group) {
            out.columns.col(c++) = column;
            out.selection.push_back({l, index});
        }
    }
    return out;
}

Beamformer BeamformerDesigner::fixed_geb(int dimension) const {
    return assemble(initial_ledger(), dimension);
}

std::vector<Beamformer> BeamformerDesigner::sequential_geb(int dimension, int user_count,
                                                           double symbol_energy, int block_length,
                                                           double alpha, int blocks) const {
    if (blocks < 1) throw std::invalid_argument("sequential_geb: need at least one block");
    if (user_count < 1 || block_length < 1)
        throw std::invalid_argument("sequential_geb: user_count and block_length must be >= 1");
    SnrLedger ledger = initial_ledger();
    std::vector<Beamformer> out;
    out.reserve(static_cast<std::size_t>(blocks));
    for (int m = 0; m < blocks; ++m) {
        Beamformer s = assemble(ledger, dimension);
        // The measured directions are the ones actually assembled; they are
        // the allocation unless a duplicate was replaced further down the pool.
        update_ledger(ledger, s.selection, symbol_energy, block_length, alpha);
        out.push_back(std::move(s));
    }
    return out;
}

Beamformer dft_beamspace(const std::vector<Mat>& spatial, const std::vector<double>& pdp,
                         int dimension) {
    if (spatial.empty() || spatial.size() != pdp.size())
        throw std::invalid_argument("dft_beamspace: need one spatial covariance and pdp weight "
                                    "per delay");
    Mat total = Mat::Zero(spatial.front().rows(), spatial.front().cols());
    for (std::size_t l = 0; l < spatial.size(); ++l) total += pdp[l] * spatial[l];
    const Eigen::Index n = total.rows();
    if (dimension < 1 || dimension > n)
        throw std::invalid_argument("dft_beamspace: dimension must lie in [1, N]");
    Eigen::SelfAdjointEigenSolver<Mat> eig(hermitize(total));
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("dft_beamspace: eigendecomposition failed");
    Beamformer out;
    out.columns = Mat(n, dimension);
    for (int i = 0; i < dimension; ++i) out.columns.col(i) = eig.eigenvectors().col(n - 1 - i);
    return out;
}

std::vector<double> beam_pattern(const Beamformer& beamformer, const ArrayGeometry& geometry,
                                 const std::vector<double>& azimuth_grid_deg) {
    std::vector<double> gains;
    gains.reserve(azimuth_grid_deg.size());
    for (double az : azimuth_grid_deg) {
        const Vec a = steering_vector(geometry, az);
        const double g = (beamformer.columns.adjoint() * a).squaredNorm();
        gains.push_back(10.0 * std::log10(std::max(g, 1e-30)));
    }
    return gains;
}

double captured_power(const Mat& columns, const Mat& total_covariance) {
    const Mat gram = columns.adjoint() * columns;
    Eigen::LDLT<Mat> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("captured_power: beamformer columns are not linearly independent");
    const Mat cross = columns.adjoint() * total_covariance * columns;  // S^H R S
    const double captured = ldlt.solve(cross).trace().real();
    return captured / total_covariance.trace().real();
}

IdealizedBlockRecursion::IdealizedBlockRecursion(const std::vector<Mat>& spatial,
                                                 const std::vector<double>& pdp) {
    if (spatial.empty() || spatial.size() != pdp.size())
        throw std::invalid_argument("IdealizedBlockRecursion: need one spatial covariance and pdp "
                                    "weight per delay");
    for (std::size_t l = 0; l < spatial.size(); ++l) {
        blocks_.push_back(pdp[l] * spatial[l]);
        initial_.push_back(blocks_.back());
    }
}

void IdealizedBlockRecursion::measure(const Mat& beamformer, const Mat& interference,
                                      double symbol_energy, int block_length) {
    const double excitation = symbol_energy * block_length;
    const Mat c = hermitize(beamformer.adjoint() * interference * beamformer);
    for (auto& a : blocks_) {
        const Mat g = a * beamformer;                                  // A S
        const Mat mid = c + excitation * (beamformer.adjoint() * g);   // C + EsM S^H A S
        a = hermitize(a - excitation * g * mid.ldlt().solve(g.adjoint()));
    }
}

void IdealizedBlockRecursion::relax(double alpha, int block_length) {
    const double memory_factor = std::pow(alpha, 2.0 * block_length);
    for (std::size_t l = 0; l < blocks_.size(); ++l)
        blocks_[l] = memory_factor * blocks_[l] + (1.0 - memory_factor) * initial_[l];
}

Mat IdealizedBlockRecursion::projected_snr(int delay, const Mat& beamformer,
                                           const Mat& interference) const {
    const Mat c = hermitize(beamformer.adjoint() * interference * beamformer);
    const Mat projected = beamformer.adjoint() * blocks_.at(static_cast<std::size_t>(delay)) *
                          beamformer;
    return c.ldlt().solve(projected);
}

}  // namespace beamkal

#include "beamkal/training.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace beamkal {

namespace {

// Maximal-length sequence from a Fibonacci LFSR seeded with all ones.
// taps holds the exponents feeding u[t+degree] (e.g. {1, 0} for x^6 + x + 1).
std::vector<int> m_sequence(int degree, const std::vector<int>& taps) {
    const int period = (1 << degree) - 1;
    std::vector<int> u(static_cast<std::size_t>(period + degree), 0);
    for (int i = 0; i < degree; ++i) u[static_cast<std::size_t>(i)] = 1;
    for (int t = 0; t < period; ++t) {
        int next = 0;
        for (int tap : taps) {
            if (tap < 0 || tap >= degree)
                throw std::invalid_argument("kasami_small_set: feedback tap out of range");
            next ^= u[static_cast<std::size_t>(t + tap)];
        }
        u[static_cast<std::size_t>(t + degree)] = next;
    }
    u.resize(static_cast<std::size_t>(period));
    int ones = 0;
    for (int b : u) ones += b;
    if (ones != (1 << (degree - 1)))
        throw std::invalid_argument(
            "kasami_small_set: feedback taps do not generate a maximal-length sequence");
    return u;
}

}  // namespace

std::vector<std::vector<int>> kasami_small_set(int degree, const std::vector<int>& feedback_taps) {
    if (degree < 2 || degree % 2 != 0)
        throw std::invalid_argument("kasami_small_set: degree must be a positive even integer");
    std::vector<int> taps = feedback_taps;
    if (taps.empty()) {
        if (degree != 6)
            throw std::invalid_argument(
                "kasami_small_set: only degree 6 has a built-in generator polynomial; "
                "pass feedback taps for other degrees");
        taps = {1, 0};
    }
    const int period = (1 << degree) - 1;
    const int decimation = (1 << (degree / 2)) + 1;
    const int set_size = 1 << (degree / 2);
    const std::vector<int> base = m_sequence(degree, taps);

    // Decimated companion sequence, period 2^(degree/2) - 1.
    std::vector<int> w(static_cast<std::size_t>(period));
    bool any = false;
    for (int t = 0; t < period; ++t) {
        w[static_cast<std::size_t>(t)] =
            base[static_cast<std::size_t>((static_cast<long long>(decimation) * t) % period)];
        any = any || w[static_cast<std::size_t>(t)] != 0;
    }
    if (!any)
        throw std::runtime_error("kasami_small_set: decimated sequence vanished; the register "
                                 "phase is degenerate");

    std::vector<std::vector<int>> set;
    set.reserve(static_cast<std::size_t>(set_size));
    set.push_back(base);
    for (int j = 0; j + 1 < set_size; ++j) {
        std::vector<int> s(static_cast<std::size_t>(period));
        for (int t = 0; t < period; ++t)
            s[static_cast<std::size_t>(t)] =
                base[static_cast<std::size_t>(t)] ^ w[static_cast<std::size_t>((t + j) % period)];
        set.push_back(std::move(s));
    }
    return set;
}

PilotBook build_pilot_book(int length, int user_count, double symbol_energy) {
    const auto set = kasami_small_set(6);
    const int period = static_cast<int>(set.front().size());
    const int available = static_cast<int>(set.size());
    if (length < 1 || length > period)
        throw std::invalid_argument("build_pilot_book: length must lie in [1, 63]");
    if (user_count < 1 || user_count > available)
        throw std::invalid_argument("build_pilot_book: user_count must lie in [1, 8]");
    if (!(symbol_energy > 0.0))
        throw std::invalid_argument("build_pilot_book: symbol_energy must be positive");
    const double amplitude = std::sqrt(symbol_energy);
    PilotBook book;
    book.symbol_energy = symbol_energy;
    book.sequences.reserve(static_cast<std::size_t>(user_count));
    for (int k = 0; k < user_count; ++k) {
        const auto& bits = set[static_cast<std::size_t>(available - user_count + k)];
        Vec seq(length);
        for (int t = 0; t < length; ++t)
            seq(t) = cplx(bits[static_cast<std::size_t>(t)] ? -amplitude : amplitude, 0.0);
        book.sequences.push_back(std::move(seq));
    }
    return book;
}

Vec training_vector(const PilotBook& book, int epoch, int memory) {
    if (memory < 1) throw std::invalid_argument("training_vector: memory must be >= 1");
    if (epoch < 0 || epoch >= book.length())
        throw std::invalid_argument("training_vector: epoch outside the pilot period");
    const int users = book.user_count();
    Vec x = Vec::Zero(static_cast<Eigen::Index>(users) * memory);
    for (int k = 0; k < users; ++k) {
        for (int l = 0; l < memory; ++l) {
            if (epoch - l >= 0)
                x(static_cast<Eigen::Index>(k) * memory + l) =
                    std::conj(book.sequences[static_cast<std::size_t>(k)](epoch - l));
        }
    }
    return x;
}

Mat measurement_matrix(const Vec& training, const Mat& beamformer) {
    const Eigen::Index n = beamformer.rows();
    Mat psi(training.size() * n, beamformer.cols());
    for (Eigen::Index j = 0; j < training.size(); ++j)
        psi.middleRows(j * n, n) = training(j) * beamformer;
    return psi;
}

Vec apply_measurement_adjoint(const Vec& training, const Mat& beamformer, const Vec& h) {
    const Eigen::Index n = beamformer.rows();
    if (h.size() != training.size() * n)
        throw std::invalid_argument("apply_measurement_adjoint: dimension mismatch");
    Vec acc = Vec::Zero(n);
    for (Eigen::Index j = 0; j < training.size(); ++j)
        acc += std::conj(training(j)) * h.segment(j * n, n);
    return beamformer.adjoint() * acc;
}

void export_pilot_book(const PilotBook& book, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_pilot_book: cannot open " + path);
    for (const auto& seq : book.sequences) {
        for (Eigen::Index t = 0; t < seq.size(); ++t) {
            if (t) out << ' ';
            out << (seq(t).real() >= 0.0 ? "+1" : "-1");
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("export_pilot_book: write failed for " + path);
}

}  // namespace beamkal

// Pilot generation: Kasami small-set codes, the per-group pilot book, the
// stacked training vector at a given epoch, and the measurement matrix.

#pragma once

#include <string>
#include <vector>

#include "beamkal/types.hpp"

namespace beamkal {

// Small Kasami set for an even LFSR degree: 2^(degree/2) binary sequences of
// period 2^degree - 1. The degree-6 generator (x^6 + x + 1, all-ones seed) is
// built in; other degrees need feedback taps for a primitive polynomial,
// given as the exponents feeding the recurrence.
std::vector<std::vector<int>> kasami_small_set(int degree,
                                               const std::vector<int>& feedback_taps = {});

// BPSK pilot sequences for one group, one row per user.
struct PilotBook {
    std::vector<Vec> sequences;  // each of length T, entries +-sqrt(E_s)
    double symbol_energy = 1.0;

    int user_count() const { return static_cast<int>(sequences.size()); }
    int length() const { return sequences.empty() ? 0 : static_cast<int>(sequences.front().size()); }
};

// The last user_count sequences of the degree-6 Kasami set (generation
// order), truncated to the first length chips, bits mapped 0 -> +sqrt(E_s),
// 1 -> -sqrt(E_s). Symbols before epoch 0 are zero.
PilotBook build_pilot_book(int length, int user_count, double symbol_energy);

// Stacked conjugate training vector at one epoch: block k holds
// [conj(x_n), ..., conj(x_{n-memory+1})] for user k, zeros before epoch 0.
Vec training_vector(const PilotBook& book, int epoch, int memory);

// Dense measurement matrix x (x) S, shape (len(x)*N) x D. Intended for small
// validation instances; large-array code paths use the structured products.
Mat measurement_matrix(const Vec& training, const Mat& beamformer);

// (x (x) S)^H h without forming the Kronecker product.
Vec apply_measurement_adjoint(const Vec& training, const Mat& beamformer, const Vec& h);

// One +-1 row per user, whitespace separated.
void export_pilot_book(const PilotBook& book, const std::string& path);

}  // namespace beamkal

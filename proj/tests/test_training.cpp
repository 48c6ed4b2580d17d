#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "beamkal/training.hpp"
#include "test_support.hpp"

using namespace beamkal;
using testutil::max_abs;

TEST_CASE("small Kasami set shape and balance") {
    const auto set = kasami_small_set(6);
    REQUIRE(set.size() == 8);
    for (const auto& seq : set) CHECK(seq.size() == 63);

    int ones = 0;
    for (int bit : set.front()) ones += bit;
    CHECK(ones == 32);

    CHECK_THROWS_AS(kasami_small_set(5), std::invalid_argument);
    CHECK_THROWS_AS(kasami_small_set(0), std::invalid_argument);
    // Degrees other than 6 need an explicit primitive polynomial.
    CHECK_THROWS_AS(kasami_small_set(8), std::invalid_argument);
    const auto set4 = kasami_small_set(4, {1, 0});
    REQUIRE(set4.size() == 4);
    for (const auto& seq : set4) CHECK(seq.size() == 15);
}

TEST_CASE("Kasami cross-correlations take exactly the three-valued spectrum") {
    const auto set = kasami_small_set(6);
    std::set<long> seen;
    for (std::size_t a = 0; a < set.size(); ++a) {
        for (std::size_t b = 0; b < set.size(); ++b) {
            if (a == b) continue;
            for (int shift = 0; shift < 63; ++shift) {
                long corr = 0;
                for (int i = 0; i < 63; ++i) {
                    const int s = set[a][i] ? -1 : 1;
                    const int t = set[b][(i + shift) % 63] ? -1 : 1;
                    corr += s * t;
                }
                seen.insert(corr);
            }
        }
    }
    CHECK(seen == std::set<long>{-9, -1, 7});
}

TEST_CASE("pilot book takes the last sequences of the set") {
    const auto set = kasami_small_set(6);
    const auto book = build_pilot_book(63, 2, 1.0);
    REQUIRE(book.user_count() == 2);
    REQUIRE(book.length() == 63);
    CHECK(book.symbol_energy == doctest::Approx(1.0));
    for (int k = 0; k < 2; ++k) {
        const auto& bits = set[6 + static_cast<std::size_t>(k)];
        for (int n = 0; n < 63; ++n) {
            const double expected = bits[n] ? -1.0 : 1.0;
            CHECK(book.sequences[k][n] == cplx(expected, 0.0));
        }
    }
}

TEST_CASE("pilot book scaling, truncation, and bounds") {
    const auto book = build_pilot_book(10, 3, 4.0);
    CHECK(book.length() == 10);
    for (const auto& seq : book.sequences)
        for (int n = 0; n < 10; ++n) CHECK(std::norm(seq[n]) == doctest::Approx(4.0));

    const auto chip = build_pilot_book(1, 1, 2.0);
    CHECK(chip.length() == 1);
    CHECK(std::abs(std::abs(chip.sequences[0][0].real()) - std::sqrt(2.0)) < 1e-15);

    CHECK_THROWS_AS(build_pilot_book(0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_pilot_book(64, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_pilot_book(10, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_pilot_book(10, 9, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_pilot_book(10, 2, 0.0), std::invalid_argument);
}

TEST_CASE("training vector stacks conjugated symbol history with zero precursors") {
    const auto book = build_pilot_book(8, 2, 1.0);

    const Vec x0 = training_vector(book, 0, 3);
    REQUIRE(x0.size() == 6);
    for (int k = 0; k < 2; ++k) {
        CHECK(x0[3 * k] == std::conj(book.sequences[k][0]));
        CHECK(x0[3 * k + 1] == cplx(0.0, 0.0));
        CHECK(x0[3 * k + 2] == cplx(0.0, 0.0));
    }

    const Vec flat = training_vector(book, 4, 1);
    REQUIRE(flat.size() == 2);
    CHECK(flat[0] == std::conj(book.sequences[0][4]));
    CHECK(flat[1] == std::conj(book.sequences[1][4]));

    const Vec x2 = training_vector(book, 2, 2);
    REQUIRE(x2.size() == 4);
    CHECK(x2[0] == std::conj(book.sequences[0][2]));
    CHECK(x2[1] == std::conj(book.sequences[0][1]));
    CHECK(x2[2] == std::conj(book.sequences[1][2]));
    CHECK(x2[3] == std::conj(book.sequences[1][1]));

    CHECK_THROWS_AS(training_vector(book, 8, 2), std::invalid_argument);
    CHECK_THROWS_AS(training_vector(book, -1, 2), std::invalid_argument);
    CHECK_THROWS_AS(training_vector(book, 0, 0), std::invalid_argument);
}

TEST_CASE("measurement matrix degenerate forms") {
    Vec one(1);
    one[0] = 1.0;
    const Mat eye = Mat::Identity(4, 4);
    CHECK(max_abs(measurement_matrix(one, eye) - eye) < 1e-15);

    Vec e1 = Vec::Zero(3);
    e1[0] = 1.0;
    Rng rng(11);
    const Mat s = testutil::rand_mat(rng, 4, 2);
    const Mat psi = measurement_matrix(e1, s);
    REQUIRE(psi.rows() == 12);
    REQUIRE(psi.cols() == 2);
    CHECK(max_abs(psi.topRows(4) - s) < 1e-15);
    CHECK(max_abs(psi.bottomRows(8)) == 0.0);
}

TEST_CASE("structured adjoint product matches the dense evaluation") {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3, users = 2, memory = 2, dim = 3;
        const Vec x = testutil::rand_vec(rng, users * memory);
        const Mat s = testutil::rand_mat(rng, n, dim);
        const Vec h = testutil::rand_vec(rng, n * users * memory);
        const Vec fast = apply_measurement_adjoint(x, s, h);
        const Vec dense = measurement_matrix(x, s).adjoint() * h;
        REQUIRE(fast.size() == dim);
        CHECK(max_abs(fast - dense) < 1e-12);
    }
    const Vec x = testutil::rand_vec(rng, 4);
    const Mat s = testutil::rand_mat(rng, 3, 2);
    CHECK_THROWS_AS(apply_measurement_adjoint(x, s, testutil::rand_vec(rng, 11)),
                    std::invalid_argument);
}

TEST_CASE("empirical pilot Gram over a full period stays near scaled identity") {
    const double es = 1.0;
    const int total = 63, users = 2, memory = 3;
    const auto book = build_pilot_book(total, users, es);
    Mat gram = Mat::Zero(users * memory, users * memory);
    for (int n = 0; n < total; ++n) {
        const Vec x = training_vector(book, n, memory);
        gram += x * x.adjoint();
    }
    gram /= es * total;
    Eigen::SelfAdjointEigenSolver<Mat> es_solver(gram - Mat::Identity(users * memory,
                                                                     users * memory));
    const double deviation = es_solver.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(deviation < 0.5);
    CHECK(deviation > 0.0);
}

TEST_CASE("pilot book export writes one sign row per user") {
    const auto book = build_pilot_book(6, 2, 9.0);
    const std::string path = "pilot_book_test.txt";
    export_pilot_book(book, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        int value = 0, count = 0;
        while (ss >> value) {
            CHECK((value == 1 || value == -1));
            const double expected = value * 3.0;
            CHECK(book.sequences[rows][count].real() == doctest::Approx(expected));
            ++count;
        }
        CHECK(count == 6);
        ++rows;
    }
    CHECK(rows == 2);
    std::remove(path.c_str());
}

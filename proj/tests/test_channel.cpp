#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "beamkal/channel.hpp"
#include "beamkal/covariance.hpp"
#include "test_support.hpp"

using namespace beamkal;
using testutil::max_abs;
using testutil::rel_err;

namespace {

GroupProfile make_profile(int id, int users, std::vector<AngularSector> sectors) {
    GroupProfile g;
    g.group_id = id;
    g.user_count = users;
    g.memory = static_cast<int>(sectors.size());
    g.sectors = std::move(sectors);
    g.pdp = GroupProfile::uniform_pdp(g.memory);
    g.relative_power = 1.0;
    return g;
}

}  // namespace

TEST_CASE("seeded rng reproduces and has sane marginals") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());

    Rng r(7);
    double sum = 0.0, sum_sq = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double u = r.uniform();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
        const double g = r.normal();
        sum += g;
        sum_sq += g * g;
    }
    CHECK(std::abs(sum / count) < 0.01);
    CHECK(std::abs(sum_sq / count - 1.0) < 0.02);

    // Unit-variance complex normal split evenly across components.
    Rng c(9);
    double var = 0.0;
    for (int i = 0; i < count; ++i) var += std::norm(c.cnormal());
    CHECK(std::abs(var / count - 1.0) < 0.02);
}

TEST_CASE("zero covariance always yields the zero channel") {
    const ArModel model(0.5, Mat::Zero(4, 4));
    Rng rng(1);
    const auto state = sample_initial(model, rng);
    CHECK(max_abs(state.h) == 0.0);
    CHECK(state.epoch == 0);
}

TEST_CASE("identity covariance reproduces itself in the sample covariance") {
    const int dim = 4, draws = 100000;
    const ArModel model(0.9, Mat::Identity(dim, dim));
    Rng rng(3);
    Mat sample = Mat::Zero(dim, dim);
    for (int i = 0; i < draws; ++i) {
        const Vec h = sample_initial(model, rng).h;
        sample += h * h.adjoint();
    }
    sample /= static_cast<double>(draws);
    CHECK(rel_err(sample, Mat::Identity(dim, dim)) < 0.05);
}

TEST_CASE("rank-1 covariance confines samples to its principal direction") {
    Rng rng(5);
    Vec u = testutil::rand_vec(rng, 5);
    u.normalize();
    const ArModel model(1.0, u * u.adjoint());
    for (int i = 0; i < 50; ++i) {
        const Vec h = sample_initial(model, rng).h;
        const Vec residual = h - u * (u.adjoint() * h);
        CHECK(max_abs(residual) < 1e-10);
    }
}

TEST_CASE("evolution limits: static and memoryless") {
    Rng rng(8);
    const Mat r = testutil::rand_psd(rng, 3);

    const ArModel frozen(1.0, r);
    auto state = sample_initial(frozen, rng);
    const Vec before = state.h;
    state = evolve(state, frozen, rng);
    CHECK(max_abs(state.h - before) == 0.0);
    CHECK(state.epoch == 1);

    // With no memory the next state is exactly a fresh draw from the same
    // generator stream.
    const ArModel memoryless(0.0, r);
    Rng stream_a(21), stream_b(21);
    auto evolved = evolve(sample_initial(memoryless, stream_a), memoryless, stream_a);
    (void)sample_initial(memoryless, stream_b);
    const Vec fresh = memoryless.draw(stream_b);
    CHECK(max_abs(evolved.h - fresh) < 1e-15);
}

TEST_CASE("lag-1 autocorrelation tracks the memory coefficient") {
    const double alpha = 0.9999;
    const ArModel model(alpha, Mat::Identity(1, 1));
    Rng rng(17);
    auto state = sample_initial(model, rng);
    cplx lag_sum = 0.0;
    double power_sum = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const cplx prev = state.h[0];
        state = evolve(state, model, rng);
        lag_sum += state.h[0] * std::conj(prev);
        power_sum += std::norm(prev);
    }
    const double autocorr = (lag_sum / power_sum).real();
    CHECK(autocorr == doctest::Approx(alpha).epsilon(0.02));
}

TEST_CASE("marginal covariance is stationary under evolution") {
    const ArrayGeometry geo{2, 0.5};
    const auto profile = make_profile(0, 1, {{-10.0, 10.0}});
    const std::vector<Mat> spatial = {sector_covariance(geo, profile.sectors[0], 90)};
    const auto prior = extended_covariance(profile, spatial);
    const ArModel model(0.9, prior);
    const Mat target = prior.dense();

    Rng rng(23);
    const int trajectories = 20000, horizon = 50;
    Mat at_first = Mat::Zero(2, 2), at_last = Mat::Zero(2, 2);
    for (int t = 0; t < trajectories; ++t) {
        auto state = sample_initial(model, rng);
        state = evolve(state, model, rng);
        at_first += state.h * state.h.adjoint();
        for (int n = 1; n < horizon; ++n) state = evolve(state, model, rng);
        at_last += state.h * state.h.adjoint();
    }
    at_first /= static_cast<double>(trajectories);
    at_last /= static_cast<double>(trajectories);
    CHECK(rel_err(at_first, target) < 0.1);
    CHECK(rel_err(at_last, target) < 0.1);
}

TEST_CASE("block-form model matches the dense model in distribution") {
    const ArrayGeometry geo{3, 0.5};
    const auto profile = make_profile(0, 2, {{-5.0, 5.0}, {20.0, 30.0}});
    const std::vector<Mat> spatial = {sector_covariance(geo, profile.sectors[0], 90),
                                      sector_covariance(geo, profile.sectors[1], 90)};
    const auto prior = extended_covariance(profile, spatial);
    const ArModel block(0.95, prior);
    CHECK(block.dim() == 12);

    Rng rng(31);
    Mat sample = Mat::Zero(12, 12);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        const Vec h = block.draw(rng);
        sample += h * h.adjoint();
    }
    sample /= static_cast<double>(draws);
    CHECK(rel_err(sample, prior.dense()) < 0.08);
}

TEST_CASE("full observation reduces to known closed forms") {
    Rng rng(37);
    NoInterference clean(3);

    ChannelState state;
    state.h = testutil::rand_vec(rng, 6);
    const Vec zeros = Vec::Zero(2);
    CHECK(max_abs(observe_full(state, zeros, clean, rng)) == 0.0);

    ChannelState flat;
    flat.h = testutil::rand_vec(rng, 3);
    Vec one(1);
    one[0] = 1.0;
    const Vec y = observe_full(flat, one, clean, rng);
    CHECK(max_abs(y - flat.h) < 1e-15);
}

TEST_CASE("full observation matches the dense Kronecker evaluation") {
    Rng rng(41);
    NoInterference clean(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3, users = 2, memory = 2;
        ChannelState state;
        state.h = testutil::rand_vec(rng, n * users * memory);
        const Vec x = testutil::rand_vec(rng, users * memory);
        const Vec fast = observe_full(state, x, clean, rng);

        const Mat eye = Mat::Identity(n, n);
        const Mat psi = testutil::kron(Mat(x), eye);
        const Vec dense = psi.adjoint() * state.h;
        CHECK(max_abs(fast - dense) < 1e-12);
    }

    ChannelState bad;
    bad.h = testutil::rand_vec(rng, 7);
    const Vec x = testutil::rand_vec(rng, 2);
    CHECK_THROWS_AS(observe_full(bad, x, clean, rng), std::invalid_argument);
}

TEST_CASE("gaussian interference draws reproduce the target covariance") {
    Rng rng(43);
    const Mat r = testutil::rand_pd(rng, 2, 0.5);
    GaussianInterference source(r);
    Mat sample = Mat::Zero(2, 2);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Vec eta = source.sample(rng);
        sample += eta * eta.adjoint();
    }
    sample /= static_cast<double>(draws);
    CHECK(rel_err(sample, r) < 0.05);

    CHECK_THROWS_AS(GaussianInterference(Mat::Zero(2, 2)), std::runtime_error);
}

TEST_CASE("static explicit interferer with constant symbols is signal plus noise") {
    const ArrayGeometry geo{3, 0.5};
    const auto interferer = make_profile(1, 1, {{15.0, 25.0}});
    const double noise_power = 0.01;
    ExplicitInterference source(geo, {interferer}, 1.0, noise_power, 1.0,
                                [](Rng&) { return cplx(1.0, 0.0); }, 90);

    Rng rng(47);
    const int draws = 2000;
    Vec mean = Vec::Zero(3);
    std::vector<Vec> samples;
    samples.reserve(draws);
    for (int i = 0; i < draws; ++i) {
        samples.push_back(source.sample(rng));
        mean += samples.back();
    }
    mean /= static_cast<double>(draws);
    CHECK(mean.norm() > 0.2);

    Mat residual_cov = Mat::Zero(3, 3);
    for (const auto& s : samples) residual_cov += (s - mean) * (s - mean).adjoint();
    residual_cov /= static_cast<double>(draws);
    CHECK(rel_err(residual_cov, noise_power * Mat::Identity(3, 3)) < 0.25);
}

TEST_CASE("explicit interference converges to the analytic covariance") {
    const ArrayGeometry geo{4, 0.5};
    const auto serving = make_profile(0, 1, {{-1.0, 1.0}});
    const auto interferer = make_profile(1, 1, {{10.0, 20.0}, {-40.0, -30.0}});
    const double es = 1.0, n0 = 0.5, alpha = 0.95;
    const Mat target = interference_covariance(geo, serving, {interferer}, es, n0, 180);

    ExplicitInterference source(geo, {interferer}, es, n0, alpha,
                                ExplicitInterference::qpsk(es), 180);
    Rng rng(53);
    Mat sample = Mat::Zero(4, 4);
    const int draws = 120000;
    for (int i = 0; i < draws; ++i) {
        const Vec eta = source.sample(rng);
        sample += eta * eta.adjoint();
    }
    sample /= static_cast<double>(draws);
    CHECK(rel_err(sample, target) < 0.1);
}

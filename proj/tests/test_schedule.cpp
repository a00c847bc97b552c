#include <doctest.h>

#include <cmath>

#include "ladb/rng.hpp"
#include "ladb/schedule.hpp"
#include "test_util.hpp"

using namespace ladb;

TEST_CASE("schedule endpoints and coefficient wiring") {
    NoiseSchedule sch;  // defaults beta_min = 0.1, beta_max = 20
    const ScheduleEval e0 = sch.eval(0.0);
    CHECK(e0.alpha == 1.0);
    CHECK(e0.sigma == 0.0);
    CHECK(e0.f_scale == doctest::Approx(-0.05));
    CHECK(e0.g == doctest::Approx(std::sqrt(0.1)));

    const ScheduleEval e1 = sch.eval(1.0);
    // integral of beta over [0,1] is 0.1 + 0.5 * 19.9 = 10.05
    CHECK(e1.alpha == doctest::Approx(std::exp(-5.025)).epsilon(1e-14));
    CHECK(e1.alpha == doctest::Approx(6.56e-3).epsilon(1e-2));
    CHECK(e1.f_scale == doctest::Approx(-10.0));
    CHECK(e1.g == doctest::Approx(std::sqrt(20.0)));
}

TEST_CASE("alpha matches quadrature of the beta integral") {
    NoiseSchedule sch;
    for (double t : {1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const double integral =
            test_util::integrate([&](double s) { return sch.beta(s); }, 0.0, t, 1e-14);
        const double want = std::exp(-0.5 * integral);
        CHECK(std::abs(sch.alpha(t) - want) <= 1e-10);
    }
}

TEST_CASE("variance-preserving identity on a dense grid") {
    NoiseSchedule sch;
    for (int i = 0; i <= 1000; ++i) {
        const double t = static_cast<double>(i) / 1000.0;
        const ScheduleEval e = sch.eval(t);
        CHECK(std::abs(e.alpha * e.alpha + e.sigma * e.sigma - 1.0) <= 1e-12);
    }
}

TEST_CASE("alpha decreases and sigma increases") {
    NoiseSchedule sch;
    double prev_alpha = sch.alpha(0.0);
    double prev_sigma = sch.sigma(0.0);
    for (int i = 1; i <= 200; ++i) {
        const double t = static_cast<double>(i) / 200.0;
        const ScheduleEval e = sch.eval(t);
        CHECK(e.alpha < prev_alpha);
        CHECK(e.sigma > prev_sigma);
        prev_alpha = e.alpha;
        prev_sigma = e.sigma;
    }
}

TEST_CASE("alpha solves its defining differential equation") {
    NoiseSchedule sch;
    for (double t : {0.1, 0.3, 0.5, 0.8}) {
        const double lhs = test_util::fd_derivative([&](double s) { return sch.alpha(s); }, t);
        const double rhs = -0.5 * sch.beta(t) * sch.alpha(t);
        CHECK(test_util::rel_err(lhs, rhs) < 1e-8);
    }
}

TEST_CASE("degenerate and constant-beta schedules") {
    NoiseSchedule zero{0.0, 0.0};
    zero.validate();
    for (double t : {0.0, 0.5, 1.0}) {
        const ScheduleEval e = zero.eval(t);
        CHECK(e.alpha == 1.0);
        CHECK(e.sigma == 0.0);
        CHECK(e.f_scale == 0.0);
        CHECK(e.g == 0.0);
    }

    NoiseSchedule constant{2.0, 2.0};
    for (double t : {0.1, 0.5, 1.0}) {
        CHECK(constant.alpha(t) == doctest::Approx(std::exp(-t)).epsilon(1e-14));
        CHECK(constant.beta(t) == 2.0);
    }
}

TEST_CASE("schedule rejects invalid parameters and times") {
    NoiseSchedule neg{-0.1, 20.0};
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
    NoiseSchedule flipped{2.0, 1.0};
    CHECK_THROWS_AS(flipped.validate(), std::invalid_argument);

    NoiseSchedule sch;
    CHECK_THROWS_AS(sch.eval(-0.01), std::invalid_argument);
    CHECK_THROWS_AS(sch.eval(1.01), std::invalid_argument);
    CHECK_THROWS_AS(sch.eval(std::nan("")), std::invalid_argument);
}

TEST_CASE("perturb interpolates and is linear in both arguments") {
    NoiseSchedule sch;
    const Vec x0{1.5, -2.0};
    const Vec x1{0.3, 0.7};

    Vec at0 = perturb(sch, x0, x1, 0.0);
    CHECK(at0[0] == x0[0]);
    CHECK(at0[1] == x0[1]);

    Vec scaled_only = perturb(sch, x0, Vec{0.0, 0.0}, 0.6);
    const double a = sch.alpha(0.6);
    CHECK(scaled_only[0] == doctest::Approx(a * x0[0]).epsilon(1e-14));
    CHECK(scaled_only[1] == doctest::Approx(a * x0[1]).epsilon(1e-14));

    // unit vectors at a generic t: squared norm is alpha^2 + sigma^2 = 1
    Vec mixed = perturb(sch, Vec{1.0, 0.0}, Vec{0.0, 1.0}, 0.42);
    CHECK(squared_norm(mixed) == doctest::Approx(1.0).epsilon(1e-12));

    // superposition on random inputs
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec u = rng.normal_vec(2);
        const Vec v = rng.normal_vec(2);
        const Vec w = rng.normal_vec(2);
        const double c = rng.uniform(-2.0, 2.0);
        const double t = rng.uniform();
        Vec lhs = perturb(sch, add(u, scaled(v, c)), w, t);
        Vec rhs = add(perturb(sch, u, w, t), scaled(perturb(sch, v, Vec{0.0, 0.0}, t), c));
        CHECK(test_util::max_abs_diff(lhs, rhs) < 1e-12);

        Vec lhs2 = perturb(sch, u, add(v, scaled(w, c)), t);
        Vec rhs2 = add(perturb(sch, u, v, t), scaled(perturb(sch, Vec{0.0, 0.0}, w, t), c));
        CHECK(test_util::max_abs_diff(lhs2, rhs2) < 1e-12);
    }

    CHECK_THROWS_AS(perturb(sch, Vec{1.0}, Vec{1.0, 2.0}, 0.5), std::invalid_argument);
}

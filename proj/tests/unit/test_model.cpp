#include <doctest.h>

#include <cmath>
#include <random>

#include "slowns/errors.hpp"
#include "slowns/model.hpp"

using namespace slowns;

TEST_SUITE("model") {

TEST_CASE("pressure law values") {
    FluidParams p;
    p.a = 1.0;
    p.gamma = 2.0;
    CHECK(pressure(p, 1.0) == doctest::Approx(1.0));
    p.gamma = 1.0;
    CHECK(pressure(p, 3.0) == doctest::Approx(3.0));
    p.a = 0.5;
    p.gamma = 1.4;
    CHECK(pressure(p, 2.0) == doctest::Approx(0.5 * std::pow(2.0, 1.4)).epsilon(1e-14));
    CHECK(pressure(p, 2.0) == doctest::Approx(1.31951).epsilon(1e-5));
    CHECK_THROWS_AS(pressure(p, 0.0), DomainError);
    CHECK_THROWS_AS(pressure(p, -1.0), DomainError);
}

TEST_CASE("pressure potential") {
    FluidParams p;
    p.a = 1.0;
    p.gamma = 2.0;
    CHECK(pressure_potential(p, 1.0) == doctest::Approx(1.0));
    for (double r : {0.5, 1.0, 2.0})
        CHECK(r * pressure_potential_d1(p, r) - pressure_potential(p, r) == doctest::Approx(r * r).epsilon(1e-13));
    p.gamma = 1.0;
    CHECK(pressure_potential(p, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pressure_potential(p, 0.0), DomainError);
}

TEST_CASE("rho P' - P against finite differences") {
    for (double g : {1.0, 1.2, 1.4, 5.0 / 3.0, 2.0}) {
        FluidParams p;
        p.a = 0.7;
        p.gamma = g;
        for (double r : {0.3, 1.0, 2.5}) {
            const double h = 1e-5 * r;
            const double d = (pressure_potential(p, r + h) - pressure_potential(p, r - h)) / (2 * h);
            const double lhs = r * d - pressure_potential(p, r);
            const double expect = g > 1.0 ? pressure(p, r) : p.a * (r - 1.0);
            CHECK(std::abs(lhs - expect) <= 1e-8 * std::max(1.0, std::abs(expect)));
            const double d2 = (pressure_potential(p, r + h) - 2 * pressure_potential(p, r) +
                               pressure_potential(p, r - h)) / (h * h);
            CHECK(pressure_potential_d2(p, r) == doctest::Approx(d2).epsilon(1e-4));
        }
    }
}

TEST_CASE("relative potential") {
    FluidParams p;
    p.a = 1.0;
    p.gamma = 2.0;
    CHECK(relative_potential(p, 2.0, 1.0) == doctest::Approx(1.0));
    CHECK(relative_potential(p, 1.3, 1.3) == 0.0);
    FluidParams q;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) CHECK(relative_potential(q, U(rng), U(rng)) >= 0.0);
    // convex in rho: non-negative second differences
    const double h = 1e-3;
    for (double r = 0.2; r < 5.0; r += 0.1) {
        const double dd = relative_potential(q, r + h, 1.0) - 2 * relative_potential(q, r, 1.0) +
                          relative_potential(q, r - h, 1.0);
        CHECK(dd >= 0.0);
    }
}

TEST_CASE("parameter validation names the key") {
    FluidParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.nu() == p.mu + p.mu_prime);
    p.gamma = 2.5;
    try {
        p.validate();
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.key() == "params.gamma");
    }
    FluidParams q;
    q.mu = 0.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    FluidParams r;
    r.a = -1;
    CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("initial data families") {
    const GridX g(128);
    SUBCASE("amplitude zero is equilibrium") {
        const auto s = make_initial_data(DataFamily::gaussian_bump, 0.0, 1.0);
        for (double y : {-1.0, 0.0, 0.5}) {
            CHECK(s.sample_density(g, y).max_abs() == doctest::Approx(1.0));
            CHECK(s.sample_density(g, y).min() == doctest::Approx(1.0));
            CHECK(s.sample_w(g, y).max_abs() == 0.0);
            CHECK(s.sample_frakw(g, y).max_abs() == 0.0);
        }
    }
    SUBCASE("normalization and zero momentum per y") {
        for (auto fam : {DataFamily::gaussian_bump, DataFamily::fourier_modes}) {
            const auto s = make_initial_data(fam, 0.3, 1.0);
            for (int j = -16; j <= 16; ++j) {
                const double y = 0.3 * j;
                const Field1D d = s.sample_density(g, y);
                CHECK(std::abs(integrate_x(d) - 1.0) <= 1e-12);
                CHECK(std::abs(integrate_x(d * s.sample_w(g, y))) <= 1e-12);
                CHECK(std::abs(integrate_x(d * s.sample_frakw(g, y))) <= 1e-12);
                CHECK(d.min() >= s.lower_bound - 1e-12);
                CHECK(d.max() <= s.upper_bound + 1e-12);
            }
            CHECK(s.lower_bound > 0.0);
        }
    }
    SUBCASE("custom table") {
        CustomProfiles t;
        for (int i = 0; i < 32; ++i) {
            const double x = i / 32.0;
            t.density.push_back(std::cos(2 * M_PI * x));
            t.w.push_back(std::sin(2 * M_PI * x));
            t.frakw.push_back(std::cos(4 * M_PI * x));
        }
        const auto s = make_initial_data(DataFamily::custom_table, 0.2, 2.0, &t);
        const Field1D d = s.sample_density(g, 0.0);
        CHECK(std::abs(integrate_x(d) - 1.0) <= 1e-12);
        CHECK(std::abs(integrate_x(d * s.sample_w(g, 0.0))) <= 1e-12);
        CHECK_THROWS_AS(make_initial_data(DataFamily::custom_table, 0.2, 2.0), ConfigError);
    }
    SUBCASE("amplitude forcing non-positive density is rejected") {
        CHECK_THROWS_AS(make_initial_data(DataFamily::fourier_modes, 5.0, 1.0), ConfigError);
    }
    SUBCASE("deviations decay in y") {
        const auto s = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
        CHECK(s.a_k(3, 0.0) > 0.0);
        CHECK(s.a_k(3, 6.0) < 1e-10 * s.a_k(3, 0.0));
        CHECK(s.envelope(0.0) == doctest::Approx(1.0));
    }
    CHECK(parse_family("fourier_modes") == DataFamily::fourier_modes);
    CHECK_THROWS_AS(parse_family("nope"), ConfigError);
}

}

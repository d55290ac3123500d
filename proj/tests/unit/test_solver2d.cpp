#include <doctest.h>

#include <cmath>
#include <numbers>

#include "slowns/errors.hpp"
#include "slowns/solver2d.hpp"

using namespace slowns;
constexpr double pi = std::numbers::pi;

namespace {

double max_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

State2D bump2d(const GridX& gx, const GridY& gy, double amp) {
    State2D s = State2D::equilibrium(gx, gy);
    for (std::size_t j = 0; j < gy.n; ++j)
        for (std::size_t i = 0; i < gx.n; ++i) {
            const double x = gx.node(i), y = gy.node(j) / gy.period();
            s.rho(i, j) = 1.0 + amp * std::cos(2 * pi * x) * std::cos(2 * pi * y);
            s.u1(i, j) = amp * std::sin(2 * pi * x + 0.3);
            s.u2(i, j) = amp * std::cos(2 * pi * (x + y));
        }
    return s;
}

}  // namespace

TEST_SUITE("solver2d") {

TEST_CASE("equilibrium is a fixed point") {
    FluidParams p;
    SolverConfig cfg;
    const GridX gx(16);
    const GridY gy(16, 2.0);
    State2D s = State2D::equilibrium(gx, gy);
    const State2D one = step_full(s, p, cfg);
    Stepper2D st(p, cfg);
    for (int k = 0; k < 1000; ++k) st.step(s, cfg.dt);
    CHECK(max_diff(s.rho, Field2D(gx, gy, Role::density, 1.0)) <= 1e-14);
    CHECK(s.u1.max_abs() <= 1e-14);
    CHECK(s.u2.max_abs() <= 1e-14);
    CHECK(max_diff(one.rho, Field2D(gx, gy, Role::density, 1.0)) <= 1e-14);
}

TEST_CASE("per-step conservation") {
    FluidParams p;
    SolverConfig cfg;
    const GridX gx(32);
    const GridY gy(32, 1.0);
    State2D s = bump2d(gx, gy, 0.2);
    const double m0 = integrate_xy(s.rho);
    const double p10 = integrate_xy(s.rho * s.u1), p20 = integrate_xy(s.rho * s.u2);
    Stepper2D st(p, cfg);
    for (int k = 0; k < 40; ++k) {
        st.step(s, cfg.dt);
        CHECK(std::abs(integrate_xy(s.rho) - m0) <= 1e-12 * m0);
        CHECK(std::abs(integrate_xy(s.rho * s.u1) - p10) <= 1e-10);
        CHECK(std::abs(integrate_xy(s.rho * s.u2) - p20) <= 1e-10);
    }
}

TEST_CASE("x-independent data reduces to the 1D solver") {
    FluidParams p;
    SolverConfig cfg;
    const std::size_t n = 64;
    const GridX g1(n);
    const GridX gx(16);
    const GridY gy(n, 0.5);  // period 1, y_j = -1/2 + j/n
    State1D s1 = State1D::equilibrium(g1);
    State2D s2 = State2D::equilibrium(gx, gy);
    for (std::size_t j = 0; j < n; ++j) {
        const double z = double(j) / n;
        const double rho = 1.0 + 0.2 * std::cos(2 * pi * z) + 0.1 * std::sin(4 * pi * z);
        s1.eta[j] = rho;
        s1.w[j] = 0.3 * std::sin(2 * pi * z);
        s1.frakw[j] = 0.2 * std::cos(2 * pi * z);
    }
    const double m = integrate_x(s1.eta * s1.w) / integrate_x(s1.eta);
    const double q = integrate_x(s1.eta * s1.frakw) / integrate_x(s1.eta);
    for (std::size_t j = 0; j < n; ++j) {
        s1.w[j] -= m;
        s1.frakw[j] -= q;
        for (std::size_t i = 0; i < gx.n; ++i) {
            s2.rho(i, j) = s1.eta[j];
            s2.u2(i, j) = s1.w[j];
            s2.u1(i, j) = s1.frakw[j];
        }
    }
    LimitStepper a(p, cfg);
    a.advance_to(s1, 1.0);
    Stepper2D b(p, cfg);
    b.advance_to(s2, 1.0);
    double e = 0, sc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        e = std::max({e, std::abs(s2.rho(3, j) - s1.eta[j]), std::abs(s2.u2(3, j) - s1.w[j]),
                      std::abs(s2.u1(3, j) - s1.frakw[j])});
        sc = std::max({sc, std::abs(s1.eta[j]), std::abs(s1.w[j])});
    }
    CHECK(e <= 1e-6 * sc);
}

TEST_CASE("eps operators") {
    const GridX gx(32);
    const GridY gy(32, pi);
    Field2D f(gx, gy);
    for (std::size_t j = 0; j < gy.n; ++j)
        for (std::size_t i = 0; i < gx.n; ++i) f(i, j) = std::sin(2 * pi * gx.node(i)) * std::cos(gy.node(j));
    const auto [a0, b0] = grad_eps(f, 0.0);
    CHECK(max_diff(a0, ddx(f)) == 0.0);
    CHECK(b0.max_abs() == 0.0);
    CHECK(max_diff(laplace_eps(f, 0.0), ddx(f, 2)) <= 1e-12);
    const auto [a1, b1] = grad_eps(f, 1.0);
    CHECK(max_diff(b1, ddy(f)) <= 1e-13);
    CHECK(max_diff(laplace_eps(f, 1.0), ddx(f, 2) + ddy(f, 2)) <= 1e-11);
}

TEST_CASE("chain rule through the slow embedding") {
    const double eps = 0.25;
    const GridX gx(32);
    const GridY slab(64, 4.0);
    Field2D xi(gx, slab);
    for (std::size_t j = 0; j < slab.n; ++j)
        for (std::size_t i = 0; i < gx.n; ++i) {
            const double y = slab.node(j);
            xi(i, j) = std::exp(-y * y) * (1.0 + 0.5 * std::sin(2 * pi * gx.node(i)));
        }
    const GridY gy2(256, slab.half_length / eps);
    const Field2D F = embed_slab_field(xi, eps, gy2);
    const auto [Fx, Fy] = grad_eps(F, 1.0);
    const auto [xx, xy] = grad_eps(xi, eps);
    const Field2D ex = embed_slab_field(xx, eps, gy2), ey = embed_slab_field(xy, eps, gy2);
    CHECK(max_diff(Fx, ex) <= 1e-8);
    CHECK(max_diff(Fy, ey) <= 1e-8);
}

TEST_CASE("slow embedding") {
    const auto spec = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
    const GridX gx(32);
    const GridY slab(32, 5.0);
    SUBCASE("eps = 1 resamples the slab") {
        const State2D s = slow_embed(spec, EpsScaling(1.0), gx, slab, slab);
        for (std::size_t j = 0; j < slab.n; ++j) {
            const Field1D d = spec.sample_density(gx, slab.node(j));
            for (std::size_t i = 0; i < gx.n; ++i) CHECK(s.rho(i, j) == doctest::Approx(d[i]).epsilon(1e-14));
        }
    }
    SUBCASE("normalization at every y node") {
        const GridY gy2 = default_grid_y_2d(slab, 0.2);
        CHECK(gy2.half_length == doctest::Approx(25.0));
        CHECK(gy2.n == 160);
        const State2D s = slow_embed(spec, EpsScaling(0.2), gx, gy2, slab);
        for (std::size_t j = 0; j < gy2.n; ++j) CHECK(std::abs(integrate_x(s.rho.row_field(j)) - 1.0) <= 1e-12);
        // nodes with equal eps*y carry equal slices
        const Field1D a = s.rho.row_field(gy2.n / 2);
        const State2D t = slow_embed(spec, EpsScaling(0.2), gx, gy2, slab);
        for (std::size_t i = 0; i < gx.n; ++i) CHECK(a[i] == t.rho(i, gy2.n / 2));
    }
    SUBCASE("box too small") {
        CHECK_THROWS_AS(slow_embed(spec, EpsScaling(0.2), gx, GridY(64, 10.0), slab), BoxTooSmall);
    }
    CHECK_THROWS(EpsScaling(0.0));
    CHECK_THROWS(EpsScaling(1.5));
}

TEST_CASE("residual of the eps-scaled system") {
    FluidParams p;
    const GridX gx(32);
    const GridY gy(32, 1.0);
    const State2D s = bump2d(gx, gy, 0.2);
    const EpsResidual r = residual_eps_system(s, full_tendency(s, p), 1.0, p);
    CHECK(r.mass_l2 <= 1e-11);
    CHECK(r.mom_l2 <= 1e-10);

    // the limit system inserted into the scaled system leaves an O(eps) defect
    const auto spec = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
    const SlabState slab = SlabState::from_spec(spec, GridX(64), GridY(64, 5.0));
    const State2D prof = slab_as_state(slab);
    const Tendency2D tend = slab_tendency(slab, p);
    const double r1 = residual_eps_system(prof, tend, 0.2, p).mom_l2;
    const double r2 = residual_eps_system(prof, tend, 0.1, p).mom_l2;
    CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(residual_eps_system(prof, tend, 0.1, p).mass_l2 > 0.0);
}

TEST_CASE("2D energy identity converges at second order") {
    FluidParams p;
    const GridX gx(32);
    const GridY gy(32, 0.5);
    const State2D s0 = bump2d(gx, gy, 0.2);
    auto residual = [&](double dt) {
        SolverConfig cfg;
        cfg.dt = dt;
        State2D s = s0;
        Stepper2D st(p, cfg);
        const double e0 = energy_2d(s, p);
        double d_prev = dissipation_2d(s, p), acc = 0.0, worst = 0.0;
        while (s.t < 0.5 - 1e-12) {
            st.step(s, dt);
            const double d = dissipation_2d(s, p);
            acc += 0.5 * dt * (d + d_prev);
            d_prev = d;
            worst = std::max(worst, std::abs(energy_2d(s, p) + acc - e0));
        }
        return worst;
    };
    const double a = residual(0.00125), b = residual(0.000625);
    CHECK(a / b >= 3.5);
}

TEST_CASE("positivity loss with a huge step") {
    FluidParams p;
    SolverConfig cfg;
    cfg.dt = 20.0;
    cfg.max_halvings = 1;
    State2D s = bump2d(GridX(16), GridY(16, 0.5), 0.9);
    Stepper2D st(p, cfg);
    CHECK_THROWS_AS(st.step(s, cfg.dt), SolverError);
}

}

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "slowns/asymptotics.hpp"
#include "slowns/errors.hpp"

using namespace slowns;

namespace {

double max_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

struct Setup {
    FluidParams p;
    GridX gx{32};
    GridY slab_gy{32, 5.0};
    InitialDataSpec spec = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
    SlabState slab = SlabState::from_spec(spec, gx, slab_gy);
};

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("approximate solution") {
    Setup s;
    SUBCASE("equilibrium slab") {
        const SlabState eq = SlabState::equilibrium(s.gx, s.slab_gy);
        const ApproxSolution a = build_approx(eq, 0.5, default_grid_y_2d(s.slab_gy, 0.5), s.p);
        CHECK(max_diff(a.rho_a, Field2D(a.rho_a.grid_x(), a.rho_a.grid_y(), Role::density, 1.0)) <= 1e-14);
        CHECK(a.u_a1.max_abs() <= 1e-14);
        CHECK(a.u_a2.max_abs() <= 1e-14);
    }
    SUBCASE("eps = 1 resamples the slab") {
        const ApproxSolution a = build_approx(s.slab, 1.0, s.slab_gy, s.p);
        CHECK(max_diff(a.rho_a, s.slab.field(SlabState::Which::eta)) <= 1e-14);
        CHECK(max_diff(a.u_a2, s.slab.field(SlabState::Which::frakw)) <= 1e-14);
    }
    SUBCASE("unit mass at every y node") {
        const GridY gy2 = default_grid_y_2d(s.slab_gy, 0.1);
        const ApproxSolution a = build_approx(s.slab, 0.1, gy2, s.p);
        for (std::size_t j = 0; j < gy2.n; ++j) CHECK(std::abs(integrate_x(a.rho_a.row_field(j)) - 1.0) <= 1e-12);
        CHECK(a.rho_a.min() > 0.0);
    }
    SUBCASE("box too small") {
        CHECK_THROWS_AS(build_approx(s.slab, 0.1, GridY(64, 20.0), s.p), BoxTooSmall);
    }
}

TEST_CASE("forcing") {
    Setup s;
    SUBCASE("equilibrium and y-independent slabs give zero forcing") {
        const SlabState eq = SlabState::equilibrium(s.gx, s.slab_gy);
        const Forcing g0 = forcing_G(eq, 0.2, s.p, default_grid_y_2d(s.slab_gy, 0.2));
        CHECK(g0.G1.max_abs() == 0.0);
        CHECK(g0.G2.max_abs() == 0.0);
        const auto flat = make_initial_data(DataFamily::gaussian_bump, 0.3, std::numeric_limits<double>::infinity());
        const SlabState fs = SlabState::from_spec(flat, s.gx, s.slab_gy);
        const Forcing g1 = forcing_G(fs, 0.2, s.p, default_grid_y_2d(s.slab_gy, 0.2));
        CHECK(g1.G1.max_abs() <= 1e-12);
        CHECK(g1.G2.max_abs() <= 1e-12);
    }
    SUBCASE("scaling across eps") {
        double prev_l2 = 0, prev_inf = 0;
        for (double eps : {0.2, 0.1, 0.05}) {
            const GridY gy2 = default_grid_y_2d(s.slab_gy, eps);
            const Forcing g = forcing_G(s.slab, eps, s.p, gy2);
            const double l2 = std::hypot(norm_l2(g.G1), norm_l2(g.G2)) / std::sqrt(eps);
            double inf = 0.0;
            for (std::size_t k = 0; k < g.G1.size(); ++k) inf = std::max(inf, std::hypot(g.G1[k], g.G2[k]));
            inf /= eps;
            if (prev_l2 > 0) {
                CHECK(l2 / prev_l2 < 2.0);
                CHECK(prev_l2 / l2 < 2.0);
                CHECK(inf / prev_inf < 2.0);
                CHECK(prev_inf / inf < 2.0);
            }
            prev_l2 = l2;
            prev_inf = inf;
        }
    }
}

TEST_CASE("remainder fields") {
    Setup s;
    const double eps = 0.2;
    const GridY gy2 = default_grid_y_2d(s.slab_gy, eps);
    SUBCASE("full equals approx for a y-independent flow") {
        const auto flat = make_initial_data(DataFamily::gaussian_bump, 0.3, std::numeric_limits<double>::infinity());
        const SlabState fs = SlabState::from_spec(flat, s.gx, s.slab_gy);
        const ApproxSolution a = build_approx(fs, eps, gy2, s.p);
        const RemainderFields r = remainder(a.as_state(), a, s.p);
        CHECK(r.varrho.max_abs() == 0.0);
        CHECK(r.R1.max_abs() == 0.0);
        CHECK(r.R2.max_abs() == 0.0);
        CHECK(r.omega.max_abs() == 0.0);
        CHECK(r.flux.max_abs() == 0.0);
        CHECK(r.DtR1.max_abs() <= 1e-10);
        CHECK(r.DtR2.max_abs() <= 1e-10);
    }
    SUBCASE("invariants") {
        const State2D full = slow_embed(s.spec, EpsScaling(eps), s.gx, gy2, s.slab_gy);
        State2D moved = full;
        Stepper2D st(s.p, SolverConfig{});
        st.advance_to(moved, 0.05);
        SlabState slab = s.slab;
        for (auto& sl : slab.slices) {
            LimitStepper ls(s.p, SolverConfig{});
            ls.advance_to(sl, 0.05);
        }
        slab.t = 0.05;
        const ApproxSolution a = build_approx(slab, eps, gy2, s.p);
        const RemainderFields r = remainder(moved, a, s.p);
        CHECK(max_diff(r.omega, ddy(r.R1) - ddx(r.R2)) <= 1e-12);
        Field2D flux(r.flux.grid_x(), r.flux.grid_y());
        const Field2D div = ddx(r.R1) + ddy(r.R2);
        for (std::size_t k = 0; k < flux.size(); ++k)
            flux[k] = s.p.nu() * div[k] - (pressure(s.p, moved.rho[k]) - pressure(s.p, a.rho_a[k]));
        CHECK(max_diff(flux, r.flux) <= 1e-12);
        CHECK(r.R1.max_abs() > 0.0);

        // the pair satisfies the perturbation system with forcing G
        const Forcing g = forcing_G(slab, eps, s.p, gy2);
        const PerturbationResidual pr = perturbation_residual(moved, full_tendency(moved, s.p), a, r, g, s.p);
        const double gsize = std::hypot(norm_l2(g.G1), norm_l2(g.G2));
        CHECK(pr.cont_l2 <= 1e-4 * gsize);
        CHECK(pr.mom_l2 <= 1e-4 * gsize);

        CHECK_THROWS_AS(remainder(moved, build_approx(s.slab, eps, gy2, s.p), s.p), MismatchError);
        CHECK_THROWS_AS(remainder(State2D::equilibrium(s.gx, s.slab_gy, 0.05), a, s.p), MismatchError);
    }
}

TEST_CASE("energy budget") {
    CHECK_THROWS_AS(energy_budget({}), PreconditionError);
    const GridX gx(16);
    const GridY gy(16, 1.0);
    RemainderFields z{Field2D(gx, gy), Field2D(gx, gy), Field2D(gx, gy), Field2D(gx, gy),
                      Field2D(gx, gy), Field2D(gx, gy), Field2D(gx, gy), 0.0};
    std::vector<RemainderFields> h{z, z, z};
    h[1].t = 0.1;
    h[2].t = 0.2;
    const ErrorBudget b0 = energy_budget(h);
    CHECK(b0.E_eps == 0.0);
    CHECK(b0.theta_eps == 0.0);

    RemainderFields one = z;
    for (std::size_t k = 0; k < one.R1.size(); ++k) {
        one.R1[k] = std::sin(double(k));
        one.varrho[k] = 0.1 * std::cos(double(k));
    }
    const ErrorBudget b1 = energy_budget({one});
    CHECK(b1.breakdown.at("int_total") == 0.0);
    CHECK(b1.E_eps == doctest::Approx(b1.breakdown.at("sup_total")));
    CHECK(b1.theta_eps == doctest::Approx(one.varrho.max_abs()));
    for (const auto& [k, v] : b1.breakdown) CHECK(b1.E_eps >= v);
}

TEST_CASE("relative entropy") {
    Setup s;
    const GridY gy2 = default_grid_y_2d(s.slab_gy, 0.5);
    const State2D st = slow_embed(s.spec, EpsScaling(0.5), s.gx, gy2, s.slab_gy);
    CHECK(relative_entropy(st, st.rho, st.u1, st.u2, s.p) == 0.0);
    const Field2D one(s.gx, gy2, Role::density, 1.0), zero(s.gx, gy2);
    CHECK(relative_entropy(st, one, zero, zero, s.p) == doctest::Approx(energy_2d(st, s.p)).epsilon(1e-12));

    // lower bound with the Taylor constant 1/2 a gamma (2 eta_bar)^{gamma-2}
    const State2D ref = slow_embed(make_initial_data(DataFamily::fourier_modes, 0.2, 1.0), EpsScaling(0.5), s.gx,
                                   gy2, s.slab_gy);
    const double eta_lo = std::min(st.rho.min(), ref.rho.min());
    const double eta_hi = std::max(st.rho.max(), ref.rho.max());
    const Field2D R1 = st.u1 - ref.u1, R2 = st.u2 - ref.u2, vr = st.rho - ref.rho;
    const double lower = eta_lo / 4 * (integrate_xy(R1 * R1) + integrate_xy(R2 * R2)) +
                         0.5 * s.p.a * s.p.gamma * std::pow(2 * eta_hi, s.p.gamma - 2) * integrate_xy(vr * vr);
    CHECK(relative_entropy(st, ref.rho, ref.u1, ref.u2, s.p) >= lower);

    ReferenceFlow self{st.rho, st.u1, st.u2, zero, zero, zero};
    const EntropyTerms e = entropy_terms(st, self, s.p);
    CHECK(e.E1 == 0.0);
    CHECK(e.D == 0.0);
    ReferenceFlow rest{one, zero, zero, zero, zero, zero};
    const EntropyTerms c = entropy_terms(st, rest, s.p);
    CHECK(c.E1 == doctest::Approx(energy_2d(st, s.p)).epsilon(1e-12));
    CHECK(c.D == doctest::Approx(dissipation_2d(st, s.p)).epsilon(1e-12));
    CHECK(std::abs(c.Rcal) <= 1e-12);
}

TEST_CASE("entropy identity with the rest state equals the energy identity") {
    FluidParams p;
    const GridX gx(32);
    const GridY gy(32, 0.5);
    State2D s = State2D::equilibrium(gx, gy);
    for (std::size_t j = 0; j < gy.n; ++j)
        for (std::size_t i = 0; i < gx.n; ++i) {
            const double x = gx.node(i), y = gy.node(j);
            s.rho(i, j) = 1.0 + 0.2 * std::cos(2 * std::numbers::pi * x) * std::cos(2 * std::numbers::pi * y);
            s.u1(i, j) = 0.1 * std::sin(2 * std::numbers::pi * y);
        }
    SolverConfig cfg;
    Stepper2D st(p, cfg);
    const Field2D one(gx, gy, Role::density, 1.0), zero(gx, gy);
    const ReferenceFlow rest{one, zero, zero, zero, zero, zero};
    std::vector<State2D> states{s};
    for (int k = 0; k < 40; ++k) {
        st.step(s, cfg.dt);
        states.push_back(s);
    }
    std::vector<ReferenceFlow> refs(states.size(), rest);
    const double r = entropy_identity_residual(states, refs, p);
    double e = 0.0, acc = 0.0, worst = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) {
        acc += 0.5 * cfg.dt * (dissipation_2d(states[k], p) + dissipation_2d(states[k - 1], p));
        e = energy_2d(states[k], p) - energy_2d(states[0], p) + acc;
        worst = std::max(worst, std::abs(e));
    }
    CHECK(r == doctest::Approx(worst).epsilon(1e-9));
    CHECK(r < 1e-4);
}

TEST_CASE("gradient integrals") {
    Setup s;
    const GridY gy2 = default_grid_y_2d(s.slab_gy, 0.5);
    const ApproxSolution a = build_approx(s.slab, 0.5, gy2, s.p);
    const State2D full = slow_embed(make_initial_data(DataFamily::gaussian_bump, 0.33, 1.0), EpsScaling(0.5), s.gx,
                                    gy2, s.slab_gy);
    RemainderFields r0 = remainder(full, a, s.p);
    RemainderFields r1 = r0;
    r1.t = 1.0;
    const GradientIntegrals gi = gradient_integrals({r0, r1});
    const RemainderScalars sc = remainder_scalars(r0);
    CHECK(gi.I3 == doctest::Approx(sc.gradR_l3_3));
    CHECK(gi.I4 == doctest::Approx(sc.gradR_l4_4));
    CHECK(gi.I6 == doctest::Approx(sc.gradR_l6_6));
    CHECK(gi.holder_ratio <= 1.0 + 1e-12);
}

}

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "slowns/campaign.hpp"
#include "slowns/errors.hpp"

using namespace slowns;
namespace fs = std::filesystem;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string out_root() {
    const fs::path p = fs::current_path() / "acceptance_out";
    fs::create_directories(p);
    return p.string();
}

CampaignConfig default_config() { return load_config(std::string(SLOWNS_SOURCE_DIR) + "/configs/default.ini"); }

const Verdict* find(const std::vector<Verdict>& v, const std::string& name) {
    for (const Verdict& x : v)
        if (x.name == name) return &x;
    return nullptr;
}

// Collects named verdicts; a missing verdict counts as a failure.
Outcome gather(const std::vector<Verdict>& v, const std::vector<std::string>& names) {
    Outcome o{true, ""};
    for (const std::string& n : names) {
        const Verdict* x = find(v, n);
        if (!o.detail.empty()) o.detail += "; ";
        if (!x) {
            o.pass = false;
            o.detail += n + " missing";
            continue;
        }
        o.pass = o.pass && x->pass;
        o.detail += n + " lhs=" + fmt("%.3g", x->lhs) + " rhs=" + fmt("%.3g", x->rhs) + (x->pass ? "" : " FAILED");
    }
    return o;
}

// ---------------------------------------------------------------------------

Outcome equilibrium_fixed_points() {
    FluidParams p;
    SolverConfig cfg;
    double worst = 0.0;
    {
        State1D s = State1D::equilibrium(GridX(256));
        LimitStepper st(p, cfg);
        for (int k = 0; k < 1000; ++k) st.step(s, cfg.dt);
        for (std::size_t i = 0; i < s.eta.size(); ++i)
            worst = std::max({worst, std::abs(s.eta[i] - 1.0), std::abs(s.w[i]), std::abs(s.frakw[i])});
    }
    const double w1 = worst;
    {
        State2D s = State2D::equilibrium(GridX(64), GridY(64, 5.0));
        Stepper2D st(p, cfg);
        for (int k = 0; k < 1000; ++k) st.step(s, cfg.dt);
        for (std::size_t i = 0; i < s.rho.size(); ++i)
            worst = std::max({worst, std::abs(s.rho[i] - 1.0), std::abs(s.u1[i]), std::abs(s.u2[i])});
    }
    return {worst <= 1e-13, "1D max dev " + fmt("%.2e", w1) + ", overall " + fmt("%.2e", worst)};
}

Outcome energy_identity_1d() {
    FluidParams p;
    const auto spec = make_initial_data(DataFamily::gaussian_bump, 0.3, 1.0);
    const GridX g(256);
    std::vector<double> res;
    std::string detail;
    for (double dt : {0.00125, 0.000625, 0.0003125}) {
        SolverConfig cfg;
        cfg.dt = dt;
        LimitStepper st(p, cfg);
        State1D s = State1D::from_spec(spec, g, 0.0);
        const double e0 = energy_1d(s, p);
        double d_prev = dissipation_1d(s), acc = 0.0, worst = 0.0;
        const int n = int(std::lround(1.0 / dt));
        for (int k = 0; k < n; ++k) {
            st.step(s, dt);
            const double d = dissipation_1d(s);
            acc += 0.5 * dt * p.nu() * (d + d_prev);
            d_prev = d;
            worst = std::max(worst, std::abs(energy_1d(s, p) + acc - e0));
        }
        res.push_back(worst);
        detail += "dt=" + fmt("%g", dt) + " res=" + fmt("%.3e", worst) + " ";
    }
    const double r1 = res[0] / res[1], r2 = res[1] / res[2];
    return {r1 >= 3.5 && r2 >= 3.5, detail + "ratios " + fmt("%.2f", r1) + ", " + fmt("%.2f", r2)};
}

// Smooth reference with closed-form time derivatives on the unit box.
ReferenceFlow manufactured(const GridX& gx, const GridY& gy, double t) {
    ReferenceFlow r{Field2D(gx, gy, Role::density), Field2D(gx, gy), Field2D(gx, gy),
                    Field2D(gx, gy),                Field2D(gx, gy), Field2D(gx, gy)};
    for (std::size_t j = 0; j < gy.n; ++j)
        for (std::size_t i = 0; i < gx.n; ++i) {
            const double x = gx.node(i), y = gy.node(j);
            const double ph = two_pi * x - t;
            r.rho(i, j) = 1.0 + 0.2 * std::sin(ph) * std::cos(two_pi * y);
            r.rho_t(i, j) = -0.2 * std::cos(ph) * std::cos(two_pi * y);
            const double e = std::exp(-0.5 * t);
            r.u1(i, j) = 0.1 * e * std::cos(two_pi * (x + y));
            r.u1_t(i, j) = -0.5 * r.u1(i, j);
            r.u2(i, j) = 0.1 * std::sin(two_pi * y + t);
            r.u2_t(i, j) = 0.1 * std::cos(two_pi * y + t);
        }
    return r;
}

Outcome relative_entropy_identity() {
    FluidParams p;
    std::vector<double> res;
    std::string detail;
    // the slowest 2D viscous mode decays at about 8 pi^2 nu ~ 160, so the
    // sequence starts at dt = 1e-3
    const double T = 0.1;
    std::size_t n = 16;
    double dt = 1e-3;
    for (int level = 0; level < 3; ++level, n *= 2, dt /= 2) {
        const GridX gx(n);
        const GridY gy(n, 0.5);
        State2D s = State2D::equilibrium(gx, gy);
        for (std::size_t j = 0; j < gy.n; ++j)
            for (std::size_t i = 0; i < gx.n; ++i) {
                const double x = gx.node(i), y = gy.node(j);
                s.rho(i, j) = 1.0 + 0.3 * std::cos(two_pi * x) * std::cos(two_pi * y);
                s.u1(i, j) = 0.2 * std::sin(two_pi * y);
                s.u2(i, j) = 0.2 * std::sin(two_pi * (x - y));
            }
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.pcg_tol = 1e-14;
        Stepper2D st(p, cfg);
        EntropyIdentityTracker tr;
        tr.add(entropy_terms(s, manufactured(gx, gy, s.t), p));
        const int steps = int(std::lround(T / dt));
        for (int k = 0; k < steps; ++k) {
            st.step(s, dt);
            tr.add(entropy_terms(s, manufactured(gx, gy, s.t), p));
        }
        res.push_back(tr.residual());
        detail += std::to_string(n) + "^2/dt=" + fmt("%g", dt) + " res=" +
                  fmt("%.3e", tr.residual()) + " ";
    }
    const double r1 = res[0] / res[1], r2 = res[1] / res[2];
    return {r1 >= 3.5 && r2 >= 3.5, detail + "ratios " + fmt("%.2f", r1) + ", " + fmt("%.2f", r2)};
}

Outcome dimensional_reduction() {
    CampaignConfig c = default_config();
    c.y_width = std::numeric_limits<double>::infinity();
    c.grids.n_x_2d = c.grids.n_x = 128;
    c.grids.n_y_slab = 16;
    c.grids.n_y_2d = 16;
    c.t_end_pair = 1.0;
    const PairResult r = run_pair(c, 1.0, out_root() + "/reduction");

    // field magnitude: H1 norms of the initial perturbation on one slice
    const State1D s0 = State1D::from_spec(c.spec(), GridX(c.grids.n_x), 0.0);
    Field1D em1(s0.eta.grid());
    for (std::size_t i = 0; i < em1.size(); ++i) em1[i] = s0.eta[i] - 1.0;
    const double scale = std::pow(norm_hk(em1, 1), 2) + std::pow(norm_hk(s0.w, 1), 2) + std::pow(norm_hk(s0.frakw, 1), 2);
    const double rel = r.budget.E_eps / scale;

    // x-independent data: the 2D solver against the 1D solver along y
    FluidParams p;
    SolverConfig cfg;
    const GridX g1(64);
    const GridY gy(64, 0.5);
    const GridX g2(16);
    const auto spec = make_initial_data(DataFamily::gaussian_bump, 0.3, std::numeric_limits<double>::infinity());
    State1D line = State1D::from_spec(spec, g1, 0.0);
    State2D s(Field2D(g2, gy, Role::density), Field2D(g2, gy), Field2D(g2, gy));
    for (std::size_t j = 0; j < gy.n; ++j)
        for (std::size_t i = 0; i < g2.n; ++i) {
            s.rho(i, j) = line.eta[j];
            s.u2(i, j) = line.w[j];
            s.u1(i, j) = line.frakw[j];
        }
    LimitStepper a(p, cfg);
    Stepper2D b(p, cfg);
    a.advance_to(line, 1.0);
    b.advance_to(s, 1.0);
    double dev = 0.0, mag = 0.0;
    for (std::size_t j = 0; j < gy.n; ++j)
        for (std::size_t i = 0; i < g2.n; ++i) {
            dev = std::max({dev, std::abs(s.rho(i, j) - line.eta[j]), std::abs(s.u2(i, j) - line.w[j]),
                            std::abs(s.u1(i, j) - line.frakw[j])});
            mag = std::max({mag, std::abs(line.eta[j]), std::abs(line.w[j])});
        }
    const double rel2 = dev / mag;
    return {rel <= 1e-6 && rel2 <= 1e-6,
            "E_eps/scale=" + fmt("%.3e", rel) + " (E_eps=" + fmt("%.3e", r.budget.E_eps) +
                "), x-independent max rel dev " + fmt("%.3e", rel2)};
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const std::string root = out_root();
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s criterion %d %s [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "equilibrium_fixed_points", equilibrium_fixed_points);

    // default slab run shared by criteria 2, 4, 5 and 6
    std::optional<Run1DResult> slab;
    std::string slab_error;
    auto t_shared = std::chrono::steady_clock::now();
    try {
        slab = run_1d(default_config(), root + "/run1d");
    } catch (const std::exception& e) {
        slab_error = e.what();
    }
    auto shared_secs = [&] {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_shared).count();
        t_shared = std::chrono::steady_clock::now();
        return s;
    };
    std::printf("default slab run: %.1fs\n", shared_secs());
    auto from_slab = [&](std::vector<std::string> names) {
        return [&, names]() -> Outcome {
            if (!slab) return {false, "default slab run failed: " + slab_error};
            return gather(slab->verdicts, names);
        };
    };
    report(2, "conservation", from_slab({"mass_conservation", "momentum_conservation", "passive_momentum_conservation"}));
    report(3, "energy_identity_1d", energy_identity_1d);
    report(4, "density_bounds", from_slab({"density_ceiling", "density_floor"}));
    report(5, "exponential_decay", [&]() -> Outcome {
        Outcome o = from_slab({"decay_eta_dev_L2", "decay_w_H1", "decay_eta_x_L2", "decay_eta_y_H2",
                               "decay_w_y_H3", "decay_eta_yy_H1", "decay_frakw_H1"})();
        if (!slab) return o;
        o.detail = "";
        for (const NamedFit& f : slab->fits) {
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += f.name + (f.skipped ? " skipped" : " alpha=" + fmt("%.3f", f.fit.alpha) + " r2=" +
                                                              fmt("%.4f", f.fit.r2));
        }
        return o;
    });
    report(6, "passive_rate", from_slab({"passive_decay_rate"}));

    std::optional<SweepSummary> sweep;
    std::string sweep_error;
    shared_secs();
    try {
        sweep = run_sweep(default_config(), root + "/sweep");
    } catch (const std::exception& e) {
        sweep_error = e.what();
    }
    std::printf("eps sweep: %.1fs\n", shared_secs());
    auto from_sweep = [&](std::vector<std::string> names) {
        return [&, names]() -> Outcome {
            if (!sweep) return {false, "sweep failed: " + sweep_error};
            return gather(sweep->verdicts, names);
        };
    };
    report(7, "eps_scaling", from_sweep({"slope_E_eps", "slope_theta2_eps"}));
    report(8, "forcing_scaling", from_sweep({"slope_G_l2", "slope_G_linf"}));
    report(9, "gradient_integrals", from_sweep({"slope_I3", "slope_I4", "slope_I6"}));
    report(10, "relative_entropy_identity", relative_entropy_identity);

    std::optional<std::vector<Verdict>> checks;
    std::string check_error;
    shared_secs();
    try {
        checks = check_inequalities(default_config(), root + "/check");
    } catch (const std::exception& e) {
        check_error = e.what();
    }
    std::printf("inequality suites: %.1fs\n", shared_secs());
    auto from_checks = [&](std::vector<std::string> names) {
        return [&, names]() -> Outcome {
            if (!checks) return {false, "checks failed: " + check_error};
            return gather(*checks, names);
        };
    };
    report(11, "gagliardo_nirenberg",
           from_checks({"gn_refinement_p3", "gn_refinement_p4", "gn_refinement_p6", "gn_oracle_p3", "gn_oracle_p4",
                        "gn_oracle_p6"}));
    report(12, "operator_identities_poincare", from_checks({"op_I_identities", "weighted_poincare"}));
    report(13, "dimensional_reduction", dimensional_reduction);

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 13 criteria failed, %.0fs total\n", failures, total);
    return failures == 0 ? 0 : 1;
}

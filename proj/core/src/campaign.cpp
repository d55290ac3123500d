#include "slowns/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "slowns/errors.hpp"
#include "slowns/parallel.hpp"

namespace slowns {

using nlohmann::json;
namespace fs = std::filesystem;

bool all_pass(const std::vector<Verdict>& v) {
    return std::all_of(v.begin(), v.end(), [](const Verdict& x) { return x.pass; });
}

namespace {

Verdict at_most(std::string name, double lhs, double rhs) {
    const double margin = rhs != 0.0 ? (rhs - lhs) / std::abs(rhs) : rhs - lhs;
    return {std::move(name), lhs, rhs, margin, lhs <= rhs};
}

Verdict in_range(std::string name, double v, double lo, double hi) {
    const double margin = std::min(v - lo, hi - v);
    return {std::move(name), v, hi, margin, std::isfinite(v) && v >= lo && v <= hi};
}

double col_max_abs(const DiagnosticSeries& s, const std::string& n) {
    double m = 0.0;
    for (double v : s.column(n)) m = std::max(m, std::abs(v));
    return m;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
}

json params_json(const CampaignConfig& c) {
    return {{"a", c.params.a},
            {"gamma", c.params.gamma},
            {"mu", c.params.mu},
            {"mu_prime", c.params.mu_prime},
            {"nu", c.params.nu()},
            {"family", family_name(c.family)},
            {"amplitude", c.amplitude},
            {"y_width", std::isinf(c.y_width) ? json("inf") : json(c.y_width)},
            {"n_x", c.grids.n_x},
            {"n_y_slab", c.grids.n_y_slab},
            {"L", c.grids.half_length},
            {"n_x_2d", c.grids.n_x_2d},
            {"dt", c.solver.dt},
            {"dt_2d", c.solver2d.dt},
            {"scheme", scheme_name(c.solver.scheme)},
            {"t_end", c.t_end},
            {"t_end_pair", c.t_end_pair},
            {"sample_stride", c.sample_stride},
            {"seed", c.seed}};
}

json fit_json(const NamedFit& f) {
    return {{"name", f.name},
            {"C", f.fit.C},
            {"alpha", f.fit.alpha},
            {"r2", f.fit.r2},
            {"window", {f.fit.window.first, f.fit.window.second}},
            {"skipped", f.skipped}};
}

json verdicts_json(const std::vector<Verdict>& v) {
    json a = json::array();
    for (const Verdict& x : v)
        a.push_back({{"name", x.name}, {"lhs", x.lhs}, {"rhs", x.rhs}, {"margin", x.margin}, {"pass", x.pass}});
    return a;
}

json budget_json(const ErrorBudget& b, const GradientIntegrals& g) {
    return {{"E_eps", b.E_eps},
            {"theta_eps", b.theta_eps},
            {"breakdown", b.breakdown},
            {"g_norms", {{"l2", b.g_norms.l2}, {"linf", b.g_norms.linf}, {"dt_l2", b.g_norms.dt_l2}}},
            {"gradient_integrals", {{"I3", g.I3}, {"I4", g.I4}, {"I6", g.I6}, {"holder_ratio", g.holder_ratio}}},
            {"band_exit", b.band_exit},
            {"samples", b.samples}};
}

void ensure_dir(const std::string& d) {
    if (d.empty()) return;
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw Error("cannot create output directory " + d + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

NamedFit fit_or_skip(const DiagnosticSeries& s, const std::string& column, std::pair<double, double> w) {
    NamedFit f;
    f.name = column;
    double m = 0.0;
    const auto& v = s.column(column);
    for (std::size_t i = 0; i < s.rows(); ++i)
        if (s.t[i] >= w.first - 1e-9 && s.t[i] <= w.second + 1e-9) m = std::max(m, std::abs(v[i]));
    if (m <= 1e-12) {
        f.skipped = true;
        f.fit.window = w;
        return f;
    }
    f.fit = decay_fit(s, column, w);
    return f;
}

Verdict fit_verdict(const NamedFit& f) {
    if (f.skipped) return {"decay_" + f.name, 0.0, 0.0, 0.0, true};
    const bool ok = f.fit.alpha > 0.0 && f.fit.r2 >= 0.98;
    return {"decay_" + f.name, f.fit.r2, 0.98, std::min(f.fit.r2 - 0.98, f.fit.alpha), ok};
}

// Largest relative step-to-step increase after t0.
// Changes below `noise` (rounding amplified by the Lyapunov weights) are ignored.
double worst_increase(const DiagnosticSeries& s, const std::string& col, double t0, double noise) {
    const auto& v = s.column(col);
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (s.t[k - 1] < t0 - 1e-9) continue;
        if (std::abs(v[k] - v[k - 1]) <= noise) continue;
        const double den = std::max(std::abs(v[k - 1]), 1e-13 * std::max(scale, 1e-300));
        worst = std::max(worst, (v[k] - v[k - 1]) / den);
    }
    return std::isfinite(worst) ? worst : 0.0;
}

}  // namespace

SlabObserver norm_observer() {
    return {{"eta_dev_L2", "w_H1", "eta_x_L2", "frakw_H1"}, [](const SlabState& s) {
                double a = 0, b = 0, c = 0, d = 0;
                for (const State1D& q : s.slices) {
                    Field1D dev = q.eta;
                    for (std::size_t i = 0; i < dev.size(); ++i) dev[i] -= 1.0;
                    a = std::max(a, norm_hk(dev, 0));
                    b = std::max(b, norm_hk(q.w, 1));
                    c = std::max(c, norm_hk(ddx(q.eta), 0));
                    d = std::max(d, norm_hk(q.frakw, 1));
                }
                return std::vector<double>{a, b, c, d};
            }};
}

Run1DResult run_1d(const CampaignConfig& c, const std::string& out_dir) {
    c.validate();
    const InitialDataSpec spec = c.spec();
    const GridX gx(c.grids.n_x);
    const GridY gy(c.grids.n_y_slab, c.grids.half_length);
    const FluidParams& p = c.params;

    Run1DResult r;
    r.bounds = density_bounds(spec, p, gx);
    const SlabState s0 = SlabState::from_spec(spec, gx, gy);
    SlabRunResult run = run_slab(s0, p, c.solver, c.t_end, c.sample_interval(),
                                 {conservation_observer(p), norm_observer()}, &r.history);
    r.series = std::move(run.series);
    if (r.history.size() >= 3) {
        r.series.append_columns(y_derivative_checks(r.history, 1));
        r.series.append_columns(y_derivative_checks(r.history, 2));
    }

    const LyapunovConstants lc = c.lyapunov ? *c.lyapunov : LyapunovConstants::defaults(r.bounds, p);
    const std::size_t mid = gy.n / 2;
    std::vector<State1D> line;
    for (const SlabState& h : r.history) line.push_back(h.slices[mid]);
    r.lyapunov = lyapunov_series(line, p, lc, Functional::F2);
    r.lyapunov.append_columns(lyapunov_series(line, p, lc, Functional::F3));
    r.lyapunov.append_columns(lyapunov_series(line, p, lc, Functional::F4));

    const auto window = c.window(r.series.t.back());
    for (const char* n : {"eta_dev_L2", "w_H1", "eta_x_L2", "eta_y_H2", "w_y_H3", "eta_yy_H1", "frakw_H1"})
        if (r.series.has(n)) r.fits.push_back(fit_or_skip(r.series, n, window));

    auto& V = r.verdicts;
    V.push_back(at_most("mass_conservation", col_max_abs(r.series, "mass_dev"), 1e-10));
    V.push_back(at_most("momentum_conservation", col_max_abs(r.series, "momentum"), 1e-8));
    V.push_back(at_most("passive_momentum_conservation", col_max_abs(r.series, "passive_momentum"), 1e-8));
    for (const char* n : {"int_eta_y", "int_m_y", "int_eta_yy", "int_m_yy"})
        if (r.series.has(n)) V.push_back(at_most(std::string("conservation_") + n, col_max_abs(r.series, n), 1e-10));

    V.push_back(at_most("density_ceiling", col_max_abs(r.series, "eta_max"), r.bounds.eta_bar));
    {
        const auto& mins = r.series.column("eta_min");
        double worst = std::numeric_limits<double>::infinity(), lo = 0.0, got = 0.0;
        for (std::size_t k = 0; k < mins.size(); ++k) {
            const double env = r.bounds.eta_lower(r.series.t[k] - r.series.t.front());
            if (mins[k] - env < worst) {
                worst = mins[k] - env;
                lo = env;
                got = mins[k];
            }
        }
        V.push_back({"density_floor", lo, got, got > 0.0 ? (got - lo) / got : got - lo, got >= lo});
    }
    {
        double worst = 0.0;
        bool ok = true;
        for (const SlabState& h : r.history)
            for (const State1D& q : h.slices) {
                try {
                    const Sides s = weighted_poincare_check(q.eta, q.w, r.bounds.eta_bar);
                    if (s.rhs > 0.0) worst = std::max(worst, s.lhs / s.rhs);
                    if (s.lhs > s.rhs * (1.0 + 1e-10)) ok = false;
                } catch (const PreconditionError&) {
                    ok = false;
                }
            }
        V.push_back({"weighted_poincare", worst, 1.0, 1.0 - worst, ok});
    }
    {
        double worst = 0.0;
        for (const PassiveVerdict& pv : passive_decay_check(r.history, p, r.bounds))
            worst = std::max(worst, pv.worst_ratio);
        V.push_back(at_most("passive_decay_rate", worst, 1.0));
    }
    const double noise = 1e-12 * lc.A1 * std::max({lc.A3, lc.A4, 1.0});
    for (const char* f : {"F2", "F3", "F4"})
        V.push_back(
            at_most(std::string("lyapunov_monotone_") + f, worst_increase(r.lyapunov, f, window.first, noise), 0.01));
    {
        double worst = 0.0;
        const auto& f2 = r.lyapunov.column("F2");
        const auto& lo = r.lyapunov.column("F2_lower");
        for (std::size_t k = 0; k < f2.size(); ++k)
            if (f2[k] > noise) worst = std::max(worst, lo[k] / f2[k]);
            else if (lo[k] > noise) worst = std::numeric_limits<double>::infinity();
        V.push_back(at_most("F2_lower_bound", worst, 1.0));
    }
    for (const NamedFit& f : r.fits) V.push_back(fit_verdict(f));

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        r.series.write_csv(join(out_dir, "series.csv"));
        r.lyapunov.write_csv(join(out_dir, "lyapunov.csv"));
        json fits = json::array();
        for (const NamedFit& f : r.fits) fits.push_back(fit_json(f));
        write_json(join(out_dir, "decay_fits.json"),
                   {{"params", params_json(c)},
                    {"density_bounds",
                     {{"eta_bar", r.bounds.eta_bar},
                      {"varsigma_bar1", r.bounds.varsigma_bar1},
                      {"e00_bar", r.bounds.e00_bar},
                      {"eta_lower_0", r.bounds.eta_lower(0.0)}}},
                    {"decay_fits", fits}});
        write_verdicts_csv(join(out_dir, "verdicts.csv"), r.verdicts);
        const SlabState& fin = r.history.empty() ? run.final : r.history.back();
        save_field(join(out_dir, "slab_eta.bin"), fin.field(SlabState::Which::eta));
        save_field(join(out_dir, "slab_w.bin"), fin.field(SlabState::Which::w));
        save_field(join(out_dir, "slab_frakw.bin"), fin.field(SlabState::Which::frakw));
    }
    return r;
}

// ---------------------------------------------------------------------------

GridY pair_grid_y(const CampaignConfig& c, double eps) {
    const GridY slab_gy(c.grids.n_y_slab, c.grids.half_length);
    if (c.grids.n_y_2d != 0) return GridY(c.grids.n_y_2d, c.grids.half_length / eps);
    return default_grid_y_2d(slab_gy, eps, c.grids.n_y_2d_cap);
}

namespace {

std::vector<double> state2d_row(const State2D& s, const FluidParams& p, double m0) {
    return {integrate_xy(s.rho) - m0, integrate_xy(s.rho * s.u1), integrate_xy(s.rho * s.u2),
            energy_2d(s, p), dissipation_2d(s, p), s.rho.min(), s.rho.max()};
}

int sample_count(double t_end, double interval) {
    return std::max(1, int(std::ceil(t_end / interval - 1e-9)));
}

}  // namespace

Run2DResult run_2d(const CampaignConfig& c, double eps, const std::string& out_dir) {
    c.validate();
    const InitialDataSpec spec = c.spec();
    const GridX gx(c.grids.n_x_2d);
    const GridY slab_gy(c.grids.n_y_slab, c.grids.half_length);
    const GridY gy2 = pair_grid_y(c, eps);
    State2D s = slow_embed(spec, EpsScaling(eps), gx, gy2, slab_gy);
    Stepper2D st(c.params, c.solver2d);

    Run2DResult r;
    r.series = DiagnosticSeries({"mass_dev", "momentum1", "momentum2", "energy", "dissipation", "rho_min", "rho_max"});
    const double m0 = integrate_xy(s.rho);
    r.series.add_row(s.t, state2d_row(s, c.params, m0));
    const int n = sample_count(c.t_end_pair, c.pair_sample_interval());
    for (int k = 1; k <= n; ++k) {
        st.advance_to(s, std::min(c.t_end_pair, k * c.pair_sample_interval()));
        r.series.add_row(s.t, state2d_row(s, c.params, m0));
    }
    r.final = s;
    r.verdicts.push_back(at_most("mass_conservation_2d", col_max_abs(r.series, "mass_dev"), 1e-11 * m0));
    r.verdicts.push_back(at_most("momentum_conservation_2d",
                                 std::max(col_max_abs(r.series, "momentum1"), col_max_abs(r.series, "momentum2")),
                                 1e-8));
    r.verdicts.push_back(in_range("positive_density_2d", r.series.column("rho_min").back(), 0.0,
                                  std::numeric_limits<double>::infinity()));
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        r.series.write_csv(join(out_dir, "series2d.csv"));
        write_verdicts_csv(join(out_dir, "verdicts2d.csv"), r.verdicts);
        save_field(join(out_dir, "rho.bin"), s.rho);
        save_field(join(out_dir, "u1.bin"), s.u1);
        save_field(join(out_dir, "u2.bin"), s.u2);
    }
    return r;
}

PairResult run_pair(const CampaignConfig& c, double eps, const std::string& out_dir) {
    c.validate();
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps", "must lie in (0, 1]");
    const InitialDataSpec spec = c.spec();
    const FluidParams& p = c.params;
    const GridX gx(c.grids.n_x_2d);
    const GridY slab_gy(c.grids.n_y_slab, c.grids.half_length);
    const GridY gy2 = pair_grid_y(c, eps);

    SlabState slab = SlabState::from_spec(spec, gx, slab_gy);
    State2D full = slow_embed(spec, EpsScaling(eps), gx, gy2, slab_gy);
    std::vector<LimitStepper> steppers;
    for (std::size_t j = 0; j < slab_gy.n; ++j) steppers.emplace_back(p, c.solver, long(j));
    Stepper2D st(p, c.solver2d);

    PairResult r;
    r.eps = eps;
    r.remainder_series = DiagnosticSeries({"R2", "varrho2", "gradR2", "DtR2", "gradomega2", "gradDtR2",
                                           "varrho_inf", "gradR_l3_3", "gradR_l4_4", "gradR_l6_6", "G_l2",
                                           "G_linf"});
    const SlabObserver norms = norm_observer();
    r.slab_series = DiagnosticSeries(norms.names);
    BudgetAccumulator acc;
    double eta_min = std::numeric_limits<double>::infinity();

    auto sample = [&]() {
        const ApproxSolution ap = build_approx(slab, eps, gy2, p);
        const Forcing g = forcing_G(slab, eps, p, gy2);
        const RemainderFields rem = remainder(full, ap, p);
        const RemainderScalars sc = remainder_scalars(rem);
        acc.add(sc);
        acc.add_forcing(g);
        double gl2 = 0.0, glinf = 0.0;
        for (std::size_t k = 0; k < g.G1.size(); ++k) {
            gl2 += g.G1[k] * g.G1[k] + g.G2[k] * g.G2[k];
            glinf = std::max(glinf, std::hypot(g.G1[k], g.G2[k]));
        }
        gl2 = std::sqrt(gl2 * gx.dx() * gy2.dy());
        r.remainder_series.add_row(full.t, {sc.R2, sc.varrho2, sc.gradR2, sc.DtR2, sc.gradomega2, sc.gradDtR2,
                                            sc.varrho_inf, sc.gradR_l3_3, sc.gradR_l4_4, sc.gradR_l6_6, gl2,
                                            glinf});
        r.slab_series.add_row(slab.t, norms.fn(slab));
        for (const State1D& q : slab.slices) eta_min = std::min(eta_min, q.eta.min());
    };

    sample();
    const double interval = c.pair_sample_interval();
    const int n = sample_count(c.t_end_pair, interval);
    for (int k = 1; k <= n; ++k) {
        const double t = std::min(c.t_end_pair, k * interval);
        parallel_for(slab_gy.n, [&](std::size_t j) { steppers[j].advance_to(slab.slices[j], t); });
        slab.t = t;
        st.advance_to(full, t);
        sample();
    }

    r.budget = acc.budget();
    r.gradients = acc.gradients();
    r.eta_min = eta_min;
    r.band = 0.5 * std::min(1.0, eta_min);
    r.budget.band_exit = r.budget.theta_eps > r.band;

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        r.remainder_series.write_csv(join(out_dir, "remainder.csv"));
        r.slab_series.write_csv(join(out_dir, "slab_norms.csv"));
        json budget = budget_json(r.budget, r.gradients);
        budget["eps"] = eps;
        budget["band"] = r.band;
        budget["eta_min"] = r.eta_min;
        write_json(join(out_dir, "budget.json"), budget);
        write_json(join(out_dir, "manifest.json"),
                   {{"eps", eps},
                    {"params", params_json(c)},
                    {"grid_2d", {{"n_x", gx.n}, {"n_y", gy2.n}, {"half_length", gy2.half_length}}},
                    {"grid_slab", {{"n_x", gx.n}, {"n_y", slab_gy.n}, {"half_length", slab_gy.half_length}}},
                    {"t_end", c.t_end_pair},
                    {"sample_interval", interval},
                    {"files", {"remainder.csv", "slab_norms.csv", "budget.json"}}});
    }
    return r;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw PreconditionError("loglog_slope: need at least two points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = double(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    return sxy / sxx;
}

SweepSummary run_sweep(const CampaignConfig& c, const std::string& out_dir) {
    c.validate();
    if (c.eps_list.size() < 3) throw ConfigError("run.eps_list", "a sweep needs at least three values");
    SweepSummary s;
    s.entries.resize(c.eps_list.size());
    const std::size_t workers = std::min<std::size_t>(c.eps_list.size(), std::max<std::size_t>(1, thread_count()));
    parallel_for(
        c.eps_list.size(),
        [&](std::size_t i) {
            SweepEntry& e = s.entries[i];
            e.eps = c.eps_list[i];
            try {
                e.result = run_pair(c, e.eps, "");
            } catch (const SolverError& err) {
                e.error = err.what();
            } catch (const BoxTooSmall& err) {
                e.error = err.what();
            }
        },
        workers);

    std::vector<double> eps, E, th2, gl2, glinf, i3, i4, i6;
    for (const SweepEntry& e : s.entries) {
        if (!e.result) continue;
        const PairResult& r = *e.result;
        eps.push_back(e.eps);
        E.push_back(r.budget.E_eps);
        th2.push_back(r.budget.theta_eps * r.budget.theta_eps);
        gl2.push_back(r.budget.g_norms.l2);
        glinf.push_back(r.budget.g_norms.linf);
        i3.push_back(r.gradients.I3);
        i4.push_back(r.gradients.I4);
        i6.push_back(r.gradients.I6);
    }
    for (const SweepEntry& e : s.entries) {
        s.verdicts.push_back({"pair_eps_" + format_double(e.eps), e.result ? 0.0 : 1.0, 0.0, 0.0, bool(e.result)});
        if (e.result)
            s.verdicts.push_back({"bootstrap_band_eps_" + format_double(e.eps), e.result->budget.theta_eps,
                                  e.result->band, e.result->band - e.result->budget.theta_eps,
                                  !e.result->budget.band_exit});
    }
    if (eps.size() >= 3) {
        s.slopes = {{"E_eps", loglog_slope(eps, E)},   {"theta2_eps", loglog_slope(eps, th2)},
                    {"G_l2", loglog_slope(eps, gl2)},  {"G_linf", loglog_slope(eps, glinf)},
                    {"I3", loglog_slope(eps, i3)},     {"I4", loglog_slope(eps, i4)},
                    {"I6", loglog_slope(eps, i6)}};
        auto slope = [&](const std::string& n) {
            for (auto& [k, v] : s.slopes)
                if (k == n) return v;
            return std::numeric_limits<double>::quiet_NaN();
        };
        const double inf = std::numeric_limits<double>::infinity();
        s.verdicts.push_back(in_range("slope_E_eps", slope("E_eps"), 0.7, 1.3));
        s.verdicts.push_back(in_range("slope_theta2_eps", slope("theta2_eps"), 0.7, 1.3));
        s.verdicts.push_back(in_range("slope_G_l2", slope("G_l2"), 0.2, 0.8));
        s.verdicts.push_back(in_range("slope_G_linf", slope("G_linf"), 0.7, 1.3));
        s.verdicts.push_back(in_range("slope_I3", slope("I3"), 1.2, inf));
        s.verdicts.push_back(in_range("slope_I4", slope("I4"), 1.6, inf));
        s.verdicts.push_back(in_range("slope_I6", slope("I6"), 2.4, inf));
    } else {
        s.verdicts.push_back({"slopes_available", double(eps.size()), 3.0, double(eps.size()) - 3.0, false});
    }

    for (const SweepEntry& e : s.entries) {
        if (!e.result) continue;
        const auto w = c.window(e.result->slab_series.t.back());
        for (const std::string& n : e.result->slab_series.names) {
            NamedFit f = fit_or_skip(e.result->slab_series, n, w);
            s.decay_fits.push_back(f);
            s.verdicts.push_back(fit_verdict(f));
        }
        break;
    }

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        json entries = json::array();
        for (const SweepEntry& e : s.entries) {
            json j;
            if (e.result) {
                j = budget_json(e.result->budget, e.result->gradients);
                j["band"] = e.result->band;
            } else {
                j = {{"missing", true}, {"error", e.error}};
            }
            j["eps"] = e.eps;
            entries.push_back(j);
        }
        json slopes = json::object();
        for (auto& [k, v] : s.slopes) slopes[k] = v;
        json fits = json::array();
        for (const NamedFit& f : s.decay_fits) fits.push_back(fit_json(f));
        write_json(join(out_dir, "summary.json"), {{"params", params_json(c)},
                                                   {"eps_entries", entries},
                                                   {"slopes", slopes},
                                                   {"decay_fits", fits},
                                                   {"verdicts", verdicts_json(s.verdicts)}});
        for (const SweepEntry& e : s.entries)
            if (e.result)
                e.result->remainder_series.write_csv(join(out_dir, "remainder_eps_" + format_double(e.eps) + ".csv"));
    }
    return s;
}

// ---------------------------------------------------------------------------

namespace {

// sin(2 pi x) exp(-y^2): closed-form norms on the strip.
double gn_oracle_ratio(double p) {
    const double pi = std::numbers::pi;
    double cp = 0.0;
    if (p == 3.0) cp = 4.0 / (3.0 * pi);
    else if (p == 4.0) cp = 3.0 / 8.0;
    else if (p == 6.0) cp = 5.0 / 16.0;
    const double lp = std::pow(cp * std::sqrt(pi / p), 1.0 / p);
    const double f2 = 0.5 * std::sqrt(pi / 2.0);
    const double g2 = 2.0 * pi * pi * std::sqrt(pi / 2.0) + 0.5 * std::sqrt(pi / 2.0);
    const double f = std::sqrt(f2), g = std::sqrt(g2);
    return lp / (std::pow(f, 2.0 / p) * std::pow(g, 1.0 - 2.0 / p) + std::pow(f, 0.5 + 1.0 / p) * std::pow(g, 0.5 - 1.0 / p));
}

}  // namespace

std::vector<Verdict> check_inequalities(const CampaignConfig& c, const std::string& out_dir) {
    c.validate();
    std::vector<Verdict> V;

    const SuiteResult oi = op_I_suite(c.seed, c.checks.op_I_cases);
    V.push_back({"op_I_identities", double(oi.failures), 0.0, oi.worst_margin, oi.failures == 0});
    const SuiteResult wp = weighted_poincare_suite(c.seed, c.checks.poincare_cases);
    V.push_back({"weighted_poincare", double(wp.failures), 0.0, wp.worst_margin, wp.failures == 0});

    const GridX gx(32);
    const GridY gy(32, 1.0);
    for (double p : {3.0, 4.0, 6.0}) {
        const std::string tag = "p" + std::to_string(int(p));
        const GnSweep g = gn_suite(c.seed, c.checks.gn_cases, p, gx, gy);
        const double change = std::abs(g.max_ratio_refined / g.max_ratio - 1.0);
        V.push_back({"gn_refinement_" + tag, change, 0.1, 0.1 - change, std::isfinite(g.max_ratio) && change < 0.1});

        Field2D f(GridX(64), GridY(128, 5.0));
        for (std::size_t j = 0; j < f.ny(); ++j)
            for (std::size_t i = 0; i < f.nx(); ++i) {
                const double y = f.grid_y().node(j);
                f(i, j) = std::sin(2.0 * std::numbers::pi * f.grid_x().node(i)) * std::exp(-y * y);
            }
        const GnResult r = gn_check(f, p);
        const double oracle = gn_oracle_ratio(p);
        const double rel = std::abs(r.ratio / oracle - 1.0);
        V.push_back({"gn_oracle_" + tag, rel, 0.005, 0.005 - rel, rel <= 0.005});

        // the split bound: ratio <= ratio_tilde + ratio_bar on random fields
        double worst = 0.0;
        for (std::size_t k = 0; k < 20; ++k) {
            const GnResult q = gn_check(random_band_limited_2d(gx, gy, c.seed + 1000 + k, 3), p);
            worst = std::max(worst, q.ratio / (q.ratio_tilde + q.ratio_bar));
        }
        V.push_back(at_most("gn_split_bound_" + tag, worst, 1.0 + 1e-12));
    }
    {
        bool rejected = false;
        try {
            gn_check(Field2D(gx, gy), 4.0);
        } catch (const UndefinedRatio&) {
            rejected = true;
        }
        V.push_back({"gn_zero_field_rejected", rejected ? 1.0 : 0.0, 1.0, 0.0, rejected});
    }
    {
        // empirical C(M, E0) for the density-weighted Poincare inequality
        const GridX g(128), g2(256);
        double worst = 0.0, worst2 = 0.0;
        const double q = 2.0, M = 0.5, E0 = 4.0;
        for (std::size_t k = 0; k < 100; ++k) {
            auto make = [&](const GridX& grid) {
                Field1D d = random_band_limited(grid, c.seed + 7 * k, 4, 0.0);
                const double s = 0.9 / std::max(d.max_abs(), 1e-300);
                Field1D rho(grid, Role::density);
                for (std::size_t i = 0; i < grid.n; ++i) rho[i] = 1.0 + s * d[i];
                return std::make_pair(rho, random_band_limited(grid, c.seed + 7 * k + 3, 4, 1.0));
            };
            const auto [r1, u1] = make(g);
            const auto [r2, u2] = make(g2);
            worst = std::max(worst, density_weighted_poincare(r1, u1, M, E0, q).ratio);
            worst2 = std::max(worst2, density_weighted_poincare(r2, u2, M, E0, q).ratio);
        }
        const double change = std::abs(worst2 / worst - 1.0);
        V.push_back({"density_weighted_poincare_C", worst, worst2, 0.1 - change,
                     std::isfinite(worst) && change < 0.1});
    }

    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_verdicts_csv(join(out_dir, "check_verdicts.csv"), V);
    }
    return V;
}

DecayFit fit_csv(const std::string& path, const std::string& column, std::pair<double, double> window) {
    const DiagnosticSeries s = DiagnosticSeries::read_csv(path);
    if (!s.has(column)) throw ConfigError("column", "no column '" + column + "' in " + path);
    if (window.second < 0.0 && !s.t.empty()) window.second = s.t.back();
    return decay_fit(s, column, window);
}

}  // namespace slowns

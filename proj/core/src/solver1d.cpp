#include "slowns/solver1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcg.hpp"
#include "slowns/errors.hpp"
#include "slowns/parallel.hpp"
#include "slowns/spectral.hpp"

namespace slowns {

Scheme parse_scheme(const std::string& s) {
    if (s == "imex_bdf2") return Scheme::imex_bdf2;
    if (s == "rk4_explicit") return Scheme::rk4_explicit;
    throw ConfigError("solver.scheme", "unknown scheme '" + s + "'");
}

const char* scheme_name(Scheme s) {
    return s == Scheme::imex_bdf2 ? "imex_bdf2" : "rk4_explicit";
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver.dt", "must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
        throw ConfigError("solver.cfl_safety", "must lie in (0, 1)");
    if (!(positivity_floor >= 0.0)) throw ConfigError("solver.positivity_floor", "must be >= 0");
    if (max_halvings < 0) throw ConfigError("solver.max_halvings", "must be >= 0");
    if (!(pcg_tol > 0.0)) throw ConfigError("solver.pcg_tol", "must be positive");
}

State1D::State1D(Field1D eta_, Field1D w_, Field1D frakw_, double t_)
    : eta(std::move(eta_)), w(std::move(w_)), frakw(std::move(frakw_)), t(t_) {
    if (!(eta.grid() == w.grid()) || !(eta.grid() == frakw.grid()))
        throw MismatchError("State1D: fields on different grids");
    eta.set_role(Role::density);
    w.set_role(Role::velocity);
    frakw.set_role(Role::velocity);
}

State1D State1D::equilibrium(const GridX& g, double t) {
    return State1D(Field1D(g, Role::density, 1.0), Field1D(g, Role::velocity),
                   Field1D(g, Role::velocity), t);
}

State1D State1D::from_spec(const InitialDataSpec& spec, const GridX& g, double y) {
    return State1D(spec.sample_density(g, y), spec.sample_w(g, y), spec.sample_frakw(g, y), 0.0);
}

void State1D::check() const {
    eta.check();
    w.check();
    frakw.check();
}

SlabState SlabState::from_spec(const InitialDataSpec& spec, const GridX& gx, const GridY& gy) {
    SlabState s{gx, gy, {}, 0.0};
    s.slices.reserve(gy.n);
    for (std::size_t j = 0; j < gy.n; ++j) s.slices.push_back(State1D::from_spec(spec, gx, gy.node(j)));
    return s;
}

SlabState SlabState::equilibrium(const GridX& gx, const GridY& gy) {
    SlabState s{gx, gy, {}, 0.0};
    s.slices.assign(gy.n, State1D::equilibrium(gx));
    return s;
}

Field2D SlabState::field(Which which) const {
    Field2D f(gx, gy, which == Which::eta ? Role::density : Role::velocity);
    for (std::size_t j = 0; j < gy.n; ++j) {
        const State1D& s = slices[j];
        f.set_row(j, which == Which::eta ? s.eta : which == Which::w ? s.w : s.frakw);
    }
    return f;
}

namespace {

using spectral::cplx;

// out = -d/dx(in), optionally restricted to the 2/3 band.
void neg_dx(const double* in, double* out, std::size_t n, bool dealias) {
    std::vector<cplx> c(n / 2 + 1);
    spectral::forward_1d(in, c.data(), n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t m = 0; m < c.size(); ++m) {
        if (m == n / 2 || (dealias && !spectral::keep_23(long(m), n))) {
            c[m] = 0.0;
            continue;
        }
        c[m] *= cplx(0.0, -two_pi * double(m));
    }
    c[0] = 0.0;
    spectral::backward_1d(c.data(), out, n);
}

struct Tend {
    std::vector<double> eta, m, q;
};

// Explicit part: transport and pressure, in conservative variables.
Tend explicit_part(const std::vector<double>& eta, const std::vector<double>& w,
                   const std::vector<double>& fw, const FluidParams& p, bool dealias) {
    const std::size_t n = eta.size();
    Tend t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) flux[i] = eta[i] * w[i];
    neg_dx(flux.data(), t.eta.data(), n, dealias);
    for (std::size_t i = 0; i < n; ++i)
        flux[i] = eta[i] * w[i] * w[i] + p.a * std::pow(eta[i], p.gamma);
    neg_dx(flux.data(), t.m.data(), n, dealias);
    for (std::size_t i = 0; i < n; ++i) flux[i] = eta[i] * fw[i] * w[i];
    neg_dx(flux.data(), t.q.data(), n, dealias);
    return t;
}

// Solves c u - kappa u_xx = b by PCG with a constant-coefficient Fourier
// preconditioner. u holds the initial guess.
void viscous_solve(const std::vector<double>& c, double kappa, const std::vector<double>& b,
                   std::vector<double>& u, double tol, int max_iter) {
    const std::size_t n = c.size();
    double cbar = 0.0;
    for (double v : c) cbar += v;
    cbar /= double(n);
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> uxx(n);
    std::vector<cplx> sp(n / 2 + 1);
    auto apply_a = [&](const std::vector<double>& x, std::vector<double>& y) {
        spectral::deriv_1d(x.data(), uxx.data(), n, 1.0, 2);
        for (std::size_t i = 0; i < n; ++i) y[i] = c[i] * x[i] - kappa * uxx[i];
    };
    auto apply_m = [&](const std::vector<double>& r, std::vector<double>& z) {
        spectral::forward_1d(r.data(), sp.data(), n);
        for (std::size_t m = 0; m < sp.size(); ++m) {
            const double k = two_pi * double(m);
            sp[m] /= (cbar + kappa * k * k);
        }
        spectral::backward_1d(sp.data(), z.data(), n);
    };
    detail::pcg(apply_a, apply_m, b, u, tol, max_iter);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double vmin(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

LimitTendency limit_tendency(const State1D& s, const FluidParams& p) {
    const GridX g = s.grid();
    const std::size_t n = g.n;
    Field1D m = s.eta * s.w;
    Field1D eta_t = -1.0 * ddx(m);
    Field1D pr(g);
    for (std::size_t i = 0; i < n; ++i) pr[i] = pressure(p, s.eta[i]);
    const Field1D wx = ddx(s.w), wxx = ddx(s.w, 2), px = ddx(pr);
    const Field1D fx = ddx(s.frakw), fxx = ddx(s.frakw, 2);
    Field1D w_t(g), f_t(g);
    for (std::size_t i = 0; i < n; ++i) {
        w_t[i] = -s.w[i] * wx[i] + (p.nu() * wxx[i] - px[i]) / s.eta[i];
        f_t[i] = -s.w[i] * fx[i] + p.mu * fxx[i] / s.eta[i];
    }
    return {eta_t, w_t, f_t};
}

double cfl_dt(const State1D& s, const FluidParams& p, const SolverConfig& cfg) {
    const double umax = s.w.max_abs();
    const double rmax = s.eta.max();
    const double c = std::sqrt(p.a * p.gamma * std::pow(rmax, p.gamma - 1.0));
    return cfg.cfl_safety * s.grid().dx() / (umax + c);
}

LimitStepper::LimitStepper(FluidParams p, SolverConfig cfg, long slice)
    : p_(p), cfg_(cfg), slice_(slice), dt_(cfg.dt) {
    p_.validate();
    cfg_.validate();
}

LimitStepper::Outcome LimitStepper::try_bdf(const State1D& in, State1D& out, double h, History& next) const {
    const std::size_t n = in.grid().n;
    const auto& eta = in.eta.values();
    const auto& w = in.w.values();
    const auto& fw = in.frakw.values();
    std::vector<double> m(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = eta[i] * w[i];
        q[i] = eta[i] * fw[i];
    }
    Tend nt = explicit_part(eta, w, fw, p_, cfg_.dealias);

    // Variable-step SBDF2; BDF1/forward Euler when there is no history.
    double a0 = 1.0, a1 = -1.0, a2 = 0.0, b1 = 1.0, b2 = 0.0;
    const bool two = hist_.valid;
    if (two) {
        const double om = h / hist_.dt;
        a0 = (1.0 + 2.0 * om) / (1.0 + om);
        a1 = -(1.0 + om);
        a2 = om * om / (1.0 + om);
        b1 = 1.0 + om;
        b2 = -om;
    }
    auto combine = [&](const std::vector<double>& cur, const std::vector<double>* old,
                       const std::vector<double>& ncur, const std::vector<double>* nold) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = -a1 * cur[i] + h * b1 * ncur[i];
            if (two) v += -a2 * (*old)[i] + h * b2 * (*nold)[i];
            r[i] = v;
        }
        return r;
    };

    std::vector<double> eta1 = combine(eta, &hist_.eta, nt.eta, &hist_.n_eta);
    for (double& v : eta1) v /= a0;
    if (!all_finite(eta1)) return Outcome::nonfinite;
    if (vmin(eta1) <= cfg_.positivity_floor) return Outcome::positivity;

    std::vector<double> coef(n);
    for (std::size_t i = 0; i < n; ++i) coef[i] = a0 * eta1[i] / h;

    std::vector<double> bm = combine(m, &hist_.m, nt.m, &hist_.n_m);
    std::vector<double> bq = combine(q, &hist_.q, nt.q, &hist_.n_q);
    for (std::size_t i = 0; i < n; ++i) {
        bm[i] /= h;
        bq[i] /= h;
    }
    std::vector<double> w1 = w, f1 = fw;
    viscous_solve(coef, p_.nu(), bm, w1, cfg_.pcg_tol, cfg_.pcg_max_iter);
    viscous_solve(coef, p_.mu, bq, f1, cfg_.pcg_tol, cfg_.pcg_max_iter);
    if (!all_finite(w1) || !all_finite(f1)) return Outcome::nonfinite;

    out = State1D(Field1D(in.grid(), std::move(eta1), Role::density),
                  Field1D(in.grid(), std::move(w1), Role::velocity),
                  Field1D(in.grid(), std::move(f1), Role::velocity), in.t + h);
    next.eta = eta;
    next.m = std::move(m);
    next.q = std::move(q);
    next.n_eta = std::move(nt.eta);
    next.n_m = std::move(nt.m);
    next.n_q = std::move(nt.q);
    next.dt = h;
    next.valid = true;
    return Outcome::ok;
}

LimitStepper::Outcome LimitStepper::try_rk4(const State1D& in, State1D& out, double h) const {
    const std::size_t n = in.grid().n;
    const double nu = p_.nu(), mu = p_.mu;
    struct Cons {
        std::vector<double> eta, m, q;
    };
    std::vector<double> tmp(n);
    bool nonfinite = false;
    auto rhs = [&](const Cons& u, Cons& k) -> bool {
        if (!all_finite(u.eta) || !all_finite(u.m) || !all_finite(u.q)) {
            nonfinite = true;
            return false;
        }
        std::vector<double> w(n), fw(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(u.eta[i] > 0.0)) return false;
            w[i] = u.m[i] / u.eta[i];
            fw[i] = u.q[i] / u.eta[i];
        }
        Tend t = explicit_part(u.eta, w, fw, p_, cfg_.dealias);
        k.eta = std::move(t.eta);
        k.m = std::move(t.m);
        k.q = std::move(t.q);
        spectral::deriv_1d(w.data(), tmp.data(), n, 1.0, 2);
        for (std::size_t i = 0; i < n; ++i) k.m[i] += nu * tmp[i];
        spectral::deriv_1d(fw.data(), tmp.data(), n, 1.0, 2);
        for (std::size_t i = 0; i < n; ++i) k.q[i] += mu * tmp[i];
        return true;
    };
    Cons u0{in.eta.values(), in.eta.values(), in.eta.values()};
    for (std::size_t i = 0; i < n; ++i) {
        u0.m[i] = in.eta[i] * in.w[i];
        u0.q[i] = in.eta[i] * in.frakw[i];
    }
    auto axpy = [&](const Cons& u, const Cons& k, double s) {
        Cons r = u;
        for (std::size_t i = 0; i < n; ++i) {
            r.eta[i] += s * k.eta[i];
            r.m[i] += s * k.m[i];
            r.q[i] += s * k.q[i];
        }
        return r;
    };
    Cons k1, k2, k3, k4;
    if (!rhs(u0, k1) || !rhs(axpy(u0, k1, 0.5 * h), k2) || !rhs(axpy(u0, k2, 0.5 * h), k3) ||
        !rhs(axpy(u0, k3, h), k4))
        return nonfinite ? Outcome::nonfinite : Outcome::positivity;
    Cons u1 = u0;
    for (std::size_t i = 0; i < n; ++i) {
        u1.eta[i] += h / 6.0 * (k1.eta[i] + 2 * k2.eta[i] + 2 * k3.eta[i] + k4.eta[i]);
        u1.m[i] += h / 6.0 * (k1.m[i] + 2 * k2.m[i] + 2 * k3.m[i] + k4.m[i]);
        u1.q[i] += h / 6.0 * (k1.q[i] + 2 * k2.q[i] + 2 * k3.q[i] + k4.q[i]);
    }
    if (!all_finite(u1.eta) || !all_finite(u1.m) || !all_finite(u1.q)) return Outcome::nonfinite;
    if (vmin(u1.eta) <= cfg_.positivity_floor) return Outcome::positivity;
    std::vector<double> w(n), fw(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = u1.m[i] / u1.eta[i];
        fw[i] = u1.q[i] / u1.eta[i];
    }
    out = State1D(Field1D(in.grid(), std::move(u1.eta), Role::density),
                  Field1D(in.grid(), std::move(w), Role::velocity),
                  Field1D(in.grid(), std::move(fw), Role::velocity), in.t + h);
    return Outcome::ok;
}

double LimitStepper::step(State1D& s, double dt) {
    double h = dt;
    for (int attempt = 0; attempt <= cfg_.max_halvings; ++attempt) {
        State1D out;
        History next;
        const Outcome r = cfg_.scheme == Scheme::rk4_explicit ? try_rk4(s, out, h)
                                                              : try_bdf(s, out, h, next);
        last_failure_nonfinite_ = (r == Outcome::nonfinite);
        if (r == Outcome::ok) {
            s = std::move(out);
            if (cfg_.scheme == Scheme::imex_bdf2) hist_ = std::move(next);
            ++steps_;
            return h;
        }
        h *= 0.5;
        dt_ = std::min(dt_, h);
    }
    if (last_failure_nonfinite_)
        throw Blowup("limit solver: non-finite values at t=" + std::to_string(s.t), s.t, slice_);
    throw PositivityLoss("limit solver: density fell below the positivity floor at t=" +
                             std::to_string(s.t) +
                             (slice_ >= 0 ? " (slice " + std::to_string(slice_) + ")" : ""),
                         s.t, slice_);
}

void LimitStepper::advance_to(State1D& s, double t_target) {
    while (s.t < t_target) {
        const double remaining = t_target - s.t;
        if (remaining <= 1e-12 * std::max(1.0, std::abs(t_target))) {
            s.t = t_target;
            break;
        }
        const double k = std::ceil(remaining / dt_ - 1e-9);
        const double h = remaining / k;
        const double taken = step(s, h);
        if (taken == h && k == 1.0) s.t = t_target;  // avoid drift from accumulated sums
    }
}

State1D step_limit(const State1D& s, const FluidParams& p, const SolverConfig& cfg) {
    SolverConfig c = cfg;
    c.scheme = cfg.scheme;
    LimitStepper st(p, c);
    State1D out = s;
    st.step(out, cfg.dt);
    out.frakw = s.frakw;
    return out;
}

State1D step_passive(const State1D& current, const State1D& advanced, const FluidParams& p,
                     const SolverConfig& cfg) {
    if (!(current.grid() == advanced.grid())) throw MismatchError("step_passive: grid mismatch");
    const double h = advanced.t - current.t;
    if (!(h > 0.0)) throw MismatchError("step_passive: advanced state is not later than current");
    const std::size_t n = current.grid().n;
    std::vector<double> q(n), flux(n), nq(n), coef(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = current.eta[i] * current.frakw[i];
        flux[i] = q[i] * current.w[i];
    }
    neg_dx(flux.data(), nq.data(), n, cfg.dealias);
    for (std::size_t i = 0; i < n; ++i) {
        coef[i] = advanced.eta[i] / h;
        b[i] = (q[i] + h * nq[i]) / h;
    }
    std::vector<double> f1 = current.frakw.values();
    viscous_solve(coef, p.mu, b, f1, cfg.pcg_tol, cfg.pcg_max_iter);
    if (!all_finite(f1))
        throw Blowup("step_passive: non-finite values at t=" + std::to_string(advanced.t), advanced.t, -1);
    State1D out = advanced;
    out.frakw = Field1D(current.grid(), std::move(f1), Role::velocity);
    return out;
}

double energy_1d(const State1D& s, const FluidParams& p) {
    const std::size_t n = s.grid().n;
    const double P1 = pressure_potential(p, 1.0), dP1 = pressure_potential_d1(p, 1.0);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = s.eta[i];
        e += 0.5 * r * s.w[i] * s.w[i] + pressure_potential(p, r) - P1 - dP1 * (r - 1.0);
    }
    return e * s.grid().dx();
}

double dissipation_1d(const State1D& s) {
    const Field1D wx = ddx(s.w);
    double d = 0.0;
    for (std::size_t i = 0; i < wx.size(); ++i) d += wx[i] * wx[i];
    return d * s.grid().dx();
}

SlabObserver conservation_observer(const FluidParams& p) {
    SlabObserver o;
    o.names = {"mass_dev", "momentum", "passive_momentum", "energy", "eta_min", "eta_max"};
    o.fn = [p](const SlabState& s) {
        double md = 0, mom = 0, pm = 0, en = 0, emin = INFINITY, emax = -INFINITY;
        for (const auto& sl : s.slices) {
            md = std::max(md, std::abs(integrate_x(sl.eta) - 1.0));
            mom = std::max(mom, std::abs(integrate_x(sl.eta * sl.w)));
            pm = std::max(pm, std::abs(integrate_x(sl.eta * sl.frakw)));
            en = std::max(en, energy_1d(sl, p));
            emin = std::min(emin, sl.eta.min());
            emax = std::max(emax, sl.eta.max());
        }
        return std::vector<double>{md, mom, pm, en, emin, emax};
    };
    return o;
}

SlabRunResult run_slab(const SlabState& initial, const FluidParams& p, const SolverConfig& cfg,
                       double t_end, double sample_interval,
                       const std::vector<SlabObserver>& observers,
                       std::vector<SlabState>* history) {
    if (!(t_end > initial.t)) throw PreconditionError("run_slab: t_end must exceed the initial time");
    if (!(sample_interval > 0.0)) throw PreconditionError("run_slab: sample_interval must be positive");
    for (const auto& s : initial.slices) s.check();

    std::vector<std::string> names;
    for (const auto& o : observers) names.insert(names.end(), o.names.begin(), o.names.end());
    SlabRunResult res{initial, DiagnosticSeries(names)};
    SlabState& cur = res.final;

    auto observe = [&] {
        std::vector<double> row;
        for (const auto& o : observers) {
            auto v = o.fn(cur);
            if (v.size() != o.names.size()) throw MismatchError("observer returned wrong width");
            row.insert(row.end(), v.begin(), v.end());
        }
        res.series.add_row(cur.t, row);
        if (history) history->push_back(cur);
    };

    std::vector<LimitStepper> steppers;
    steppers.reserve(cur.slices.size());
    for (std::size_t j = 0; j < cur.slices.size(); ++j) steppers.emplace_back(p, cfg, long(j));

    observe();
    const double t0 = initial.t;
    const long n_samples = long(std::ceil((t_end - t0) / sample_interval - 1e-9));
    for (long k = 1; k <= n_samples; ++k) {
        const double target = std::min(t_end, t0 + double(k) * sample_interval);
        parallel_for(cur.slices.size(), [&](std::size_t j) {
            try {
                steppers[j].advance_to(cur.slices[j], target);
            } catch (const PositivityLoss& e) {
                throw PositivityLoss(std::string(e.what()), e.time(), long(j));
            } catch (const Blowup& e) {
                throw Blowup(std::string(e.what()), e.time(), long(j));
            }
        });
        for (auto& s : cur.slices) s.t = target;
        cur.t = target;
        observe();
    }
    return res;
}

LimitResidual residual_limit(const State1D& s, const State1D& prev, const FluidParams& p) {
    if (!(s.grid() == prev.grid())) throw MismatchError("residual_limit: grid mismatch");
    const double h = s.t - prev.t;
    if (!(h > 0.0)) throw MismatchError("residual_limit: states must be in time order");
    const GridX g = s.grid();
    const std::size_t n = g.n;
    auto terms = [&](const State1D& st, Field1D& mass_flux_x, Field1D& mom) {
        mass_flux_x = ddx(st.eta * st.w);
        Field1D pr(g);
        for (std::size_t i = 0; i < n; ++i) pr[i] = pressure(p, st.eta[i]);
        const Field1D wx = ddx(st.w), wxx = ddx(st.w, 2), px = ddx(pr);
        mom = Field1D(g);
        for (std::size_t i = 0; i < n; ++i)
            mom[i] = st.eta[i] * st.w[i] * wx[i] - p.nu() * wxx[i] + px[i];
    };
    Field1D fa, ma, fb, mb;
    terms(s, fa, ma);
    terms(prev, fb, mb);
    LimitResidual r{Field1D(g), Field1D(g)};
    for (std::size_t i = 0; i < n; ++i) {
        r.r_mass[i] = (s.eta[i] - prev.eta[i]) / h + 0.5 * (fa[i] + fb[i]);
        r.r_mom[i] = 0.5 * (s.eta[i] + prev.eta[i]) * (s.w[i] - prev.w[i]) / h + 0.5 * (ma[i] + mb[i]);
    }
    return r;
}

}  // namespace slowns

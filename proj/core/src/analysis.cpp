#include "slowns/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "slowns/errors.hpp"
#include "slowns/spectral.hpp"

namespace slowns {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Periodic part F of the primitive (zero mean, Nyquist dropped) and the mean of u.
void periodic_primitive(const Field1D& u, std::vector<double>& F, double& mean) {
    const std::size_t n = u.size();
    std::vector<spectral::cplx> c(n / 2 + 1);
    spectral::forward_1d(u.data(), c.data(), n);
    mean = c[0].real() / double(n);
    c[0] = 0.0;
    c[n / 2] = 0.0;
    for (std::size_t m = 1; m < n / 2; ++m) c[m] /= spectral::cplx(0.0, two_pi * double(m));
    F.assign(n, 0.0);
    spectral::backward_1d(c.data(), F.data(), n);
}

double l1(const Field1D& f) { return norm_lp(f, 1.0); }


}  // namespace

Field1D op_I(const Field1D& u) {
    std::vector<double> F;
    double mean = 0.0;
    periodic_primitive(u, F, mean);
    Field1D out(u.grid(), Role::derived);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = mean * u.grid().node(i) + F[i] - F[0];
    return out;
}

Field1D op_I_tilde(const Field1D& u) {
    std::vector<double> F;
    double mean = 0.0;
    periodic_primitive(u, F, mean);
    // <I(u)> over [0,1] is mean/2 - F(0) since F has zero mean.
    Field1D out(u.grid(), Role::derived);
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = mean * (u.grid().node(i) - 0.5) + F[i];
    return out;
}

double primitive_mean(const Field1D& prim, double jump) {
    double s = 0.0;
    for (std::size_t i = 0; i < prim.size(); ++i) s += prim[i];
    const double dx = prim.grid().dx();
    return s * dx + 0.5 * dx * jump;
}

// ---------------------------------------------------------------------------

namespace {

struct YNorms {
    double lp, l2, dl2;
};

YNorms y_norms(const std::vector<double>& f, const GridY& gy, double p) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    spectral::deriv_1d(f.data(), d.data(), n, gy.period(), 1);
    double sp = 0.0, s2 = 0.0, sd = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isinf(p))
            sp = std::max(sp, std::abs(f[j]));
        else
            sp += std::pow(std::abs(f[j]), p);
        s2 += f[j] * f[j];
        sd += d[j] * d[j];
    }
    const double dy = gy.dy();
    return {std::isinf(p) ? sp : std::pow(sp * dy, 1.0 / p), std::sqrt(s2 * dy), std::sqrt(sd * dy)};
}

}  // namespace

GnResult gn_check(const Field2D& f, double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) throw DomainError("gn_check: p must be finite and >= 2");
    const double fl2 = norm_l2(f);
    if (!(fl2 > 0.0)) throw UndefinedRatio("gn_check: f vanishes identically");
    const double gl2 = norm_grad(f);
    if (!(gl2 > 1e-13 * fl2)) throw UndefinedRatio("gn_check: grad f vanishes identically");

    GnResult r;
    r.p = p;
    r.lhs = norm_lp(f, p);
    const double den = std::pow(fl2, 2.0 / p) * std::pow(gl2, 1.0 - 2.0 / p) +
                       std::pow(fl2, 0.5 + 1.0 / p) * std::pow(gl2, 0.5 - 1.0 / p);
    r.ratio = r.lhs / den;

    const SplitMean sm = split_mean(f);
    const double tl2 = norm_l2(sm.f_tilde);
    if (tl2 > 1e-14 * fl2) {
        const double tg = norm_grad(sm.f_tilde);
        r.t1_tilde = std::pow(tl2, 2.0 / p) * std::pow(tg, 1.0 - 2.0 / p);
        if (r.t1_tilde > 0.0) r.ratio_tilde = norm_lp(sm.f_tilde, p) / r.t1_tilde;
    }
    const YNorms yb = y_norms(sm.f_bar, f.grid_y(), p);
    if (yb.l2 > 1e-14 * fl2 && yb.dl2 > 0.0) {
        r.t2_bar = std::pow(yb.l2, 0.5 + 1.0 / p) * std::pow(yb.dl2, 0.5 - 1.0 / p);
        r.ratio_bar = yb.lp / r.t2_bar;
    }
    return r;
}

// ---------------------------------------------------------------------------

Sides weighted_poincare_check(const Field1D& eta, const Field1D& w, double eta_bar) {
    if (!(eta.grid() == w.grid())) throw MismatchError("weighted_poincare_check: grid mismatch");
    const double emin = eta.min(), emax = eta.max();
    if (!(emin > 0.0)) throw PreconditionError("weighted_poincare_check: eta must be positive");
    if (emax > eta_bar * (1.0 + 1e-12))
        throw PreconditionError("weighted_poincare_check: eta exceeds eta_bar");
    if (std::abs(integrate_x(eta) - 1.0) > 1e-8)
        throw PreconditionError("weighted_poincare_check: int eta != 1");
    const Field1D m = eta * w;
    if (std::abs(integrate_x(m)) > 1e-8)
        throw PreconditionError("weighted_poincare_check: int eta w != 0");
    const Field1D wx = ddx(w);
    return {integrate_x(m * w), eta_bar * eta_bar * integrate_x(wx * wx)};
}

namespace {

void dwp_pre(double mass, double mom_q, double M, double E0, double q, double rmin) {
    if (!(q > 1.0)) throw PreconditionError("density_weighted_poincare: q must exceed 1");
    if (!(M > 0.0)) throw PreconditionError("density_weighted_poincare: M must be positive");
    if (rmin < 0.0) throw PreconditionError("density_weighted_poincare: rho must be non-negative");
    if (mass < M) throw PreconditionError("density_weighted_poincare: int rho < M");
    if (mom_q > E0) throw PreconditionError("density_weighted_poincare: int rho^q > E0");
}

DwpResult dwp_finish(double lhs, double grad2, double weighted) {
    DwpResult r;
    r.lhs = lhs;
    r.base = grad2 + weighted * weighted;
    r.ratio = r.base > 0.0 ? lhs / r.base : 0.0;
    return r;
}

}  // namespace

DwpResult density_weighted_poincare(const Field1D& rho, const Field1D& u, double M, double E0, double q) {
    if (!(rho.grid() == u.grid())) throw MismatchError("density_weighted_poincare: grid mismatch");
    Field1D rq(rho.grid()), ru(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rq[i] = std::pow(std::max(rho[i], 0.0), q);
        ru[i] = rho[i] * std::abs(u[i]);
    }
    dwp_pre(integrate_x(rho), integrate_x(rq), M, E0, q, rho.min());
    const Field1D ux = ddx(u);
    return dwp_finish(integrate_x(u * u), integrate_x(ux * ux), integrate_x(ru));
}

DwpResult density_weighted_poincare(const Field2D& rho, const Field2D& u, double M, double E0, double q) {
    if (!rho.same_grid(u)) throw MismatchError("density_weighted_poincare: grid mismatch");
    Field2D rq(rho.grid_x(), rho.grid_y()), ru(rho.grid_x(), rho.grid_y());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        rq[k] = std::pow(std::max(rho[k], 0.0), q);
        ru[k] = rho[k] * std::abs(u[k]);
    }
    dwp_pre(integrate_xy(rho), integrate_xy(rq), M, E0, q, rho.min());
    const double g = norm_grad(u);
    return dwp_finish(integrate_xy(u * u), g * g, integrate_xy(ru));
}

// ---------------------------------------------------------------------------

double DensityBounds::eta_lower(double t) const {
    return varsigma_lower0 *
           std::exp(-2.0 * std::sqrt(e00_bar) / nu - (a * std::pow(eta_bar, gamma) + gamma * e00_bar) * t / nu);
}

DensityBounds density_bounds(const InitialDataSpec& spec, const FluidParams& p, const GridX& gx,
                             std::vector<double> ys) {
    p.validate();
    if (ys.empty()) {
        if (std::isinf(spec.y_width)) {
            ys.push_back(0.0);
        } else {
            const double span = 6.0 * spec.y_width;
            const int k = 240;
            for (int i = 0; i <= k; ++i) ys.push_back(-span + 2.0 * span * double(i) / k);
        }
    }
    DensityBounds b;
    b.a = p.a;
    b.gamma = p.gamma;
    b.nu = p.nu();
    b.varsigma_bar0 = spec.upper_bound;
    b.varsigma_lower0 = spec.lower_bound;
    double e00 = -std::numeric_limits<double>::infinity();
    for (double y : ys) {
        const Field1D s = spec.sample_density(gx, y);
        const Field1D w = spec.sample_w(gx, y);
        Field1D integrand(gx);
        for (std::size_t i = 0; i < gx.n; ++i)
            integrand[i] = 0.5 * s[i] * w[i] * w[i] + pressure_potential(p, s[i]);
        e00 = std::max(e00, integrate_x(integrand));
        b.varsigma_bar0 = std::max(b.varsigma_bar0, s.max());
        b.varsigma_lower0 = std::min(b.varsigma_lower0, s.min());
    }
    b.e00_bar = e00;
    b.varsigma_bar1 = std::pow(p.gamma * e00 / p.a, 1.0 / p.gamma);
    b.eta_bar = std::max(b.varsigma_bar0, b.varsigma_bar1) * std::exp(4.0 * std::sqrt(e00));
    return b;
}

// ---------------------------------------------------------------------------

LyapunovConstants LyapunovConstants::defaults(const DensityBounds& b, const FluidParams& p) {
    const double a = p.a, g = p.gamma, nu = p.nu(), eb = b.eta_bar;
    LyapunovConstants c;
    c.A1 = std::max({4.0, 2.0 / (a * g * std::pow(1.0 + eb, g - 2.0)),
                     (eb * eb + eb * eb * eb + 2.0 * nu * nu / a + 1.0) / nu});
    c.A2 = std::max(1.0, (5.0 * eb + 1.0) / (6.0 * nu));
    const double pmax = a * g * std::pow(eb, g - 1.0);
    c.A3 = std::max(4.0, 2.0 + pmax * pmax / nu);
    c.A4 = std::max(4.0 + nu, 2.0 * (a * a * g * g * std::pow(eb, 2.0 * g - 2.0) + 1.0) / a);
    c.A5 = 1.0;
    c.A6 = 1.0;
    return c;
}

void LyapunovConstants::validate() const {
    const double v[] = {A1, A2, A3, A4, A5, A6};
    for (int i = 0; i < 6; ++i)
        if (!(v[i] > 0.0) || !std::isfinite(v[i]))
            throw ConfigError("lyapunov.A" + std::to_string(i + 1), "must be a positive finite number");
}

Functional parse_functional(const std::string& s) {
    if (s == "F2") return Functional::F2;
    if (s == "F3") return Functional::F3;
    if (s == "F4") return Functional::F4;
    throw ConfigError("lyapunov.functional", "unknown functional '" + s + "'");
}

const char* functional_name(Functional f) {
    switch (f) {
        case Functional::F2: return "F2";
        case Functional::F3: return "F3";
        case Functional::F4: return "F4";
    }
    return "?";
}

namespace {

double f3_value(const State1D& s, const FluidParams& p, const LyapunovConstants& c,
                const Field1D& Ieta, const Field1D& eta_x) {
    const double nu = p.nu();
    Field1D f(s.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double e = s.eta[i], w = s.w[i];
        const double zx = -eta_x[i] / (e * e);
        const double v = w - nu * zx;
        f[i] = 0.5 * c.A1 * c.A4 * e * w * w + c.A1 * c.A4 * relative_potential(p, e, 1.0) -
               c.A4 * e * w * Ieta[i] + 0.5 * e * v * v;
    }
    return integrate_x(f);
}

}  // namespace

double lyapunov_value(const State1D& s, const FluidParams& p, const LyapunovConstants& c, Functional which) {
    c.validate();
    const GridX& g = s.grid();
    Field1D em1(g);
    for (std::size_t i = 0; i < g.n; ++i) em1[i] = s.eta[i] - 1.0;
    const Field1D Ieta = op_I(em1);
    const Field1D wx = ddx(s.w);
    const double nu = p.nu(), a = p.a, gm = p.gamma;

    if (which == Functional::F2) {
        const double p1 = pressure(p, 1.0);
        Field1D f(g);
        for (std::size_t i = 0; i < g.n; ++i) {
            const double e = s.eta[i], w = s.w[i];
            f[i] = 0.5 * c.A1 * c.A3 * e * w * w + c.A1 * c.A3 * relative_potential(p, e, 1.0) -
                   c.A3 * e * w * Ieta[i] + c.A2 * e * w * w * w * w + nu * wx[i] * wx[i] +
                   a * a / (2.0 * nu) * (std::pow(e, 2.0 * gm) - 1.0 - 2.0 * gm * (e - 1.0)) -
                   (pressure(p, e) - p1) * wx[i];
        }
        return integrate_x(f);
    }
    const Field1D eta_x = ddx(s.eta);
    const double f3 = f3_value(s, p, c, Ieta, eta_x);
    if (which == Functional::F3) return f3;

    Field1D pr(g);
    for (std::size_t i = 0; i < g.n; ++i) pr[i] = pressure(p, s.eta[i]);
    const Field1D px = ddx(pr);
    const Field1D wxx = ddx(s.w, 2);
    Field1D f(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double dtw = (nu * wxx[i] - px[i]) / s.eta[i];
        f[i] = c.A5 * wx[i] * wx[i] + s.eta[i] * dtw * dtw;
    }
    return c.A6 * f3 + integrate_x(f);
}

double f2_reference(const State1D& s) {
    const Field1D wx = ddx(s.w);
    Field1D f(s.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double e = s.eta[i], w = s.w[i];
        f[i] = e * w * w + (e - 1.0) * (e - 1.0) + e * w * w * w * w + wx[i] * wx[i];
    }
    return integrate_x(f);
}

DiagnosticSeries lyapunov_series(const std::vector<State1D>& history, const FluidParams& p,
                                 const LyapunovConstants& c, Functional which) {
    c.validate();
    std::vector<std::string> names{functional_name(which)};
    if (which == Functional::F2) names.push_back("F2_lower");
    DiagnosticSeries out(names);
    for (const State1D& s : history) {
        std::vector<double> row{lyapunov_value(s, p, c, which)};
        if (which == Functional::F2) row.push_back(f2_reference(s));
        out.add_row(s.t, row);
    }
    return out;
}

// ---------------------------------------------------------------------------

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& v,
                   std::pair<double, double> window) {
    if (t.size() != v.size()) throw MismatchError("decay_fit: length mismatch");
    const double tol = 1e-9 * std::max(1.0, std::abs(window.second));
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window.first - tol || t[i] > window.second + tol) continue;
        if (!(v[i] > 0.0) || !std::isfinite(v[i]))
            throw PreconditionError("decay_fit: non-positive sample at t = " + format_double(t[i]));
        xs.push_back(t[i]);
        ys.push_back(std::log(v[i]));
    }
    if (xs.size() < 2) throw PreconditionError("decay_fit: fewer than two samples in window");
    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw PreconditionError("decay_fit: window holds a single time");
    const double slope = sxy / sxx;
    DecayFit f;
    f.alpha = -slope;
    f.C = std::exp(my - slope * mx);
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (my + slope * (xs[i] - mx));
        ssr += r * r;
    }
    f.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    f.window = window;
    f.points = xs.size();
    return f;
}

DecayFit decay_fit(const DiagnosticSeries& s, const std::string& column, std::pair<double, double> window) {
    return decay_fit(s.t, s.column(column), window);
}

// ---------------------------------------------------------------------------

namespace {

// Derivative at t[k] of the quadratic through three stored samples.
std::vector<double> lagrange_dt(const std::vector<double>& t, std::size_t k,
                                const std::vector<const std::vector<double>*>& f) {
    const std::size_t i0 = k >= 2 ? k - 2 : 0;
    const double t0 = t[i0], t1 = t[i0 + 1], t2 = t[i0 + 2], tk = t[k];
    const double c0 = (2 * tk - t1 - t2) / ((t0 - t1) * (t0 - t2));
    const double c1 = (2 * tk - t0 - t2) / ((t1 - t0) * (t1 - t2));
    const double c2 = (2 * tk - t0 - t1) / ((t2 - t0) * (t2 - t1));
    const auto& a = *f[i0];
    const auto& b = *f[i0 + 1];
    const auto& c = *f[i0 + 2];
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = c0 * a[i] + c1 * b[i] + c2 * c[i];
    return out;
}

}  // namespace

DiagnosticSeries y_derivative_checks(const std::vector<SlabState>& history, int order) {
    if (order != 1 && order != 2) throw DomainError("y_derivative_checks: order must be 1 or 2");
    if (history.size() < 3) throw PreconditionError("y_derivative_checks: need at least 3 stored times");
    const GridX gx = history.front().gx;
    const GridY gy = history.front().gy;
    for (const auto& s : history)
        if (!(s.gx == gx) || !(s.gy == gy)) throw MismatchError("y_derivative_checks: grids differ");

    const std::size_t T = history.size();
    std::vector<double> times(T);
    std::vector<std::vector<double>> ey(T), wy(T), my(T);
    for (std::size_t k = 0; k < T; ++k) {
        times[k] = history[k].t;
        const Field2D eta = history[k].field(SlabState::Which::eta);
        const Field2D w = history[k].field(SlabState::Which::w);
        ey[k] = ddy(eta, order).values();
        wy[k] = ddy(w, order).values();
        my[k] = ddy(eta * w, order).values();
    }
    for (std::size_t k = 1; k < T; ++k)
        if (!(times[k] > times[k - 1])) throw PreconditionError("y_derivative_checks: times must increase");

    std::vector<const std::vector<double>*> pe(T), pw(T);
    for (std::size_t k = 0; k < T; ++k) {
        pe[k] = &ey[k];
        pw[k] = &wy[k];
    }

    const char* sfx = order == 1 ? "y" : "yy";
    DiagnosticSeries out({std::string("int_eta_") + sfx, std::string("int_m_") + sfx,
                          std::string("eta_") + sfx + (order == 1 ? "_H2" : "_H1"),
                          std::string("w_") + sfx + (order == 1 ? "_H3" : "_H2"),
                          std::string(sfx) + (order == 1 ? "t_H1" : "t_L2")});
    const int ke = order == 1 ? 2 : 1;
    const int kw = order == 1 ? 3 : 2;
    const int kt = order == 1 ? 1 : 0;

    for (std::size_t k = 0; k < T; ++k) {
        const std::vector<double> et = lagrange_dt(times, k, pe);
        const std::vector<double> wt = lagrange_dt(times, k, pw);
        double ie = 0, im = 0, ne = 0, nw = 0, nt = 0;
        for (std::size_t j = 0; j < gy.n; ++j) {
            const std::size_t off = j * gx.n;
            auto slice = [&](const std::vector<double>& v) {
                return Field1D(gx, std::vector<double>(v.begin() + off, v.begin() + off + gx.n));
            };
            ie = std::max(ie, std::abs(integrate_x(slice(ey[k]))));
            im = std::max(im, std::abs(integrate_x(slice(my[k]))));
            ne = std::max(ne, norm_hk(slice(ey[k]), ke));
            nw = std::max(nw, norm_hk(slice(wy[k]), kw));
            const double a = norm_hk(slice(et), kt), b = norm_hk(slice(wt), kt);
            nt = std::max(nt, std::sqrt(a * a + b * b));
        }
        out.add_row(times[k], {ie, im, ne, nw, nt});
    }
    return out;
}

std::vector<PassiveVerdict> passive_decay_check(const std::vector<SlabState>& history,
                                                const FluidParams& p, const DensityBounds& b,
                                                double tol) {
    std::vector<PassiveVerdict> out;
    if (history.empty()) return out;
    const std::size_t ns = history.front().slices.size();
    const double rate = p.mu / (b.eta_bar * b.eta_bar);
    const double t0 = history.front().t;
    auto weighted = [](const State1D& s) { return integrate_x(s.eta * s.frakw * s.frakw); };
    for (std::size_t j = 0; j < ns; ++j) {
        PassiveVerdict v;
        v.slice = j;
        const double base = weighted(history.front().slices[j]);
        for (const SlabState& h : history) {
            const double lhs = weighted(h.slices[j]);
            const double rhs = std::exp(-rate * (h.t - t0)) * base * (1.0 + tol);
            double r = 0.0;
            if (rhs > 0.0)
                r = lhs / rhs;
            else if (lhs > 0.0)
                r = std::numeric_limits<double>::infinity();
            v.worst_ratio = std::max(v.worst_ratio, r);
        }
        v.pass = v.worst_ratio <= 1.0;
        out.push_back(v);
    }
    return out;
}

void write_verdicts_csv(const std::string& path, const std::vector<Verdict>& v) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << "name,lhs,rhs,margin,pass\n";
    for (const Verdict& r : v)
        os << r.name << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
           << format_double(r.margin) << ',' << (r.pass ? 1 : 0) << '\n';
    if (!os) throw Error("write failed: " + path);
}

// ---------------------------------------------------------------------------

Field1D random_band_limited(const GridX& g, std::uint64_t seed, int modes, double mean_scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double mean = mean_scale * U(rng);
    std::vector<double> ca(modes + 1), cb(modes + 1);
    for (int k = 1; k <= modes; ++k) {
        ca[k] = U(rng) / k;
        cb[k] = U(rng) / k;
    }
    Field1D out(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        double s = mean;
        for (int k = 1; k <= modes; ++k)
            s += ca[k] * std::cos(two_pi * k * x) + cb[k] * std::sin(two_pi * k * x);
        out[i] = s;
    }
    return out;
}

Field2D random_band_limited_2d(const GridX& gx, const GridY& gy, std::uint64_t seed, int modes) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    struct Term {
        int kx, ky;
        double c, s;
    };
    std::vector<Term> terms;
    for (int kx = 0; kx <= modes; ++kx)
        for (int ky = -modes; ky <= modes; ++ky) {
            if (kx == 0 && ky <= 0) continue;
            const double w = 1.0 / (1.0 + kx * kx + ky * ky);
            terms.push_back({kx, ky, U(rng) * w, U(rng) * w});
        }
    Field2D out(gx, gy);
    for (std::size_t j = 0; j < gy.n; ++j) {
        const double y = gy.node(j) / gy.period();
        for (std::size_t i = 0; i < gx.n; ++i) {
            const double x = gx.node(i);
            double s = 0.0;
            for (const Term& t : terms) {
                const double ph = two_pi * (t.kx * x + t.ky * y);
                s += t.c * std::cos(ph) + t.s * std::sin(ph);
            }
            out(i, j) = s;
        }
    }
    return out;
}

SuiteResult op_I_suite(std::uint64_t seed, std::size_t cases) {
    SuiteResult r;
    r.worst_margin = std::numeric_limits<double>::infinity();
    const GridX g(128);
    for (std::size_t c = 0; c < cases; ++c) {
        const Field1D u = random_band_limited(g, seed + c, 1 + int(c % 12), 1.0);
        bool ok = true;

        // ||I(u)||_{Linf}, ||I(u)||_{L1}, ||d_x I(u)||_{L1} each bounded by ||u||_{L1}
        std::vector<double> F;
        double mean = 0.0;
        periodic_primitive(u, F, mean);
        const Field1D I = op_I(u);
        Field1D Ix = ddx(Field1D(g, F));
        for (std::size_t i = 0; i < g.n; ++i) Ix[i] += mean;
        const double rhs = l1(u);
        const double lhs = std::max({I.max_abs(), l1(I), l1(Ix)});
        const double margin = (rhs - lhs) / rhs;
        if (lhs > rhs * (1.0 + 1e-12)) ok = false;
        r.worst_margin = std::min(r.worst_margin, margin);

        // I(u_x) = u - u(0), I~(u_x) = u - <u>
        const Field1D ux = ddx(u);
        const Field1D Iux = op_I(ux);
        const Field1D Itux = op_I_tilde(ux);
        const double umean = integrate_x(u);
        const double scale = std::max(1.0, u.max_abs());
        for (std::size_t i = 0; i < g.n; ++i) {
            if (std::abs(Iux[i] - (u[i] - u[0])) > 1e-11 * scale) ok = false;
            if (std::abs(Itux[i] - (u[i] - umean)) > 1e-11 * scale) ok = false;
        }

        // zero mean of I~
        if (std::abs(primitive_mean(op_I_tilde(u), mean)) > 1e-13 * scale) ok = false;

        ++r.cases;
        if (!ok) ++r.failures;
    }
    return r;
}

SuiteResult weighted_poincare_suite(std::uint64_t seed, std::size_t cases) {
    SuiteResult r;
    r.worst_margin = std::numeric_limits<double>::infinity();
    const GridX g(128);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (std::size_t c = 0; c < cases; ++c) {
        Field1D d = random_band_limited(g, seed + 2 * c, 1 + int(c % 8), 0.0);
        const double dm = integrate_x(d);
        for (std::size_t i = 0; i < g.n; ++i) d[i] -= dm;
        const double scale = 0.95 * U(rng) / std::max(d.max_abs(), 1e-300);
        Field1D eta(g, Role::density);
        for (std::size_t i = 0; i < g.n; ++i) eta[i] = 1.0 + scale * d[i];
        Field1D w = random_band_limited(g, seed + 2 * c + 1, 1 + int(c % 10), 1.0);
        const double wm = integrate_x(eta * w) / integrate_x(eta);
        for (std::size_t i = 0; i < g.n; ++i) w[i] -= wm;
        const double eta_bar = eta.max() * (1.0 + U(rng));
        bool ok = true;
        try {
            const Sides s = weighted_poincare_check(eta, w, eta_bar);
            if (s.lhs > s.rhs * (1.0 + 1e-10)) ok = false;
            if (s.rhs > 0.0) r.worst_margin = std::min(r.worst_margin, (s.rhs - s.lhs) / s.rhs);
        } catch (const PreconditionError&) {
            ok = false;
        }
        ++r.cases;
        if (!ok) ++r.failures;
    }
    return r;
}

GnSweep gn_suite(std::uint64_t seed, std::size_t cases, double p, const GridX& gx, const GridY& gy) {
    GnSweep s;
    s.p = p;
    const GridX gx2(2 * gx.n);
    const GridY gy2(2 * gy.n, gy.half_length);
    for (std::size_t c = 0; c < cases; ++c) {
        const int modes = 1 + int(c % 6);
        const Field2D f = random_band_limited_2d(gx, gy, seed + c, modes);
        const Field2D f2 = random_band_limited_2d(gx2, gy2, seed + c, modes);
        s.max_ratio = std::max(s.max_ratio, gn_check(f, p).ratio);
        s.max_ratio_refined = std::max(s.max_ratio_refined, gn_check(f2, p).ratio);
    }
    return s;
}

}  // namespace slowns

#include "slowns/solver2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcg.hpp"
#include "slowns/errors.hpp"
#include "slowns/spectral.hpp"

namespace slowns {

State2D::State2D(Field2D rho_, Field2D u1_, Field2D u2_, double t_)
    : rho(std::move(rho_)), u1(std::move(u1_)), u2(std::move(u2_)), t(t_) {
    if (!rho.same_grid(u1) || !rho.same_grid(u2)) throw MismatchError("State2D: fields on different grids");
    rho.set_role(Role::density);
    u1.set_role(Role::velocity);
    u2.set_role(Role::velocity);
}

State2D State2D::equilibrium(const GridX& gx, const GridY& gy, double t) {
    return State2D(Field2D(gx, gy, Role::density, 1.0), Field2D(gx, gy, Role::velocity),
                   Field2D(gx, gy, Role::velocity), t);
}

void State2D::check() const {
    rho.check();
    u1.check();
    u2.check();
}

namespace {

using spectral::cplx;

// Wavenumber tables for an nx*ny box (x period 1).
struct Waves {
    std::size_t nx, ny, ncx;
    std::vector<double> kx, ky;    // full wavenumbers
    std::vector<bool> nyq_x, nyq_y;
    std::vector<bool> keep_x, keep_y;

    Waves(std::size_t nx_, std::size_t ny_, double period_y) : nx(nx_), ny(ny_), ncx(nx_ / 2 + 1) {
        const double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t m = 0; m < ncx; ++m) {
            kx.push_back(two_pi * double(m));
            nyq_x.push_back(m == nx / 2);
            keep_x.push_back(spectral::keep_23(long(m), nx));
        }
        for (std::size_t j = 0; j < ny; ++j) {
            const long my = spectral::mode(j, ny);
            ky.push_back(two_pi * double(my) / period_y);
            nyq_y.push_back(j == ny / 2);
            keep_y.push_back(spectral::keep_23(my, ny));
        }
    }
};

struct Workspace {
    Waves wv;
    std::vector<cplx> a, b;
    std::vector<double> r1, r2;
    Workspace(std::size_t nx, std::size_t ny, double py)
        : wv(nx, ny, py), a(wv.ncx * ny), b(wv.ncx * ny), r1(nx * ny), r2(nx * ny) {}
};

// out = -(d_x fx + d_y fy), optionally restricted to the 2/3 band.
void neg_div(Workspace& w, const std::vector<double>& fx, const std::vector<double>& fy,
             std::vector<double>& out, bool dealias) {
    const auto& wv = w.wv;
    spectral::forward_2d(fx.data(), w.a.data(), wv.nx, wv.ny);
    spectral::forward_2d(fy.data(), w.b.data(), wv.nx, wv.ny);
    for (std::size_t j = 0; j < wv.ny; ++j) {
        for (std::size_t m = 0; m < wv.ncx; ++m) {
            const std::size_t k = j * wv.ncx + m;
            if (dealias && !(wv.keep_x[m] && wv.keep_y[j])) {
                w.a[k] = 0.0;
                continue;
            }
            const double kx = wv.nyq_x[m] ? 0.0 : wv.kx[m];
            const double ky = wv.nyq_y[j] ? 0.0 : wv.ky[j];
            w.a[k] = cplx(0.0, -1.0) * (kx * w.a[k] + ky * w.b[k]);
        }
    }
    w.a[0] = 0.0;
    spectral::backward_2d(w.a.data(), out.data(), wv.nx, wv.ny);
}

struct Tend2 {
    std::vector<double> rho, m1, m2;
};

Tend2 explicit_part(Workspace& w, const std::vector<double>& rho, const std::vector<double>& u1,
                    const std::vector<double>& u2, const FluidParams& p, bool dealias) {
    const std::size_t n = rho.size();
    Tend2 t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    std::vector<double> fx(n), fy(n), pr(n);
    for (std::size_t i = 0; i < n; ++i) {
        pr[i] = p.a * std::pow(rho[i], p.gamma);
        fx[i] = rho[i] * u1[i];
        fy[i] = rho[i] * u2[i];
    }
    neg_div(w, fx, fy, t.rho, dealias);
    for (std::size_t i = 0; i < n; ++i) {
        const double m1 = rho[i] * u1[i];
        fx[i] = m1 * u1[i] + pr[i];
        fy[i] = m1 * u2[i];
    }
    neg_div(w, fx, fy, t.m1, dealias);
    for (std::size_t i = 0; i < n; ++i) {
        const double m2 = rho[i] * u2[i];
        fx[i] = m2 * u1[i];
        fy[i] = m2 * u2[i] + pr[i];
    }
    neg_div(w, fx, fy, t.m2, dealias);
    return t;
}

// Per-mode viscous symbol: -mu Lap - mu' grad div  ->  S(k), 2x2 symmetric.
// Odd-order cross terms vanish on Nyquist rows/columns.
inline void symbol(const Waves& wv, std::size_t j, std::size_t m, double mu, double mup, double& s11,
                   double& s12, double& s22) {
    const double kx = wv.kx[m], ky = wv.ky[j];
    const double k2 = kx * kx + ky * ky;
    const double kxy = (wv.nyq_x[m] || wv.nyq_y[j]) ? 0.0 : kx * ky;
    s11 = mu * k2 + mup * kx * kx;
    s22 = mu * k2 + mup * ky * ky;
    s12 = mup * kxy;
}

// Solves c u - mu Lap u - mu' grad div u = b for u = (u1, u2) stacked.
int viscous_solve_2d(Workspace& w, const std::vector<double>& c, const FluidParams& p,
                     const std::vector<double>& b, std::vector<double>& u, double tol, int max_iter) {
    const auto& wv = w.wv;
    const std::size_t n = c.size();
    double cbar = 0.0;
    for (double v : c) cbar += v;
    cbar /= double(n);
    const double mu = p.mu, mup = p.mu_prime;

    auto apply_a = [&](const std::vector<double>& x, std::vector<double>& y) {
        spectral::forward_2d(x.data(), w.a.data(), wv.nx, wv.ny);
        spectral::forward_2d(x.data() + n, w.b.data(), wv.nx, wv.ny);
        for (std::size_t j = 0; j < wv.ny; ++j)
            for (std::size_t m = 0; m < wv.ncx; ++m) {
                const std::size_t k = j * wv.ncx + m;
                double s11, s12, s22;
                symbol(wv, j, m, mu, mup, s11, s12, s22);
                const cplx a = w.a[k], bb = w.b[k];
                w.a[k] = s11 * a + s12 * bb;
                w.b[k] = s12 * a + s22 * bb;
            }
        spectral::backward_2d(w.a.data(), y.data(), wv.nx, wv.ny);
        spectral::backward_2d(w.b.data(), y.data() + n, wv.nx, wv.ny);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += c[i] * x[i];
            y[n + i] += c[i] * x[n + i];
        }
    };
    auto apply_m = [&](const std::vector<double>& r, std::vector<double>& z) {
        spectral::forward_2d(r.data(), w.a.data(), wv.nx, wv.ny);
        spectral::forward_2d(r.data() + n, w.b.data(), wv.nx, wv.ny);
        for (std::size_t j = 0; j < wv.ny; ++j)
            for (std::size_t m = 0; m < wv.ncx; ++m) {
                const std::size_t k = j * wv.ncx + m;
                double s11, s12, s22;
                symbol(wv, j, m, mu, mup, s11, s12, s22);
                s11 += cbar;
                s22 += cbar;
                const double det = s11 * s22 - s12 * s12;
                const cplx a = w.a[k], bb = w.b[k];
                w.a[k] = (s22 * a - s12 * bb) / det;
                w.b[k] = (-s12 * a + s11 * bb) / det;
            }
        spectral::backward_2d(w.a.data(), z.data(), wv.nx, wv.ny);
        spectral::backward_2d(w.b.data(), z.data() + n, wv.nx, wv.ny);
    };
    return detail::pcg(apply_a, apply_m, b, u, tol, max_iter);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

Tendency2D full_tendency(const State2D& s, const FluidParams& p) {
    const GridX gx = s.grid_x();
    const GridY gy = s.grid_y();
    const std::size_t n = s.rho.size();
    Field2D m1 = s.rho * s.u1, m2 = s.rho * s.u2;
    Field2D rho_t = ddx(m1) + ddy(m2);
    for (std::size_t k = 0; k < n; ++k) rho_t[k] = -rho_t[k];
    Field2D pr(gx, gy);
    for (std::size_t k = 0; k < n; ++k) pr[k] = pressure(p, s.rho[k]);
    const Field2D px = ddx(pr), py = ddy(pr);
    const Field2D u1x = ddx(s.u1), u1y = ddy(s.u1), u2x = ddx(s.u2), u2y = ddy(s.u2);
    const Field2D lap1 = ddx(s.u1, 2) + ddy(s.u1, 2), lap2 = ddx(s.u2, 2) + ddy(s.u2, 2);
    Field2D mixed1(gx, gy), mixed2(gx, gy);
    spectral::deriv_2d(s.u2.data(), mixed1.data(), gx.n, gy.n, 1.0, gy.period(), 1, 1);
    spectral::deriv_2d(s.u1.data(), mixed2.data(), gx.n, gy.n, 1.0, gy.period(), 1, 1);
    const Field2D u1xx = ddx(s.u1, 2), u2yy = ddy(s.u2, 2);
    Field2D u1_t(gx, gy), u2_t(gx, gy);
    for (std::size_t k = 0; k < n; ++k) {
        const double div_x = u1xx[k] + mixed1[k];  // d_x div u
        const double div_y = mixed2[k] + u2yy[k];  // d_y div u
        const double r = s.rho[k];
        u1_t[k] = -(s.u1[k] * u1x[k] + s.u2[k] * u1y[k]) +
                  (p.mu * lap1[k] + p.mu_prime * div_x - px[k]) / r;
        u2_t[k] = -(s.u1[k] * u2x[k] + s.u2[k] * u2y[k]) +
                  (p.mu * lap2[k] + p.mu_prime * div_y - py[k]) / r;
    }
    return {rho_t, u1_t, u2_t};
}

double cfl_dt(const State2D& s, const FluidParams& p, const SolverConfig& cfg) {
    double umax = 0.0;
    for (std::size_t k = 0; k < s.rho.size(); ++k)
        umax = std::max(umax, std::hypot(s.u1[k], s.u2[k]));
    const double c = std::sqrt(p.a * p.gamma * std::pow(s.rho.max(), p.gamma - 1.0));
    const double h = std::min(s.grid_x().dx(), s.grid_y().dy());
    return cfg.cfl_safety * h / (umax + c);
}

Stepper2D::Stepper2D(FluidParams p, SolverConfig cfg) : p_(p), cfg_(cfg), dt_(cfg.dt) {
    p_.validate();
    cfg_.validate();
}

Stepper2D::Outcome Stepper2D::try_bdf(const State2D& in, State2D& out, double h, History& next) {
    const std::size_t n = in.rho.size();
    Workspace ws(in.grid_x().n, in.grid_y().n, in.grid_y().period());
    const auto& rho = in.rho.values();
    const auto& u1 = in.u1.values();
    const auto& u2 = in.u2.values();
    std::vector<double> m1(n), m2(n);
    for (std::size_t i = 0; i < n; ++i) {
        m1[i] = rho[i] * u1[i];
        m2[i] = rho[i] * u2[i];
    }
    Tend2 nt = explicit_part(ws, rho, u1, u2, p_, cfg_.dealias);

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
    auto combine = [&](const std::vector<double>& cur, const std::vector<double>& old,
                       const std::vector<double>& ncur, const std::vector<double>& nold,
                       double* dst) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = -a1 * cur[i] + h * b1 * ncur[i];
            if (two) v += -a2 * old[i] + h * b2 * nold[i];
            dst[i] = v;
        }
    };

    std::vector<double> rho1(n);
    combine(rho, hist_.rho, nt.rho, hist_.n_rho, rho1.data());
    for (double& v : rho1) v /= a0;
    if (!all_finite(rho1)) return Outcome::nonfinite;
    if (*std::min_element(rho1.begin(), rho1.end()) <= cfg_.positivity_floor) return Outcome::positivity;

    std::vector<double> coef(n), b(2 * n), u(2 * n);
    for (std::size_t i = 0; i < n; ++i) coef[i] = a0 * rho1[i] / h;
    combine(m1, hist_.m1, nt.m1, hist_.n_m1, b.data());
    combine(m2, hist_.m2, nt.m2, hist_.n_m2, b.data() + n);
    for (double& v : b) v /= h;
    std::copy(u1.begin(), u1.end(), u.begin());
    std::copy(u2.begin(), u2.end(), u.begin() + long(n));
    last_iters_ = viscous_solve_2d(ws, coef, p_, b, u, cfg_.pcg_tol, cfg_.pcg_max_iter);
    if (!all_finite(u)) return Outcome::nonfinite;

    const GridX gx = in.grid_x();
    const GridY gy = in.grid_y();
    out = State2D(Field2D(gx, gy, std::move(rho1), Role::density),
                  Field2D(gx, gy, std::vector<double>(u.begin(), u.begin() + long(n)), Role::velocity),
                  Field2D(gx, gy, std::vector<double>(u.begin() + long(n), u.end()), Role::velocity),
                  in.t + h);
    next.rho = rho;
    next.m1 = std::move(m1);
    next.m2 = std::move(m2);
    next.n_rho = std::move(nt.rho);
    next.n_m1 = std::move(nt.m1);
    next.n_m2 = std::move(nt.m2);
    next.dt = h;
    next.valid = true;
    return Outcome::ok;
}

Stepper2D::Outcome Stepper2D::try_rk4(const State2D& in, State2D& out, double h) const {
    const std::size_t n = in.rho.size();
    const GridX gx = in.grid_x();
    const GridY gy = in.grid_y();
    Workspace ws(gx.n, gy.n, gy.period());
    struct Cons {
        std::vector<double> r, m1, m2;
    };
    bool nonfinite = false;
    auto rhs = [&](const Cons& c, Cons& k) -> bool {
        if (!all_finite(c.r) || !all_finite(c.m1) || !all_finite(c.m2)) {
            nonfinite = true;
            return false;
        }
        std::vector<double> u1(n), u2(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(c.r[i] > 0.0)) return false;
            u1[i] = c.m1[i] / c.r[i];
            u2[i] = c.m2[i] / c.r[i];
        }
        Tend2 t = explicit_part(ws, c.r, u1, u2, p_, cfg_.dealias);
        // viscous part, explicit
        std::vector<double> vu(2 * n);
        std::vector<double> x(2 * n);
        std::copy(u1.begin(), u1.end(), x.begin());
        std::copy(u2.begin(), u2.end(), x.begin() + long(n));
        const Waves& wv = ws.wv;
        std::vector<cplx> a(wv.ncx * gy.n), b(wv.ncx * gy.n);
        spectral::forward_2d(x.data(), a.data(), gx.n, gy.n);
        spectral::forward_2d(x.data() + n, b.data(), gx.n, gy.n);
        for (std::size_t j = 0; j < gy.n; ++j)
            for (std::size_t m = 0; m < wv.ncx; ++m) {
                const std::size_t q = j * wv.ncx + m;
                double s11, s12, s22;
                symbol(wv, j, m, p_.mu, p_.mu_prime, s11, s12, s22);
                const cplx aa = a[q], bb = b[q];
                a[q] = -(s11 * aa + s12 * bb);
                b[q] = -(s12 * aa + s22 * bb);
            }
        spectral::backward_2d(a.data(), vu.data(), gx.n, gy.n);
        spectral::backward_2d(b.data(), vu.data() + n, gx.n, gy.n);
        for (std::size_t i = 0; i < n; ++i) {
            t.m1[i] += vu[i];
            t.m2[i] += vu[n + i];
        }
        k.r = std::move(t.rho);
        k.m1 = std::move(t.m1);
        k.m2 = std::move(t.m2);
        return true;
    };
    Cons u0{in.rho.values(), in.rho.values(), in.rho.values()};
    for (std::size_t i = 0; i < n; ++i) {
        u0.m1[i] = in.rho[i] * in.u1[i];
        u0.m2[i] = in.rho[i] * in.u2[i];
    }
    auto axpy = [&](const Cons& u, const Cons& k, double s) {
        Cons r = u;
        for (std::size_t i = 0; i < n; ++i) {
            r.r[i] += s * k.r[i];
            r.m1[i] += s * k.m1[i];
            r.m2[i] += s * k.m2[i];
        }
        return r;
    };
    Cons k1, k2, k3, k4;
    if (!rhs(u0, k1) || !rhs(axpy(u0, k1, 0.5 * h), k2) || !rhs(axpy(u0, k2, 0.5 * h), k3) ||
        !rhs(axpy(u0, k3, h), k4))
        return nonfinite ? Outcome::nonfinite : Outcome::positivity;
    Cons u1 = u0;
    for (std::size_t i = 0; i < n; ++i) {
        u1.r[i] += h / 6.0 * (k1.r[i] + 2 * k2.r[i] + 2 * k3.r[i] + k4.r[i]);
        u1.m1[i] += h / 6.0 * (k1.m1[i] + 2 * k2.m1[i] + 2 * k3.m1[i] + k4.m1[i]);
        u1.m2[i] += h / 6.0 * (k1.m2[i] + 2 * k2.m2[i] + 2 * k3.m2[i] + k4.m2[i]);
    }
    if (!all_finite(u1.r) || !all_finite(u1.m1) || !all_finite(u1.m2)) return Outcome::nonfinite;
    if (*std::min_element(u1.r.begin(), u1.r.end()) <= cfg_.positivity_floor) return Outcome::positivity;
    std::vector<double> v1(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        v1[i] = u1.m1[i] / u1.r[i];
        v2[i] = u1.m2[i] / u1.r[i];
    }
    out = State2D(Field2D(gx, gy, std::move(u1.r), Role::density), Field2D(gx, gy, std::move(v1), Role::velocity),
                  Field2D(gx, gy, std::move(v2), Role::velocity), in.t + h);
    return Outcome::ok;
}

double Stepper2D::step(State2D& s, double dt) {
    double h = dt;
    for (int attempt = 0; attempt <= cfg_.max_halvings; ++attempt) {
        State2D out;
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
        throw Blowup("2D solver: non-finite values at t=" + std::to_string(s.t), s.t, -1);
    throw PositivityLoss("2D solver: density fell below the positivity floor at t=" + std::to_string(s.t),
                         s.t, -1);
}

void Stepper2D::advance_to(State2D& s, double t_target) {
    while (s.t < t_target) {
        const double remaining = t_target - s.t;
        if (remaining <= 1e-12 * std::max(1.0, std::abs(t_target))) {
            s.t = t_target;
            break;
        }
        const double k = std::ceil(remaining / dt_ - 1e-9);
        const double h = remaining / k;
        const double taken = step(s, h);
        if (taken == h && k == 1.0) s.t = t_target;
    }
}

State2D step_full(const State2D& s, const FluidParams& p, const SolverConfig& cfg) {
    Stepper2D st(p, cfg);
    State2D out = s;
    st.step(out, cfg.dt);
    return out;
}

EpsResidual residual_eps_system(const State2D& f, const Tendency2D& ft, double eps,
                                const FluidParams& p) {
    const GridX gx = f.grid_x();
    const GridY gy = f.grid_y();
    const std::size_t n = f.rho.size();
    const Field2D m1 = f.rho * f.u1, m2 = f.rho * f.u2;
    const Field2D divm = ddx(m1) + eps * ddy(m2);
    Field2D pr(gx, gy);
    for (std::size_t k = 0; k < n; ++k) pr[k] = pressure(p, f.rho[k]);
    const auto [px, py] = grad_eps(pr, eps);
    const auto [u1x, u1y] = grad_eps(f.u1, eps);
    const auto [u2x, u2y] = grad_eps(f.u2, eps);
    const Field2D lap1 = laplace_eps(f.u1, eps), lap2 = laplace_eps(f.u2, eps);
    Field2D mixed1(gx, gy), mixed2(gx, gy);
    spectral::deriv_2d(f.u2.data(), mixed1.data(), gx.n, gy.n, 1.0, gy.period(), 1, 1);
    spectral::deriv_2d(f.u1.data(), mixed2.data(), gx.n, gy.n, 1.0, gy.period(), 1, 1);
    const Field2D u1xx = ddx(f.u1, 2), u2yy = ddy(f.u2, 2);

    EpsResidual r{Field2D(gx, gy), Field2D(gx, gy), Field2D(gx, gy)};
    for (std::size_t k = 0; k < n; ++k) {
        const double rho = f.rho[k];
        r.r_mass[k] = ft.rho_t[k] + divm[k];
        // grad_eps div_eps u, first component d_x(u1_x + eps u2_y)
        const double gd1 = u1xx[k] + eps * mixed1[k];
        const double gd2 = eps * (mixed2[k] + eps * u2yy[k]);
        r.r_mom1[k] = rho * (ft.u1_t[k] + f.u1[k] * u1x[k] + f.u2[k] * u1y[k]) - p.mu * lap1[k] -
                      p.mu_prime * gd1 + px[k];
        r.r_mom2[k] = rho * (ft.u2_t[k] + f.u1[k] * u2x[k] + f.u2[k] * u2y[k]) - p.mu * lap2[k] -
                      p.mu_prime * gd2 + py[k];
    }
    r.mass_l2 = norm_l2(r.r_mass);
    r.mom_l2 = std::hypot(norm_l2(r.r_mom1), norm_l2(r.r_mom2));
    return r;
}

State2D slab_as_state(const SlabState& slab) {
    return State2D(slab.field(SlabState::Which::eta), slab.field(SlabState::Which::w),
                   slab.field(SlabState::Which::frakw), slab.t);
}

Tendency2D slab_tendency(const SlabState& slab, const FluidParams& p) {
    Tendency2D t{Field2D(slab.gx, slab.gy), Field2D(slab.gx, slab.gy), Field2D(slab.gx, slab.gy)};
    for (std::size_t j = 0; j < slab.gy.n; ++j) {
        const LimitTendency lt = limit_tendency(slab.slices[j], p);
        t.rho_t.set_row(j, lt.eta_t);
        t.u1_t.set_row(j, lt.w_t);
        t.u2_t.set_row(j, lt.frakw_t);
    }
    return t;
}

double energy_2d(const State2D& s, const FluidParams& p) {
    const double P1 = pressure_potential(p, 1.0), dP1 = pressure_potential_d1(p, 1.0);
    Field2D e(s.grid_x(), s.grid_y());
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double r = s.rho[k];
        e[k] = 0.5 * r * (s.u1[k] * s.u1[k] + s.u2[k] * s.u2[k]) + pressure_potential(p, r) - P1 -
               dP1 * (r - 1.0);
    }
    return integrate_xy(e);
}

double dissipation_2d(const State2D& s, const FluidParams& p) {
    const Field2D a = ddx(s.u1), b = ddy(s.u1), c = ddx(s.u2), d = ddy(s.u2);
    Field2D e(s.grid_x(), s.grid_y());
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double div = a[k] + d[k];
        e[k] = p.mu * (a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k]) + p.mu_prime * div * div;
    }
    return integrate_xy(e);
}

}  // namespace slowns

#include "slowns/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "slowns/errors.hpp"
#include "slowns/spectral.hpp"

namespace slowns {

namespace {

Field2D dxy(const Field2D& f) {
    Field2D out(f.grid_x(), f.grid_y());
    spectral::deriv_2d(f.data(), out.data(), f.nx(), f.ny(), 1.0, f.grid_y().period(), 1, 1);
    return out;
}

double sq_int(const Field2D& f) {
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * f[k];
    return s * f.grid_x().dx() * f.grid_y().dy();
}

double cell(const Field2D& f) { return f.grid_x().dx() * f.grid_y().dy(); }

void need_same(const Field2D& a, const Field2D& b, const char* who) {
    if (!a.same_grid(b)) throw MismatchError(std::string(who) + ": grid mismatch");
}

}  // namespace

ApproxSolution build_approx(const SlabState& slab, double eps, const GridY& gy2, const FluidParams& p) {
    const State2D s = slab_as_state(slab);
    const Tendency2D t = slab_tendency(slab, p);
    ApproxSolution a;
    a.eps = eps;
    a.t = slab.t;
    a.rho_a = embed_slab_field(s.rho, eps, gy2, 1.0);
    a.rho_a.set_role(Role::density);
    a.u_a1 = embed_slab_field(s.u1, eps, gy2, 0.0);
    a.u_a2 = embed_slab_field(s.u2, eps, gy2, 0.0);
    a.u_a1.set_role(Role::velocity);
    a.u_a2.set_role(Role::velocity);
    a.dt_rho_a = embed_slab_field(t.rho_t, eps, gy2, 0.0);
    a.dt_u_a1 = embed_slab_field(t.u1_t, eps, gy2, 0.0);
    a.dt_u_a2 = embed_slab_field(t.u2_t, eps, gy2, 0.0);
    return a;
}

Forcing forcing_G(const SlabState& slab, double eps, const FluidParams& p, const GridY& gy2) {
    const Field2D eta = slab.field(SlabState::Which::eta);
    const Field2D w = slab.field(SlabState::Which::w);
    const Field2D fw = slab.field(SlabState::Which::frakw);
    Field2D pr(slab.gx, slab.gy);
    for (std::size_t k = 0; k < pr.size(); ++k) pr[k] = pressure(p, eta[k]);
    const Field2D w_y = ddy(w), w_yy = ddy(w, 2), f_y = ddy(fw), f_yy = ddy(fw, 2);
    const Field2D w_xy = dxy(w), f_xy = dxy(fw), p_y = ddy(pr);
    const Field2D ef_y = ddy(eta * fw);
    Field2D g1(slab.gx, slab.gy), g2(slab.gx, slab.gy), ms(slab.gx, slab.gy);
    const double e2 = eps * eps;
    for (std::size_t k = 0; k < g1.size(); ++k) {
        const double ef = eta[k] * fw[k];
        g1[k] = -eps * ef * w_y[k] + p.mu * e2 * w_yy[k] + p.mu_prime * eps * f_xy[k];
        g2[k] = -eps * ef * f_y[k] + p.nu() * e2 * f_yy[k] + p.mu_prime * eps * w_xy[k] - eps * p_y[k];
        ms[k] = eps * ef_y[k];
    }
    return {embed_slab_field(g1, eps, gy2), embed_slab_field(g2, eps, gy2),
            embed_slab_field(ms, eps, gy2), slab.t};
}

RemainderFields remainder(const State2D& full, const ApproxSolution& a, const FluidParams& p) {
    need_same(full.rho, a.rho_a, "remainder");
    if (std::abs(full.t - a.t) > 1e-9 * std::max(1.0, std::abs(full.t)))
        throw MismatchError("remainder: full and approximate states are at different times");
    const GridX gx = full.grid_x();
    const GridY gy = full.grid_y();
    RemainderFields r;
    r.t = full.t;
    r.varrho = full.rho - a.rho_a;
    r.R1 = full.u1 - a.u_a1;
    r.R2 = full.u2 - a.u_a2;
    const Field2D R1x = ddx(r.R1), R1y = ddy(r.R1), R2x = ddx(r.R2), R2y = ddy(r.R2);
    r.omega = R1y - R2x;
    const Tendency2D ft = full_tendency(full, p);
    r.DtR1 = Field2D(gx, gy);
    r.DtR2 = Field2D(gx, gy);
    r.flux = Field2D(gx, gy);
    for (std::size_t k = 0; k < r.R1.size(); ++k) {
        const double u1 = full.u1[k], u2 = full.u2[k];
        r.DtR1[k] = (ft.u1_t[k] - a.dt_u_a1[k]) + u1 * R1x[k] + u2 * R1y[k];
        r.DtR2[k] = (ft.u2_t[k] - a.dt_u_a2[k]) + u1 * R2x[k] + u2 * R2y[k];
        r.flux[k] = p.nu() * (R1x[k] + R2y[k]) - (pressure(p, full.rho[k]) - pressure(p, a.rho_a[k]));
    }
    return r;
}

RemainderScalars remainder_scalars(const RemainderFields& r) {
    RemainderScalars s;
    s.t = r.t;
    s.R2 = sq_int(r.R1) + sq_int(r.R2);
    s.varrho2 = sq_int(r.varrho);
    s.varrho_inf = r.varrho.max_abs();
    s.DtR2 = sq_int(r.DtR1) + sq_int(r.DtR2);
    const Field2D a = ddx(r.R1), b = ddy(r.R1), c = ddx(r.R2), d = ddy(r.R2);
    const double h = cell(r.R1);
    double g2 = 0, g3 = 0, g4 = 0, g6 = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double q = a[k] * a[k] + b[k] * b[k] + c[k] * c[k] + d[k] * d[k];
        const double m = std::sqrt(q);
        g2 += q;
        g3 += q * m;
        g4 += q * q;
        g6 += q * q * q;
    }
    s.gradR2 = g2 * h;
    s.gradR_l3_3 = g3 * h;
    s.gradR_l4_4 = g4 * h;
    s.gradR_l6_6 = g6 * h;
    s.gradomega2 = sq_int(ddx(r.omega)) + sq_int(ddy(r.omega));
    s.gradDtR2 = sq_int(ddx(r.DtR1)) + sq_int(ddy(r.DtR1)) + sq_int(ddx(r.DtR2)) + sq_int(ddy(r.DtR2));
    return s;
}

void BudgetAccumulator::add(const RemainderScalars& s) {
    if (!s_.empty() && !(s.t > s_.back().t)) throw PreconditionError("BudgetAccumulator: samples must be in time order");
    s_.push_back(s);
    const double denom = std::sqrt(s.gradR2) * std::pow(s.gradR_l6_6, 0.5);
    holder_.push_back(denom > 0.0 ? s.gradR_l4_4 / denom : 0.0);
}

void BudgetAccumulator::add(const RemainderFields& r, const Forcing* g) {
    add(remainder_scalars(r));
    if (g) add_forcing(*g);
}

void BudgetAccumulator::add_forcing(const Forcing& g) {
    const double l2 = std::sqrt(sq_int(g.G1) + sq_int(g.G2));
    double linf = 0.0;
    for (std::size_t k = 0; k < g.G1.size(); ++k) linf = std::max(linf, std::hypot(g.G1[k], g.G2[k]));
    g_.l2 = std::max(g_.l2, l2);
    g_.linf = std::max(g_.linf, linf);
    if (have_prev_g_ && g.t > prev_g_.t) {
        const double dt = g.t - prev_g_.t;
        double s = 0.0;
        for (std::size_t k = 0; k < g.G1.size(); ++k) {
            const double a = (g.G1[k] - prev_g_.G1[k]) / dt, b = (g.G2[k] - prev_g_.G2[k]) / dt;
            s += a * a + b * b;
        }
        g_.dt_l2 = std::max(g_.dt_l2, std::sqrt(s * cell(g.G1)));
    }
    prev_g_ = g;
    have_prev_g_ = true;
}

ErrorBudget BudgetAccumulator::budget() const {
    if (s_.empty()) throw PreconditionError("energy_budget: empty history");
    ErrorBudget b;
    b.samples = s_.size();
    double sup_R = 0, sup_vr = 0, sup_gR = 0, sup_Dt = 0, sup_go = 0, sup_tot = 0, theta = 0;
    for (const auto& s : s_) {
        sup_R = std::max(sup_R, s.R2);
        sup_vr = std::max(sup_vr, s.varrho2);
        sup_gR = std::max(sup_gR, s.gradR2);
        sup_Dt = std::max(sup_Dt, s.DtR2);
        sup_go = std::max(sup_go, s.gradomega2);
        sup_tot = std::max(sup_tot, s.R2 + s.varrho2 + s.gradR2 + s.DtR2 + s.gradomega2);
        theta = std::max(theta, s.varrho_inf);
    }
    double i_gR = 0, i_Dt = 0, i_go = 0, i_gDt = 0;
    for (std::size_t k = 1; k < s_.size(); ++k) {
        const double h = 0.5 * (s_[k].t - s_[k - 1].t);
        i_gR += h * (s_[k].gradR2 + s_[k - 1].gradR2);
        i_Dt += h * (s_[k].DtR2 + s_[k - 1].DtR2);
        i_go += h * (s_[k].gradomega2 + s_[k - 1].gradomega2);
        i_gDt += h * (s_[k].gradDtR2 + s_[k - 1].gradDtR2);
    }
    const double int_tot = i_gR + i_Dt + i_go + i_gDt;
    b.breakdown = {{"sup_R2", sup_R},       {"sup_varrho2", sup_vr},   {"sup_gradR2", sup_gR},
                   {"sup_DtR2", sup_Dt},    {"sup_gradomega2", sup_go}, {"sup_total", sup_tot},
                   {"int_gradR2", i_gR},    {"int_DtR2", i_Dt},        {"int_gradomega2", i_go},
                   {"int_gradDtR2", i_gDt}, {"int_total", int_tot}};
    b.E_eps = sup_tot + int_tot;
    b.theta_eps = theta;
    b.band_exit = theta > band_;
    b.g_norms = g_;
    return b;
}

GradientIntegrals BudgetAccumulator::gradients() const {
    GradientIntegrals g;
    for (std::size_t k = 1; k < s_.size(); ++k) {
        const double h = 0.5 * (s_[k].t - s_[k - 1].t);
        g.I3 += h * (s_[k].gradR_l3_3 + s_[k - 1].gradR_l3_3);
        g.I4 += h * (s_[k].gradR_l4_4 + s_[k - 1].gradR_l4_4);
        g.I6 += h * (s_[k].gradR_l6_6 + s_[k - 1].gradR_l6_6);
    }
    for (double v : holder_) g.holder_ratio = std::max(g.holder_ratio, v);
    return g;
}

ErrorBudget energy_budget(const std::vector<RemainderFields>& history, double band) {
    BudgetAccumulator acc(band);
    for (const auto& r : history) acc.add(r);
    return acc.budget();
}

GradientIntegrals gradient_integrals(const std::vector<RemainderFields>& history) {
    BudgetAccumulator acc;
    for (const auto& r : history) acc.add(r);
    return acc.gradients();
}

double relative_entropy(const State2D& s, const Field2D& rr, const Field2D& r1, const Field2D& r2,
                        const FluidParams& p) {
    need_same(s.rho, rr, "relative_entropy");
    need_same(s.rho, r1, "relative_entropy");
    need_same(s.rho, r2, "relative_entropy");
    double acc = 0.0;
    for (std::size_t k = 0; k < rr.size(); ++k) {
        const double a = s.u1[k] - r1[k], b = s.u2[k] - r2[k];
        acc += 0.5 * s.rho[k] * (a * a + b * b) + relative_potential(p, s.rho[k], rr[k]);
    }
    return acc * cell(rr);
}

EntropyTerms entropy_terms(const State2D& s, const ReferenceFlow& ref, const FluidParams& p) {
    need_same(s.rho, ref.rho, "entropy_terms");
    EntropyTerms e;
    e.t = s.t;
    e.E1 = relative_entropy(s, ref.rho, ref.u1, ref.u2, p);
    const Field2D d1 = s.u1 - ref.u1, d2 = s.u2 - ref.u2;
    const Field2D d1x = ddx(d1), d1y = ddy(d1), d2x = ddx(d2), d2y = ddy(d2);
    const Field2D v1x = ddx(ref.u1), v1y = ddy(ref.u1), v2x = ddx(ref.u2), v2y = ddy(ref.u2);
    const Field2D rx = ddx(ref.rho), ry = ddy(ref.rho);
    double D = 0.0, R = 0.0;
    for (std::size_t k = 0; k < d1.size(); ++k) {
        const double divd = d1x[k] + d2y[k];
        D += p.mu * (d1x[k] * d1x[k] + d1y[k] * d1y[k] + d2x[k] * d2x[k] + d2y[k] * d2y[k]) +
             p.mu_prime * divd * divd;
        const double rho = s.rho[k], u1 = s.u1[k], u2 = s.u2[k];
        const double rt = ref.rho[k];
        // material derivative of the reference velocity along the true flow
        const double Dv1 = ref.u1_t[k] + u1 * v1x[k] + u2 * v1y[k];
        const double Dv2 = ref.u2_t[k] + u1 * v2x[k] + u2 * v2y[k];
        const double e1 = -d1[k], e2 = -d2[k];  // u_ref - u
        const double divv = v1x[k] + v2y[k];
        const double dive = -divd;
        const double P2 = pressure_potential_d2(p, rt);
        double r = rho * (Dv1 * e1 + Dv2 * e2);
        r += p.mu * (v1x[k] * (-d1x[k]) + v1y[k] * (-d1y[k]) + v2x[k] * (-d2x[k]) + v2y[k] * (-d2y[k])) +
             p.mu_prime * divv * dive;
        r += (rt - rho) * P2 * ref.rho_t[k];
        r += ((rt * ref.u1[k] - rho * u1) * rx[k] + (rt * ref.u2[k] - rho * u2) * ry[k]) * P2;
        r -= divv * (pressure(p, rho) - pressure(p, rt));
        R += r;
    }
    e.D = D * cell(d1);
    e.Rcal = R * cell(d1);
    return e;
}

void EntropyIdentityTracker::add(const EntropyTerms& e) {
    if (n_ == 0) {
        first_ = prev_ = e;
        n_ = 1;
        return;
    }
    if (!(e.t > prev_.t)) throw PreconditionError("EntropyIdentityTracker: samples must be in time order");
    const double h = e.t - prev_.t;
    int_d_ += 0.5 * h * (e.D + prev_.D);
    int_r_ += 0.5 * h * (e.Rcal + prev_.Rcal);
    last_res_ = std::abs(e.E1 - first_.E1 + int_d_ - int_r_);
    max_res_ = std::max(max_res_, last_res_);
    prev_ = e;
    ++n_;
}

double entropy_identity_residual(const std::vector<State2D>& states,
                                 const std::vector<ReferenceFlow>& refs, const FluidParams& p) {
    if (states.size() != refs.size()) throw MismatchError("entropy_identity_residual: history lengths differ");
    EntropyIdentityTracker tr;
    for (std::size_t k = 0; k < states.size(); ++k) tr.add(entropy_terms(states[k], refs[k], p));
    return tr.residual();
}

PerturbationResidual perturbation_residual(const State2D& full, const Tendency2D& ft,
                                           const ApproxSolution& a, const RemainderFields& rem,
                                           const Forcing& g, const FluidParams& p) {
    need_same(full.rho, a.rho_a, "perturbation_residual");
    need_same(full.rho, rem.R1, "perturbation_residual");
    need_same(full.rho, g.G1, "perturbation_residual");
    const GridX gx = full.grid_x();
    const GridY gy = full.grid_y();
    const std::size_t n = full.rho.size();

    // continuity line
    const Field2D f1 = full.rho * rem.R1 + rem.varrho * a.u_a1;
    const Field2D f2 = full.rho * rem.R2 + rem.varrho * a.u_a2;
    const Field2D divf = ddx(f1) + ddy(f2);

    // momentum line
    const Field2D R1xx = ddx(rem.R1, 2), R1yy = ddy(rem.R1, 2), R2xx = ddx(rem.R2, 2), R2yy = ddy(rem.R2, 2);
    const Field2D R2xy = dxy(rem.R2), R1xy = dxy(rem.R1);
    Field2D dp(gx, gy);
    for (std::size_t k = 0; k < n; ++k) dp[k] = pressure(p, full.rho[k]) - pressure(p, a.rho_a[k]);
    const Field2D dpx = ddx(dp), dpy = ddy(dp);
    const Field2D a1x = ddx(a.u_a1), a1y = ddy(a.u_a1), a2x = ddx(a.u_a2), a2y = ddy(a.u_a2);

    PerturbationResidual r{Field2D(gx, gy), Field2D(gx, gy), Field2D(gx, gy)};
    for (std::size_t k = 0; k < n; ++k) {
        const double vr_t = ft.rho_t[k] - a.dt_rho_a[k];
        r.r_cont[k] = vr_t + divf[k] + g.mass_source[k];
        const double rho = full.rho[k];
        const double R1 = rem.R1[k], R2 = rem.R2[k];
        const double acc1 = a.dt_u_a1[k] + a.u_a1[k] * a1x[k] + a.u_a2[k] * a1y[k];
        const double acc2 = a.dt_u_a2[k] + a.u_a1[k] * a2x[k] + a.u_a2[k] * a2y[k];
        r.r_mom1[k] = rho * rem.DtR1[k] - p.mu * (R1xx[k] + R1yy[k]) - p.mu_prime * (R1xx[k] + R2xy[k]) +
                      dpx[k] + rho * (R1 * a1x[k] + R2 * a1y[k]) + rem.varrho[k] * acc1 - g.G1[k];
        r.r_mom2[k] = rho * rem.DtR2[k] - p.mu * (R2xx[k] + R2yy[k]) - p.mu_prime * (R1xy[k] + R2yy[k]) +
                      dpy[k] + rho * (R1 * a2x[k] + R2 * a2y[k]) + rem.varrho[k] * acc2 - g.G2[k];
    }
    r.cont_l2 = norm_l2(r.r_cont);
    r.mom_l2 = std::hypot(norm_l2(r.r_mom1), norm_l2(r.r_mom2));
    return r;
}

}  // namespace slowns

#include <cmath>
#include <numbers>

#include "slowns/errors.hpp"
#include "slowns/solver2d.hpp"

namespace slowns {

EpsScaling::EpsScaling(double e) : eps(e) {
    if (!(e > 0.0 && e <= 1.0)) throw DomainError("eps must lie in (0, 1]");
}

GridY default_grid_y_2d(const GridY& slab_gy, double eps, std::size_t cap) {
    EpsScaling check(eps);
    (void)check;
    std::size_t n = std::size_t(std::ceil(double(slab_gy.n) / eps - 1e-9));
    if (n % 2) ++n;
    n = std::min(n, cap);
    n = std::max<std::size_t>(n, 16);
    if (n % 2) --n;
    return GridY(n, slab_gy.half_length / eps);
}

namespace {

// Periodic interpolation weights for an even number of nodes: the Nyquist
// mode enters as a cosine, giving S(t) = sin(n t/2) / (n tan(t/2)).
void trig_weights(double s, const GridY& g, std::vector<double>& w) {
    const std::size_t n = g.n;
    w.assign(n, 0.0);
    const double P = g.period();
    for (std::size_t j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * (s - g.node(j)) / P;
        const double half = 0.5 * th;
        const double sh = std::sin(half);
        if (std::abs(sh) < 1e-13) {
            w[j] = 1.0;  // node or its periodic image
            continue;
        }
        w[j] = std::sin(0.5 * double(n) * th) * std::cos(half) / (double(n) * sh);
    }
}

}  // namespace

Field2D embed_slab_field(const Field2D& slab, double eps, const GridY& gy2, double outside) {
    EpsScaling check(eps);
    (void)check;
    const GridY& g1 = slab.grid_y();
    const double L1 = g1.half_length;
    if (eps * gy2.half_length < L1 * (1.0 - 1e-12))
        throw BoxTooSmall("embedding does not fit: eps * L2 = " + std::to_string(eps * gy2.half_length) +
                          " < slab half-length " + std::to_string(L1));
    const std::size_t nx = slab.nx();
    Field2D out(slab.grid_x(), gy2, slab.role());
    std::vector<double> w;
    const double tol = 1e-12 * L1;
    for (std::size_t j = 0; j < gy2.n; ++j) {
        const double s = eps * gy2.node(j);
        double* r = out.row(j);
        if (s < -L1 - tol || s >= L1 - tol) {
            // s == L1 is the periodic image of -L1 and stays inside
            if (std::abs(s - L1) > tol) {
                for (std::size_t i = 0; i < nx; ++i) r[i] = outside;
                continue;
            }
        }
        trig_weights(s, g1, w);
        for (std::size_t i = 0; i < nx; ++i) r[i] = 0.0;
        for (std::size_t q = 0; q < g1.n; ++q) {
            if (w[q] == 0.0) continue;
            const double* src = slab.row(q);
            for (std::size_t i = 0; i < nx; ++i) r[i] += w[q] * src[i];
        }
    }
    return out;
}

State2D slow_embed(const InitialDataSpec& spec, EpsScaling eps, const GridX& gx, const GridY& gy2,
                   const GridY& slab_gy) {
    Field2D r(gx, slab_gy, Role::density), a(gx, slab_gy, Role::velocity),
        b(gx, slab_gy, Role::velocity);
    for (std::size_t j = 0; j < slab_gy.n; ++j) {
        const double y = slab_gy.node(j);
        for (std::size_t i = 0; i < gx.n; ++i) {
            const double x = gx.node(i);
            r(i, j) = spec.varsigma0(x, y);
            a(i, j) = spec.w0(x, y);
            b(i, j) = spec.frakw0(x, y);
        }
    }
    State2D s(embed_slab_field(r, eps.eps, gy2, 1.0), embed_slab_field(a, eps.eps, gy2, 0.0),
              embed_slab_field(b, eps.eps, gy2, 0.0), 0.0);
    s.check();
    return s;
}

std::pair<Field2D, Field2D> grad_eps(const Field2D& f, double eps) {
    Field2D fy = ddy(f);
    for (std::size_t k = 0; k < fy.size(); ++k) fy[k] *= eps;
    return {ddx(f), std::move(fy)};
}

Field2D laplace_eps(const Field2D& f, double eps) {
    Field2D out = ddx(f, 2);
    const Field2D fyy = ddy(f, 2);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += eps * eps * fyy[k];
    return out;
}

}  // namespace slowns

#include "slowns/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "slowns/errors.hpp"
#include "slowns/spectral.hpp"

namespace slowns {

void FluidParams::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("params.a", "must be positive");
    if (!(gamma >= 1.0 && gamma <= 2.0)) throw ConfigError("params.gamma", "must lie in [1, 2]");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("params.mu", "must be positive");
    if (!(mu + mu_prime > 0.0) || !std::isfinite(mu_prime))
        throw ConfigError("params.mu_prime", "mu + mu_prime must be positive");
}

bool FluidParams::unit_sound_speed() const { return std::abs(a * gamma - 1.0) < 1e-12; }

namespace {
void need_positive(double rho, const char* who) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw DomainError(std::string(who) + ": density must be positive and finite");
}
}  // namespace

double pressure(const FluidParams& p, double rho) {
    need_positive(rho, "pressure");
    return p.a * std::pow(rho, p.gamma);
}

double pressure_potential(const FluidParams& p, double rho) {
    need_positive(rho, "pressure_potential");
    if (p.gamma == 1.0) return p.a * (rho * std::log(rho) + 1.0);
    return p.a * std::pow(rho, p.gamma) / (p.gamma - 1.0);
}

double pressure_potential_d1(const FluidParams& p, double rho) {
    need_positive(rho, "pressure_potential_d1");
    if (p.gamma == 1.0) return p.a * (std::log(rho) + 1.0);
    return p.a * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

double pressure_potential_d2(const FluidParams& p, double rho) {
    need_positive(rho, "pressure_potential_d2");
    return p.a * p.gamma * std::pow(rho, p.gamma - 2.0);
}

double relative_potential(const FluidParams& p, double rho, double rho_ref) {
    const double v = pressure_potential(p, rho) - pressure_potential(p, rho_ref) -
                     pressure_potential_d1(p, rho_ref) * (rho - rho_ref);
    return std::max(v, 0.0);
}

DataFamily parse_family(const std::string& s) {
    if (s == "gaussian_bump") return DataFamily::gaussian_bump;
    if (s == "fourier_modes") return DataFamily::fourier_modes;
    if (s == "custom_table") return DataFamily::custom_table;
    throw ConfigError("data.family", "unknown family '" + s + "'");
}

const char* family_name(DataFamily f) {
    switch (f) {
        case DataFamily::gaussian_bump: return "gaussian_bump";
        case DataFamily::fourier_modes: return "fourier_modes";
        case DataFamily::custom_table: return "custom_table";
    }
    return "?";
}

// ---- initial data ----------------------------------------------------------
//
// Every family has the form
//   varsigma0 = 1 + A g(y) d(x)
//   w0        = A g(y) (qw(x) - <qw>) - A^2 g(y)^2 <d qw>
//   frakw0    = A g(y) (qf(x) - <qf>) - A^2 g(y)^2 <d qf>
// with <d> = 0, which gives unit mass and zero momentum at every y.

namespace {

constexpr double kBumpKappa = 2.0;
constexpr std::size_t kQuad = 4096;

using Profile = std::function<double(double)>;

struct Shape {
    Profile d, qw, qf;
    double mean_qw = 0, mean_qf = 0, mean_dqw = 0, mean_dqf = 0;
    double dmin = 0, dmax = 0;
};

double quad_mean(const Profile& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < kQuad; ++i) s += f(double(i) / kQuad);
    return s / kQuad;
}

// Sample, then polish the best sample by golden-section search.
double extremum(const Profile& f, bool want_min) {
    const double sgn = want_min ? 1.0 : -1.0;
    std::size_t best = 0;
    double bv = sgn * f(0.0);
    for (std::size_t i = 1; i < kQuad; ++i) {
        const double v = sgn * f(double(i) / kQuad);
        if (v < bv) bv = v, best = i;
    }
    double lo = (double(best) - 1.0) / kQuad, hi = (double(best) + 1.0) / kQuad;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 60; ++it) {
        const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
        if (sgn * f(m1) < sgn * f(m2)) hi = m2; else lo = m1;
    }
    return std::min(bv, sgn * f(0.5 * (lo + hi))) * sgn;
}

// Trigonometric interpolant of a uniformly sampled periodic table.
Profile trig_interp(std::vector<double> table) {
    const std::size_t n = table.size();
    if (n < 4 || n % 2 != 0) throw ConfigError("data.table", "custom table needs an even length >= 4");
    auto coef = std::make_shared<std::vector<spectral::cplx>>(n / 2 + 1);
    std::vector<spectral::cplx> c(n / 2 + 1);
    // plain DFT, tables are short
    for (std::size_t m = 0; m <= n / 2; ++m) {
        spectral::cplx s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double th = -2.0 * std::numbers::pi * double(m * i) / double(n);
            s += table[i] * spectral::cplx(std::cos(th), std::sin(th));
        }
        (*coef)[m] = s / double(n);
    }
    return [coef, n](double x) {
        double v = coef->at(0).real();
        for (std::size_t m = 1; m <= n / 2; ++m) {
            const double th = 2.0 * std::numbers::pi * double(m) * x;
            const spectral::cplx e(std::cos(th), std::sin(th));
            const double term = ((*coef)[m] * e).real();
            v += (m == n / 2) ? term : 2.0 * term;
        }
        return v;
    };
}

Shape make_shape(DataFamily family, const CustomProfiles* table) {
    Shape s;
    const double two_pi = 2.0 * std::numbers::pi;
    switch (family) {
        case DataFamily::gaussian_bump: {
            const double mean_psi = std::exp(-kBumpKappa) * std::cyl_bessel_i(0.0, kBumpKappa);
            s.d = [mean_psi, two_pi](double x) {
                return std::exp(kBumpKappa * (std::cos(two_pi * x) - 1.0)) - mean_psi;
            };
            s.qw = [two_pi](double x) { return std::sin(two_pi * x) + 0.4 * std::cos(two_pi * x); };
            s.qf = [two_pi](double x) { return std::cos(two_pi * x) + 0.5 * std::sin(2 * two_pi * x); };
            break;
        }
        case DataFamily::fourier_modes: {
            s.d = [two_pi](double x) {
                return 0.6 * std::cos(two_pi * x) + 0.3 * std::sin(2 * two_pi * x);
            };
            s.qw = [two_pi](double x) {
                return std::sin(two_pi * x) + 0.5 * std::cos(3 * two_pi * x);
            };
            s.qf = [two_pi](double x) {
                return 0.8 * std::cos(two_pi * x) + 0.4 * std::sin(2 * two_pi * x);
            };
            break;
        }
        case DataFamily::custom_table: {
            if (!table) throw ConfigError("data.table", "custom_table family needs profile tables");
            auto d = trig_interp(table->density);
            const double md = quad_mean(d);
            s.d = [d, md](double x) { return d(x) - md; };
            s.qw = trig_interp(table->w);
            s.qf = trig_interp(table->frakw);
            break;
        }
    }
    s.mean_qw = quad_mean(s.qw);
    s.mean_qf = quad_mean(s.qf);
    const Profile d = s.d, qw = s.qw, qf = s.qf;
    s.mean_dqw = quad_mean([&](double x) { return d(x) * qw(x); });
    s.mean_dqf = quad_mean([&](double x) { return d(x) * qf(x); });
    s.dmin = extremum(s.d, true);
    s.dmax = extremum(s.d, false);
    return s;
}

double envelope_of(double y, double width) {
    if (std::isinf(width)) return 1.0;
    const double z = y / width;
    return std::exp(-z * z);
}

// d^j/dy^j of g and g^2 for the Gaussian envelope, j <= 2.
void envelope_derivs(double y, double width, double g[3], double g2[3]) {
    if (std::isinf(width)) {
        g[0] = 1, g[1] = 0, g[2] = 0;
        g2[0] = 1, g2[1] = 0, g2[2] = 0;
        return;
    }
    const double w2 = width * width;
    const double e = envelope_of(y, width);
    g[0] = e;
    g[1] = -2.0 * y / w2 * e;
    g[2] = (4.0 * y * y / (w2 * w2) - 2.0 / w2) * e;
    g2[0] = e * e;
    g2[1] = 2.0 * g[0] * g[1];
    g2[2] = 2.0 * g[1] * g[1] + 2.0 * g[0] * g[2];
}

}  // namespace

double InitialDataSpec::envelope(double y) const { return envelope_of(y, y_width); }

namespace {
Field1D sample(const std::function<double(double, double)>& f, const GridX& g, double y, Role r) {
    Field1D out(g, r);
    for (std::size_t i = 0; i < g.n; ++i) out[i] = f(g.node(i), y);
    return out;
}
}  // namespace

Field1D InitialDataSpec::sample_density(const GridX& g, double y) const {
    return sample(varsigma0, g, y, Role::density);
}
Field1D InitialDataSpec::sample_w(const GridX& g, double y) const {
    return sample(w0, g, y, Role::velocity);
}
Field1D InitialDataSpec::sample_frakw(const GridX& g, double y) const {
    return sample(frakw0, g, y, Role::velocity);
}

InitialDataSpec make_initial_data(DataFamily family, double amplitude, double y_width,
                                  const CustomProfiles* table) {
    if (!std::isfinite(amplitude)) throw ConfigError("data.amplitude", "must be finite");
    if (!(y_width > 0.0)) throw ConfigError("data.y_width", "must be positive (inf for y-independent data)");

    auto sh = std::make_shared<const Shape>(make_shape(family, table));
    const double A = amplitude, W = y_width;

    InitialDataSpec spec;
    spec.family = family;
    spec.amplitude = A;
    spec.y_width = W;
    spec.lower_bound = 1.0 + std::min({0.0, A * sh->dmin, A * sh->dmax});
    spec.upper_bound = 1.0 + std::max({0.0, A * sh->dmin, A * sh->dmax});
    if (!(spec.lower_bound > 0.0))
        throw ConfigError("data.amplitude", "amplitude makes the initial density non-positive");

    spec.varsigma0 = [sh, A, W](double x, double y) {
        return 1.0 + A * envelope_of(y, W) * sh->d(x);
    };
    spec.w0 = [sh, A, W](double x, double y) {
        const double g = envelope_of(y, W);
        return A * g * (sh->qw(x) - sh->mean_qw) - A * A * g * g * sh->mean_dqw;
    };
    spec.frakw0 = [sh, A, W](double x, double y) {
        const double g = envelope_of(y, W);
        return A * g * (sh->qf(x) - sh->mean_qf) - A * A * g * g * sh->mean_dqf;
    };
    return spec;
}

double InitialDataSpec::a_k(int k, double y, const GridX& g) const {
    if (k < 0 || k > 5) throw DomainError("a_k: k must lie in 0..5");
    // The envelope peaks at g(0) = 1, so the y = 0 samples give the x-profiles
    // A d, A(q - <q>) - A^2 <dq>; y-derivatives then act on g and g^2 only.
    double gj[3], g2j[3];
    envelope_derivs(y, y_width, gj, g2j);
    Field1D dev(g), wq(g), fq(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.node(i);
        dev[i] = varsigma0(x, 0.0) - 1.0;  // A d(x)
        wq[i] = w0(x, 0.0);
        fq[i] = frakw0(x, 0.0);
    }
    // The x-mean of the y = 0 sample is the -A^2 <dq> part.
    const double cw = integrate_x(wq), cf = integrate_x(fq);
    double total = 0.0;
    for (int j = 0; j <= 2; ++j) {
        Field1D a(g), b(g), c(g);
        for (std::size_t i = 0; i < g.n; ++i) {
            a[i] = gj[j] * dev[i];
            b[i] = gj[j] * (wq[i] - cw) + g2j[j] * cw;
            c[i] = gj[j] * (fq[i] - cf) + g2j[j] * cf;
        }
        const double na = norm_hk(a, k), nb = norm_hk(b, k), nc = norm_hk(c, k);
        total += na * na + nb * nb + nc * nc;
    }
    return total;
}

}  // namespace slowns

#pragma once

#include <utility>

#include "slowns/grid.hpp"
#include "slowns/model.hpp"
#include "slowns/solver1d.hpp"

namespace slowns {

struct State2D {
    Field2D rho, u1, u2;
    double t = 0.0;

    State2D() = default;
    State2D(Field2D rho_, Field2D u1_, Field2D u2_, double t_ = 0.0);
    static State2D equilibrium(const GridX& gx, const GridY& gy, double t = 0.0);

    const GridX& grid_x() const { return rho.grid_x(); }
    const GridY& grid_y() const { return rho.grid_y(); }
    void check() const;
};

struct EpsScaling {
    double eps = 1.0;
    EpsScaling() = default;
    explicit EpsScaling(double e);
};

// Box y-grid for the 2D run: half-length slab.L/eps and about n_slab/eps
// nodes (even, capped at `cap`).
GridY default_grid_y_2d(const GridY& slab_gy, double eps, std::size_t cap = 512);

// Sample f(x, eps*y) for each 2D node from a field tabulated on the slab
// grid (same x-grid), by trigonometric interpolation in y. Nodes whose eps*y
// falls outside the slab box get `outside`. Throws BoxTooSmall when
// eps*L2 < L1.
Field2D embed_slab_field(const Field2D& slab_field, double eps, const GridY& gy2,
                         double outside = 0.0);

// Initial 2D state rho = varsigma0(x, eps y), u = (w0, frakw0)(x, eps y),
// built from the spec sampled on the slab grid.
State2D slow_embed(const InitialDataSpec& spec, EpsScaling eps, const GridX& gx,
                   const GridY& gy2, const GridY& slab_gy);

// (d_x f, eps d_y f) and d_xx f + eps^2 d_yy f.
std::pair<Field2D, Field2D> grad_eps(const Field2D& f, double eps);
Field2D laplace_eps(const Field2D& f, double eps);

struct Tendency2D {
    Field2D rho_t, u1_t, u2_t;
};
// Semi-discrete right-hand side of the 2D system in primitive variables.
Tendency2D full_tendency(const State2D& s, const FluidParams& p);

double cfl_dt(const State2D& s, const FluidParams& p, const SolverConfig& cfg);

class Stepper2D {
public:
    Stepper2D(FluidParams p, SolverConfig cfg);
    double step(State2D& s, double dt);
    void advance_to(State2D& s, double t_target);
    void reset() { hist_.valid = false; }
    double dt() const { return dt_; }
    long steps_taken() const { return steps_; }
    int last_pcg_iterations() const { return last_iters_; }

private:
    struct History {
        std::vector<double> rho, m1, m2, n_rho, n_m1, n_m2;
        double dt = 0.0;
        bool valid = false;
    };
    enum class Outcome { ok, positivity, nonfinite };
    Outcome try_bdf(const State2D& in, State2D& out, double h, History& next);
    Outcome try_rk4(const State2D& in, State2D& out, double h) const;

    FluidParams p_;
    SolverConfig cfg_;
    double dt_;
    History hist_;
    long steps_ = 0;
    int last_iters_ = 0;
    bool last_failure_nonfinite_ = false;
};

// One first-order IMEX step of size cfg.dt.
State2D step_full(const State2D& s, const FluidParams& p, const SolverConfig& cfg);

// Residual of the eps-scaled system for profiles (xi, v) given with their time
// derivatives; eps = 1 gives the plain 2D system.
struct EpsResidual {
    Field2D r_mass, r_mom1, r_mom2;
    double mass_l2 = 0.0, mom_l2 = 0.0;
};
EpsResidual residual_eps_system(const State2D& profile, const Tendency2D& dt_profile, double eps,
                                const FluidParams& p);

// The slab and its limit-system time derivative, viewed as 2D fields on the
// slab grid.
State2D slab_as_state(const SlabState& slab);
Tendency2D slab_tendency(const SlabState& slab, const FluidParams& p);

// int (1/2 rho |u|^2 + P(rho) - P(1) - P'(1)(rho - 1))
double energy_2d(const State2D& s, const FluidParams& p);
// int (mu |grad u|^2 + mu' (div u)^2)
double dissipation_2d(const State2D& s, const FluidParams& p);

}  // namespace slowns

#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "slowns/grid.hpp"
#include "slowns/model.hpp"
#include "slowns/solver1d.hpp"
#include "slowns/solver2d.hpp"

namespace slowns {

// rho_a = [eta]_eps, u_a = ([w]_eps, [frakw]_eps), with time derivatives
// taken from the limit equations and embedded the same way.
struct ApproxSolution {
    Field2D rho_a, u_a1, u_a2;
    Field2D dt_rho_a, dt_u_a1, dt_u_a2;
    double eps = 1.0;
    double t = 0.0;

    State2D as_state() const { return State2D(rho_a, u_a1, u_a2, t); }
    Tendency2D tendency() const { return {dt_rho_a, dt_u_a1, dt_u_a2}; }
};

// gy2 is the 2D box y-grid; the slab and 2D run share the x-grid.
ApproxSolution build_approx(const SlabState& slab, double eps, const GridY& gy2,
                            const FluidParams& p);

struct Forcing {
    Field2D G1, G2;
    Field2D mass_source;  // eps [(eta frakw)_y]_eps
    double t = 0.0;
};

// y-derivatives of slab quantities are spectral across the slab y-grid,
// taken before embedding.
Forcing forcing_G(const SlabState& slab, double eps, const FluidParams& p, const GridY& gy2);

struct RemainderFields {
    Field2D varrho, R1, R2, omega, DtR1, DtR2, flux;
    double t = 0.0;
};

// The time derivative in D_t R uses the semi-discrete right-hand side of the
// 2D system at `full` and the embedded limit-system derivative in `approx`.
RemainderFields remainder(const State2D& full, const ApproxSolution& approx, const FluidParams& p);

struct GNorms {
    double l2 = 0.0, linf = 0.0, dt_l2 = 0.0;
};

struct ErrorBudget {
    double E_eps = 0.0;
    double theta_eps = 0.0;
    std::map<std::string, double> breakdown;
    GNorms g_norms;
    bool band_exit = false;  // theta left the bootstrap band
    std::size_t samples = 0;
};

struct GradientIntegrals {
    double I3 = 0.0, I4 = 0.0, I6 = 0.0;
    // max over samples of ||gradR||_4^4 / (||gradR||_2 ||gradR||_6^3); <= 1
    double holder_ratio = 0.0;
};

// Scalars extracted from one remainder snapshot.
struct RemainderScalars {
    double t = 0.0;
    double R2 = 0, varrho2 = 0, gradR2 = 0, DtR2 = 0, gradomega2 = 0, gradDtR2 = 0;
    double varrho_inf = 0;
    double gradR_l3_3 = 0, gradR_l4_4 = 0, gradR_l6_6 = 0;
};
RemainderScalars remainder_scalars(const RemainderFields& r);

// Streams snapshots in time order; keeps only scalars.
class BudgetAccumulator {
public:
    explicit BudgetAccumulator(double band = INFINITY) : band_(band) {}
    void add(const RemainderFields& r, const Forcing* g = nullptr);
    void add(const RemainderScalars& s);
    void add_forcing(const Forcing& g);
    ErrorBudget budget() const;
    GradientIntegrals gradients() const;
    const std::vector<RemainderScalars>& samples() const { return s_; }

private:
    double band_;
    std::vector<RemainderScalars> s_;
    std::vector<double> holder_;
    GNorms g_;
    bool have_prev_g_ = false;
    Forcing prev_g_;
};

// Budget of a stored history; time integrals by the trapezoid rule on the
// snapshot times.
ErrorBudget energy_budget(const std::vector<RemainderFields>& history, double band = INFINITY);
GradientIntegrals gradient_integrals(const std::vector<RemainderFields>& history);

// int (1/2 rho |u - u_ref|^2 + P(rho) - P(rho_ref) - P'(rho_ref)(rho - rho_ref))
double relative_entropy(const State2D& full, const Field2D& ref_rho, const Field2D& ref_u1,
                        const Field2D& ref_u2, const FluidParams& p);

// Smooth reference pair with its time derivatives at one instant.
struct ReferenceFlow {
    Field2D rho, u1, u2, rho_t, u1_t, u2_t;
};

struct EntropyTerms {
    double t = 0.0;
    double E1 = 0.0;    // relative energy
    double D = 0.0;     // mu |grad(u - u_ref)|^2 + mu' |div(u - u_ref)|^2
    double Rcal = 0.0;  // right-hand side of the relative energy equality
};
EntropyTerms entropy_terms(const State2D& s, const ReferenceFlow& ref, const FluidParams& p);

// Tracks max_t |E1(t) - E1(t0) + int D - int Rcal| with trapezoid time integrals.
class EntropyIdentityTracker {
public:
    void add(const EntropyTerms& e);
    double residual() const { return max_res_; }
    double last_residual() const { return last_res_; }
    std::size_t samples() const { return n_; }

private:
    EntropyTerms first_{}, prev_{};
    double int_d_ = 0.0, int_r_ = 0.0, max_res_ = 0.0, last_res_ = 0.0;
    std::size_t n_ = 0;
};

double entropy_identity_residual(const std::vector<State2D>& states,
                                 const std::vector<ReferenceFlow>& refs, const FluidParams& p);

struct PerturbationResidual {
    Field2D r_cont, r_mom1, r_mom2;
    double cont_l2 = 0.0, mom_l2 = 0.0;
};

// Residual of the coupled system for (varrho, R). `full_t` is the time
// derivative of the 2D state (normally full_tendency(full)).
PerturbationResidual perturbation_residual(const State2D& full, const Tendency2D& full_t,
                                           const ApproxSolution& approx, const RemainderFields& rem,
                                           const Forcing& g, const FluidParams& p);

}  // namespace slowns

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slowns/grid.hpp"
#include "slowns/model.hpp"
#include "slowns/series.hpp"

namespace slowns {

enum class Scheme { imex_bdf2, rk4_explicit };

Scheme parse_scheme(const std::string& s);
const char* scheme_name(Scheme s);

struct SolverConfig {
    double dt = 5e-3;
    Scheme scheme = Scheme::imex_bdf2;
    double cfl_safety = 0.5;  // only used by cfl_dt()
    bool dealias = true;
    double positivity_floor = 1e-8;
    int max_halvings = 10;
    double pcg_tol = 1e-14;
    int pcg_max_iter = 400;

    void validate() const;
};

struct State1D {
    Field1D eta, w, frakw;
    double t = 0.0;

    State1D() = default;
    State1D(Field1D eta_, Field1D w_, Field1D frakw_, double t_ = 0.0);
    static State1D equilibrium(const GridX& g, double t = 0.0);
    static State1D from_spec(const InitialDataSpec& spec, const GridX& g, double y);

    const GridX& grid() const { return eta.grid(); }
    void check() const;
};

// One State1D per node of the slab y-grid, all at a common time.
struct SlabState {
    GridX gx;
    GridY gy;
    std::vector<State1D> slices;
    double t = 0.0;

    static SlabState from_spec(const InitialDataSpec& spec, const GridX& gx, const GridY& gy);
    static SlabState equilibrium(const GridX& gx, const GridY& gy);

    enum class Which { eta, w, frakw };
    // Stack one variable into a field on gx x gy.
    Field2D field(Which which) const;
};

// Right-hand sides of the limit system in primitive variables.
struct LimitTendency {
    Field1D eta_t, w_t, frakw_t;
};
LimitTendency limit_tendency(const State1D& s, const FluidParams& p);

// Advective/acoustic step bound cfl_safety * dx / (max|w| + max sound speed).
double cfl_dt(const State1D& s, const FluidParams& p, const SolverConfig& cfg);

// Stateful integrator for one slice. The second-order scheme needs the
// previous step's data; the first step is first order.
class LimitStepper {
public:
    LimitStepper(FluidParams p, SolverConfig cfg, long slice = -1);

    // One step of size dt (reduced by halving if positivity fails).
    // Returns the step actually taken.
    double step(State1D& s, double dt);
    // Uniform steps of size <= current dt landing exactly on t_target.
    void advance_to(State1D& s, double t_target);
    void reset() { hist_.valid = false; }
    double dt() const { return dt_; }
    long steps_taken() const { return steps_; }

private:
    struct History {
        std::vector<double> eta, m, q, n_eta, n_m, n_q;
        double dt = 0.0;
        bool valid = false;
    };
    enum class Outcome { ok, positivity, nonfinite };
    Outcome try_bdf(const State1D& in, State1D& out, double h, History& next) const;
    Outcome try_rk4(const State1D& in, State1D& out, double h) const;

    FluidParams p_;
    SolverConfig cfg_;
    long slice_;
    double dt_;
    History hist_;
    long steps_ = 0;
    bool last_failure_nonfinite_ = false;
};

// Single first-order IMEX step of (eta, w); frakw is carried unchanged.
State1D step_limit(const State1D& s, const FluidParams& p, const SolverConfig& cfg);
// Advances frakw from `current` to `advanced.t` using the already advanced
// (eta, w) held in `advanced`.
State1D step_passive(const State1D& current, const State1D& advanced, const FluidParams& p,
                     const SolverConfig& cfg);

struct SlabObserver {
    std::vector<std::string> names;
    std::function<std::vector<double>(const SlabState&)> fn;
};

// Conservation and energy columns: mass_dev, momentum, passive_momentum
// (max over slices), energy (max over slices), eta_min, eta_max.
SlabObserver conservation_observer(const FluidParams& p);

struct SlabRunResult {
    SlabState final;
    DiagnosticSeries series;
};

// Advances all slices to t_end, sampling observers every sample_interval
// (and at the initial time). If `history` is non-null every sample is stored.
SlabRunResult run_slab(const SlabState& initial, const FluidParams& p, const SolverConfig& cfg,
                       double t_end, double sample_interval,
                       const std::vector<SlabObserver>& observers = {},
                       std::vector<SlabState>* history = nullptr);

struct LimitResidual {
    Field1D r_mass, r_mom;
};
// Centred-in-time residual of the limit system between two states.
LimitResidual residual_limit(const State1D& s, const State1D& prev, const FluidParams& p);

// E0 = int (1/2 eta w^2 + P(eta) - P(1) - P'(1)(eta - 1)) dx.
double energy_1d(const State1D& s, const FluidParams& p);
// int w_x^2 dx
double dissipation_1d(const State1D& s);

}  // namespace slowns

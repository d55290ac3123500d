#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "slowns/grid.hpp"
#include "slowns/model.hpp"
#include "slowns/series.hpp"
#include "slowns/solver1d.hpp"

namespace slowns {

// I(u)(x) = int_0^x u, evaluated exactly for the trigonometric interpolant.
Field1D op_I(const Field1D& u);
// I(u) - <I(u)>, the mean taken over [0, 1] of the (non-periodic) primitive.
Field1D op_I_tilde(const Field1D& u);
// Trapezoid mean over [0, 1] of a primitive whose value jumps by `jump` at x = 1.
double primitive_mean(const Field1D& prim, double jump);

struct GnResult {
    double p = 0.0;
    double ratio = 0.0;        // ||f||_p / (T1(f) + T2(f))
    double lhs = 0.0;          // ||f||_p
    double ratio_tilde = 0.0;  // 2D branch on the zero-x-mean part (0 when absent)
    double ratio_bar = 0.0;    // 1D branch on the x-mean (0 when absent)
    double t1_tilde = 0.0;     // ||f~||^{2/p} ||grad f~||^{1-2/p}
    double t2_bar = 0.0;       // ||f-||^{1/2+1/p} ||d_y f-||^{1/2-1/p}
};

// Throws UndefinedRatio when f or grad f vanishes identically.
GnResult gn_check(const Field2D& f, double p);

struct Sides {
    double lhs = 0.0, rhs = 0.0;
};

// int eta w^2 <= eta_bar^2 int w_x^2, given int eta = 1 and int eta w = 0.
Sides weighted_poincare_check(const Field1D& eta, const Field1D& w, double eta_bar);

struct DwpResult {
    double lhs = 0.0;    // ||u||^2
    double base = 0.0;   // ||grad u||^2 + (int rho |u|)^2
    double ratio = 0.0;  // lhs / base, an empirical C(M, E0)
};
DwpResult density_weighted_poincare(const Field1D& rho, const Field1D& u, double M, double E0, double q);
DwpResult density_weighted_poincare(const Field2D& rho, const Field2D& u, double M, double E0, double q);

struct DensityBounds {
    double e00_bar = 0.0;
    double varsigma_bar0 = 0.0;
    double varsigma_lower0 = 0.0;
    double varsigma_bar1 = 0.0;
    double eta_bar = 0.0;
    double nu = 0.0, a = 0.0, gamma = 0.0;

    // eta_1(t), positive and non-increasing.
    double eta_lower(double t) const;
};

// E00(y) = int (1/2 varsigma0 w0^2 + P(varsigma0)) dx, maximised over the
// sample ys (default: a fine set covering the envelope).
DensityBounds density_bounds(const InitialDataSpec& spec, const FluidParams& p,
                             const GridX& gx = GridX(256), std::vector<double> ys = {});

struct LyapunovConstants {
    double A1 = 0, A2 = 0, A3 = 0, A4 = 0, A5 = 1, A6 = 1;
    // Smallest values meeting the sufficiency conditions at (eta_bar, params).
    static LyapunovConstants defaults(const DensityBounds& b, const FluidParams& p);
    void validate() const;
};

enum class Functional { F2, F3, F4 };
Functional parse_functional(const std::string& s);
const char* functional_name(Functional f);

double lyapunov_value(const State1D& s, const FluidParams& p, const LyapunovConstants& c, Functional which);
// int (eta w^2 + (eta - 1)^2 + eta w^4 + w_x^2)
double f2_reference(const State1D& s);

DiagnosticSeries lyapunov_series(const std::vector<State1D>& history, const FluidParams& p,
                                 const LyapunovConstants& c, Functional which);

struct DecayFit {
    double C = 0.0, alpha = 0.0, r2 = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    std::size_t points = 0;
};

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& v,
                   std::pair<double, double> window);
DecayFit decay_fit(const DiagnosticSeries& s, const std::string& column, std::pair<double, double> window);

// Per stored time, max over slices of the y-differentiated conservation
// integrals and of the norms tracked for y-derivatives. Time derivatives use
// three-point differences on the stored times.
DiagnosticSeries y_derivative_checks(const std::vector<SlabState>& history, int order);

struct PassiveVerdict {
    std::size_t slice = 0;
    double worst_ratio = 0.0;  // max_t lhs / rhs
    bool pass = true;
};
std::vector<PassiveVerdict> passive_decay_check(const std::vector<SlabState>& history,
                                                const FluidParams& p, const DensityBounds& b,
                                                double tol = 0.05);

struct Verdict {
    std::string name;
    double lhs = 0.0, rhs = 0.0, margin = 0.0;
    bool pass = false;
};
void write_verdicts_csv(const std::string& path, const std::vector<Verdict>& v);

// Seeded randomized suites.
Field1D random_band_limited(const GridX& g, std::uint64_t seed, int modes, double mean_scale);
Field2D random_band_limited_2d(const GridX& gx, const GridY& gy, std::uint64_t seed, int modes);

struct SuiteResult {
    std::size_t cases = 0, failures = 0;
    double worst_margin = 0.0;  // min over cases of (rhs - lhs) / rhs
};
SuiteResult op_I_suite(std::uint64_t seed, std::size_t cases);
SuiteResult weighted_poincare_suite(std::uint64_t seed, std::size_t cases);

struct GnSweep {
    double p = 0.0;
    double max_ratio = 0.0;
    double max_ratio_refined = 0.0;  // same fields on the doubled grid
};
GnSweep gn_suite(std::uint64_t seed, std::size_t cases, double p, const GridX& gx, const GridY& gy);

}  // namespace slowns

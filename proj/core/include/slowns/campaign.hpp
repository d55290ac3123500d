#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slowns/analysis.hpp"
#include "slowns/asymptotics.hpp"
#include "slowns/config.hpp"
#include "slowns/series.hpp"
#include "slowns/solver1d.hpp"
#include "slowns/solver2d.hpp"

namespace slowns {

struct NamedFit {
    std::string name;
    DecayFit fit;
    bool skipped = false;  // series negligible throughout the window
};

bool all_pass(const std::vector<Verdict>& v);

// Per-sample norms of the slab, each the max over slices:
// eta_dev_L2, w_H1, eta_x_L2, frakw_H1.
SlabObserver norm_observer();

struct Run1DResult {
    DensityBounds bounds;
    DiagnosticSeries series;     // conservation, norms, y-derivative columns
    DiagnosticSeries lyapunov;   // F2, F2_lower, F3, F4 on the y = 0 slice
    std::vector<SlabState> history;
    std::vector<NamedFit> fits;
    std::vector<Verdict> verdicts;
    bool pass() const { return all_pass(verdicts); }
};

// Empty out_dir: nothing written.
Run1DResult run_1d(const CampaignConfig& c, const std::string& out_dir);

struct Run2DResult {
    DiagnosticSeries series;
    State2D final;
    std::vector<Verdict> verdicts;
    bool pass() const { return all_pass(verdicts); }
};
Run2DResult run_2d(const CampaignConfig& c, double eps, const std::string& out_dir);

// The 2D box y-grid used for a given eps.
GridY pair_grid_y(const CampaignConfig& c, double eps);

struct PairResult {
    double eps = 0.0;
    ErrorBudget budget;
    GradientIntegrals gradients;
    double band = 0.0;      // 1/2 min{1, min eta}
    double eta_min = 0.0;
    DiagnosticSeries remainder_series;
    DiagnosticSeries slab_series;
};
PairResult run_pair(const CampaignConfig& c, double eps, const std::string& out_dir);

struct SweepEntry {
    double eps = 0.0;
    std::optional<PairResult> result;
    std::string error;
};

struct SweepSummary {
    std::vector<SweepEntry> entries;
    std::vector<std::pair<std::string, double>> slopes;  // empty with fewer than 3 results
    std::vector<NamedFit> decay_fits;
    std::vector<Verdict> verdicts;
    bool pass() const { return all_pass(verdicts); }
};

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

SweepSummary run_sweep(const CampaignConfig& c, const std::string& out_dir);

std::vector<Verdict> check_inequalities(const CampaignConfig& c, const std::string& out_dir);

DecayFit fit_csv(const std::string& path, const std::string& column, std::pair<double, double> window);

}  // namespace slowns

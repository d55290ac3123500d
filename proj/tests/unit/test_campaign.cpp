#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "slowns/campaign.hpp"
#include "slowns/errors.hpp"

using namespace slowns;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("slowns_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

CampaignConfig small(double amplitude) {
    CampaignConfig c = config_from_ini(IniFile::parse(R"(
[data]
amplitude = 0.2
[grid]
n_x = 32
n_y_slab = 16
n_x_2d = 16
[run]
t_end = 0.5
t_end_pair = 0.2
sample_stride = 10
eps_list = 0.5, 0.35, 0.25
[fit]
t0 = 0.1
[check]
op_I_cases = 20
poincare_cases = 20
gn_cases = 5
)"));
    c.amplitude = amplitude;
    return c;
}

}  // namespace

TEST_SUITE("campaign") {

TEST_CASE("config errors name the key") {
    auto key_of = [](const std::string& text) {
        try {
            config_from_ini(IniFile::parse(text));
        } catch (const ConfigError& e) {
            return e.key();
        }
        return std::string("none");
    };
    CHECK(key_of("[params]\ngamma = 0.5\n") == "params.gamma");
    CHECK(key_of("[params]\nmu = -1\n") == "params.mu");
    CHECK(key_of("[solver]\ndt = 0\n") == "solver.dt");
    CHECK(key_of("[run]\neps_list = 0.1, 0.2, 0.05\n") == "run.eps_list");
    CHECK(key_of("[run]\nbogus = 1\n") == "run.bogus");
    CHECK(key_of("[nosuch]\nx = 1\n") == "nosuch");
    CHECK(key_of("[lyapunov]\nA1 = 5\n") == "lyapunov.A2");
    CHECK(key_of("[data]\nfamily = nope\n") == "data.family");
    CHECK(key_of("") == "none");
    CHECK_THROWS_AS(IniFile::parse("[run]\nt_end = 1\nt_end = 2\n"), ConfigError);
}

TEST_CASE("equilibrium slab run passes with zero deviations") {
    const CampaignConfig c = small(0.0);
    const std::string out = scratch("eq1d");
    const Run1DResult r = run_1d(c, out);
    CHECK(r.pass());
    for (std::size_t k = 0; k < r.series.names.size(); ++k) {
        const double rest = r.series.names[k] == "eta_min" || r.series.names[k] == "eta_max" ? 1.0 : 0.0;
        for (double v : r.series.columns[k]) CHECK(std::abs(v - rest) <= 1e-12);
    }
    for (const auto& f : r.fits) CHECK(f.skipped);
    CHECK(fs::exists(fs::path(out) / "verdicts.csv"));
    CHECK(fs::exists(fs::path(out) / "series.csv"));
}

TEST_CASE("huge time step loses positivity") {
    CampaignConfig c = small(0.6);
    c.solver.dt = 5.0;
    c.solver.max_halvings = 0;
    c.solver.scheme = Scheme::rk4_explicit;
    CHECK_THROWS_AS(run_1d(c, scratch("huge")), SolverError);
}

TEST_CASE("pair at equilibrium has zero error") {
    const CampaignConfig c = small(0.0);
    const PairResult r = run_pair(c, 0.5, scratch("eqpair"));
    CHECK(r.budget.E_eps <= 1e-20);
    CHECK(r.budget.theta_eps <= 1e-12);
    CHECK_FALSE(r.budget.band_exit);
}

TEST_CASE("reruns are bitwise identical") {
    const CampaignConfig c = small(0.2);
    const PairResult a = run_pair(c, 0.5, scratch("rerun_a"));
    const PairResult b = run_pair(c, 0.5, scratch("rerun_b"));
    CHECK(a.budget.E_eps == b.budget.E_eps);
    CHECK(a.remainder_series.columns == b.remainder_series.columns);
    CHECK(a.slab_series.columns == b.slab_series.columns);
    CHECK(a.budget.E_eps > 0.0);
    auto slurp = [](const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    for (const char* f : {"remainder.csv", "slab_norms.csv", "budget.json", "manifest.json"}) {
        const std::string x = slurp((fs::temp_directory_path() / "slowns_test_rerun_a" / f).string());
        CHECK(!x.empty());
        CHECK(x == slurp((fs::temp_directory_path() / "slowns_test_rerun_b" / f).string()));
    }
}

TEST_CASE("inequality checks over several seeds") {
    CampaignConfig c = small(0.2);
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        c.seed = seed;
        const auto v = check_inequalities(c, scratch("check"));
        for (const Verdict& x : v) CHECK_MESSAGE(x.pass, x.name);
    }
}

TEST_CASE("sweep summary") {
    const CampaignConfig c = small(0.2);
    const std::string out = scratch("sweep");
    const SweepSummary s = run_sweep(c, out);
    CHECK(s.entries.size() == 3);
    CHECK(s.slopes.size() == 7);
    for (const Verdict& v : s.verdicts)
        if (v.name.rfind("bootstrap_band_", 0) == 0) CHECK_MESSAGE(v.pass, v.name);
    std::ifstream is(fs::path(out) / "summary.json");
    const auto j = nlohmann::json::parse(is);
    for (const char* k : {"params", "eps_entries", "slopes", "decay_fits", "verdicts"}) CHECK(j.contains(k));

    CampaignConfig two = c;
    two.eps_list = {0.5, 0.25};
    CHECK_THROWS_AS(run_sweep(two, out), ConfigError);
}

TEST_CASE("box and resolution sensitivity") {
    CampaignConfig c = small(0.2);
    const Run1DResult a = run_1d(c, "");
    c.grids.half_length *= 2;
    c.grids.n_y_slab *= 2;
    const Run1DResult b = run_1d(c, "");
    for (const char* col : {"eta_dev_L2", "w_H1", "frakw_H1"}) {
        const auto& x = a.series.column(col);
        const auto& y = b.series.column(col);
        REQUIRE(x.size() == y.size());
        for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(x[k] - y[k]) <= 1e-3 * std::abs(x[k]));
    }

    CampaignConfig d = small(0.2);
    const PairResult coarse = run_pair(d, 0.5, "");
    d.grids.n_y_2d = 2 * pair_grid_y(d, 0.5).n;
    const PairResult fine = run_pair(d, 0.5, "");
    CHECK(std::abs(fine.budget.E_eps - coarse.budget.E_eps) <= 0.05 * coarse.budget.E_eps);
}

TEST_CASE("loglog slope") {
    CHECK(loglog_slope({0.2, 0.1, 0.05}, {0.4, 0.1, 0.025}) == doctest::Approx(2.0));
}

}

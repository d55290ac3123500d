#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowns/analysis.hpp"
#include "slowns/model.hpp"
#include "slowns/solver1d.hpp"

namespace slowns {

// Raw `key = value` entries grouped by `[section]`.
class IniFile {
public:
    static IniFile parse(const std::string& text, const std::string& origin = "<string>");
    static IniFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    const std::map<std::string, std::map<std::string, std::string>>& sections() const { return s_; }

private:
    std::map<std::string, std::map<std::string, std::string>> s_;
};

struct GridConfig {
    std::size_t n_x = 256;
    std::size_t n_y_slab = 32;
    double half_length = 5.0;      // slab y-box [-L, L)
    std::size_t n_x_2d = 64;
    std::size_t n_y_2d = 0;        // 0: ceil(n_y_slab / eps)
    std::size_t n_y_2d_cap = 512;
};

struct CheckConfig {
    std::size_t op_I_cases = 500;
    std::size_t poincare_cases = 500;
    std::size_t gn_cases = 200;
};

struct CampaignConfig {
    FluidParams params;
    DataFamily family = DataFamily::gaussian_bump;
    double amplitude = 0.3;
    double y_width = 1.0;
    std::string table_path;  // custom_table only
    GridConfig grids;
    SolverConfig solver;     // slab runs
    SolverConfig solver2d;   // 2D runs
    std::vector<double> eps_list{0.2, 0.1, 0.05};
    double t_end = 10.0;
    double t_end_pair = 5.0;
    int sample_stride = 20;  // solver steps between stored samples
    std::string output_dir = "out";
    std::uint64_t seed = 12345;
    std::optional<LyapunovConstants> lyapunov;  // unset: sufficiency defaults
    std::pair<double, double> fit_window{2.0, -1.0};  // second < 0: t_end
    CheckConfig checks;

    double sample_interval() const { return sample_stride * solver.dt; }
    double pair_sample_interval() const { return sample_stride * solver.dt; }
    std::pair<double, double> window(double t_last) const;
    InitialDataSpec spec() const;
    void validate() const;
};

// Unknown sections or keys and malformed values raise ConfigError naming
// "section.key".
CampaignConfig config_from_ini(const IniFile& ini);
CampaignConfig load_config(const std::string& path);

}  // namespace slowns

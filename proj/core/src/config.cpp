#include "slowns/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "slowns/errors.hpp"

namespace slowns {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
    IniFile f;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("", origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            f.s_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (section.empty()) throw ConfigError(key, "entry outside any [section]");
        if (f.s_[section].count(key)) throw ConfigError(section + "." + key, "duplicate key");
        f.s_[section][key] = trim(line.substr(eq + 1));
    }
    return f;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("", "cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str(), path);
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto it = s_.find(section);
    return it != s_.end() && it->second.count(key);
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    auto it = s_.find(section);
    if (it == s_.end()) return std::nullopt;
    auto k = it->second.find(key);
    if (k == it->second.end()) return std::nullopt;
    return k->second;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key, "not a number: '" + v + "'");
    return d;
}

long long to_int(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const long long d = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError(key, "not an integer: '" + v + "'");
    return d;
}

std::size_t to_size(const std::string& key, const std::string& v) {
    const long long d = to_int(key, v);
    if (d < 0) throw ConfigError(key, "must be non-negative");
    return std::size_t(d);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key, "not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

class Reader {
public:
    explicit Reader(const IniFile& f) : f_(f) {}

    template <class F>
    void opt(const std::string& sec, const std::string& key, F&& apply) {
        used_.insert(sec + "." + key);
        if (auto v = f_.get(sec, key)) {
            const std::string full = sec + "." + key;
            apply(full, *v);
        }
    }

    void reject_unknown() const {
        static const std::set<std::string> known_sections{"params", "data", "grid", "solver", "solver2d",
                                                          "run", "lyapunov", "fit", "check"};
        for (const auto& [sec, kv] : f_.sections()) {
            if (!known_sections.count(sec)) throw ConfigError(sec, "unknown section");
            for (const auto& [k, v] : kv)
                if (!used_.count(sec + "." + k)) throw ConfigError(sec + "." + k, "unknown key");
        }
    }

private:
    const IniFile& f_;
    std::set<std::string> used_;
};

void read_solver(Reader& r, const std::string& sec, SolverConfig& s) {
    r.opt(sec, "dt", [&](auto& k, auto& v) { s.dt = to_double(k, v); });
    r.opt(sec, "scheme", [&](auto& k, auto& v) {
        try {
            s.scheme = parse_scheme(v);
        } catch (const ConfigError& e) {
            throw ConfigError(k, e.what());
        }
    });
    r.opt(sec, "cfl_safety", [&](auto& k, auto& v) { s.cfl_safety = to_double(k, v); });
    r.opt(sec, "dealias", [&](auto& k, auto& v) { s.dealias = to_bool(k, v); });
    r.opt(sec, "positivity_floor", [&](auto& k, auto& v) { s.positivity_floor = to_double(k, v); });
    r.opt(sec, "max_halvings", [&](auto& k, auto& v) { s.max_halvings = int(to_int(k, v)); });
    r.opt(sec, "pcg_tol", [&](auto& k, auto& v) { s.pcg_tol = to_double(k, v); });
    r.opt(sec, "pcg_max_iter", [&](auto& k, auto& v) { s.pcg_max_iter = int(to_int(k, v)); });
}

// Re-label solver validation errors with the section they came from.
void validate_solver(const SolverConfig& s, const std::string& sec) {
    try {
        s.validate();
    } catch (const ConfigError& e) {
        std::string key = e.key();
        if (key.rfind("solver.", 0) == 0) key = sec + key.substr(6);
        throw ConfigError(key, e.what());
    }
}

void read_column_table(const std::string& path, CustomProfiles& out) {
    std::ifstream is(path);
    if (!is) throw ConfigError("data.table", "cannot read " + path);
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
            throw ConfigError("data.table", "expected three comma-separated columns");
        char* end = nullptr;
        const double da = std::strtod(trim(a).c_str(), &end);
        if (*end != '\0') continue;  // header row
        out.density.push_back(da);
        out.w.push_back(to_double("data.table", trim(b)));
        out.frakw.push_back(to_double("data.table", trim(c)));
    }
}

}  // namespace

std::pair<double, double> CampaignConfig::window(double t_last) const {
    return {fit_window.first, fit_window.second < 0.0 ? t_last : fit_window.second};
}

InitialDataSpec CampaignConfig::spec() const {
    if (family == DataFamily::custom_table) {
        if (table_path.empty()) throw ConfigError("data.table", "custom_table needs a table path");
        CustomProfiles t;
        read_column_table(table_path, t);
        return make_initial_data(family, amplitude, y_width, &t);
    }
    return make_initial_data(family, amplitude, y_width);
}

void CampaignConfig::validate() const {
    params.validate();
    validate_solver(solver, "solver");
    validate_solver(solver2d, "solver2d");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("data.amplitude", "must be >= 0");
    if (!(y_width > 0.0)) throw ConfigError("data.y_width", "must be positive (inf allowed)");
    if (grids.n_x < 16 || grids.n_x % 2) throw ConfigError("grid.n_x", "must be even and >= 16");
    if (grids.n_y_slab < 16 || grids.n_y_slab % 2)
        throw ConfigError("grid.n_y_slab", "must be even and >= 16");
    if (grids.n_x_2d < 16 || grids.n_x_2d % 2) throw ConfigError("grid.n_x_2d", "must be even and >= 16");
    if (grids.n_y_2d != 0 && (grids.n_y_2d < 16 || grids.n_y_2d % 2))
        throw ConfigError("grid.n_y_2d", "must be 0 or even and >= 16");
    if (grids.n_y_2d_cap < 16) throw ConfigError("grid.n_y_2d_cap", "must be >= 16");
    if (!(grids.half_length > 0.0)) throw ConfigError("grid.L", "must be positive");
    if (eps_list.empty()) throw ConfigError("run.eps_list", "must not be empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0 && eps_list[i] <= 1.0)) throw ConfigError("run.eps_list", "values must lie in (0, 1]");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("run.eps_list", "must be strictly decreasing");
    }
    if (!(t_end > 0.0)) throw ConfigError("run.t_end", "must be positive");
    if (!(t_end_pair > 0.0)) throw ConfigError("run.t_end_pair", "must be positive");
    if (sample_stride < 1) throw ConfigError("run.sample_stride", "must be >= 1");
    if (lyapunov) lyapunov->validate();
    if (!(fit_window.first >= 0.0)) throw ConfigError("fit.t0", "must be >= 0");
    if (fit_window.second >= 0.0 && !(fit_window.second > fit_window.first))
        throw ConfigError("fit.t1", "must exceed fit.t0");
}

CampaignConfig config_from_ini(const IniFile& ini) {
    CampaignConfig c;
    Reader r(ini);
    r.opt("params", "a", [&](auto& k, auto& v) { c.params.a = to_double(k, v); });
    r.opt("params", "gamma", [&](auto& k, auto& v) { c.params.gamma = to_double(k, v); });
    r.opt("params", "mu", [&](auto& k, auto& v) { c.params.mu = to_double(k, v); });
    r.opt("params", "mu_prime", [&](auto& k, auto& v) { c.params.mu_prime = to_double(k, v); });

    r.opt("data", "family", [&](auto& k, auto& v) {
        try {
            c.family = parse_family(v);
        } catch (const ConfigError& e) {
            throw ConfigError(k, e.what());
        }
    });
    r.opt("data", "amplitude", [&](auto& k, auto& v) { c.amplitude = to_double(k, v); });
    r.opt("data", "y_width", [&](auto& k, auto& v) { c.y_width = to_double(k, v); });
    r.opt("data", "table", [&](auto&, auto& v) { c.table_path = v; });

    r.opt("grid", "n_x", [&](auto& k, auto& v) { c.grids.n_x = to_size(k, v); });
    r.opt("grid", "n_y_slab", [&](auto& k, auto& v) { c.grids.n_y_slab = to_size(k, v); });
    r.opt("grid", "L", [&](auto& k, auto& v) { c.grids.half_length = to_double(k, v); });
    r.opt("grid", "n_x_2d", [&](auto& k, auto& v) { c.grids.n_x_2d = to_size(k, v); });
    r.opt("grid", "n_y_2d", [&](auto& k, auto& v) { c.grids.n_y_2d = to_size(k, v); });
    r.opt("grid", "n_y_2d_cap", [&](auto& k, auto& v) { c.grids.n_y_2d_cap = to_size(k, v); });

    read_solver(r, "solver", c.solver);
    c.solver2d = c.solver;
    read_solver(r, "solver2d", c.solver2d);

    r.opt("run", "t_end", [&](auto& k, auto& v) { c.t_end = to_double(k, v); });
    r.opt("run", "t_end_pair", [&](auto& k, auto& v) { c.t_end_pair = to_double(k, v); });
    r.opt("run", "sample_stride", [&](auto& k, auto& v) { c.sample_stride = int(to_int(k, v)); });
    r.opt("run", "output_dir", [&](auto&, auto& v) { c.output_dir = v; });
    r.opt("run", "seed", [&](auto& k, auto& v) {
        const long long s = to_int(k, v);
        if (s < 0) throw ConfigError(k, "must be non-negative");
        c.seed = std::uint64_t(s);
    });
    r.opt("run", "eps_list", [&](auto& k, auto& v) { c.eps_list = to_list(k, v); });

    const char* names[] = {"A1", "A2", "A3", "A4", "A5", "A6"};
    bool any = false;
    double vals[6] = {0, 0, 0, 0, 1, 1};
    for (int i = 0; i < 6; ++i)
        r.opt("lyapunov", names[i], [&](auto& k, auto& v) {
            vals[i] = to_double(k, v);
            any = true;
        });
    if (any) {
        for (int i = 0; i < 4; ++i)
            if (!ini.has("lyapunov", names[i]))
                throw ConfigError(std::string("lyapunov.") + names[i], "missing constant");
        c.lyapunov = LyapunovConstants{vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
    }

    r.opt("fit", "t0", [&](auto& k, auto& v) { c.fit_window.first = to_double(k, v); });
    r.opt("fit", "t1", [&](auto& k, auto& v) { c.fit_window.second = to_double(k, v); });

    r.opt("check", "op_I_cases", [&](auto& k, auto& v) { c.checks.op_I_cases = to_size(k, v); });
    r.opt("check", "poincare_cases", [&](auto& k, auto& v) { c.checks.poincare_cases = to_size(k, v); });
    r.opt("check", "gn_cases", [&](auto& k, auto& v) { c.checks.gn_cases = to_size(k, v); });

    r.reject_unknown();
    c.validate();
    return c;
}

CampaignConfig load_config(const std::string& path) { return config_from_ini(IniFile::load(path)); }

}  // namespace slowns

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slowns/grid.hpp"

namespace slowns {

struct FluidParams {
    double a = 1.0;
    double gamma = 1.4;
    double mu = 0.05;
    double mu_prime = 1.95;

    double nu() const { return mu + mu_prime; }
    // Throws ConfigError naming the offending field.
    void validate() const;
    // True when a*gamma == 1, i.e. p'(1) = 1.
    bool unit_sound_speed() const;
};

double pressure(const FluidParams& p, double rho);
// P with rho P' - P = p for gamma > 1; a(rho log rho + 1) for gamma == 1.
double pressure_potential(const FluidParams& p, double rho);
double pressure_potential_d1(const FluidParams& p, double rho);
double pressure_potential_d2(const FluidParams& p, double rho);
double relative_potential(const FluidParams& p, double rho, double rho_ref);

enum class DataFamily { gaussian_bump, fourier_modes, custom_table };

DataFamily parse_family(const std::string& s);
const char* family_name(DataFamily f);

// Tabulated x-profiles for custom_table: one period sampled uniformly.
// Each profile is multiplied by amplitude * envelope(y).
struct CustomProfiles {
    std::vector<double> density;  // added to 1 after mean removal
    std::vector<double> w;
    std::vector<double> frakw;
};

struct InitialDataSpec {
    DataFamily family = DataFamily::gaussian_bump;
    double amplitude = 0.0;
    double y_width = 1.0;  // +inf gives data independent of y

    std::function<double(double, double)> varsigma0;
    std::function<double(double, double)> w0;
    std::function<double(double, double)> frakw0;
    double lower_bound = 1.0;
    double upper_bound = 1.0;

    double envelope(double y) const;

    Field1D sample_density(const GridX& g, double y) const;
    Field1D sample_w(const GridX& g, double y) const;
    Field1D sample_frakw(const GridX& g, double y) const;

    // sum_{j<=2} ||d_y^j (varsigma0 - 1, w0, frakw0)(.,y)||^2_{H^k}, k <= 5.
    double a_k(int k, double y, const GridX& g = GridX(128)) const;
};

InitialDataSpec make_initial_data(DataFamily family, double amplitude, double y_width,
                                  const CustomProfiles* table = nullptr);

}  // namespace slowns

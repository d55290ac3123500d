#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace slowns {

enum class Role : std::uint32_t { density = 0, velocity = 1, derived = 2 };

const char* role_name(Role r);

// Uniform grid on the unit torus, x_i = i/n.
struct GridX {
    std::size_t n = 64;

    GridX() = default;
    explicit GridX(std::size_t n_);
    double dx() const { return 1.0 / double(n); }
    double node(std::size_t i) const { return double(i) / double(n); }
    bool operator==(const GridX&) const = default;
};

// Periodic box [-L, L) in y, y_j = -L + j*dy.
struct GridY {
    std::size_t n = 32;
    double half_length = 5.0;

    GridY() = default;
    GridY(std::size_t n_, double half_length_);
    double dy() const { return 2.0 * half_length / double(n); }
    double period() const { return 2.0 * half_length; }
    double node(std::size_t j) const { return -half_length + double(j) * dy(); }
    bool operator==(const GridY&) const = default;
};

class Field1D {
public:
    Field1D() = default;
    explicit Field1D(GridX g, Role r = Role::derived, double fill = 0.0);
    Field1D(GridX g, std::vector<double> values, Role r = Role::derived);

    const GridX& grid() const { return grid_; }
    Role role() const { return role_; }
    void set_role(Role r) { role_ = r; }
    std::size_t size() const { return v_.size(); }

    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    // Throws DomainError on non-finite samples, or non-positive density samples.
    void check() const;

    double max_abs() const;
    double min() const;
    double max() const;

private:
    GridX grid_;
    Role role_ = Role::derived;
    std::vector<double> v_;
};

class Field2D {
public:
    Field2D() = default;
    Field2D(GridX gx, GridY gy, Role r = Role::derived, double fill = 0.0);
    Field2D(GridX gx, GridY gy, std::vector<double> values, Role r = Role::derived);

    const GridX& grid_x() const { return gx_; }
    const GridY& grid_y() const { return gy_; }
    std::size_t nx() const { return gx_.n; }
    std::size_t ny() const { return gy_.n; }
    Role role() const { return role_; }
    void set_role(Role r) { role_ = r; }
    std::size_t size() const { return v_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return v_[j * gx_.n + i]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[j * gx_.n + i]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(std::size_t j) { return v_.data() + j * gx_.n; }
    const double* row(std::size_t j) const { return v_.data() + j * gx_.n; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    Field1D row_field(std::size_t j) const;
    void set_row(std::size_t j, const Field1D& f);

    bool same_grid(const Field2D& o) const { return gx_ == o.gx_ && gy_ == o.gy_; }
    void check() const;

    double max_abs() const;
    double min() const;
    double max() const;

private:
    GridX gx_;
    GridY gy_;
    Role role_ = Role::derived;
    std::vector<double> v_;
};

// Spectral derivatives (exact for the trigonometric interpolant).
Field1D ddx(const Field1D& f, int order = 1);
Field2D ddx(const Field2D& f, int order = 1);
Field2D ddy(const Field2D& f, int order = 1);

// Periodic rectangle rule.
double integrate_x(const Field1D& f);
double integrate_xy(const Field2D& f);

// (sum_{j<=k} ||d^j f||^2)^{1/2}, 0 <= k <= 5.
double norm_hk(const Field1D& f, int k);

inline constexpr double p_inf = std::numeric_limits<double>::infinity();

double norm_lp(const Field1D& f, double p);
double norm_lp(const Field2D& f, double p);
double norm_l2(const Field2D& f);
// ||grad f||_{L2} with the standard (unscaled) gradient.
double norm_grad(const Field2D& f);

struct SplitMean {
    std::vector<double> f_bar;  // x-mean per y node
    Field2D f_tilde;
};

SplitMean split_mean(const Field2D& f);

// Elementwise helpers used throughout.
Field1D operator+(const Field1D& a, const Field1D& b);
Field1D operator-(const Field1D& a, const Field1D& b);
Field1D operator*(const Field1D& a, const Field1D& b);
Field1D operator*(double s, const Field1D& a);
Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D operator*(const Field2D& a, const Field2D& b);
Field2D operator*(double s, const Field2D& a);

// Checkpoint layout: 32-byte header ("SLOWNSF1", n_x, n_y as u64, role as
// u32, 4 reserved bytes) followed by n_x*n_y little-endian doubles, x fastest.
void save_field(const std::string& path, const Field2D& f);
void save_field(const std::string& path, const Field1D& f);
// half_length is not stored; the caller supplies the y-box.
Field2D load_field(const std::string& path, double half_length);
Field1D load_field1d(const std::string& path);

}  // namespace slowns

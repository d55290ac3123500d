#include "slowns/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>

#include "slowns/errors.hpp"
#include "slowns/spectral.hpp"

namespace slowns {

const char* role_name(Role r) {
    switch (r) {
        case Role::density: return "density";
        case Role::velocity: return "velocity";
        case Role::derived: return "derived";
    }
    return "?";
}

GridX::GridX(std::size_t n_) : n(n_) {
    if (n < 16 || n % 2 != 0) throw DomainError("GridX: n_x must be even and >= 16");
}

GridY::GridY(std::size_t n_, double half_length_) : n(n_), half_length(half_length_) {
    if (n < 16 || n % 2 != 0) throw DomainError("GridY: n_y must be even and >= 16");
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw DomainError("GridY: half_length must be positive");
}

namespace {

void check_values(const std::vector<double>& v, Role role, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite sample");
        if (role == Role::density && !(x > 0.0))
            throw DomainError(std::string(what) + ": non-positive density sample");
    }
}

double vmax_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Field1D::Field1D(GridX g, Role r, double fill) : grid_(g), role_(r), v_(g.n, fill) {}

Field1D::Field1D(GridX g, std::vector<double> values, Role r)
    : grid_(g), role_(r), v_(std::move(values)) {
    if (v_.size() != grid_.n) throw MismatchError("Field1D: sample count does not match grid");
}

void Field1D::check() const { check_values(v_, role_, "Field1D"); }
double Field1D::max_abs() const { return vmax_abs(v_); }
double Field1D::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field1D::max() const { return *std::max_element(v_.begin(), v_.end()); }

Field2D::Field2D(GridX gx, GridY gy, Role r, double fill)
    : gx_(gx), gy_(gy), role_(r), v_(gx.n * gy.n, fill) {}

Field2D::Field2D(GridX gx, GridY gy, std::vector<double> values, Role r)
    : gx_(gx), gy_(gy), role_(r), v_(std::move(values)) {
    if (v_.size() != gx_.n * gy_.n) throw MismatchError("Field2D: sample count does not match grid");
}

Field1D Field2D::row_field(std::size_t j) const {
    return Field1D(gx_, std::vector<double>(row(j), row(j) + gx_.n), role_);
}

void Field2D::set_row(std::size_t j, const Field1D& f) {
    if (f.size() != gx_.n) throw MismatchError("Field2D::set_row: length mismatch");
    std::copy(f.data(), f.data() + gx_.n, row(j));
}

void Field2D::check() const { check_values(v_, role_, "Field2D"); }
double Field2D::max_abs() const { return vmax_abs(v_); }
double Field2D::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field2D::max() const { return *std::max_element(v_.begin(), v_.end()); }

Field1D ddx(const Field1D& f, int order) {
    Field1D out(f.grid(), Role::derived);
    spectral::deriv_1d(f.data(), out.data(), f.size(), 1.0, order);
    return out;
}

Field2D ddx(const Field2D& f, int order) {
    Field2D out(f.grid_x(), f.grid_y(), Role::derived);
    spectral::deriv_2d(f.data(), out.data(), f.nx(), f.ny(), 1.0, f.grid_y().period(), order, 0);
    return out;
}

Field2D ddy(const Field2D& f, int order) {
    Field2D out(f.grid_x(), f.grid_y(), Role::derived);
    spectral::deriv_2d(f.data(), out.data(), f.nx(), f.ny(), 1.0, f.grid_y().period(), 0, order);
    return out;
}

double integrate_x(const Field1D& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
    return s * f.grid().dx();
}

double integrate_xy(const Field2D& f) {
    // Row sums first, then rows in fixed order.
    double s = 0.0;
    for (std::size_t j = 0; j < f.ny(); ++j) {
        const double* r = f.row(j);
        double rs = 0.0;
        for (std::size_t i = 0; i < f.nx(); ++i) rs += r[i];
        s += rs;
    }
    return s * f.grid_x().dx() * f.grid_y().dy();
}

double norm_hk(const Field1D& f, int k) {
    if (k < 0 || k > 5) throw DomainError("norm_hk: k must lie in 0..5");
    const std::size_t n = f.size();
    std::vector<spectral::cplx> c(n / 2 + 1);
    spectral::forward_1d(f.data(), c.data(), n);
    // Parseval on the real transform; the Nyquist and zero modes appear once.
    double total = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        const double kk = 2.0 * std::numbers::pi * double(m);
        double w = 0.0, kp = 1.0;
        for (int j = 0; j <= k; ++j) {
            // odd derivatives of the Nyquist mode vanish on the grid
            if (!(j % 2 == 1 && m == n / 2)) w += kp;
            kp *= kk * kk;
        }
        const double mult = (m == 0 || m == n / 2) ? 1.0 : 2.0;
        total += mult * w * std::norm(c[m]);
    }
    return std::sqrt(total / (double(n) * double(n)));
}

namespace {

double lp_of(const double* v, std::size_t n, double cell, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
        return m;
    }
    if (!(p >= 1.0)) throw DomainError("norm_lp: p must be >= 1");
    double s = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
        return std::sqrt(s * cell);
    }
    for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(v[i]), p);
    return std::pow(s * cell, 1.0 / p);
}

}  // namespace

double norm_lp(const Field1D& f, double p) {
    return lp_of(f.data(), f.size(), f.grid().dx(), p);
}

double norm_lp(const Field2D& f, double p) {
    return lp_of(f.data(), f.size(), f.grid_x().dx() * f.grid_y().dy(), p);
}

double norm_l2(const Field2D& f) { return norm_lp(f, 2.0); }

double norm_grad(const Field2D& f) {
    const Field2D fx = ddx(f), fy = ddy(f);
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += fx[k] * fx[k] + fy[k] * fy[k];
    return std::sqrt(s * f.grid_x().dx() * f.grid_y().dy());
}

SplitMean split_mean(const Field2D& f) {
    SplitMean out{std::vector<double>(f.ny()), Field2D(f.grid_x(), f.grid_y(), Role::derived)};
    const double dx = f.grid_x().dx();
    for (std::size_t j = 0; j < f.ny(); ++j) {
        const double* r = f.row(j);
        double s = 0.0;
        for (std::size_t i = 0; i < f.nx(); ++i) s += r[i];
        const double mean = s * dx;
        out.f_bar[j] = mean;
        double* t = out.f_tilde.row(j);
        for (std::size_t i = 0; i < f.nx(); ++i) t[i] = r[i] - mean;
    }
    return out;
}

namespace {

template <class F, class Op>
F zip(const F& a, const F& b, Op op) {
    if (a.size() != b.size()) throw MismatchError("field arithmetic: size mismatch");
    F out = a;
    out.set_role(Role::derived);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = op(a[k], b[k]);
    return out;
}

template <class F>
F scale(double s, const F& a) {
    F out = a;
    out.set_role(Role::derived);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
    return out;
}

}  // namespace

Field1D operator+(const Field1D& a, const Field1D& b) { return zip(a, b, std::plus<>()); }
Field1D operator-(const Field1D& a, const Field1D& b) { return zip(a, b, std::minus<>()); }
Field1D operator*(const Field1D& a, const Field1D& b) { return zip(a, b, std::multiplies<>()); }
Field1D operator*(double s, const Field1D& a) { return scale(s, a); }
Field2D operator+(const Field2D& a, const Field2D& b) { return zip(a, b, std::plus<>()); }
Field2D operator-(const Field2D& a, const Field2D& b) { return zip(a, b, std::minus<>()); }
Field2D operator*(const Field2D& a, const Field2D& b) { return zip(a, b, std::multiplies<>()); }
Field2D operator*(double s, const Field2D& a) { return scale(s, a); }

// ---- checkpoint I/O -------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'L', 'O', 'W', 'N', 'S', 'F', '1'};

template <class T>
void put_le(std::ofstream& os, T v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::ifstream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw Error("load_field: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

void write_raw(const std::string& path, std::uint64_t nx, std::uint64_t ny, Role role,
               const std::vector<double>& v) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("save_field: cannot open " + path);
    os.write(kMagic, 8);
    put_le<std::uint64_t>(os, nx);
    put_le<std::uint64_t>(os, ny);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(role));
    put_le<std::uint32_t>(os, 0u);
    for (double x : v) put_le<double>(os, x);
    if (!os) throw Error("save_field: write failed for " + path);
}

struct Raw {
    std::uint64_t nx, ny;
    Role role;
    std::vector<double> v;
};

Raw read_raw(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("load_field: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw Error("load_field: bad magic in " + path);
    Raw r;
    r.nx = get_le<std::uint64_t>(is);
    r.ny = get_le<std::uint64_t>(is);
    const auto role = get_le<std::uint32_t>(is);
    (void)get_le<std::uint32_t>(is);
    if (role > 2) throw Error("load_field: unknown role tag");
    r.role = static_cast<Role>(role);
    if (r.nx == 0 || r.ny == 0 || r.nx * r.ny > (std::uint64_t(1) << 32))
        throw Error("load_field: implausible dimensions");
    r.v.resize(r.nx * r.ny);
    for (auto& x : r.v) x = get_le<double>(is);
    return r;
}

}  // namespace

void save_field(const std::string& path, const Field2D& f) {
    write_raw(path, f.nx(), f.ny(), f.role(), f.values());
}

void save_field(const std::string& path, const Field1D& f) {
    write_raw(path, f.size(), 1, f.role(), f.values());
}

Field2D load_field(const std::string& path, double half_length) {
    Raw r = read_raw(path);
    Field2D f(GridX(r.nx), GridY(r.ny, half_length), std::move(r.v), r.role);
    f.check();
    return f;
}

Field1D load_field1d(const std::string& path) {
    Raw r = read_raw(path);
    if (r.ny != 1) throw MismatchError("load_field1d: file holds a 2D field");
    Field1D f(GridX(r.nx), std::move(r.v), r.role);
    f.check();
    return f;
}

}  // namespace slowns

#include "slowns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace slowns::spectral {
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

// Plans are created once per shape and never destroyed; the new-array execute
// functions are thread safe, plan creation is not.
const PlanPair& plans(std::size_t nx, std::size_t ny) {
    static std::map<std::pair<std::size_t, std::size_t>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(nx, ny);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const std::size_t nc = (nx / 2 + 1) * ny;
    double* r = fftw_alloc_real(nx * ny);
    fftw_complex* c = fftw_alloc_complex(nc);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    if (ny == 1) {
        p.fwd = fftw_plan_dft_r2c_1d(int(nx), r, c, flags);
        p.bwd = fftw_plan_dft_c2r_1d(int(nx), c, r, flags);
    } else {
        p.fwd = fftw_plan_dft_r2c_2d(int(ny), int(nx), r, c, flags);
        p.bwd = fftw_plan_dft_c2r_2d(int(ny), int(nx), c, r, flags);
    }
    fftw_free(r);
    fftw_free(c);
    return cache.emplace(key, p).first->second;
}

std::vector<cplx>& scratch_c(std::size_t n) {
    thread_local std::vector<cplx> buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

std::vector<cplx>& scratch_c2(std::size_t n) {
    thread_local std::vector<cplx> buf;
    if (buf.size() < n) buf.resize(n);
    return buf;
}

inline fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

cplx ipow(double k, int order) {
    cplx f(1.0, 0.0);
    const cplx ik(0.0, k);
    for (int q = 0; q < order; ++q) f *= ik;
    return f;
}

}  // namespace

void forward_1d(const double* in, cplx* out, std::size_t n) {
    const auto& p = plans(n, 1);
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in), fc(out));
}

void backward_1d(const cplx* in, double* out, std::size_t n) {
    const auto& p = plans(n, 1);
    const std::size_t nc = n / 2 + 1;
    auto& tmp = scratch_c2(nc);
    std::copy(in, in + nc, tmp.begin());
    fftw_execute_dft_c2r(p.bwd, fc(tmp.data()), out);
    const double s = 1.0 / double(n);
    for (std::size_t i = 0; i < n; ++i) out[i] *= s;
}

void forward_2d(const double* in, cplx* out, std::size_t nx, std::size_t ny) {
    const auto& p = plans(nx, ny);
    fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in), fc(out));
}

void backward_2d(const cplx* in, double* out, std::size_t nx, std::size_t ny) {
    const auto& p = plans(nx, ny);
    const std::size_t nc = (nx / 2 + 1) * ny;
    auto& tmp = scratch_c2(nc);
    std::copy(in, in + nc, tmp.begin());
    fftw_execute_dft_c2r(p.bwd, fc(tmp.data()), out);
    const double s = 1.0 / double(nx * ny);
    for (std::size_t i = 0; i < nx * ny; ++i) out[i] *= s;
}

void deriv_1d(const double* in, double* out, std::size_t n, double period, int order) {
    if (order == 0) {
        std::copy(in, in + n, out);
        return;
    }
    const std::size_t nc = n / 2 + 1;
    auto& c = scratch_c(nc);
    forward_1d(in, c.data(), n);
    const double base = 2.0 * std::numbers::pi / period;
    for (std::size_t m = 0; m < nc; ++m) {
        if (order % 2 == 1 && m == n / 2) {
            c[m] = 0.0;
            continue;
        }
        c[m] *= ipow(base * double(m), order);
    }
    c[0] = 0.0;
    backward_1d(c.data(), out, n);
}

void deriv_2d(const double* in, double* out, std::size_t nx, std::size_t ny, double period_x,
              double period_y, int ox, int oy) {
    if (ox == 0 && oy == 0) {
        std::copy(in, in + nx * ny, out);
        return;
    }
    const std::size_t ncx = nx / 2 + 1;
    auto& c = scratch_c(ncx * ny);
    forward_2d(in, c.data(), nx, ny);
    const double bx = 2.0 * std::numbers::pi / period_x;
    const double by = 2.0 * std::numbers::pi / period_y;
    for (std::size_t j = 0; j < ny; ++j) {
        const long my = mode(j, ny);
        const bool ny_kill = (oy % 2 == 1) && j == ny / 2;
        const cplx fy = ipow(by * double(my), oy);
        for (std::size_t m = 0; m < ncx; ++m) {
            cplx& z = c[j * ncx + m];
            if (ny_kill || ((ox % 2 == 1) && m == nx / 2)) {
                z = 0.0;
                continue;
            }
            z *= fy * ipow(bx * double(m), ox);
        }
    }
    c[0] = 0.0;
    backward_2d(c.data(), out, nx, ny);
}

void dealias_1d(double* f, std::size_t n) {
    const std::size_t nc = n / 2 + 1;
    auto& c = scratch_c(nc);
    forward_1d(f, c.data(), n);
    for (std::size_t m = 0; m < nc; ++m)
        if (!keep_23(long(m), n)) c[m] = 0.0;
    backward_1d(c.data(), f, n);
}

void dealias_2d(double* f, std::size_t nx, std::size_t ny) {
    const std::size_t ncx = nx / 2 + 1;
    auto& c = scratch_c(ncx * ny);
    forward_2d(f, c.data(), nx, ny);
    for (std::size_t j = 0; j < ny; ++j) {
        const bool ky_ok = keep_23(mode(j, ny), ny);
        for (std::size_t m = 0; m < ncx; ++m)
            if (!ky_ok || !keep_23(long(m), nx)) c[j * ncx + m] = 0.0;
    }
    backward_2d(c.data(), f, nx, ny);
}

}  // namespace slowns::spectral

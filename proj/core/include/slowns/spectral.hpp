#pragma once

// Thin FFT layer used by the grid and solver code. Real-to-complex transforms
// on periodic grids; 2D arrays are row-major with x contiguous (index j*nx+i).

#include <complex>
#include <cstddef>
#include <vector>

namespace slowns::spectral {

using cplx = std::complex<double>;

// Signed mode index of slot m in a length-n transform.
inline long mode(std::size_t m, std::size_t n) {
    return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

inline bool keep_23(long m, std::size_t n) {
    return 3 * std::labs(m) <= static_cast<long>(n);  // |m| <= n/3
}

// Unnormalised forward transform: out has n/2+1 entries.
void forward_1d(const double* in, cplx* out, std::size_t n);
// Normalised inverse; `in` is left untouched.
void backward_1d(const cplx* in, double* out, std::size_t n);

// out has ny*(nx/2+1) entries, ky-major.
void forward_2d(const double* in, cplx* out, std::size_t nx, std::size_t ny);
void backward_2d(const cplx* in, double* out, std::size_t nx, std::size_t ny);

// d^order/dx^order on a grid of n points covering one period of length `period`.
void deriv_1d(const double* in, double* out, std::size_t n, double period, int order);

// Mixed derivative d^ox/dx^ox d^oy/dy^oy on an nx*ny periodic box.
void deriv_2d(const double* in, double* out, std::size_t nx, std::size_t ny, double period_x,
              double period_y, int ox, int oy);

// Zero every mode outside the 2/3 band, in place.
void dealias_1d(double* f, std::size_t n);
void dealias_2d(double* f, std::size_t nx, std::size_t ny);

}  // namespace slowns::spectral

#pragma once

#include <cmath>
#include <vector>

namespace slowns::detail {

// Preconditioned conjugate gradients for an SPD operator. x holds the initial
// guess on entry. Returns the iteration count.
template <class ApplyA, class ApplyM>
int pcg(const ApplyA& apply_a, const ApplyM& apply_m, const std::vector<double>& b,
        std::vector<double>& x, double tol, int max_iter) {
    const std::size_t n = b.size();
    auto dot = [n](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
        return s;
    };
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0;
    }
    std::vector<double> r(n), z(n), p(n), ap(n);
    apply_a(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    double rn = std::sqrt(dot(r, r));
    if (rn <= tol * bnorm) return 0;
    apply_m(r, z);
    p = z;
    double rz = dot(r, z);
    double best = rn;
    int stall = 0;
    for (int it = 1; it <= max_iter; ++it) {
        apply_a(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) return it;
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rn = std::sqrt(dot(r, r));
        if (rn <= tol * bnorm) return it;
        // Stop once roundoff prevents further progress.
        if (rn < 0.5 * best) {
            best = rn;
            stall = 0;
        } else if (++stall >= 20) {
            return it;
        }
        apply_m(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return max_iter;
}

}  // namespace slowns::detail

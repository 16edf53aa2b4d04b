#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace wft::num {

/// Root of a monotone function on [lo, hi], bisected until the bracket
/// cannot shrink any further in double precision.
template <class F>
double bisect(F&& f, double lo, double hi, double target = 0.0) {
    double flo = f(lo) - target;
    if (flo == 0.0) return lo;
    double fhi = f(hi) - target;
    if (fhi == 0.0) return hi;
    const bool inc = fhi > flo;
    for (int it = 0; it < 2000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid) - target;
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == inc) lo = mid;
        else hi = mid;
    }
    double a = std::abs(f(lo) - target), b = std::abs(f(hi) - target);
    return a <= b ? lo : hi;
}

/// Gauss-Legendre rule with N nodes on [-1, 1].
template <int N>
struct GaussLegendre {
    std::array<double, N> x{};
    std::array<double, N> w{};
    GaussLegendre() {
        for (int i = 0; i < N; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= N; ++k) {
                    double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (z * p1 - p0) / (z * z - 1.0);
                double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
    /// Integral of f over [a, b].
    template <class F>
    double integrate(F&& f, double a, double b) const {
        double h = 0.5 * (b - a), c = 0.5 * (a + b), s = 0.0;
        for (int i = 0; i < N; ++i) s += w[i] * f(c + h * x[i]);
        return s * h;
    }
};

const GaussLegendre<32>& gl32();

}  // namespace wft::num

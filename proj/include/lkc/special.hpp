#pragma once

// Scalar special functions used throughout: probabilists' Hermite
// polynomials, the standard Gaussian density/CDF, Legendre and normalized
// associated Legendre functions, Bessel J0, and a Gauss-Legendre rule.
// Everything is self-contained so the test oracles do not share code paths
// with an external library.

#include <cmath>
#include <cstdint>
#include <vector>

#include "lkc/errors.hpp"

namespace lkc {

inline constexpr int kHermiteMaxOrder = 64;

/// Probabilists' Hermite polynomial H_k(t): H_0 = 1, H_1 = t,
/// H_k = t H_{k-1} - (k-1) H_{k-2}.  E[H_j(Z) H_k(Z)] = k! delta_jk for
/// standard normal Z.
inline double hermite(int k, double t) {
    if (k < 0 || k > kHermiteMaxOrder)
        throw OrderTooLarge("hermite order " + std::to_string(k) + " outside [0, 64]");
    if (k == 0) return 1.0;
    double hm2 = 1.0, hm1 = t;
    for (int j = 2; j <= k; ++j) {
        double h = t * hm1 - double(j - 1) * hm2;
        hm2 = hm1;
        hm1 = h;
    }
    return hm1;
}

/// Standard normal density.
inline double gaussian_pdf(double u) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

/// Standard normal CDF via erfc; relative accuracy of libm erfc is well
/// below the 1e-12 contract on the whole line.
inline double gaussian_cdf(double u) {
    return 0.5 * std::erfc(-u / std::sqrt(2.0));
}

/// Legendre polynomial P_n(x) by the three-term recurrence.
inline double legendre(int n, double x) {
    if (n < 0) throw DomainError("legendre: negative degree");
    if (n == 0) return 1.0;
    double pm2 = 1.0, pm1 = x;
    for (int l = 2; l <= n; ++l) {
        double p = ((2.0 * l - 1.0) * x * pm1 - (l - 1.0) * pm2) / double(l);
        pm2 = pm1;
        pm1 = p;
    }
    return pm1;
}

/// d/dx P_n(x), used for Gauss-Legendre Newton polish.
inline double legendre_derivative(int n, double x) {
    if (n == 0) return 0.0;
    double pn = legendre(n, x), pnm1 = legendre(n - 1, x);
    return double(n) * (x * pn - pnm1) / (x * x - 1.0);
}

/// Fully normalized associated Legendre function
///   Pbar_{n,m}(x) = sqrt((2n+1)/(4 pi) * (n-m)!/(n+m)!) P_n^m(x),
/// without the Condon-Shortley sign, so that the real spherical-harmonic
/// family { Pbar_{n,0}, sqrt(2) Pbar_{n,m} cos(m phi), sqrt(2) Pbar_{n,m}
/// sin(m phi) } is orthonormal on the sphere.  Stable m-diagonal seed plus
/// upward degree recurrence.
inline double associated_legendre(int n, int m, double x) {
    if (m < 0 || m > n) throw DomainError("associated_legendre: need 0 <= m <= n");
    if (x < -1.0 || x > 1.0) throw DomainError("associated_legendre: |x| > 1");
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    // seed Pbar_{m,m}
    double pmm = std::sqrt(1.0 / (4.0 * M_PI));
    for (int k = 1; k <= m; ++k)
        pmm *= sx * std::sqrt((2.0 * k + 1.0) / (2.0 * k));
    if (n == m) return pmm;
    double pm1 = x * std::sqrt(2.0 * m + 3.0) * pmm; // Pbar_{m+1,m}
    if (n == m + 1) return pm1;
    double pm2 = pmm;
    for (int l = m + 2; l <= n; ++l) {
        double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        double p = a * (x * pm1 - b * pm2);
        pm2 = pm1;
        pm1 = p;
    }
    return pm1;
}

/// Bessel J0.  Ascending series below x = 12 (cancellation there costs at
/// most ~2 digits), Hankel asymptotic expansion beyond; both branches are
/// accurate to well under the 1e-8 contract.
inline double bessel_j0(double x) {
    x = std::fabs(x);
    if (x < 12.0) {
        const double q = -0.25 * x * x;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 40; ++k) {
            term *= q / (double(k) * k);
            sum += term;
            if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        }
        return sum;
    }
    // J0(x) ~ sqrt(2/(pi x)) [P(x) cos(x - pi/4) - Q(x) sin(x - pi/4)]
    const double z = 1.0 / (x * x);
    const double p = 1.0 + z * (-9.0 / 128.0 + z * (3675.0 / 32768.0 + z * (-2401245.0 / 4194304.0)));
    const double q = (1.0 / x) * (-1.0 / 8.0 + z * (75.0 / 1024.0 + z * (-59535.0 / 262144.0)));
    const double chi = x - 0.25 * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

/// Gauss-Legendre nodes/weights on [-1, 1].  Newton iteration from the
/// Chebyshev initial guess; machine precision for the sizes used here.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureRule gauss_legendre(int npts) {
    if (npts < 1) throw DomainError("gauss_legendre: need at least one node");
    QuadratureRule r;
    r.nodes.resize(npts);
    r.weights.resize(npts);
    for (int i = 0; i < npts; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));
        for (int it = 0; it < 100; ++it) {
            double f = legendre(npts, x);
            double df = legendre_derivative(npts, x);
            double dx = f / df;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double df = legendre_derivative(npts, x);
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * df * df);
    }
    return r;
}

} // namespace lkc

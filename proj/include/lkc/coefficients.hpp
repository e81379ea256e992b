#pragma once

// Closed-form constants of the Wiener chaos expansions of the three
// Lipschitz-Killing curvatures of excursion sets: the Hermite coefficients
// of the indicator (gamma), of the Gaussian density factor (beta), of the
// Euclidean norm in R^2 (alpha), the variance constants kappa of the first
// and second derivative fields, the pointwise Euler characteristic weights
// h, and the second-chaos reduction constants c_k.

#include <array>
#include <cmath>
#include <cstdint>

#include "lkc/errors.hpp"
#include "lkc/lattice.hpp"
#include "lkc/special.hpp"

namespace lkc {

enum class Manifold { Torus, Sphere };

inline const char* manifold_name(Manifold m) {
    return m == Manifold::Torus ? "torus" : "sphere";
}

// ---------------------------------------------------------------------------
// scalar coefficient families
// ---------------------------------------------------------------------------

/// Area chaos coefficient gamma_q(u): the q-th Hermite coefficient of the
/// indicator 1{. >= u}.  gamma_0 = 1 - Phi(u), gamma_q = H_{q-1}(u) phi(u).
inline double gamma_coeff(int q, double u) {
    if (q < 0) throw DomainError("gamma_coeff: negative order");
    if (q == 0) return 1.0 - gaussian_cdf(u);
    return hermite(q - 1, u) * gaussian_pdf(u);
}

/// Level coefficient beta_l(u) = H_l(u) phi(u) of the Gaussian density
/// factor in the boundary-length expansion.  beta_{l-1} = gamma_l for l >= 1.
inline double beta_coeff(int l, double u) {
    if (l < 0) throw DomainError("beta_coeff: negative order");
    return hermite(l, u) * gaussian_pdf(u);
}

inline constexpr int kAlphaMaxIndex = 16;

/// Hermite coefficient of the planar norm,
///   alpha_{2n,2m} = E[ |(Z1,Z2)| H_{2n}(Z1) H_{2m}(Z2) ],
/// in closed form: sqrt(pi/2) (2n)!(2m)!/(n! m!) 2^{-(n+m)} p_{n+m}(1/4)
/// where p_N(x) = sum_j (-1)^j (-1)^N C(N,j) (2j+1)!/(j!)^2 x^j.
/// Both indices must be even (odd ones vanish by symmetry) and at most 16.
/// Integer work is exact; the only rounding is the final division.
inline double alpha_coeff(int two_n, int two_m) {
    if (two_n < 0 || two_m < 0) throw DomainError("alpha_coeff: negative index");
    if (two_n % 2 != 0 || two_m % 2 != 0)
        throw OddIndex("alpha_coeff: odd index (coefficient vanishes; only even orders are tabulated)");
    if (two_n > kAlphaMaxIndex || two_m > kAlphaMaxIndex)
        throw OrderTooLarge("alpha_coeff: index above 16");
    const int n = two_n / 2, m = two_m / 2, N = n + m;

    // binomials C(a,b) small enough for long long
    auto binom = [](int a, int b) -> long long {
        long long r = 1;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    // p_N(1/4) = S / 4^N with S an exact integer:
    // (2j+1)!/(j!)^2 = (2j+1) C(2j,j)
    __int128 S = 0;
    for (int j = 0; j <= N; ++j) {
        __int128 term = binom(N, j);
        term *= (2 * j + 1);
        term *= binom(2 * j, j);
        __int128 pow4 = 1;
        for (int i = 0; i < N - j; ++i) pow4 *= 4;
        term *= pow4;
        if ((j + N) % 2 != 0) term = -term;
        S += term;
    }
    // prefactor (2n)!(2m)!/(n! m!) is an exact integer as well
    auto rising = [](int a) -> long long { // (2a)!/a!
        long long r = 1;
        for (int i = a + 1; i <= 2 * a; ++i) r *= i;
        return r;
    };
    const long long pref = rising(n) * rising(m);
    double p = static_cast<double>(S);
    for (int i = 0; i < N; ++i) p /= 4.0;
    return std::sqrt(M_PI / 2.0) * static_cast<double>(pref) * std::ldexp(p, -N);
}

// ---------------------------------------------------------------------------
// variance constants of the derivative fields
// ---------------------------------------------------------------------------

/// kappa_1..kappa_5: standard deviations / covariance combinations of the
/// first and second derivatives of the unit-variance wave.
///   kappa_1^2 = Var(d1 f)          kappa_3^2 = Var(d11 f)
///   kappa_2 kappa_3 = Cov(d11 f, d22 f)   kappa_4^2 = Var(d12 f)
///   kappa_5^2 = Var(d22 f | d11 f) residual scale
struct KappaSet {
    Manifold manifold = Manifold::Torus;
    long long n = 0;
    double eigenvalue = 0.0;
    double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0;
};

/// Torus constants; requires the frequency set for mu4.  Throws
/// EpcDegenerate when |mu4| = 1 (kappa4 or kappa5 vanishes).
inline KappaSet kappa_set(const FrequencySet& fs) {
    if (fs.epc_degenerate())
        throw EpcDegenerate("kappa_set: |mu4| = 1 for n = " + std::to_string(fs.n));
    KappaSet k;
    k.manifold = Manifold::Torus;
    k.n = fs.n;
    const double lam = fs.eigenvalue();
    const double m4 = fs.mu4;
    const double s = lam / (2.0 * std::sqrt(2.0));
    k.eigenvalue = lam;
    k.k1 = std::sqrt(lam / 2.0);
    k.k2 = s * (1.0 - m4) / std::sqrt(3.0 + m4);
    k.k3 = s * std::sqrt(3.0 + m4);
    k.k4 = s * std::sqrt(1.0 - m4);
    k.k5 = lam * std::sqrt(1.0 + m4) / std::sqrt(3.0 + m4);
    return k;
}

/// Sphere constants for degree n >= 2 (lambda = n(n+1) > 2 keeps kappa4 > 0).
inline KappaSet kappa_set_sphere(int n) {
    if (n < 2) throw DomainError("kappa_set_sphere: need degree n >= 2");
    KappaSet k;
    k.manifold = Manifold::Sphere;
    k.n = n;
    const double lam = double(n) * (n + 1.0);
    const double rl = std::sqrt(lam);
    const double s22 = 2.0 * std::sqrt(2.0);
    k.eigenvalue = lam;
    k.k1 = rl / std::sqrt(2.0);
    k.k2 = rl * (lam + 2.0) / (s22 * std::sqrt(3.0 * lam - 2.0));
    k.k3 = rl * std::sqrt(3.0 * lam - 2.0) / s22;
    k.k4 = rl * std::sqrt(lam - 2.0) / s22;
    k.k5 = lam * std::sqrt(lam - 2.0) / std::sqrt(3.0 * lam - 2.0);
    return k;
}

// ---------------------------------------------------------------------------
// pointwise Euler characteristic weights (torus)
// ---------------------------------------------------------------------------

/// Weights of the second-chaos projection of the Euler characteristic in
/// terms of the standardized fields Y_1..Y_5 plus the mixed Y_3 Y_5 weight.
struct HCoeffs {
    double h1 = 0, h2 = 0, h3 = 0, h4 = 0, h5 = 0, h35 = 0;
};

inline HCoeffs h_coeffs(const FrequencySet& fs, double u) {
    const double lam = fs.eigenvalue();
    const double m4 = fs.mu4;
    const double phi = gaussian_pdf(u);
    const double tail = gaussian_cdf(-u); // Phi(-u)
    const double c = lam / (4.0 * M_PI);
    HCoeffs h;
    h.h1 = -c * u * phi;
    h.h2 = h.h1;
    h.h3 = c * (2.0 * u * (1.0 + u * u) * phi / (3.0 + m4) + (1.0 - m4) * tail);
    h.h4 = -c * (1.0 - m4) * tail;
    h.h5 = c * u * (1.0 + u * u) * (1.0 + m4) * phi / (3.0 + m4);
    h.h35 = lam / (2.0 * std::sqrt(2.0) * M_PI) * std::sqrt(1.0 + m4) *
            (u * phi * (1.0 + u * u) + (3.0 + m4) * tail) / (3.0 + m4);
    return h;
}

/// The five quadratic-form constants that the h/kappa combination collapses
/// to.  Assembled from h and kappa exactly as the integration-by-parts
/// reduction groups them; the closed forms they must equal are in
/// epc_collapse_closed_form().
struct EpcCollapse {
    double A = 0, B = 0, C = 0, D = 0, E = 0;
};

inline EpcCollapse epc_collapse_assembled(const HCoeffs& h, const KappaSet& k) {
    EpcCollapse e;
    e.A = h.h35 / (k.k3 * k.k5) + h.h4 / (2.0 * k.k4 * k.k4) -
          h.h5 * k.k2 / (k.k3 * k.k5 * k.k5);
    e.B = h.h3 / (2.0 * k.k3 * k.k3) - k.k2 * h.h35 / (k.k3 * k.k3 * k.k5) +
          h.h5 * k.k2 * k.k2 / (2.0 * k.k3 * k.k3 * k.k5 * k.k5);
    e.C = h.h5 / (2.0 * k.k5 * k.k5);
    e.D = h.h1 / (2.0 * k.k1 * k.k1);
    e.E = h.h1 + 0.5 * (h.h3 + h.h4 + h.h5);
    return e;
}

inline EpcCollapse epc_collapse_closed_form(double lambda, double u) {
    const double phi = gaussian_pdf(u);
    EpcCollapse e;
    e.A = u * phi * (1.0 + u * u) / (4.0 * lambda * M_PI);
    e.B = u * phi * (1.0 + u * u) / (8.0 * lambda * M_PI);
    e.C = e.B;
    e.D = -u * phi / (4.0 * M_PI);
    e.E = lambda / (8.0 * M_PI) * hermite(1, u) * hermite(2, u) * phi;
    return e;
}

// ---------------------------------------------------------------------------
// reduction constants
// ---------------------------------------------------------------------------

/// c_k(u): the constant in front of (lambda/2)^{(2-k)/2} Int H_2(f) in the
/// second-chaos projection of L_k.
struct ReductionConstants {
    double u = 0;
    double c0 = 0, c1 = 0, c2 = 0;
};

inline ReductionConstants reduction_constants(double u) {
    ReductionConstants r;
    const double phi = gaussian_pdf(u);
    r.u = u;
    r.c2 = 0.5 * u * phi;
    r.c1 = 0.5 * std::sqrt(M_PI / 8.0) * u * u * phi;
    r.c0 = u * (u * u - 1.0) * phi / (4.0 * M_PI);
    return r;
}

} // namespace lkc

#pragma once

// Lattice points on circles: the frequency sets of Laplace eigenfunctions on
// the unit torus.  An eigenvalue 4*pi^2*n exists iff n is a sum of two
// integer squares; the eigenspace is spanned by exponentials indexed by
// Lambda_n = { xi in Z^2 : |xi|^2 = n }.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lkc/errors.hpp"

namespace lkc {

using LatticePoint = std::array<long long, 2>;

/// Exact rational value num/den, used where a spectral quantity must be
/// computed without rounding.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// The set of lattice points of squared norm n together with the two derived
/// spectral quantities that drive everything downstream: the multiplicity
/// N_n = |Lambda_n| and the fourth Fourier coefficient mu4 of the angular
/// measure (1/N_n) sum of point masses at xi/sqrt(n).
struct FrequencySet {
    long long n = 0;
    std::vector<LatticePoint> points; // sorted lexicographically
    long long multiplicity = 0;      // N_n
    double mu4 = 0.0;                // hat{mu}_n(4)
    Rational mu4_exact;              // same value, exact

    /// Torus eigenvalue 4*pi^2*n.
    double eigenvalue() const { return 4.0 * M_PI * M_PI * static_cast<double>(n); }

    /// |mu4| = 1: every direction lies on an axis (mu4 = +1) or a diagonal
    /// (mu4 = -1), and one of the standardized second-derivative fields of
    /// the Euler characteristic expansion degenerates.
    bool epc_degenerate() const {
        return mu4_exact.num == mu4_exact.den || mu4_exact.num == -mu4_exact.den;
    }
};

inline long long isqrt_ll(long long v) {
    if (v < 0) return -1;
    auto r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

/// True iff n = a^2 + b^2 has an integer solution.
inline bool is_representable(long long n) {
    if (n < 0) return false;
    for (long long a = 0; a * a <= n; ++a) {
        long long rem = n - a * a;
        long long b = isqrt_ll(rem);
        if (b * b == rem) return true;
    }
    return false;
}

/// Exact hat{mu}_n(4).  With cos(theta_xi) = xi1/sqrt(n) the multiple-angle
/// identity cos(4 theta) = 8 c^4 - 8 c^2 + 1 gives, per point,
///   cos(4 theta_xi) = (8 xi1^4 - 8 xi1^2 n + n^2) / n^2,
/// so the average over Lambda_n is a ratio of integers.  Magnitudes stay
/// below 2^63 for any n reachable in practice (the numerator sum is at most
/// N_n * 17 n^2).
inline Rational mu_hat4_exact(long long n, const std::vector<LatticePoint>& points) {
    long long num = 0;
    for (const auto& p : points) {
        const long long s = p[0] * p[0];
        num += 8 * s * s - 8 * s * n + n * n;
    }
    long long den = static_cast<long long>(points.size()) * n * n;
    long long g = std::gcd(std::abs(num), den);
    if (g > 0) { num /= g; den /= g; }
    return Rational{num, den};
}

/// Enumerate Lambda_n.  Throws NotRepresentable when the set is empty.
inline FrequencySet enumerate_frequencies(long long n) {
    if (n <= 0) throw NotRepresentable(n);
    FrequencySet fs;
    fs.n = n;
    for (long long a = -isqrt_ll(n); a <= isqrt_ll(n); ++a) {
        long long rem = n - a * a;
        long long b = isqrt_ll(rem);
        if (b >= 0 && b * b == rem) {
            fs.points.push_back({a, b});
            if (b != 0) fs.points.push_back({a, -b});
        }
    }
    if (fs.points.empty()) throw NotRepresentable(n);
    std::sort(fs.points.begin(), fs.points.end());
    fs.multiplicity = static_cast<long long>(fs.points.size());
    fs.mu4_exact = mu_hat4_exact(n, fs.points);
    fs.mu4 = fs.mu4_exact.value();
    return fs;
}

} // namespace lkc

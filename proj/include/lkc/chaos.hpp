#pragma once

// Wiener chaos projections evaluated pathwise on a sampled grid, and the
// reduction verifier that compares, realization by realization, the
// derivative-form second chaos of each curvature against its reduced form
//   c_k(u) (lambda/2)^{(2-k)/2} Int H_2(f).
//
// On the torus the grid quadrature is exact for the quartic field products
// involved, so the two forms agree to rounding; on the sphere the same
// holds for the boundary functional, while the Euler characteristic keeps
// a genuine non-chaos-2 remainder and is verified statistically.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lkc/coefficients.hpp"
#include "lkc/errors.hpp"
#include "lkc/field.hpp"
#include "lkc/geometry.hpp"
#include "lkc/sampler.hpp"

namespace lkc {

enum class ChaosForm { Derivative, Reduced };

inline constexpr int kIntegralHermiteMaxOrder = 8;
inline constexpr int kBoundaryChaosMaxOrder = 4;

/// Pathwise agreement thresholds, relative to 1 + |reduced form|.
inline constexpr double kPathwiseTolTorus = 1e-8;
inline constexpr double kPathwiseTolSphere = 1e-6;
/// Both forms must vanish at u = 0 to this absolute tolerance.
inline constexpr double kVanishTolAtZero = 1e-10;
/// EPC forms must vanish at u = +/-1 to 1e-8 * lambda.
inline constexpr double kEpcVanishTolFactor = 1e-8;

/// Int H_q(f) over the manifold.
inline double integral_hermite(const FieldGrid& g, int q) {
    if (q < 0 || q > kIntegralHermiteMaxOrder)
        throw OrderTooLarge("integral_hermite: order outside [0, 8]");
    return integrate(g, [&](std::size_t i) { return hermite(q, g.f[i]); });
}

/// Order-q chaos of the excursion area: gamma_q(u)/q! Int H_q(f).
inline double area_chaos(const FieldGrid& g, double u, int q) {
    if (q < 0 || q > kIntegralHermiteMaxOrder)
        throw OrderTooLarge("area_chaos: order outside [0, 8]");
    double fact = 1.0;
    for (int i = 2; i <= q; ++i) fact *= i;
    return gamma_coeff(q, u) / fact * integral_hermite(g, q);
}

/// (lambda/2)^{(2-k)/2} Int H_2(f) scaled by c_k(u): the reduced second
/// chaos of L_k.
inline double reduced_second_chaos(const FieldGrid& g, double u, int k) {
    const ReductionConstants rc = reduction_constants(u);
    const double ck = (k == 0 ? rc.c0 : k == 1 ? rc.c1 : rc.c2);
    const double scale = std::pow(g.spec.eigenvalue / 2.0, 0.5 * (2 - k));
    return ck * scale * integral_hermite(g, 2);
}

/// Second chaos of the boundary length.  Derivative form keeps the
/// normalized gradient components explicit:
///   (1/2) sqrt(lambda/2) [ beta_2 alpha_00 / 2 Int H_2(f)
///     + beta_0 alpha_20 / 2 (Int H_2(d1~) + Int H_2(d2~)) ],
/// with dj~ = dj / sqrt(lambda/2).  The reduced form is c_1(u)
/// sqrt(lambda/2) Int H_2(f); Green's identity makes them equal pathwise.
inline double boundary_second_chaos(const FieldGrid& g, double u, ChaosForm form) {
    if (form == ChaosForm::Reduced) return reduced_second_chaos(g, u, 1);
    const double lam = g.spec.eigenvalue;
    const double sd = std::sqrt(lam / 2.0);
    const double inv = 1.0 / sd;
    const double i_f = integral_hermite(g, 2);
    const double i_d1 = integrate(g, [&](std::size_t i) {
        const double t = g.d1[i] * inv;
        return t * t - 1.0;
    });
    const double i_d2 = integrate(g, [&](std::size_t i) {
        const double t = g.d2[i] * inv;
        return t * t - 1.0;
    });
    const double a00 = alpha_coeff(0, 0), a20 = alpha_coeff(2, 0);
    return 0.5 * sd * (0.5 * beta_coeff(2, u) * a00 * i_f +
                       0.5 * beta_coeff(0, u) * a20 * (i_d1 + i_d2));
}

/// Order-q chaos of the boundary length (q <= 4):
///   (1/2) sqrt(lambda/2) sum_{a=0}^{floor(q/2)} sum_{k=0}^{a}
///     alpha_{2k,2a-2k} beta_{q-2a}(u) / ((2k)! (2a-2k)! (q-2a)!)
///     Int H_{q-2a}(f) H_{2k}(d1~) H_{2a-2k}(d2~).
inline double boundary_chaos(const FieldGrid& g, double u, int q) {
    if (q < 0 || q > kBoundaryChaosMaxOrder)
        throw OrderNotSupported("boundary_chaos: order outside [0, 4]");
    const double lam = g.spec.eigenvalue;
    const double sd = std::sqrt(lam / 2.0);
    const double inv = 1.0 / sd;
    auto fact = [](int v) {
        double r = 1.0;
        for (int i = 2; i <= v; ++i) r *= i;
        return r;
    };
    double total = 0.0;
    for (int a = 0; 2 * a <= q; ++a)
        for (int k = 0; k <= a; ++k) {
            const int qf = q - 2 * a, q1 = 2 * k, q2 = 2 * (a - k);
            const double coeff = alpha_coeff(q1, q2) * beta_coeff(qf, u) /
                                 (fact(q1) * fact(q2) * fact(qf));
            const double mixed = integrate(g, [&](std::size_t i) {
                return hermite(qf, g.f[i]) * hermite(q1, g.d1[i] * inv) *
                       hermite(q2, g.d2[i] * inv);
            });
            total += coeff * mixed;
        }
    return 0.5 * sd * total;
}

/// Second chaos of the Euler characteristic.  The derivative form is the
/// standardized-Hessian expression
///   h35 Int Y3 Y5 + (1/2) sum_i h_i Int H_2(Y_i)
/// and is only defined on the torus; on the sphere the projection keeps a
/// remainder that the quadratic form does not capture, so only the reduced
/// form (plus the statistical verifier below) is provided there.
inline double epc_second_chaos(const FieldGrid& g, double u, ChaosForm form) {
    if (form == ChaosForm::Reduced) return reduced_second_chaos(g, u, 0);
    if (g.spec.manifold != Manifold::Torus)
        throw OrderNotSupported(
            "epc_second_chaos: derivative form is torus-only; on the sphere use "
            "the reduced form with the statistical verifier");
    const FrequencySet fs = enumerate_frequencies(g.spec.n);
    const KappaSet ks = kappa_set(fs);
    const HCoeffs h = h_coeffs(fs, u);
    const double r35 = ks.k2 / (ks.k3 * ks.k5);
    double i35 = 0, i1 = 0, i2 = 0, i3 = 0, i4 = 0, i5 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = g.weight[i];
        const double y1 = g.d1[i] / ks.k1;
        const double y2 = g.d2[i] / ks.k1;
        const double y3 = g.d11[i] / ks.k3;
        const double y4 = g.d12[i] / ks.k4;
        const double y5 = g.d22[i] / ks.k5 - r35 * g.d11[i];
        i35 += w * y3 * y5;
        i1 += w * (y1 * y1 - 1.0);
        i2 += w * (y2 * y2 - 1.0);
        i3 += w * (y3 * y3 - 1.0);
        i4 += w * (y4 * y4 - 1.0);
        i5 += w * (y5 * y5 - 1.0);
    }
    return h.h35 * i35 +
           0.5 * (h.h1 * i1 + h.h2 * i2 + h.h3 * i3 + h.h4 * i4 + h.h5 * i5);
}

// ---------------------------------------------------------------------------
// reduction verifier
// ---------------------------------------------------------------------------

struct ReductionCase {
    int k = 0;
    double u = 0.0;
    bool statistical = false;            // sphere EPC path
    std::vector<double> rel_errors;      // per replicate, pathwise cases
    double max_rel_error = 0.0;
    double correlation = 0.0;            // statistical case
    double fitted_slope = 0.0;           // regression of L0 on Int H_2
    double expected_slope = 0.0;         // c_0(u) lambda / 2
    bool pass = false;
};

struct ReductionReport {
    Manifold manifold = Manifold::Torus;
    long long n = 0;
    int replicates = 0;
    std::uint64_t seed = 0;
    int rows = 0, cols = 0;
    double pathwise_tol = 0.0;
    std::vector<ReductionCase> cases;
    bool pass = true;
};

/// Pathwise (and, for the sphere EPC, statistical) comparison of the two
/// second-chaos forms over R realizations.  Resolution 0 means default.
inline ReductionReport verify_reduction(Manifold m, long long n,
                                        const std::vector<double>& levels, int R,
                                        std::uint64_t seed, int rows = 0,
                                        int cols = 0) {
    ReductionReport rep;
    rep.manifold = m;
    rep.n = n;
    rep.replicates = R;
    rep.seed = seed;
    rep.pathwise_tol = (m == Manifold::Torus) ? kPathwiseTolTorus : kPathwiseTolSphere;

    FrequencySet fs;
    if (m == Manifold::Torus) {
        fs = enumerate_frequencies(n);
        if (rows <= 0) rows = torus_default_resolution(n);
        cols = rows;
    } else {
        if (rows <= 0) rows = sphere_default_resolution(static_cast<int>(n));
        if (cols <= 0) cols = rows;
    }
    rep.rows = rows;
    rep.cols = cols;

    const bool torus = (m == Manifold::Torus);
    const bool epc_pathwise = torus && !fs.epc_degenerate();

    // per-level cases for k = 2, 1, 0; the sphere EPC case correlates the
    // geometric chi estimate against Int H_2 instead of a pathwise identity
    for (int k = 2; k >= 0; --k)
        for (double u : levels) {
            ReductionCase c;
            c.k = k;
            c.u = u;
            c.statistical = (k == 0 && !epc_pathwise);
            c.expected_slope = reduction_constants(u).c0 * 0.5 *
                               (torus ? fs.eigenvalue() : double(n) * (n + 1.0));
            rep.cases.push_back(c);
        }

    std::vector<double> ih2(R);
    std::vector<std::vector<double>> chi_stat(rep.cases.size());
    for (int r = 0; r < R; ++r) {
        const std::uint64_t s = stream_seed(seed, static_cast<std::uint64_t>(r));
        FieldGrid g = torus ? sample_torus(fs, s, rows)
                            : sample_sphere(static_cast<int>(n), s, rows, cols);
        ih2[r] = integral_hermite(g, 2);
        for (std::size_t ci = 0; ci < rep.cases.size(); ++ci) {
            ReductionCase& c = rep.cases[ci];
            if (c.statistical) {
                chi_stat[ci].push_back(
                    static_cast<double>(euler_characteristic(g, c.u)));
                continue;
            }
            double df = 0.0, rf = 0.0;
            if (c.k == 2) {
                df = area_chaos(g, c.u, 2);
                rf = reduced_second_chaos(g, c.u, 2);
            } else if (c.k == 1) {
                df = boundary_second_chaos(g, c.u, ChaosForm::Derivative);
                rf = boundary_second_chaos(g, c.u, ChaosForm::Reduced);
            } else {
                df = epc_second_chaos(g, c.u, ChaosForm::Derivative);
                rf = epc_second_chaos(g, c.u, ChaosForm::Reduced);
            }
            c.rel_errors.push_back(std::fabs(df - rf) / (1.0 + std::fabs(rf)));
        }
    }

    for (std::size_t ci = 0; ci < rep.cases.size(); ++ci) {
        ReductionCase& c = rep.cases[ci];
        if (!c.statistical) {
            c.max_rel_error = c.rel_errors.empty()
                                  ? 0.0
                                  : *std::max_element(c.rel_errors.begin(),
                                                      c.rel_errors.end());
            c.pass = c.max_rel_error <= rep.pathwise_tol;
        } else {
            // correlate the geometric chi against the reduced form; when
            // c_0(u) = 0 (u in {-1, 0, 1}) fall back to Int H_2 itself
            const double dir = (c.expected_slope > 0.0)   ? 1.0
                               : (c.expected_slope < 0.0) ? -1.0
                                                          : 1.0;
            const std::vector<double>& chi = chi_stat[ci];
            double mx = 0, my = 0;
            for (int r = 0; r < R; ++r) { mx += ih2[r]; my += chi[r]; }
            mx /= R; my /= R;
            double sxx = 0, syy = 0, sxy = 0;
            for (int r = 0; r < R; ++r) {
                sxx += (ih2[r] - mx) * (ih2[r] - mx);
                syy += (chi[r] - my) * (chi[r] - my);
                sxy += (ih2[r] - mx) * (chi[r] - my);
            }
            c.correlation =
                (sxx > 0 && syy > 0) ? dir * sxy / std::sqrt(sxx * syy) : 0.0;
            c.fitted_slope = sxx > 0 ? sxy / sxx : 0.0;
            c.pass = c.correlation > 0.9;
        }
        rep.pass = rep.pass && c.pass;
    }
    return rep;
}

} // namespace lkc

#pragma once

// Gaussian random wave samplers.
//
// Torus: f(x) = N^{-1/2} sum_{xi in Lambda_n} a_xi e^{2 pi i <xi, x>} with
// i.i.d. standard complex Gaussians tied by a_{-xi} = conj(a_xi).  One
// complex draw per +/- orbit representative; the pair makes f real by
// construction.  On the M x M equispaced grid every phase is a multiple of
// 2 pi / M, so evaluation reduces to integer phase indexing into one
// cos/sin table, and the quadrature (weight 1/M^2) integrates products of
// up to four field factors exactly once M >= 4 ceil(sqrt(n)) + 1.
//
// Sphere: f = sqrt(4 pi/(2n+1)) [ g0 Pbar_{n,0} + sqrt(2) sum_m Pbar_{n,m}
// (g_m cos m phi + h_m sin m phi) ] with i.i.d. N(0,1) coefficients; the
// real basis is orthonormal, so Cov(f(x), f(y)) = P_n(cos d(x,y)) by the
// addition theorem and realness is structural.  Second derivatives come
// from the associated Legendre ODE, which keeps d11 + d22 = -lambda f exact
// at every node.

#include <cmath>
#include <cstdint>
#include <vector>

#include "lkc/errors.hpp"
#include "lkc/field.hpp"
#include "lkc/lattice.hpp"
#include "lkc/rng.hpp"
#include "lkc/special.hpp"

namespace lkc {

// ---------------------------------------------------------------------------
// torus
// ---------------------------------------------------------------------------

inline int torus_min_resolution(long long n) {
    return 4 * static_cast<int>(std::ceil(std::sqrt(double(n)))) + 1;
}

/// Default grid: at least 8 nodes per wavelength 1/sqrt(n), never below the
/// exact-quadrature floor.
inline int torus_default_resolution(long long n) {
    int ppw = static_cast<int>(std::ceil(8.0 * std::sqrt(double(n))));
    return std::max(ppw, torus_min_resolution(n));
}

/// Coefficients of one torus realization; evaluable at arbitrary points.
struct TorusWave {
    const long long n;
    std::vector<LatticePoint> reps; // one per {xi, -xi} orbit
    std::vector<double> re, im;     // a_rep = re + i im, Var(re) = Var(im) = 1/2

    static TorusWave draw(const FrequencySet& fs, std::uint64_t seed) {
        TorusWave w{fs.n, {}, {}, {}};
        for (const auto& p : fs.points)
            if (p[0] > 0 || (p[0] == 0 && p[1] > 0)) w.reps.push_back(p);
        Philox4x32 rng(seed);
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (std::size_t r = 0; r < w.reps.size(); ++r) {
            auto g = rng.gaussian_pair();
            w.re.push_back(g[0] * inv_sqrt2);
            w.im.push_back(g[1] * inv_sqrt2);
        }
        return w;
    }

    /// out = { f, d1, d2, d11, d12, d22 } at x = (x1, x2).
    void eval(double x1, double x2, double out[6]) const {
        double su = 0, s1v = 0, s2v = 0, s11u = 0, s12u = 0, s22u = 0;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            const double k1 = double(reps[r][0]), k2 = double(reps[r][1]);
            const double ph = 2.0 * M_PI * (k1 * x1 + k2 * x2);
            const double c = std::cos(ph), s = std::sin(ph);
            const double u = re[r] * c - im[r] * s;
            const double v = re[r] * s + im[r] * c;
            su += u;
            s1v += k1 * v;
            s2v += k2 * v;
            s11u += k1 * k1 * u;
            s12u += k1 * k2 * u;
            s22u += k2 * k2 * u;
        }
        const double N = 2.0 * double(reps.size());
        const double a = 2.0 / std::sqrt(N);
        const double tp = 2.0 * M_PI;
        out[0] = a * su;
        out[1] = -a * tp * s1v;
        out[2] = -a * tp * s2v;
        out[3] = -a * tp * tp * s11u;
        out[4] = -a * tp * tp * s12u;
        out[5] = -a * tp * tp * s22u;
    }
};

/// Sample one realization on the M x M grid.
inline FieldGrid sample_torus(const FrequencySet& fs, std::uint64_t seed, int M) {
    if (M < torus_min_resolution(fs.n))
        throw ResolutionTooLow("sample_torus: M = " + std::to_string(M) + " < " +
                               std::to_string(torus_min_resolution(fs.n)) +
                               " required for n = " + std::to_string(fs.n));
    TorusWave w = TorusWave::draw(fs, seed);

    FieldGrid g;
    g.spec = {Manifold::Torus, fs.n, fs.eigenvalue(), seed};
    g.rows = g.cols = M;
    g.allocate();

    std::vector<double> tc(M), ts(M);
    for (int t = 0; t < M; ++t) {
        tc[t] = std::cos(2.0 * M_PI * t / M);
        ts[t] = std::sin(2.0 * M_PI * t / M);
    }
    const double N = 2.0 * double(w.reps.size());
    const double a = 2.0 / std::sqrt(N);
    const double tp = 2.0 * M_PI;
    const double wq = 1.0 / (double(M) * M);

    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const std::size_t id = g.idx(i, j);
            g.x1[id] = double(i) / M;
            g.x2[id] = double(j) / M;
            g.weight[id] = wq;
        }

    for (std::size_t r = 0; r < w.reps.size(); ++r) {
        const long long k1 = w.reps[r][0], k2 = w.reps[r][1];
        const double f1 = double(k1), f2 = double(k2);
        const double c11 = f1 * f1, c12 = f1 * f2, c22 = f2 * f2;
        const double wr = w.re[r], wi = w.im[r];
        const int step1 = static_cast<int>(((k1 % M) + M) % M);
        const int step2 = static_cast<int>(((k2 % M) + M) % M);
        int prow = 0;
        for (int i = 0; i < M; ++i) {
            int p = prow;
            std::size_t id = g.idx(i, 0);
            for (int j = 0; j < M; ++j, ++id) {
                const double c = tc[p], s = ts[p];
                const double u = wr * c - wi * s;
                const double v = wr * s + wi * c;
                g.f[id] += u;
                g.d1[id] += f1 * v;
                g.d2[id] += f2 * v;
                g.d11[id] += c11 * u;
                g.d12[id] += c12 * u;
                g.d22[id] += c22 * u;
                p += step2;
                if (p >= M) p -= M;
            }
            prow += step1;
            if (prow >= M) prow -= M;
        }
    }
    for (std::size_t id = 0; id < g.size(); ++id) {
        g.f[id] *= a;
        g.d1[id] *= -a * tp;
        g.d2[id] *= -a * tp;
        g.d11[id] *= -a * tp * tp;
        g.d12[id] *= -a * tp * tp;
        g.d22[id] *= -a * tp * tp;
    }
    return g;
}

// ---------------------------------------------------------------------------
// sphere
// ---------------------------------------------------------------------------

inline int sphere_min_resolution(int n) { return 4 * n; }

inline int sphere_default_resolution(int n) {
    double lam = double(n) * (n + 1.0);
    return std::max(sphere_min_resolution(n), int(std::ceil(4.0 * std::sqrt(lam))));
}

inline constexpr double kPolarCutoff = 1e-3;

namespace detail {

/// Rows Pbar_{n,m} and Pbar_{n-1,m} for all m at x = cos(theta).
inline void legendre_rows(int n, double x, std::vector<double>& bn,
                          std::vector<double>& bn1) {
    bn.assign(n + 1, 0.0);
    bn1.assign(n + 1, 0.0);
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = std::sqrt(1.0 / (4.0 * M_PI));
    for (int m = 0; m <= n; ++m) {
        // ascend from (m,m) to (n,m), recording degrees n-1 and n
        if (m == n) {
            bn[m] = pmm;
            // bn1[n] stays zero: Pbar_{n-1,n} does not exist
        } else {
            double plm1 = pmm; // degree l-1
            double pl = x * std::sqrt(2.0 * m + 3.0) * pmm;
            for (int l = m + 2; l <= n; ++l) {
                double a = std::sqrt((4.0 * double(l) * l - 1.0) / (double(l) * l - double(m) * m));
                double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                     (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
                double p = a * (x * pl - b * plm1);
                plm1 = pl;
                pl = p;
            }
            bn[m] = pl;
            bn1[m] = plm1;
        }
        pmm *= sx * std::sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0));
    }
}

} // namespace detail

/// Coefficients of one spherical realization.
struct SphereWave {
    int n = 0;
    std::vector<double> g; // layout: g0, g1, h1, g2, h2, ...

    static SphereWave draw(int n, std::uint64_t seed) {
        SphereWave w;
        w.n = n;
        w.g.resize(2 * n + 1);
        Philox4x32 rng(seed);
        w.g[0] = rng.gaussian_pair()[0];
        for (int m = 1; m <= n; ++m) {
            auto p = rng.gaussian_pair();
            w.g[2 * m - 1] = p[0];
            w.g[2 * m] = p[1];
        }
        return w;
    }

    double pole_north() const { return g[0]; }
    double pole_south() const { return (n % 2 == 0) ? g[0] : -g[0]; }

    /// out = { f, d_theta, d_phi/sin, covariant second derivatives } at
    /// (theta, phi); theta must stay away from the poles.
    void eval(double theta, double phi, double out[6]) const {
        const double x = std::cos(theta), st = std::sin(theta);
        const double ct = x / st;
        const double lam = double(n) * (n + 1.0);
        std::vector<double> bn, bn1;
        detail::legendre_rows(n, x, bn, bn1);
        const double C = std::sqrt(4.0 * M_PI / (2.0 * n + 1.0));
        double F = 0, Ft = 0, Fp = 0, Ftt = 0, Ftp = 0, Fpp = 0;
        for (int m = 0; m <= n; ++m) {
            const double e = (m < n)
                ? std::sqrt((double(n) * n - double(m) * m) * (2.0 * n + 1.0) / (2.0 * n - 1.0))
                : 0.0;
            const double B = bn[m];
            const double Bp = (double(n) * x * B - e * bn1[m]) / st;
            const double Bpp = -ct * Bp - (lam - double(m) * m / (st * st)) * B;
            double T, Tp;
            if (m == 0) {
                T = C * g[0];
                Tp = 0.0;
            } else {
                const double cm = std::cos(m * phi), sm = std::sin(m * phi);
                const double gm = g[2 * m - 1], hm = g[2 * m];
                T = C * std::sqrt(2.0) * (gm * cm + hm * sm);
                Tp = C * std::sqrt(2.0) * m * (-gm * sm + hm * cm);
            }
            F += B * T;
            Ft += Bp * T;
            Fp += B * Tp;
            Ftt += Bpp * T;
            Ftp += Bp * Tp;
            Fpp += B * (-double(m) * m * T);
        }
        out[0] = F;
        out[1] = Ft;
        out[2] = Fp / st;
        out[3] = Ftt;
        out[4] = (Ftp - ct * Fp) / st;
        out[5] = Fpp / (st * st) + ct * Ft;
    }
};

/// Sample one realization on a Gauss-Legendre x uniform longitude grid.
inline FieldGrid sample_sphere(int n, std::uint64_t seed, int m_theta, int m_phi) {
    if (n < 2) throw DomainError("sample_sphere: need degree n >= 2");
    if (m_theta < sphere_min_resolution(n) || m_phi < sphere_min_resolution(n))
        throw ResolutionTooLow("sample_sphere: resolution below 4n = " +
                               std::to_string(sphere_min_resolution(n)));
    SphereWave w = SphereWave::draw(n, seed);
    QuadratureRule gl = gauss_legendre(m_theta);

    // GL nodes come out descending in cos(theta) = ascending in theta; drop
    // anything inside the polar cutoff (never triggered at sane sizes).
    std::vector<double> thetas, glw;
    double excluded = 0.0;
    int excluded_rows = 0;
    for (int i = 0; i < m_theta; ++i) {
        double th = std::acos(gl.nodes[i]);
        if (th < kPolarCutoff || th > M_PI - kPolarCutoff) {
            ++excluded_rows;
            excluded += gl.weights[i] * 2.0 * M_PI;
            continue;
        }
        thetas.push_back(th);
        glw.push_back(gl.weights[i]);
    }

    FieldGrid g;
    g.spec = {Manifold::Sphere, n, double(n) * (n + 1.0), seed};
    g.rows = static_cast<int>(thetas.size());
    g.cols = m_phi;
    g.allocate();
    g.theta_nodes = thetas;
    g.pole_north = w.pole_north();
    g.pole_south = w.pole_south();
    g.excluded_rows = excluded_rows;
    g.excluded_weight = excluded;

    const double C = std::sqrt(4.0 * M_PI / (2.0 * n + 1.0));
    const double lam = g.spec.eigenvalue;
    const double dphi = 2.0 * M_PI / m_phi;

    // angular factors T_m(phi_j) and their phi-derivatives, C folded in
    std::vector<double> T((n + 1) * m_phi), Tp((n + 1) * m_phi);
    for (int j = 0; j < m_phi; ++j) {
        T[j] = C * w.g[0];
        Tp[j] = 0.0;
    }
    for (int m = 1; m <= n; ++m) {
        const double gm = w.g[2 * m - 1], hm = w.g[2 * m];
        const double s2 = std::sqrt(2.0);
        for (int j = 0; j < m_phi; ++j) {
            const double cm = std::cos(m * dphi * j), sm = std::sin(m * dphi * j);
            T[m * m_phi + j] = C * s2 * (gm * cm + hm * sm);
            Tp[m * m_phi + j] = C * s2 * m * (-gm * sm + hm * cm);
        }
    }

    std::vector<double> bn, bn1;
    std::vector<double> F(m_phi), Ft(m_phi), Fp(m_phi), Ftt(m_phi), Ftp(m_phi), Fpp(m_phi);
    for (int i = 0; i < g.rows; ++i) {
        const double th = thetas[i];
        const double x = std::cos(th), st = std::sin(th), ct = x / st;
        detail::legendre_rows(n, x, bn, bn1);
        std::fill(F.begin(), F.end(), 0.0);
        std::fill(Ft.begin(), Ft.end(), 0.0);
        std::fill(Fp.begin(), Fp.end(), 0.0);
        std::fill(Ftt.begin(), Ftt.end(), 0.0);
        std::fill(Ftp.begin(), Ftp.end(), 0.0);
        std::fill(Fpp.begin(), Fpp.end(), 0.0);
        for (int m = 0; m <= n; ++m) {
            const double e = (m < n)
                ? std::sqrt((double(n) * n - double(m) * m) * (2.0 * n + 1.0) / (2.0 * n - 1.0))
                : 0.0;
            const double B = bn[m];
            const double Bp = (double(n) * x * B - e * bn1[m]) / st;
            const double Bpp = -ct * Bp - (lam - double(m) * m / (st * st)) * B;
            const double m2 = double(m) * m;
            const double* tm = &T[m * m_phi];
            const double* tpm = &Tp[m * m_phi];
            for (int j = 0; j < m_phi; ++j) {
                F[j] += B * tm[j];
                Ft[j] += Bp * tm[j];
                Fp[j] += B * tpm[j];
                Ftt[j] += Bpp * tm[j];
                Ftp[j] += Bp * tpm[j];
                Fpp[j] -= m2 * B * tm[j];
            }
        }
        const double wrow = glw[i] * dphi;
        for (int j = 0; j < m_phi; ++j) {
            const std::size_t id = g.idx(i, j);
            g.x1[id] = th;
            g.x2[id] = dphi * j;
            g.weight[id] = wrow;
            g.f[id] = F[j];
            g.d1[id] = Ft[j];
            g.d2[id] = Fp[j] / st;
            g.d11[id] = Ftt[j];
            g.d12[id] = (Ftp[j] - ct * Fp[j]) / st;
            g.d22[id] = Fpp[j] / (st * st) + ct * Ft[j];
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// exact covariances
// ---------------------------------------------------------------------------

/// Torus: r(x - y) = N^{-1} sum_xi cos(2 pi <xi, x-y>).
/// Sphere: P_n(cos d(x, y)).  Points are (x1, x2) resp. (theta, phi).
inline double covariance_theoretical(Manifold m, long long n, const double x[2],
                                     const double y[2]) {
    if (m == Manifold::Torus) {
        FrequencySet fs = enumerate_frequencies(n);
        double s = 0.0;
        for (const auto& p : fs.points)
            s += std::cos(2.0 * M_PI * (double(p[0]) * (x[0] - y[0]) +
                                        double(p[1]) * (x[1] - y[1])));
        return s / double(fs.multiplicity);
    }
    double cd = std::cos(x[0]) * std::cos(y[0]) +
                std::sin(x[0]) * std::sin(y[0]) * std::cos(x[1] - y[1]);
    cd = std::min(1.0, std::max(-1.0, cd));
    return legendre(static_cast<int>(n), cd);
}

} // namespace lkc

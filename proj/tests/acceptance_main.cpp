// Acceptance gate: eight criteria, each printed as one PASS/FAIL line with
// the measured numbers and its wall time.  Run everything (no arguments) or
// a single criterion with --only N.  Exit status is the number of failures.
//
// Tolerances and ensemble sizes are pinned here on purpose; loosening them
// is a code change, not a flag.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "lkc/chaos.hpp"
#include "lkc/geometry.hpp"
#include "lkc/sampler.hpp"

using namespace lkc;

namespace {

// shared knobs, one place
constexpr long long kLatticeScanMax = 10000;     // criterion 1
constexpr double kRationalTol = 1e-12;           // criteria 1, 2
constexpr double kCollapseTol = 1e-12;           // criterion 2
constexpr double kOracleTol = 1e-12;             // criterion 2
constexpr int kReductionSeeds = 50;              // criterion 3
constexpr double kReductionTol = 1e-8;           // criterion 3
constexpr int kVarianceReps = 2000;              // criterion 4
constexpr double kVarianceTol = 0.15;            // criterion 4
constexpr int kMeanAreaReps = 500;               // criterion 5
constexpr double kMeanAreaSigmas = 3.0;          // criterion 5
constexpr int kDominanceDegree = 50;             // criterion 6
constexpr int kDominanceReps = 500;              // criterion 6
constexpr double kDominanceLevel = 1.0;          // criterion 6
constexpr double kAreaCorrMin = 0.9;             // criterion 6
constexpr double kLengthCorrMin = 0.85;          // criterion 6
constexpr int kEstimatorReps = 20;               // criterion 7
constexpr int kEstimatorRes = 1024;              // criterion 7
constexpr double kEstimatorEps = 0.2;            // criterion 7
constexpr double kEstimatorTol = 0.02;           // criterion 7
constexpr int kCovarianceReps = 2000;            // criterion 8
constexpr double kHilbTol = 0.05;                // criterion 8

double rel_err(double a, double b) { return std::fabs(a - b) / (1.0 + std::fabs(b)); }

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < m; ++i) { mx += x[i]; my += y[i]; }
    mx /= double(m); my /= double(m);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

// ---------------------------------------------------------------------------
// 1. lattice enumeration vs brute force
// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    int representable = 0;
    for (long long n = 1; n <= kLatticeScanMax; ++n) {
        // brute-force point count and exact fourth angular moment
        long long count = 0;
        __int128 quartic = 0; // sum of a^4 - 6 a^2 b^2 + b^4 over all points
        const long long amax = static_cast<long long>(std::floor(std::sqrt(double(n))));
        for (long long a = -amax; a <= amax; ++a) {
            const long long r = n - a * a;
            long long b = static_cast<long long>(std::llround(std::sqrt(double(r))));
            while (b * b > r) --b;
            while ((b + 1) * (b + 1) <= r) ++b;
            if (b * b != r) continue;
            const long long bs[2] = {b, -b};
            const int nb = (b == 0) ? 1 : 2;
            for (int t = 0; t < nb; ++t) {
                ++count;
                const long long bb = bs[t];
                quartic += static_cast<__int128>(a * a * a * a) -
                           6 * static_cast<__int128>(a * a) * (bb * bb) +
                           static_cast<__int128>(bb * bb * bb * bb);
            }
        }
        if (count == 0) {
            bool threw = false;
            try {
                enumerate_frequencies(n);
            } catch (const NotRepresentable&) {
                threw = true;
            }
            if (!threw) {
                o.pass = false;
                o.detail = "n=" + std::to_string(n) + " accepted but has no lattice points";
                return o;
            }
            continue;
        }
        ++representable;
        const FrequencySet fs = enumerate_frequencies(n);
        if (fs.multiplicity != count) {
            o.pass = false;
            o.detail = "n=" + std::to_string(n) + " multiplicity " +
                       std::to_string(fs.multiplicity) + " vs brute " +
                       std::to_string(count);
            return o;
        }
        // cross-multiplied rational equality: quartic / (count n^2) == num/den
        const __int128 lhs = quartic * fs.mu4_exact.den;
        const __int128 rhs = static_cast<__int128>(fs.mu4_exact.num) * count * n * n;
        if (lhs != rhs) {
            o.pass = false;
            o.detail = "n=" + std::to_string(n) + " fourth moment mismatch";
            return o;
        }
    }
    const FrequencySet f25 = enumerate_frequencies(25);
    const FrequencySet f5 = enumerate_frequencies(5);
    const bool exact25 = f25.mu4_exact.num == -143 && f25.mu4_exact.den == 625;
    const bool exact5 = f5.mu4_exact.num == -7 && f5.mu4_exact.den == 25;
    const bool val25 = std::fabs(f25.mu4 - (-143.0 / 625.0)) <= kRationalTol;
    const bool val5 = std::fabs(f5.mu4 - (-7.0 / 25.0)) <= kRationalTol;
    o.pass = exact25 && exact5 && val25 && val5;
    std::ostringstream d;
    d << representable << " representable n <= " << kLatticeScanMax
      << ", mu4(25)=" << f25.mu4_exact.num << "/" << f25.mu4_exact.den
      << ", mu4(5)=" << f5.mu4_exact.num << "/" << f5.mu4_exact.den;
    o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------------------
// 2. coefficient collapse plus an independent norm-moment oracle
// ---------------------------------------------------------------------------

// Local Hermite recurrence, deliberately not the library's.
double herm_local(int k, double t) {
    double p0 = 1.0, p1 = t;
    if (k == 0) return p0;
    for (int j = 2; j <= k; ++j) {
        const double p2 = t * p1 - double(j - 1) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// E[ |Z| H_{2n}(Z1) H_{2m}(Z2) ] for a standard bivariate Gaussian, computed
// without the library: the angular average of the Hermite product is a
// polynomial of degree n+m in rho = r^2 (recovered from exact trapezoid
// values at integer rho), and the radial integrals are the exact moments
// int_0^inf r^{2k+2} e^{-r^2/2} dr = sqrt(pi/2) (2k+1)!!.
double norm_moment_oracle(int two_n, int two_m) {
    const int N = two_n / 2 + two_m / 2;
    const int K = 4 * (two_n + two_m) + 8; // exact for trig degree < K
    std::vector<std::vector<double>> A(N + 1, std::vector<double>(N + 2, 0.0));
    for (int i = 0; i <= N; ++i) {
        const double rho = double(i + 1);
        const double r = std::sqrt(rho);
        double s = 0.0;
        for (int j = 0; j < K; ++j) {
            const double th = 2.0 * M_PI * double(j) / double(K);
            s += herm_local(two_n, r * std::cos(th)) *
                 herm_local(two_m, r * std::sin(th));
        }
        double pk = 1.0;
        for (int k = 0; k <= N; ++k) {
            A[i][k] = pk;
            pk *= rho;
        }
        A[i][N + 1] = s / double(K);
    }
    // Gaussian elimination with partial pivoting on the (N+1) x (N+1) system
    for (int c = 0; c <= N; ++c) {
        int p = c;
        for (int r = c + 1; r <= N; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[p][c])) p = r;
        std::swap(A[c], A[p]);
        for (int r = 0; r <= N; ++r) {
            if (r == c) continue;
            const double m = A[r][c] / A[c][c];
            for (int k = c; k <= N + 1; ++k) A[r][k] -= m * A[c][k];
        }
    }
    double out = 0.0;
    double dfact = 1.0; // (2k+1)!!
    for (int k = 0; k <= N; ++k) {
        out += (A[k][N + 1] / A[k][k]) * dfact;
        dfact *= double(2 * k + 3);
    }
    return std::sqrt(M_PI / 2.0) * out;
}

Outcome criterion2() {
    Outcome o;
    const long long ns[] = {5, 25, 65};
    const double us[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    double worst = 0.0;
    for (long long n : ns) {
        const FrequencySet fs = enumerate_frequencies(n);
        const KappaSet ks = kappa_set(fs);
        for (double u : us) {
            const EpcCollapse a = epc_collapse_assembled(h_coeffs(fs, u), ks);
            const EpcCollapse c = epc_collapse_closed_form(fs.eigenvalue(), u);
            worst = std::max({worst, rel_err(a.A, c.A), rel_err(a.B, c.B),
                              rel_err(a.C, c.C), rel_err(a.D, c.D),
                              rel_err(a.E, c.E)});
        }
    }
    if (worst > kCollapseTol) {
        o.pass = false;
        o.detail = "collapse rel error " + format_double(worst);
        return o;
    }

    // the two closed-form norm-moment values, three ways each
    const double root = std::sqrt(M_PI / 2.0);
    double oracle_worst = 0.0;
    const int idx[4][2] = {{0, 0}, {2, 0}, {2, 2}, {4, 0}};
    for (const auto& ij : idx)
        oracle_worst = std::max(oracle_worst,
                                rel_err(alpha_coeff(ij[0], ij[1]),
                                        norm_moment_oracle(ij[0], ij[1])));
    oracle_worst = std::max(oracle_worst, rel_err(norm_moment_oracle(0, 0), root));
    oracle_worst =
        std::max(oracle_worst, rel_err(norm_moment_oracle(2, 0), root / 2.0));

    // boundary-length q = 0 prefactor against the oracle moment: the grid
    // assembly must equal (1/2) sqrt(lambda/2) E|Z| phi(u) area
    const double a00 = norm_moment_oracle(0, 0);
    double prefactor_worst = 0.0;
    for (long long n : ns) {
        const FrequencySet fs = enumerate_frequencies(n);
        const FieldGrid g = sample_torus(fs, 7, torus_default_resolution(n));
        for (double u : us) {
            const double lib = boundary_chaos(g, u, 0);
            const double want =
                0.5 * std::sqrt(fs.eigenvalue() / 2.0) * a00 * gaussian_pdf(u);
            prefactor_worst = std::max(prefactor_worst, rel_err(lib, want));
        }
    }
    o.pass = oracle_worst <= kOracleTol && prefactor_worst <= kOracleTol;
    o.detail = "collapse " + format_double(worst) + ", moments " +
               format_double(oracle_worst) + ", prefactor " +
               format_double(prefactor_worst);
    return o;
}

// ---------------------------------------------------------------------------
// 3. pathwise second-chaos reduction on the torus
// ---------------------------------------------------------------------------

Outcome criterion3() {
    Outcome o;
    const long long ns[] = {5, 25, 65};
    const double us[] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    double worst = 0.0, worst_zero = 0.0, worst_epc1 = 0.0;
    for (long long n : ns) {
        const FrequencySet fs = enumerate_frequencies(n);
        const double lam = fs.eigenvalue();
        const int M = torus_default_resolution(n);
        for (int s = 0; s < kReductionSeeds; ++s) {
            const FieldGrid g = sample_torus(fs, 300 + std::uint64_t(s), M);
            const double ih2 = integral_hermite(g, 2);
            for (double u : us) {
                const ReductionConstants rc = reduction_constants(u);
                const double bl = boundary_second_chaos(g, u, ChaosForm::Derivative);
                const double bl_rhs = rc.c1 * std::sqrt(lam / 2.0) * ih2;
                const double ep = epc_second_chaos(g, u, ChaosForm::Derivative);
                const double ep_rhs = lam / (8.0 * M_PI) * hermite(1, u) *
                                      hermite(2, u) * gaussian_pdf(u) * ih2;
                worst = std::max({worst, rel_err(bl, bl_rhs), rel_err(ep, ep_rhs)});
                if (u == 1.0 || u == -1.0)
                    worst_epc1 = std::max(worst_epc1, std::fabs(ep) / lam);
            }
            worst_zero = std::max(
                {worst_zero,
                 std::fabs(boundary_second_chaos(g, 0.0, ChaosForm::Derivative)),
                 std::fabs(epc_second_chaos(g, 0.0, ChaosForm::Derivative))});
        }
    }
    o.pass = worst <= kReductionTol && worst_zero <= kVanishTolAtZero &&
             worst_epc1 <= kEpcVanishTolFactor;
    o.detail = "max rel " + format_double(worst) + ", at u=0 " +
               format_double(worst_zero) + ", EPC/lambda at |u|=1 " +
               format_double(worst_epc1);
    return o;
}

// ---------------------------------------------------------------------------
// 4. variance law of the quadratic functional
// ---------------------------------------------------------------------------

Outcome criterion4() {
    Outcome o;
    const long long ns[] = {25, 65};
    const long long expect_mult[] = {12, 16};
    std::ostringstream d;
    for (int t = 0; t < 2; ++t) {
        const FrequencySet fs = enumerate_frequencies(ns[t]);
        if (fs.multiplicity != expect_mult[t]) {
            o.pass = false;
            o.detail = "unexpected multiplicity for n=" + std::to_string(ns[t]);
            return o;
        }
        const int M = torus_default_resolution(ns[t]);
        double sum = 0.0, sumsq = 0.0;
        for (int r = 0; r < kVarianceReps; ++r) {
            const FieldGrid g =
                sample_torus(fs, 400000 + std::uint64_t(r), M);
            const double v = integral_hermite(g, 2);
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / kVarianceReps;
        const double var =
            (sumsq - kVarianceReps * mean * mean) / (kVarianceReps - 1);
        const double want = 2.0 / double(fs.multiplicity);
        const double off = std::fabs(var / want - 1.0);
        if (off > kVarianceTol) o.pass = false;
        if (t) d << ", ";
        d << "n=" << ns[t] << " var ratio " << format_double(var / want);
    }
    o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------------------
// 5. mean excursion area on both manifolds
// ---------------------------------------------------------------------------

Outcome criterion5() {
    Outcome o;
    const double us[] = {0.0, 1.0};
    std::ostringstream d;
    for (int m = 0; m < 2; ++m) {
        const bool torus = (m == 0);
        const long long n = torus ? 25 : 30;
        const double area = torus ? 1.0 : 4.0 * M_PI;
        FrequencySet fs;
        if (torus) fs = enumerate_frequencies(n);
        const int M = torus ? torus_default_resolution(n)
                            : sphere_default_resolution(int(n));
        for (double u : us) {
            double sum = 0.0, sumsq = 0.0;
            for (int r = 0; r < kMeanAreaReps; ++r) {
                const std::uint64_t seed = 500000 + std::uint64_t(m) * 100000 + r;
                const FieldGrid g = torus ? sample_torus(fs, seed, M)
                                          : sample_sphere(int(n), seed, M, M);
                const double v = excursion_area(g, u);
                sum += v;
                sumsq += v * v;
            }
            const double mean = sum / kMeanAreaReps;
            const double sd = std::sqrt(
                (sumsq - kMeanAreaReps * mean * mean) / (kMeanAreaReps - 1));
            const double se = sd / std::sqrt(double(kMeanAreaReps));
            const double want = (1.0 - gaussian_cdf(u)) * area;
            const double z = std::fabs(mean - want) / se;
            if (z > kMeanAreaSigmas) o.pass = false;
            d << (torus ? "torus" : "sphere") << " u=" << format_double(u)
              << " z=" << format_double(z) << "; ";
        }
    }
    o.detail = d.str();
    return o;
}

// ---------------------------------------------------------------------------
// 6. second-chaos dominance on the sphere
// ---------------------------------------------------------------------------

Outcome criterion6() {
    Outcome o;
    const int n = kDominanceDegree;
    const double u = kDominanceLevel;
    const double lam = double(n) * (n + 1.0);
    const int M = sphere_default_resolution(n);
    const ReductionConstants rc = reduction_constants(u);
    std::vector<double> l2(kDominanceReps), l1(kDominanceReps);
    std::vector<double> p2(kDominanceReps), p1(kDominanceReps);
    for (int r = 0; r < kDominanceReps; ++r) {
        const FieldGrid g = sample_sphere(n, 600000 + std::uint64_t(r), M, M);
        const double ih2 = integral_hermite(g, 2);
        l2[r] = excursion_area(g, u);
        l1[r] = boundary_length_marching(g, u);
        p2[r] = rc.c2 * ih2;
        p1[r] = rc.c1 * std::sqrt(lam / 2.0) * ih2;
    }
    const double c2 = pearson(l2, p2);
    const double c1 = pearson(l1, p1);
    o.pass = c2 > kAreaCorrMin && c1 > kLengthCorrMin;
    o.detail = "area corr " + format_double(c2) + ", boundary corr " +
               format_double(c1) + " (n=" + std::to_string(n) +
               ", R=" + std::to_string(kDominanceReps) + ")";
    return o;
}

// ---------------------------------------------------------------------------
// 7. Euler characteristic sanity and estimator agreement
// ---------------------------------------------------------------------------

Outcome criterion7() {
    Outcome o;
    // whole manifold recovered below the field minimum
    for (int s = 0; s < 5; ++s) {
        const FieldGrid gt = sample_torus(enumerate_frequencies(25),
                                          700 + std::uint64_t(s),
                                          torus_default_resolution(25));
        const double mt = *std::min_element(gt.f.begin(), gt.f.end());
        if (euler_characteristic(gt, mt - 1.0) != 0) {
            o.pass = false;
            o.detail = "full-torus chi != 0 at seed " + std::to_string(700 + s);
            return o;
        }
        const FieldGrid gs =
            sample_sphere(30, 750 + std::uint64_t(s), sphere_default_resolution(30),
                          sphere_default_resolution(30));
        double ms = std::min(*std::min_element(gs.f.begin(), gs.f.end()),
                             std::min(gs.pole_north, gs.pole_south));
        if (euler_characteristic(gs, ms - 1.0) != 2) {
            o.pass = false;
            o.detail = "full-sphere chi != 2 at seed " + std::to_string(750 + s);
            return o;
        }
    }
    // the two boundary estimators on the same realizations
    const FrequencySet fs = enumerate_frequencies(25);
    double worst = 0.0;
    for (int r = 0; r < kEstimatorReps; ++r) {
        const FieldGrid g =
            sample_torus(fs, 770 + std::uint64_t(r), kEstimatorRes);
        const double lm = boundary_length_marching(g, 0.5);
        const double le = boundary_length_eps(g, 0.5, kEstimatorEps);
        worst = std::max(worst, std::fabs(le - lm) / lm);
    }
    if (worst > kEstimatorTol) o.pass = false;
    o.detail = "chi sane on 5+5 fields, estimator gap " + format_double(worst) +
               " over " + std::to_string(kEstimatorReps) + " fields";
    return o;
}

// ---------------------------------------------------------------------------
// 8. covariance oracles and the high-degree Legendre asymptotic
// ---------------------------------------------------------------------------

Outcome criterion8() {
    Outcome o;
    const double bound = 3.0 / std::sqrt(double(kCovarianceReps));
    std::ostringstream d;

    // torus: empirical covariance at fixed pairs vs the cosine sum
    {
        const FrequencySet fs = enumerate_frequencies(25);
        const double x0[2] = {0.13, 0.27};
        const double deltas[6][2] = {{0.0, 0.0},   {0.5, 0.0},  {0.1, 0.2},
                                     {0.05, 0.05}, {0.31, 0.11}, {0.123, 0.456}};
        double acc[6] = {0, 0, 0, 0, 0, 0};
        for (int r = 0; r < kCovarianceReps; ++r) {
            const TorusWave w = TorusWave::draw(fs, 800000 + std::uint64_t(r));
            double at0[6];
            w.eval(x0[0], x0[1], at0);
            for (int p = 0; p < 6; ++p) {
                double out[6];
                w.eval(x0[0] + deltas[p][0], x0[1] + deltas[p][1], out);
                acc[p] += at0[0] * out[0];
            }
        }
        double worst = 0.0;
        for (int p = 0; p < 6; ++p) {
            const double y[2] = {x0[0] + deltas[p][0], x0[1] + deltas[p][1]};
            const double th = covariance_theoretical(Manifold::Torus, 25, x0, y);
            worst = std::max(worst,
                             std::fabs(acc[p] / kCovarianceReps - th));
        }
        if (worst > bound) o.pass = false;
        d << "torus cov err " << format_double(worst);
    }

    // sphere: empirical covariance vs the Legendre kernel
    {
        const int n = 30;
        const double p0[2] = {0.9, 0.4};
        const double pts[5][2] = {{0.9, 0.4}, {1.2, 0.4}, {0.9, 1.3},
                                  {2.2, 2.0}, {0.35, 5.5}};
        double acc[5] = {0, 0, 0, 0, 0};
        for (int r = 0; r < kCovarianceReps; ++r) {
            const SphereWave w = SphereWave::draw(n, 880000 + std::uint64_t(r));
            double at0[6];
            w.eval(p0[0], p0[1], at0);
            for (int p = 0; p < 5; ++p) {
                double out[6];
                w.eval(pts[p][0], pts[p][1], out);
                acc[p] += at0[0] * out[0];
            }
        }
        double worst = 0.0;
        for (int p = 0; p < 5; ++p) {
            const double th =
                covariance_theoretical(Manifold::Sphere, n, p0, pts[p]);
            worst = std::max(worst,
                             std::fabs(acc[p] / kCovarianceReps - th));
        }
        if (worst > bound) o.pass = false;
        d << ", sphere cov err " << format_double(worst);
    }

    // P_n(cos t) ~ sqrt(t / sin t) J0((n + 1/2) t) for n = 50
    {
        const int n = 50;
        double worst = 0.0;
        const int K = 1000;
        for (int i = 0; i <= K; ++i) {
            const double t = 0.2 + (M_PI / 2.0 - 0.2) * double(i) / K;
            const double lhs = legendre(n, std::cos(t));
            const double rhs =
                std::sqrt(t / std::sin(t)) * bessel_j0((n + 0.5) * t);
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
        if (worst > kHilbTol) o.pass = false;
        d << ", Legendre asymptotic err " << format_double(worst);
    }
    o.detail = d.str();
    return o;
}

struct Criterion {
    const char* name;
    Outcome (*run)();
    double budget_s; // 0 = no runtime requirement
};

const Criterion kCriteria[] = {
    {"lattice enumeration vs brute force", criterion1, 10.0},
    {"coefficient collapse and norm-moment oracle", criterion2, 1.0},
    {"pathwise second-chaos reduction (torus)", criterion3, 120.0},
    {"variance law of the quadratic functional", criterion4, 300.0},
    {"mean excursion area (both manifolds)", criterion5, 0.0},
    {"second-chaos dominance (sphere)", criterion6, 900.0},
    {"Euler characteristic and estimator agreement", criterion7, 0.0},
    {"covariance oracles and Legendre asymptotic", criterion8, 0.0},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
            if (only < 1 || only > 8) {
                std::fprintf(stderr, "--only wants 1..8\n");
                return 64;
            }
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 64;
        }
    }
    int failures = 0;
    for (int c = 1; c <= 8; ++c) {
        if (only && c != only) continue;
        const Criterion& cr = kCriteria[c - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (cr.budget_s > 0 && secs > cr.budget_s) {
            o.pass = false;
            o.detail += " [over budget " + format_double(cr.budget_s) + "s]";
        }
        std::printf("criterion %d [%s] %s: %s (%.1fs)\n", c,
                    o.pass ? "PASS" : "FAIL", cr.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures;
}

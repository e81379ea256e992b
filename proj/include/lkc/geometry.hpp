#pragma once

// Geometric estimators for the three Lipschitz-Killing curvatures of the
// excursion set E_u = { f >= u }:
//   L2 = area       quadrature of the indicator
//   L1 = half the boundary length   marching squares, or the smoothed
//        coarea band (1/2eps) 1{|f-u|<=eps} |grad f|
//   L0 = Euler characteristic       V - E + F of the piecewise-linear
//        excursion complex
//
// For L0 each quadrilateral cell is split into four triangles through a
// center vertex valued at the corner average (the bilinear interpolant at
// the center).  On triangles the superlevel set of the linear interpolant
// deformation-retracts onto the full subcomplex spanned by above-level
// vertices, so counting vertices/edges/faces of that subcomplex gives the
// exact PL Euler characteristic; the center vertex is what decides the
// two-corner saddle cells.  Closed-manifold sanity: the full complex gives
// chi = 0 on the torus and chi = 2 on the sphere (polar caps are closed by
// one apex vertex each, valued with the exact pole field value).

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lkc/field.hpp"

namespace lkc {

struct LkcEstimate {
    double u = 0.0;
    double L0 = 0.0;
    double L1 = 0.0;
    double L2 = 0.0;
    std::string boundary_estimator = "marching"; // or "eps"
    double eps = 0.0;                            // eps estimator only
    bool eps_band_underresolved = false;
    int rows = 0, cols = 0;
};

/// L2: weighted area of { f >= u }.
inline double excursion_area(const FieldGrid& g, double u) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.f[i] >= u) s += g.weight[i];
    return s;
}

namespace detail {

/// Marching-squares segments for one cell, in unit cell coordinates
/// (s along rows, t along cols).  Corner values: v00 (0,0), v10 (1,0),
/// v11 (1,1), v01 (0,1).  Appends 0, 1, or 2 segments.
struct Seg {
    double s0, t0, s1, t1;
};

inline int cell_segments(double v00, double v10, double v11, double v01,
                         double u, Seg out[2]) {
    const int code = (v00 >= u ? 1 : 0) | (v10 >= u ? 2 : 0) |
                     (v11 >= u ? 4 : 0) | (v01 >= u ? 8 : 0);
    if (code == 0 || code == 15) return 0;
    auto cross = [u](double a, double b) { return (u - a) / (b - a); };
    // crossing points on the four edges (valid only when used)
    const double et0 = cross(v00, v10); // edge t = 0, parameter along s
    const double et1 = cross(v01, v11); // edge t = 1
    const double es0 = cross(v00, v01); // edge s = 0, parameter along t
    const double es1 = cross(v10, v11); // edge s = 1

    auto seg = [&](double a_s, double a_t, double b_s, double b_t) {
        return Seg{a_s, a_t, b_s, b_t};
    };
    const Seg T0S0 = seg(et0, 0.0, 0.0, es0); // around corner v00
    const Seg T0S1 = seg(et0, 0.0, 1.0, es1); // around corner v10
    const Seg S1T1 = seg(1.0, es1, et1, 1.0); // around corner v11
    const Seg S0T1 = seg(0.0, es0, et1, 1.0); // around corner v01

    switch (code) {
        case 1: case 14: out[0] = T0S0; return 1;
        case 2: case 13: out[0] = T0S1; return 1;
        case 4: case 11: out[0] = S1T1; return 1;
        case 8: case 7:  out[0] = S0T1; return 1;
        case 3: case 12: out[0] = seg(0.0, es0, 1.0, es1); return 1; // t=0 vs t=1 halves
        case 6: case 9:  out[0] = seg(et0, 0.0, et1, 1.0); return 1; // s=0 vs s=1 halves
        case 5: { // v00 and v11 above
            const bool center_above = 0.25 * (v00 + v10 + v11 + v01) >= u;
            if (center_above) { out[0] = T0S1; out[1] = S0T1; }
            else { out[0] = T0S0; out[1] = S1T1; }
            return 2;
        }
        case 10: { // v10 and v01 above
            const bool center_above = 0.25 * (v00 + v10 + v11 + v01) >= u;
            if (center_above) { out[0] = T0S0; out[1] = S1T1; }
            else { out[0] = T0S1; out[1] = S0T1; }
            return 2;
        }
    }
    return 0;
}

} // namespace detail

/// L1 by marching squares: half the total length of the interpolated level
/// polyline.  Sphere cells use the metric ds^2 = dtheta^2 + sin^2(theta)
/// dphi^2 at the segment's mean colatitude; contours inside the polar caps
/// (beyond the last grid row) are below resolution and ignored.
inline double boundary_length_marching(const FieldGrid& g, double u) {
    double total = 0.0;
    detail::Seg segs[2];
    if (g.spec.manifold == Manifold::Torus) {
        const int M = g.rows;
        const double h = 1.0 / M;
        for (int i = 0; i < M; ++i) {
            const int ip = (i + 1) % M;
            for (int j = 0; j < M; ++j) {
                const int jp = (j + 1) % M;
                const int k = detail::cell_segments(
                    g.f[g.idx(i, j)], g.f[g.idx(ip, j)], g.f[g.idx(ip, jp)],
                    g.f[g.idx(i, jp)], u, segs);
                for (int q = 0; q < k; ++q) {
                    const double ds = (segs[q].s1 - segs[q].s0) * h;
                    const double dt = (segs[q].t1 - segs[q].t0) * h;
                    total += std::sqrt(ds * ds + dt * dt);
                }
            }
        }
    } else {
        const double dphi = 2.0 * M_PI / g.cols;
        for (int i = 0; i + 1 < g.rows; ++i) {
            const double th0 = g.theta_nodes[i];
            const double dth = g.theta_nodes[i + 1] - th0;
            for (int j = 0; j < g.cols; ++j) {
                const int jp = (j + 1) % g.cols;
                const int k = detail::cell_segments(
                    g.f[g.idx(i, j)], g.f[g.idx(i + 1, j)], g.f[g.idx(i + 1, jp)],
                    g.f[g.idx(i, jp)], u, segs);
                for (int q = 0; q < k; ++q) {
                    const double smid = 0.5 * (segs[q].s0 + segs[q].s1);
                    const double ds = (segs[q].s1 - segs[q].s0) * dth;
                    const double dt = (segs[q].t1 - segs[q].t0) * dphi *
                                      std::sin(th0 + smid * dth);
                    total += std::sqrt(ds * ds + dt * dt);
                }
            }
        }
    }
    return 0.5 * total;
}

/// Typical node spacing, used only for the band-resolution warning.
inline double grid_spacing(const FieldGrid& g) {
    if (g.spec.manifold == Manifold::Torus) return 1.0 / g.rows;
    return M_PI / g.rows;
}

/// True when the coarea band {|f-u| <= eps} is at least ~3 cells wide
/// transversally for a typical gradient magnitude sqrt(lambda/2).
inline bool eps_band_resolved(const FieldGrid& g, double eps) {
    const double width = 2.0 * eps / std::sqrt(g.spec.eigenvalue / 2.0);
    return width >= 3.0 * grid_spacing(g);
}

/// L1 by the smoothed coarea formula:
///   (1/2) Int (1/2eps) 1{|f-u| <= eps} |grad f|.
inline double boundary_length_eps(const FieldGrid& g, double u, double eps) {
    if (eps <= 0.0) throw DomainError("boundary_length_eps: eps must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::fabs(g.f[i] - u) <= eps)
            s += g.weight[i] * std::sqrt(g.d1[i] * g.d1[i] + g.d2[i] * g.d2[i]);
    return 0.5 * s / (2.0 * eps);
}

/// L0: Euler characteristic of the PL excursion complex (see header note).
inline long long euler_characteristic(const FieldGrid& g, double u) {
    long long V = 0, E = 0, F = 0;
    const int R = g.rows, Cc = g.cols;
    auto above = [&](int i, int j) { return g.f[g.idx(i, j)] >= u; };

    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.f[k] >= u) ++V;

    auto do_cell = [&](double a, double b, double c, double d) {
        // corners in cyclic order a (0,0), b (1,0), c (1,1), d (0,1)
        const bool ba = a >= u, bb = b >= u, bc = c >= u, bd = d >= u;
        const bool bm = 0.25 * (a + b + c + d) >= u;
        if (bm) {
            ++V;
            E += (ba ? 1 : 0) + (bb ? 1 : 0) + (bc ? 1 : 0) + (bd ? 1 : 0);
            F += ((ba && bb) ? 1 : 0) + ((bb && bc) ? 1 : 0) +
                 ((bc && bd) ? 1 : 0) + ((bd && ba) ? 1 : 0);
        }
    };

    if (g.spec.manifold == Manifold::Torus) {
        for (int i = 0; i < R; ++i) {
            const int ip = (i + 1) % R;
            for (int j = 0; j < Cc; ++j) {
                const int jp = (j + 1) % Cc;
                if (above(i, j) && above(ip, j)) ++E;
                if (above(i, j) && above(i, jp)) ++E;
                do_cell(g.f[g.idx(i, j)], g.f[g.idx(ip, j)], g.f[g.idx(ip, jp)],
                        g.f[g.idx(i, jp)]);
            }
        }
    } else {
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < Cc; ++j) {
                const int jp = (j + 1) % Cc;
                if (i + 1 < R && above(i, j) && above(i + 1, j)) ++E;
                if (above(i, j) && above(i, jp)) ++E;
                if (i + 1 < R)
                    do_cell(g.f[g.idx(i, j)], g.f[g.idx(i + 1, j)],
                            g.f[g.idx(i + 1, jp)], g.f[g.idx(i, jp)]);
            }
        // polar caps: apex vertex fanned to the nearest grid row
        const bool north = g.pole_north >= u, south = g.pole_south >= u;
        if (north) {
            ++V;
            for (int j = 0; j < Cc; ++j) {
                const int jp = (j + 1) % Cc;
                if (above(0, j)) ++E;
                if (above(0, j) && above(0, jp)) ++F;
            }
        }
        if (south) {
            ++V;
            for (int j = 0; j < Cc; ++j) {
                const int jp = (j + 1) % Cc;
                if (above(R - 1, j)) ++E;
                if (above(R - 1, j) && above(R - 1, jp)) ++F;
            }
        }
    }
    return V - E + F;
}

/// All three curvatures with the marching boundary estimator.
inline LkcEstimate lkc_estimate(const FieldGrid& g, double u) {
    LkcEstimate e;
    e.u = u;
    e.L0 = static_cast<double>(euler_characteristic(g, u));
    e.L1 = boundary_length_marching(g, u);
    e.L2 = excursion_area(g, u);
    e.rows = g.rows;
    e.cols = g.cols;
    return e;
}

/// Same, with the band estimator for L1.
inline LkcEstimate lkc_estimate_eps(const FieldGrid& g, double u, double eps) {
    LkcEstimate e = lkc_estimate(g, u);
    e.boundary_estimator = "eps";
    e.eps = eps;
    e.L1 = boundary_length_eps(g, u, eps);
    e.eps_band_underresolved = !eps_band_resolved(g, eps);
    return e;
}

} // namespace lkc

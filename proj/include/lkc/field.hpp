#pragma once

// A sampled realization of a random wave on a structured grid, together
// with first and second (covariant) derivatives and quadrature weights.
// This is the one artifact every estimator consumes.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lkc/coefficients.hpp"
#include "lkc/errors.hpp"

namespace lkc {

struct WaveSpec {
    Manifold manifold = Manifold::Torus;
    long long n = 0;
    double eigenvalue = 0.0;
    std::uint64_t seed = 0;
};

/// Node-major storage, row index varies slowest.  Torus: rows = cols = M,
/// node (i,j) at (i/M, j/M), weight 1/M^2.  Sphere: rows = Gauss-Legendre
/// colatitudes (theta ascending), cols = uniform longitudes, weight =
/// GL weight * 2 pi / cols, so weights sum to the surface area exactly and
/// integrals of band-limited products are exact up to rounding.
struct FieldGrid {
    WaveSpec spec;
    int rows = 0;
    int cols = 0;

    std::vector<double> x1, x2;                 // node coordinates
    std::vector<double> f, d1, d2, d11, d12, d22;
    std::vector<double> weight;

    // sphere only
    std::vector<double> theta_nodes;            // size rows
    double pole_north = std::numeric_limits<double>::quiet_NaN();
    double pole_south = std::numeric_limits<double>::quiet_NaN();
    int excluded_rows = 0;                      // rows dropped by the polar cutoff
    double excluded_weight = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * cols + j; }

    double area() const {
        return spec.manifold == Manifold::Torus ? 1.0 : 4.0 * M_PI;
    }

    void allocate() {
        const std::size_t m = size();
        x1.assign(m, 0.0); x2.assign(m, 0.0);
        f.assign(m, 0.0); d1.assign(m, 0.0); d2.assign(m, 0.0);
        d11.assign(m, 0.0); d12.assign(m, 0.0); d22.assign(m, 0.0);
        weight.assign(m, 0.0);
    }
};

/// Weighted integral of a nodewise function of the stored fields.
template <typename F>
double integrate(const FieldGrid& g, F&& fn) {
    double s = 0.0;
    const std::size_t m = g.size();
    for (std::size_t i = 0; i < m; ++i) s += g.weight[i] * fn(i);
    return s;
}

} // namespace lkc

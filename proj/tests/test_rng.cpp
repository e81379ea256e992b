#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "lkc/rng.hpp"

using namespace lkc;
using Catch::Approx;

TEST_CASE("generator is deterministic per key") {
    Philox4x32 a(42), b(42), c(43);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        auto va = a(), vb = b(), vc = c();
        REQUIRE(va == vb);
        any_diff = any_diff || (va != vc);
    }
    REQUIRE(any_diff);
}

TEST_CASE("stream keys separate related inputs") {
    std::set<std::uint64_t> keys;
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL})
        for (std::uint64_t r = 0; r < 100; ++r) keys.insert(stream_seed(seed, r));
    REQUIRE(keys.size() == 300);
    REQUIRE(stream_seed(7, 3) != stream_seed(3, 7));
}

TEST_CASE("uniform stays strictly inside the unit interval") {
    Philox4x32 g(123);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        double u = g.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    REQUIRE(sum / N == Approx(0.5).margin(3.0 / std::sqrt(12.0 * N)));
    REQUIRE(lo < 0.001);
    REQUIRE(hi > 0.999);
}

TEST_CASE("gaussian pairs have the right moments", "[slow]") {
    Philox4x32 g(2024);
    const int N = 400000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0, cross = 0;
    for (int i = 0; i < N; ++i) {
        auto p = g.gaussian_pair();
        for (double z : {p[0], p[1]}) {
            s1 += z;
            s2 += z * z;
            s3 += z * z * z;
            s4 += z * z * z * z;
        }
        cross += p[0] * p[1];
    }
    const double m = 2.0 * N;
    // 3-sigma Monte Carlo bands around 0, 1, 0, 3
    REQUIRE(s1 / m == Approx(0.0).margin(3.0 / std::sqrt(m)));
    REQUIRE(s2 / m == Approx(1.0).margin(3.0 * std::sqrt(2.0 / m)));
    REQUIRE(s3 / m == Approx(0.0).margin(3.0 * std::sqrt(15.0 / m)));
    REQUIRE(s4 / m == Approx(3.0).margin(3.0 * std::sqrt(96.0 / m)));
    REQUIRE(cross / N == Approx(0.0).margin(3.0 / std::sqrt(double(N))));
}

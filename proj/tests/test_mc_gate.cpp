#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cr/models/models.hpp"

#include <cmath>
#include <random>

using namespace cr;

// Monte Carlo cross-check of the closed form sphere moments: sample the unit
// sphere in C^2 through normalized gaussians and compare the empirical
// moments of |z1|^{2a} |z2|^{2c} with a! c! / (a+c+1)! (the moment against
// the normalized invariant measure) to within one percent relative error.
TEST_CASE("monte carlo moment gate") {
    constexpr int kSamples = 1'000'000;
    constexpr int kMaxDeg = 4;  // monomial degree 2(a+c) <= 8
    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> g(0.0, 1.0);

    double sums[kMaxDeg + 1][kMaxDeg + 1] = {};
    for (int s = 0; s < kSamples; s++) {
        double x1 = g(rng), y1 = g(rng), x2 = g(rng), y2 = g(rng);
        double r2 = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2;
        double u = (x1 * x1 + y1 * y1) / r2;  // |z1|^2
        double v = 1.0 - u;                   // |z2|^2
        double up = 1.0;
        for (int a = 0; a <= kMaxDeg; a++) {
            double vp = 1.0;
            for (int c = 0; a + c <= kMaxDeg; c++) {
                sums[a][c] += up * vp;
                vp *= v;
            }
            up *= u;
        }
    }

    for (int a = 0; a <= kMaxDeg; a++)
        for (int c = 0; a + c <= kMaxDeg; c++) {
            double got = sums[a][c] / kSamples;
            Rat exact = sphereMoment(a, c) / sphereMoment(0, 0);
            double want = static_cast<double>(exact);
            CAPTURE(a);
            CAPTURE(c);
            CHECK(std::abs(got - want) <= 0.01 * want);
        }
}

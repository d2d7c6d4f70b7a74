#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soslab/expansion.hpp"

using namespace soslab;

static Contour unitSquare(int x, int y, int sign) {
    return canonicalize({{x - 1, y - 1, 0}, {x - 1, y - 1, 1}, {x, y - 1, 1}, {x - 1, y, 0}}, sign);
}

TEST_CASE("modified weights on tiny collections") {
    double beta = 1.4;
    WeightTable wt(beta, WeightTable::PureSOS);
    double w4 = 1.0 / std::expm1(4.0 * beta);
    Contour a = unitSquare(0, 0, +1);

    ContourCollection single{{a}, ContourCollection::Cluster};
    ClusterTerm t = clusterWT(single, wt, 0, 0.0);
    CHECK(double(t.wT) == doctest::Approx(std::log1p(w4)).epsilon(1e-14));
    CHECK(t.sites == 4);
    CHECK(t.totalLen == 4);

    // incompatible pair: side-adjacent same-sign squares
    Contour b = unitSquare(1, 0, +1);
    ContourCollection pair{{a, b}, ContourCollection::Cluster};
    ClusterTerm tp = clusterWT(pair, wt, 0, 0.0);
    double want = std::log((1.0 + 2.0 * w4) / ((1.0 + w4) * (1.0 + w4)));
    CHECK(double(tp.wT) == doctest::Approx(want).epsilon(1e-13));
    CHECK(tp.sites == 6);  // two shared dual vertices

    // order invariance
    ContourCollection rev{{b, a}, ContourCollection::Cluster};
    CHECK(double(clusterWT(rev, wt, 0, 0.0).wT) == doctest::Approx(double(tp.wT)));

    // compatible pair: anti-diagonal squares, w^T vanishes
    Contour c = unitSquare(1, -1, +1);
    ContourCollection comp{{a, c}, ContourCollection::Cluster};
    CHECK(std::abs(double(clusterWT(comp, wt, 0, 0.0).wT)) < 1e-30);
}

TEST_CASE("anchored density is translation invariant and matches the class form") {
    for (int mode : {0, 1}) {
        double beta = 2.0;
        WeightTable wt(beta, mode == 0 ? WeightTable::PureSOS : WeightTable::Raw);
        int n = 1;
        double u = 0.01;
        auto fa = freeEnergyDensity(wt, n, u, 8, {0, 0});
        auto fb = freeEnergyDensity(wt, n, u, 8, {3, -2});
        auto fc = freeEnergyDensity(wt, n, u, 8, {-1, 5});
        CHECK(double(fa.value) == doctest::Approx(double(fb.value)).epsilon(1e-25));
        CHECK(double(fa.value) == doctest::Approx(double(fc.value)).epsilon(1e-25));

        ClusterSet cs(wt, 8);
        auto fv = cs.eval(n, u);
        CHECK(double(fv.value) == doctest::Approx(double(fa.value)).epsilon(1e-25));

        // delta agrees with the difference of evaluations
        if (mode == 1) {
            double d = double(cs.delta(n - 1, n, u));
            double ref = double(cs.eval(n - 1, u).value - cs.eval(n, u).value);
            CHECK(d == doctest::Approx(ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("class form reproduces the anchored form at Lmax = 10") {
    double beta = 2.2;
    WeightTable wt(beta, WeightTable::PureSOS);
    auto fa = freeEnergyDensity(wt, 0, 0.0, 10, {0, 0});
    ClusterSet cs(wt, 10);
    auto fv = cs.eval(0, 0.0);
    CHECK(double(fv.value) == doctest::Approx(double(fa.value)).epsilon(1e-22));
}

TEST_CASE("pure SOS density has the right leading order") {
    double beta = 2.0;
    WeightTable wt(beta, WeightTable::PureSOS);
    ClusterSet cs(wt, 12);
    double f = double(cs.eval(0, 0.0).value);
    double lead = 2.0 * std::exp(-4.0 * beta);
    CHECK(f / lead == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("restricted pure sums satisfy the polymer identity") {
    double beta = 1.5;
    double w4 = 1.0 / std::expm1(4.0 * beta);
    double w6 = 1.0 / std::expm1(6.0 * beta);
    // single cell: z = 1 + w
    Contour sq = unitSquare(0, 0, +1);
    CHECK(double(logRestrictedPure(sq, beta)) == doctest::Approx(std::log1p(w4)).epsilon(1e-12));
    // domino: z = (1 + w6)(1 + 2 w4): the two positive squares are the only
    // contours strictly inside that are compatible with the domino
    Contour dom = canonicalize({{-1, -1, 0}, {0, -1, 0}, {-1, -1, 1}, {1, -1, 1},
                                {-1, 0, 0}, {0, 0, 0}}, +1);
    REQUIRE(isValidContour(dom));
    REQUIRE(interiorOf(dom).size() == 2);
    double want = std::log1p(w6) + std::log1p(2.0 * w4);
    CHECK(double(logRestrictedPure(dom, beta)) == doctest::Approx(want).epsilon(1e-12));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "soslab/exact.hpp"
#include "soslab/mcmc.hpp"

using namespace soslab;

TEST_CASE("single-site conditional") {
    double beta = 1.2;
    double q = std::exp(-4.0 * beta);
    int zeros[4] = {0, 0, 0, 0};
    // all neighbours at 0, h = 0: P(0) = 1 - e^{-4 beta}
    CHECK(conditionalProb(zeros, beta, 0.0, 0) == doctest::Approx(1.0 - q).epsilon(1e-13));
    CHECK(conditionalProb(zeros, beta, 0.0, 3) ==
          doctest::Approx((1.0 - q) * q * q * q).epsilon(1e-13));
    // the sampler's inversion is the CDF: threshold at P(0) exactly
    double p0 = 1.0 - q;
    CHECK(sampleConditional(zeros, beta, 0.0, p0 - 1e-9) == 0);
    CHECK(sampleConditional(zeros, beta, 0.0, p0 + 1e-9) == 1);
    CHECK(sampleConditional(zeros, beta, 0.0, 1.0 - 1e-13) > 3);

    // neighbours at K: symmetric tails around the mode until the wall
    int high[4] = {9, 9, 9, 9};
    CHECK(conditionalProb(high, beta, 0.0, 8) ==
          doctest::Approx(conditionalProb(high, beta, 0.0, 10)).epsilon(1e-12));
    CHECK(conditionalProb(high, beta, 0.0, 9) > conditionalProb(high, beta, 0.0, 8));

    // huge reward pins to the wall
    CHECK(sampleConditional(high, beta, 80.0, 0.999) == 0);

    // mixed neighbours: the pmf sums to one over a generous range
    int mixed[4] = {1, 2, 0, 3};
    double tot = 0;
    for (int k = 0; k <= 60; ++k) tot += conditionalProb(mixed, beta, 0.4, k);
    CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("detailed balance on a 2x2 box") {
    double beta = 0.9, h = 0.6;
    int n = 1, W = 2, H = 2;
    const int cap = 4;
    HeightField f;
    f.W = W; f.H = H; f.boundaryLevel = n;
    f.h.assign(4, 0);
    auto logpi = [&](const HeightField& g) {
        return -beta * double(fieldEnergy(g)) +
               h * double(std::count(g.h.begin(), g.h.end(), 0));
    };
    for (int s = 0; s < (cap + 1) * (cap + 1) * (cap + 1) * (cap + 1); ++s) {
        int t = s;
        for (int i = 0; i < 4; ++i) { f.h[size_t(i)] = t % (cap + 1); t /= cap + 1; }
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                int nb[4] = {f.at(x - 1, y), f.at(x + 1, y), f.at(x, y - 1), f.at(x, y + 1)};
                int k = f.at(x, y);
                for (int kp = 0; kp <= cap + 2; ++kp) {
                    HeightField g = f;
                    g.ref(x, y) = kp;
                    // pi(phi) P(k -> k') == pi(phi') P(k' -> k)
                    double lhs = logpi(f) + std::log(conditionalProb(nb, beta, h, kp));
                    double rhs = logpi(g) + std::log(conditionalProb(nb, beta, h, k));
                    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
                }
            }
    }
}

TEST_CASE("chain determinism, wall and checkpoint resume") {
    ModelParams p{1.5, 0.2, 1};
    auto a = runChain(5, 4, p, 300, 42, {"contact", "height"}, 0, 1);
    auto b = runChain(5, 4, p, 300, 42, {"contact", "height"}, 0, 1);
    CHECK(a.series["contact"].samples == b.series["contact"].samples);
    CHECK(a.state.field.h == b.state.field.h);
    auto c = runChain(5, 4, p, 300, 43, {"contact"}, 0, 1);
    CHECK(a.series["contact"].samples != c.series["contact"].samples);
    for (int v : a.state.field.h) CHECK(v >= 0);

    // checkpointed half-run continues the uninterrupted trajectory exactly
    ChainState full = makeChain(5, 4, p, 42);
    for (int t = 0; t < 100; ++t) sweepChain(full);
    ChainState part = makeChain(5, 4, p, 42);
    for (int t = 0; t < 50; ++t) sweepChain(part);
    std::stringstream ss;
    writeCheckpoint(ss, part);
    ChainState resumed = readCheckpoint(ss);
    CHECK(resumed.field.h == part.field.h);
    CHECK(resumed.sweepCount == 50);
    for (int t = 0; t < 50; ++t) sweepChain(resumed);
    CHECK(resumed.field.h == full.field.h);
}

TEST_CASE("small-box mean matches the transfer oracle") {
    double beta = 1.0, h = 0.5;
    double u = h - wettingH(beta);
    int n = 0;
    // exact contact fraction: mean of E[delta_x] over the box
    f128 exact = 0;
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) exact += ursellWall(3, 3, beta, u, n, {{x, y}});
    double target = double(exact) / 9.0;
    ModelParams p{beta, u, n};
    auto r = runChain(3, 3, p, 200000, 7, {"contact"}, 2000, 1);
    const SeriesStats& st = r.series["contact"].stats;
    CHECK(st.batches >= 20);
    CHECK(std::abs(st.mean - target) < 3.0 * st.se);
    // the error bar itself is sane
    CHECK(st.se > 0);
    CHECK(st.se < 0.05);
}

TEST_CASE("level percolation reports") {
    HeightField flat;
    flat.W = 6; flat.H = 6; flat.boundaryLevel = 2;
    flat.h.assign(36, 2);
    PercolationReport r = levelPercolation(flat, 2);
    CHECK(r.levelFraction == 1.0);
    CHECK(r.largestFraction == 1.0);
    CHECK(r.crossing);
    CHECK(r.maxOffDiameter == 0);

    // checkerboard: level-0 singletons do not cross, but the star-connected
    // complement runs along the diagonals
    HeightField cb = flat;
    cb.boundaryLevel = 0;
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) cb.ref(x, y) = (x + y) % 2;
    PercolationReport rc = levelPercolation(cb, 0);
    CHECK(rc.levelFraction == 0.5);
    CHECK(rc.largestFraction == doctest::Approx(1.0 / 36.0));
    CHECK(!rc.crossing);
    CHECK(rc.maxOffDiameter >= 5);
}

TEST_CASE("monotone sandwich coupling") {
    ModelParams p{2.0, 0.05, 2};
    SandwichResult s = sandwichRun(6, 6, p, 2000, 11);
    CHECK(s.dominationFrequency == 1.0);
    for (int v : s.low.field.h) CHECK(v >= 0);
    for (int v : s.high.field.h) CHECK(v >= 0);
    // same boundary condition on both sides: the chains are identical
    ModelParams p0{2.0, 0.05, 0};
    SandwichResult z = sandwichRun(6, 6, p0, 200, 11);
    CHECK(z.dominationFrequency == 1.0);
    for (double g : z.gapSeries) CHECK(g == 0.0);
}

TEST_CASE("batch statistics") {
    std::vector<double> flat(400, 1.25);
    SeriesStats st = batchStats(flat);
    CHECK(st.mean == 1.25);
    CHECK(st.se == 0.0);
    // near-iid noise: tau_int close to 1/2
    std::vector<double> noise;
    std::uint64_t s = 99;
    CounterRng rng{5};
    for (int i = 0; i < 20000; ++i) noise.push_back(rng.uniform(0, std::uint64_t(i), s));
    SeriesStats sn = batchStats(noise);
    CHECK(sn.mean == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sn.tauInt < 2.0);
}

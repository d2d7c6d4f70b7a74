#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "soslab/exact.hpp"
#include "soslab/weights.hpp"

using namespace soslab;

static Contour unitSquare(int x, int y, int sign) {
    return canonicalize({{x - 1, y - 1, 0}, {x - 1, y - 1, 1}, {x, y - 1, 1}, {x - 1, y, 0}}, sign);
}

// brute z over a small shape: boundary m, one-sided collar constraint
static double bruteZ(const std::vector<Cell>& cells, const std::vector<char>& collar, double beta,
                     int eps, int m, int c, double y, int hmax) {
    auto inShape = [&](Cell q) -> int {
        for (size_t i = 0; i < cells.size(); ++i)
            if (cells[i] == q) return int(i);
        return -1;
    };
    std::vector<int> h(cells.size(), 0);
    double total = 0;
    for (;;) {
        bool ok = true;
        for (size_t i = 0; i < cells.size(); ++i)
            if (collar[i] && eps * (h[i] - c) < 0) ok = false;
        if (ok) {
            double e = 0;
            int zeros = 0;
            for (size_t i = 0; i < cells.size(); ++i) {
                Cell q = cells[i];
                int right = inShape({q.x + 1, q.y}), down = inShape({q.x, q.y + 1});
                e += std::abs(h[i] - (right >= 0 ? h[size_t(right)] : m));
                e += std::abs(h[i] - (down >= 0 ? h[size_t(down)] : m));
                if (inShape({q.x - 1, q.y}) < 0) e += std::abs(h[i] - m);
                if (inShape({q.x, q.y - 1}) < 0) e += std::abs(h[i] - m);
                zeros += (h[i] == 0);
            }
            total += std::exp(-beta * e) * std::pow(y, zeros);
        }
        size_t i = 0;
        while (i < h.size() && h[i] == hmax) { h[i] = 0; ++i; }
        if (i == h.size()) break;
        ++h[i];
    }
    return total;
}

TEST_CASE("restricted sums match brute force") {
    double beta = 1.3, u = 0.07;
    WeightTable wt(beta);
    double y = std::exp(wettingH(beta) + u);
    int hmax = std::max(3, 3) + int(std::ceil(36.0 * std::log(10.0) / (4.0 * beta))) + 2;
    // unit square and domino shapes
    int idSq = wt.classOf(unitSquare(1, 1, +1));
    int idDom = wt.classOfInterior({{0, 0}, {1, 0}});
    struct Case { int id; std::vector<Cell> cells; std::vector<char> collar; };
    std::vector<Case> cases = {
        {idSq, {{0, 0}}, {1}},
        {idDom, {{0, 0}, {1, 0}}, {1, 1}},
    };
    for (auto& cs : cases)
        for (int eps : {+1, -1})
            for (int m : {1, 2, 3})
                for (int c : {m - 1, m, m + 1}) {
                    if (c < 0) continue;
                    double got = double(wt.logZ(cs.id, eps, m, c, f128(y)));
                    double ref = std::log(bruteZ(cs.cells, cs.collar, beta, eps, m, c, y, hmax));
                    CHECK(got == doctest::Approx(ref).epsilon(1e-12));
                }
}

TEST_CASE("unit-square closed forms") {
    for (double beta : {1.5, 2.0, 2.5}) {
        WeightTable wt(beta);
        double q = std::exp(-4.0 * beta);
        // positive square, level 0, u = 0: w = J^2 exactly
        double w0 = std::exp(double(wt.logWeight(unitSquare(1, 1, +1), 0, 0.0)));
        CHECK(w0 == doctest::Approx(q).epsilon(1e-13));
        // negative square, level n >= 1: w = q (1 + (e^u - 1) q^{n-1}) / (1 - q)
        for (int n : {1, 2, 3})
            for (double u : {0.0, 0.05, 0.3}) {
                double w = std::exp(double(wt.logWeight(unitSquare(1, 1, -1), n, u)));
                double want = q * (1.0 + (std::exp(u) - 1.0) * std::pow(q, n - 1)) / (1.0 - q);
                CHECK(w == doctest::Approx(want).epsilon(1e-12));
            }
        // negative contour at the wall level has weight zero
        CHECK(std::isinf(double(wt.logWeight(unitSquare(1, 1, -1), 0, 0.1))));
    }
}

TEST_CASE("single-site representation identity") {
    // Z^{n,h}_{1x1} = 1 + e^{-4b} z_{n+1}(sq+) + e^{-4b} z_{n-1}(sq-)
    for (double beta : {1.2, 2.0})
        for (int n : {1, 2})
            for (double u : {0.0, 0.1}) {
                WeightTable wt(beta);
                f128 y = wallY(beta, u);
                int id = wt.classOf(unitSquare(1, 1, +1));
                using std::exp;
                f128 rhs = 1 + exp(f128(-4 * beta) + wt.logZ(id, +1, n + 1, n + 1, y)) +
                           exp(f128(-4 * beta) + wt.logZ(id, -1, n - 1, n - 1, y));
                double lhs = double(wallPartition(1, 1, beta, u, n, -1, true).logZ);
                CHECK(lhs == doctest::Approx(double(log(rhs))).epsilon(1e-12));
            }
}

TEST_CASE("truncation, stability, and wall decoupling") {
    double beta = 2.0;
    WeightTable raw(beta, WeightTable::Raw), tr(beta, WeightTable::Truncated);
    Contour sq = unitSquare(1, 1, +1);
    double J = couplingJ(beta);
    // stable contour: truncated equals raw
    double u = std::pow(J, 3) / 200.0;
    CHECK(raw.isStable(sq, 0, u));
    CHECK(double(tr.logWeight(sq, 0, u)) == doctest::Approx(double(raw.logWeight(sq, 0, u))));
    // the cap is an upper clamp
    int id = raw.classOf(sq);
    f128 y = wallY(beta, 0.0);
    for (int n : {0, 1, 2}) {
        double r = double(raw.logWeight(id, +1, n, y));
        double t = double(tr.logWeight(id, +1, n, y));
        CHECK(t == doctest::Approx(std::min(r, -(beta - 1.0) * 4.0)));
    }
    // deep-interior positive square approaches the pure-SOS weight
    double wpure = 1.0 / std::expm1(4.0 * beta);
    for (int n : {3, 5, 7}) {
        double w = std::exp(double(raw.logWeight(sq, n, 0.0)));
        // the double round-off floor of w itself dominates once e^{-4 beta n}
        // drops below ~1e-19
        CHECK(std::abs(w - wpure) < 10.0 * std::exp(-4.0 * beta * n) + 1e-18);
    }
}

TEST_CASE("monotonicity of raw weights in u") {
    double beta = 2.0;
    WeightTable wt(beta);
    double J = couplingJ(beta);
    // all classes with trail length <= 8: interiors of size <= 3 and the 2x2 block
    std::vector<std::vector<Cell>> interiors = {
        {{0, 0}},
        {{0, 0}, {1, 0}},
        {{0, 0}, {1, 0}, {2, 0}},
        {{0, 0}, {1, 0}, {0, 1}},
        {{0, 0}, {1, 0}, {0, 1}, {1, 1}},
        {{0, 0}, {1, 1}},  // pinched pair
    };
    for (auto& cells : interiors) {
        int id = wt.classOfInterior(cells);
        for (int sign : {+1, -1})
            for (int n : {0, 1, 2, 3}) {
                if (sign < 0 && n == 0) continue;
                double prev = std::numeric_limits<double>::quiet_NaN();
                for (int i = 0; i <= 12; ++i) {
                    double u = 300.0 * J * J * i / 12.0;
                    double w = double(wt.logWeight(id, sign, n, wallY(beta, u)));
                    if (i > 0) {
                        if (sign > 0) CHECK(w <= prev + 1e-20);
                        else CHECK(w >= prev - 1e-20);
                    }
                    prev = w;
                }
            }
    }
}

TEST_CASE("KP criterion") {
    WeightTable pure(6.0, WeightTable::PureSOS);
    KPResult r = kpCheck(pure, 0, 0.0, {0, 0}, 10);
    CHECK(r.pass);
    CHECK(r.lhs > 0.0);
    WeightTable tr(2.5, WeightTable::Truncated);
    KPResult r2 = kpCheck(tr, 1, 0.01, {0, 0}, 8);
    CHECK(std::isfinite(r2.lhs));
    CHECK(r2.lhs > 0.0);
}

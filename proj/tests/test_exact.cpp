#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "soslab/exact.hpp"

using namespace soslab;

// brute-force reference: sum e^{-beta H} y^{#zeros} over all height maps
struct Brute {
    std::vector<Cell> cells;
    std::vector<std::pair<int, int>> boxes;
    int bc;

    int heightAt(const std::vector<int>& h, Cell c) const {
        for (size_t i = 0; i < cells.size(); ++i)
            if (cells[i] == c) return h[i];
        return bc;
    }
    long long energy(const std::vector<int>& h) const {
        long long e = 0;
        for (size_t i = 0; i < cells.size(); ++i) {
            Cell c = cells[i];
            e += std::abs(h[i] - heightAt(h, {c.x + 1, c.y}));
            e += std::abs(h[i] - heightAt(h, {c.x, c.y + 1}));
            bool leftIn = false, upIn = false;
            for (auto& d : cells) {
                if (d == Cell{c.x - 1, c.y}) leftIn = true;
                if (d == Cell{c.x, c.y - 1}) upIn = true;
            }
            if (!leftIn) e += std::abs(h[i] - bc);
            if (!upIn) e += std::abs(h[i] - bc);
        }
        return e;
    }
    std::vector<double> poly(double beta) const {
        std::vector<double> coeff(cells.size() + 1, 0.0);
        std::vector<int> h(cells.size());
        for (size_t i = 0; i < cells.size(); ++i) h[i] = boxes[i].first;
        for (;;) {
            int zeros = 0;
            for (int v : h) zeros += (v == 0);
            coeff[size_t(zeros)] += std::exp(-beta * double(energy(h)));
            size_t i = 0;
            while (i < h.size() && h[i] == boxes[i].second) { h[i] = boxes[i].first; ++i; }
            if (i == h.size()) break;
            ++h[i];
        }
        return coeff;
    }
};

TEST_CASE("polynomial matches brute force on a 3x2 box") {
    double beta = 0.7;
    TransferDomain d;
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) d.cells.push_back({x, y});
    d.boundaryValue = 1;
    d.hmin = 0;
    d.hmax = 3;
    auto p = transferPoly<double>(d, beta);
    Brute b{d.cells, std::vector<std::pair<int, int>>(6, {0, 3}), 1};
    auto ref = b.poly(beta);
    REQUIRE(p.coeff.size() == ref.size());
    double sc = std::exp(double(p.logScale));
    for (size_t j = 0; j < ref.size(); ++j)
        CHECK(double(p.coeff[j]) * sc == doctest::Approx(ref[j]).epsilon(1e-12));
    // fixed-y evaluation agrees with the tracked polynomial
    for (double y : {0.5, 1.0, 2.3}) {
        double direct = double(logEval(transferAt<double>(d, beta, y), 1.0));
        double viaPoly = double(logEval(p, y));
        CHECK(direct == doctest::Approx(viaPoly).epsilon(1e-13));
    }
}

TEST_CASE("non-rectangular shape with a hole and per-cell boxes") {
    double beta = 1.1;
    TransferDomain d;
    // 3x3 minus centre, plus a dangling cell
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x)
            if (!(x == 1 && y == 1)) d.cells.push_back({x, y});
    d.cells.push_back({4, 1});
    d.boundaryValue = 0;
    d.hmin = 0;
    d.hmax = 2;
    d.boxes.assign(d.cells.size(), {0, 2});
    d.boxes[0] = {1, 2};
    d.boxes[3] = {0, 0};
    auto p = transferPoly<double>(d, beta);
    Brute b{d.cells, d.boxes, 0};
    auto ref = b.poly(beta);
    double sc = std::exp(double(p.logScale));
    for (size_t j = 0; j < ref.size(); ++j)
        CHECK(double(p.coeff[j]) * sc == doctest::Approx(ref[j]).epsilon(1e-12));
}

TEST_CASE("nonzero window floor and tall-box transpose") {
    double beta = 0.9;
    TransferDomain d;
    for (int y = 0; y < 4; ++y) d.cells.push_back({0, y});
    d.boundaryValue = 3;
    d.hmin = 2;
    d.hmax = 5;
    auto p = transferAt<double>(d, beta, 1.0);
    Brute b{d.cells, std::vector<std::pair<int, int>>(4, {2, 5}), 3};
    auto ref = b.poly(beta);
    double tot = 0;
    for (double v : ref) tot += v;
    CHECK(double(logEval(p, 1.0)) == doctest::Approx(std::log(tot)).epsilon(1e-13));
    CHECK(!transposeIfTall(d));  // a column already has minimal width
    for (Cell& c : d.cells) std::swap(c.x, c.y);
    CHECK(transposeIfTall(d));  // the row gets turned back into a column
    auto p2 = transferAt<double>(d, beta, 1.0);
    CHECK(double(logEval(p2, 1.0)) == doctest::Approx(std::log(tot)).epsilon(1e-13));
}

TEST_CASE("single-site closed forms") {
    for (double beta : {1.0, 2.0}) {
        double q = std::exp(-4.0 * beta);
        // wall + critical reward: Z = y + q/(1-q) with y = 1/(1-q)
        auto r = wallPartition(1, 1, beta, 0.0, 0, -1, true);
        double want = std::log((1.0 + q) / (1.0 - q));
        CHECK(double(r.logZ) == doctest::Approx(want).epsilon(1e-10));
        // free field: Z = (1+q)/(1-q)
        auto fr = freePartition(1, 1, beta, -1, true);
        CHECK(double(fr.logZ) == doctest::Approx(want).epsilon(1e-10));
        // peak: P[phi >= n] = q^n/(1+q)
        for (int n : {1, 2, 3}) {
            double p = peakProbability(1, 1, {{0, 0}}, n, beta);
            CHECK(p == doctest::Approx(std::pow(q, n) / (1.0 + q)).epsilon(1e-9));
        }
    }
}

TEST_CASE("pinning free energy closed forms") {
    for (double beta : {1.5, 2.0, 2.5}) {
        double J = couplingJ(beta);
        double single = double(hbar({{0, 0}}, beta));
        CHECK(std::abs(single) < 1e-12);
        double pair = double(hbar({{0, 0}, {1, 0}}, beta));
        double want = std::log((1.0 - std::pow(J, 4)) / (1.0 - std::pow(J, 3)));
        CHECK(pair == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("ursell functions against brute force") {
    double beta = 0.8, u = 0.1;
    int n = 1;
    int hmax = autoHmax(beta, n, 6);  // match the library cap so truncation cancels
    int W = 3, H = 2;
    double y = std::exp(wettingH(beta) + u);
    Brute b;
    for (int yy = 0; yy < H; ++yy)
        for (int xx = 0; xx < W; ++xx) b.cells.push_back({xx, yy});
    b.boxes.assign(b.cells.size(), {0, hmax});
    b.bc = n;
    auto evalY = [&](const std::vector<double>& c) {
        double s = 0, pw = 1;
        for (double v : c) { s += v * pw; pw *= y; }
        return s;
    };
    double Z = evalY(b.poly(beta));
    auto Edel = [&](std::vector<size_t> idx) {
        Brute c = b;
        for (size_t i : idx) c.boxes[i] = {0, 0};
        return evalY(c.poly(beta)) / Z;
    };
    // k = 2 on sites 0 and 4
    double ref2 = Edel({0, 4}) - Edel({0}) * Edel({4});
    double got2 = double(ursellWall(W, H, beta, u, n, {b.cells[0], b.cells[4]}));
    CHECK(got2 == doctest::Approx(ref2).epsilon(1e-8));
    // k = 3 on sites 0, 2, 4
    double ref3 = Edel({0, 2, 4}) - Edel({0, 2}) * Edel({4}) - Edel({0, 4}) * Edel({2}) -
                  Edel({2, 4}) * Edel({0}) + 2 * Edel({0}) * Edel({2}) * Edel({4});
    double got3 = double(ursellWall(W, H, beta, u, n, {b.cells[0], b.cells[2], b.cells[4]}));
    CHECK(got3 == doctest::Approx(ref3).epsilon(1e-6));
}

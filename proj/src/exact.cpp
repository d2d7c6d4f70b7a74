#include "soslab/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace soslab {

double wettingH(double beta) {
    // log(e^{4b}/(e^{4b}-1)) = -log(1 - e^{-4b})
    return -std::log1p(-std::exp(-4.0 * beta));
}

f128 wallY(double beta, double u) {
    using std::exp;
    f128 b = beta;
    return exp(f128(u)) / (1 - exp(-4 * b));
}

int autoHmax(double beta, int n, long long nCells) {
    // make 2|L| e^{-4b(hmax-n)} <= 1e-12 * something O(1); a fixed 1e-13 target
    double need = (std::log(2.0 * double(nCells)) + 13.0 * std::log(10.0)) / (4.0 * beta);
    return n + std::max(4, int(std::ceil(need)) + 1);
}

static double tailBoundFor(double beta, int n, long long nCells, int hmax) {
    return 2.0 * double(nCells) * std::exp(-4.0 * beta * double(hmax - n));
}

static TransferDomain boxDomain(int W, int H, int bc, int hmin, int hmax) {
    if (W < 1 || H < 1) throw std::invalid_argument("degenerate box");
    TransferDomain d;
    d.cells.reserve(size_t(W) * H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) d.cells.push_back({x, y});
    d.boundaryValue = bc;
    d.hmin = hmin;
    d.hmax = hmax;
    transposeIfTall(d);
    return d;
}

BoxResult wallPartition(int W, int H, double beta, double u, int n, int hmax, bool quad) {
    if (hmax < 0) hmax = autoHmax(beta, n, (long long)W * H);
    TransferDomain d = boxDomain(W, H, n, 0, hmax);
    BoxResult r;
    r.hmaxUsed = hmax;
    r.tailBound = tailBoundFor(beta, n, (long long)W * H, hmax);
    if (quad) {
        f128 y = wallY(beta, u);
        r.logZ = logEval(transferAt<f128>(d, beta, y), f128(1));
    } else {
        double y = std::exp(wettingH(beta) + u);
        r.logZ = logEval(transferAt<double>(d, beta, y), 1.0);
    }
    return r;
}

BoxResult freePartition(int W, int H, double beta, int depth, bool quad) {
    if (depth < 0) {
        double need = (std::log(2.0 * double(W) * H) + 13.0 * std::log(10.0)) / (4.0 * beta);
        depth = std::max(4, int(std::ceil(need)) + 1);
    }
    TransferDomain d = boxDomain(W, H, depth, 0, 2 * depth);
    BoxResult r;
    r.hmaxUsed = 2 * depth;
    r.tailBound = tailBoundFor(beta, 0, (long long)W * H, depth);
    if (quad)
        r.logZ = logEval(transferAt<f128>(d, beta, f128(1)), f128(1));
    else
        r.logZ = logEval(transferAt<double>(d, beta, 1.0), 1.0);
    return r;
}

f128 hbar(const std::vector<Cell>& sites, double beta) {
    using std::exp; using std::log;
    if (sites.empty()) return 0;
    int hmax = autoHmax(beta, 0, (long long)sites.size());
    TransferDomain d;
    d.cells = sites;
    d.boundaryValue = 0;
    d.hmin = 0;
    d.hmax = hmax;
    transposeIfTall(d);
    // wall at zero, no reward term
    f128 logZ = logEval(transferAt<f128>(d, beta, f128(1)), f128(1));
    // subtract |G| log(e^{4b}/(e^{4b}-1)) = -|G| log(1 - e^{-4b})
    f128 b = beta;
    return logZ + f128(int(sites.size())) * log(1 - exp(-4 * b));
}

double peakProbability(int W, int H, const std::vector<Cell>& sites, int level, double beta) {
    if (level < 1) throw std::invalid_argument("peak level must be >= 1");
    long long nc = (long long)W * H;
    int d0 = int(std::ceil((21.0 + std::log(2.0 * double(nc))) / (4.0 * beta))) + 1;
    int n0 = d0;  // boundary height inside the window
    TransferDomain dom = boxDomain(W, H, n0, 0, n0 + level + d0);
    f128 logZ = logEval(transferAt<f128>(dom, beta, f128(1)), f128(1));
    // constrained copy: sites >= n0 + level
    TransferDomain cdom = dom;
    cdom.boxes.assign(cdom.cells.size(), {cdom.hmin, cdom.hmax});
    for (const Cell& s : sites) {
        Cell t = s;
        // boxDomain transposes when W > H; mirror that here
        if (W > H) std::swap(t.x, t.y);
        bool found = false;
        for (size_t i = 0; i < cdom.cells.size(); ++i)
            if (cdom.cells[i] == t) {
                cdom.boxes[i].first = n0 + level;
                found = true;
                break;
            }
        if (!found) throw std::invalid_argument("peak site outside box");
    }
    f128 logZc = logEval(transferAt<f128>(cdom, beta, f128(1)), f128(1));
    using std::exp;
    return double(exp(logZc - logZ));
}

f128 ursellWall(int W, int H, double beta, double u, int n, const std::vector<Cell>& sites) {
    if (sites.empty() || sites.size() > 3) throw std::invalid_argument("need 1..3 sites");
    int hmax = autoHmax(beta, n, (long long)W * H);
    f128 y = wallY(beta, u);
    auto logZsub = [&](unsigned mask) {
        TransferDomain d = boxDomain(W, H, n, 0, hmax);
        d.boxes.assign(d.cells.size(), {d.hmin, d.hmax});
        for (size_t k = 0; k < sites.size(); ++k) {
            if (!(mask & (1u << k))) continue;
            Cell t = sites[k];
            if (W > H) std::swap(t.x, t.y);
            bool found = false;
            for (size_t i = 0; i < d.cells.size(); ++i)
                if (d.cells[i] == t) { d.boxes[i].second = 0; found = true; break; }
            if (!found) throw std::invalid_argument("site outside box");
        }
        return logEval(transferAt<f128>(d, beta, y), f128(1));
    };
    using std::exp;
    f128 lz = logZsub(0);
    auto E = [&](unsigned mask) { return exp(logZsub(mask) - lz); };
    size_t k = sites.size();
    if (k == 1) return E(1);
    if (k == 2) return E(3) - E(1) * E(2);
    return E(7) - E(3) * E(4) - E(5) * E(2) - E(6) * E(1) + 2 * E(1) * E(2) * E(4);
}

}  // namespace soslab

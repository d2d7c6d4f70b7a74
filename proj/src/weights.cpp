#include "soslab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "soslab/enumerate.hpp"
#include "soslab/exact.hpp"

namespace soslab {

std::vector<Cell> canonicalInterior(std::vector<Cell> cells) {
    auto normalize = [](std::vector<Cell>& v) {
        int mx = v[0].x, my = v[0].y;
        for (const Cell& c : v) { mx = std::min(mx, c.x); my = std::min(my, c.y); }
        for (Cell& c : v) { c.x -= mx; c.y -= my; }
        std::sort(v.begin(), v.end());
    };
    std::vector<Cell> best;
    for (int t = 0; t < 8; ++t) {
        std::vector<Cell> v = cells;
        for (Cell& c : v) {
            if (t & 4) std::swap(c.x, c.y);
            if (t & 1) c.x = -c.x;
            if (t & 2) c.y = -c.y;
        }
        normalize(v);
        if (best.empty() || v < best) best = std::move(v);
    }
    return best;
}

WeightTable::WeightTable(double beta, Mode mode) : beta_(beta), mode_(mode) {}

int WeightTable::classOfInterior(std::vector<Cell> interior) {
    std::vector<Cell> key = canonicalInterior(std::move(interior));
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    ShapeClass sc;
    sc.cells = key;
    std::set<Cell> in(key.begin(), key.end());
    sc.onCollar.resize(key.size());
    for (size_t i = 0; i < key.size(); ++i) {
        const Cell c = key[i];
        int inner = int(in.count({c.x + 1, c.y})) + int(in.count({c.x - 1, c.y})) +
                    int(in.count({c.x, c.y + 1})) + int(in.count({c.x, c.y - 1}));
        sc.onCollar[i] = inner < 4;
        sc.length += 4 - inner;
    }
    int id = int(shapes_.size());
    shapes_.push_back(std::move(sc));
    ids_.emplace(std::move(key), id);
    return id;
}

int WeightTable::classOf(const Contour& c) { return classOfInterior(interiorOf(c)); }

f128 WeightTable::logZ(int id, int eps, int m, int c, const f128& y) {
    auto key = std::make_tuple(id, eps, m, c);
    auto it = polys_.find(key);
    if (it == polys_.end()) {
        const ShapeClass& sc = shapes_[size_t(id)];
        TransferDomain d;
        d.cells = sc.cells;
        d.boundaryValue = m;
        d.hmin = 0;
        // quad-precision mass below ~1e-34 is invisible; pad a little past it
        d.hmax = std::max(m, c) + int(std::ceil(36.0 * std::log(10.0) / (4.0 * beta_))) + 2;
        d.boxes.assign(d.cells.size(), {d.hmin, d.hmax});
        for (size_t i = 0; i < sc.cells.size(); ++i) {
            if (!sc.onCollar[i]) continue;
            if (eps > 0) d.boxes[i].first = std::max(d.boxes[i].first, c);
            else d.boxes[i].second = std::min(d.boxes[i].second, c);
        }
        transposeIfTall(d);
        it = polys_.emplace(key, transferPoly<f128>(d, beta_)).first;
    }
    return logEval(it->second, y);
}

f128 WeightTable::logRawWeight(int id, int sign, int n, const f128& y) {
    using std::exp; using std::log;
    if (sign < 0 && n == 0) return -std::numeric_limits<f128>::infinity();
    const ShapeClass& sc = shapes_[size_t(id)];
    f128 num = logZ(id, sign, n + sign, n + sign, y);
    // zbar: boundary n both times, constraint level n minus constraint n+sign
    f128 a = logZ(id, sign, n, n, y);
    f128 b = logZ(id, sign, n, n + sign, y);
    // a > b strictly; log(e^a - e^b) = a + log(1 - e^{b-a})
    f128 lzbar = a + log(1 - exp(b - a));
    return f128(-beta_ * sc.length) + num - lzbar;
}

f128 WeightTable::logPureWeight(int length) const {
    using std::exp; using std::log;
    f128 bl = f128(beta_) * length;
    return -bl - log(1 - exp(-bl));
}

f128 WeightTable::logWeight(int id, int sign, int n, const f128& y) {
    if (mode_ == PureSOS) return logPureWeight(shapes_[size_t(id)].length);
    f128 w = logRawWeight(id, sign, n, y);
    if (mode_ == Truncated) {
        f128 cap = f128(-(beta_ - 1.0) * shapes_[size_t(id)].length);
        return std::min(w, cap);
    }
    return w;
}

f128 WeightTable::logWeight(const Contour& c, int n, double u) {
    return logWeight(classOf(c), c.sign, n, wallY(beta_, u));
}

bool WeightTable::isStable(int id, int sign, int n, const f128& y) {
    if (mode_ == PureSOS) return beta_ >= 1.0;
    f128 cap = f128(-(beta_ - 1.0) * shapes_[size_t(id)].length);
    return logRawWeight(id, sign, n, y) <= cap;
}

bool WeightTable::isStable(const Contour& c, int n, double u) {
    return isStable(classOf(c), c.sign, n, wallY(beta_, u));
}

KPResult kpCheck(WeightTable& wt, int n, double u, DualVertex anchor, int maxLen) {
    using std::exp;
    const double beta = wt.beta();
    const int R = maxLen / 2;
    TrailSpec spec{anchor.a - R, anchor.a + R, anchor.b - R, anchor.b + R, maxLen, anchor, std::nullopt};
    f128 y = wallY(beta, u);
    f128 lhs = 0;
    for (const Contour& t : enumerateTrails(spec)) {
        int id = wt.classOf(t);
        for (int sign : {+1, -1})
            lhs += exp(f128((beta - 4.0) * t.length()) + wt.logWeight(id, sign, n, y));
    }
    KPResult r;
    r.lhs = double(lhs);
    // counting tail: <= 2 * 3^k contours per length k, each weight <= e^{-(beta-1)k},
    // so the remainder is bounded by sum over even k > maxLen of 2 (3 e^{-3})^k
    double q = 3.0 * std::exp(-3.0);
    r.tail = 2.0 * std::pow(q, maxLen + 2) / (1.0 - q * q);
    r.pass = r.lhs + r.tail <= 1.0;
    return r;
}

}  // namespace soslab

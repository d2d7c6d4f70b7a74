#include "soslab/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "soslab/exact.hpp"

namespace soslab {

namespace {

// inclusion-exclusion over sub-collections: Z[S] via the polymer recursion
// Z[S] = Z[S\i] + w_i Z[(S\i) & compat_i], then the alternating log sum
f128 wtFromMasks(const std::vector<f128>& w, const std::vector<unsigned>& compat) {
    using std::log;
    const int m = int(w.size());
    const unsigned full = (1u << m) - 1;
    std::vector<f128> Z(size_t(full) + 1);
    Z[0] = 1;
    for (unsigned mask = 1; mask <= full; ++mask) {
        const int i = std::countr_zero(mask);
        const unsigned rest = mask & (mask - 1);
        Z[mask] = Z[rest] + w[size_t(i)] * Z[rest & compat[size_t(i)]];
    }
    f128 acc = 0;
    for (unsigned mask = 1; mask <= full; ++mask) {
        const int parity = (m - std::popcount(mask)) & 1;
        const f128 term = log(Z[mask]);
        acc += parity ? -term : term;
    }
    return acc;
}

}  // namespace

ClusterTerm clusterWT(const ContourCollection& cluster, WeightTable& wt, int n, double u,
                      int sizeCap) {
    using std::exp;
    if (cluster.kind != ContourCollection::Cluster)
        throw std::invalid_argument("collection is not a cluster");
    const int m = int(cluster.items.size());
    if (m > sizeCap) throw std::invalid_argument("cluster exceeds the size cap");
    const f128 y = wallY(wt.beta(), u);
    std::vector<f128> w(static_cast<size_t>(m));
    std::vector<ContourGeometry> geo(static_cast<size_t>(m));
    ClusterTerm t;
    std::vector<DualVertex> verts;
    for (int i = 0; i < m; ++i) {
        w[size_t(i)] = exp(wt.logWeight(wt.classOf(cluster.items[size_t(i)]),
                                        cluster.items[size_t(i)].sign, n, y));
        geo[size_t(i)] = geometryOf(cluster.items[size_t(i)]);
        t.totalLen += cluster.items[size_t(i)].length();
        verts.insert(verts.end(), geo[size_t(i)].vertices.begin(), geo[size_t(i)].vertices.end());
    }
    std::sort(verts.begin(), verts.end());
    t.sites = int(std::unique(verts.begin(), verts.end()) - verts.begin());
    std::vector<unsigned> compat(size_t(m), 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j && isCompatible(cluster.items[size_t(i)], geo[size_t(i)],
                                       cluster.items[size_t(j)], geo[size_t(j)]))
                compat[size_t(i)] |= 1u << j;
    t.wT = wtFromMasks(w, compat);
    return t;
}

FreeEnergyValue freeEnergyDensity(WeightTable& wt, int n, double u, int Lmax, DualVertex anchor) {
    const int R = Lmax;
    TrailSpec spec{anchor.a - R, anchor.a + R, anchor.b - R, anchor.b + R, Lmax,
                   std::nullopt, std::nullopt};
    std::vector<Contour> pool;
    for (Contour c : enumerateTrails(spec)) {
        c.sign = +1; pool.push_back(c);
        c.sign = -1; pool.push_back(c);
    }
    std::sort(pool.begin(), pool.end());
    FreeEnergyValue out;
    out.Lmax = Lmax;
    std::vector<double> shells(size_t(Lmax) + 1, 0.0);
    for (const auto& cl : enumerateClusters(pool, Lmax, anchor)) {
        ClusterTerm t = clusterWT(cl, wt, n, u);
        out.value += t.wT / t.sites;
        shells[size_t(t.totalLen)] += std::abs(double(t.wT)) / t.sites;
    }
    /* contour-free sites sit exactly at the boundary level; at level 0 each
       collects the contact reward, a per-site background on top of the gas */
    if (wt.mode() != WeightTable::PureSOS && n == 0)
        out.value += log(wallY(wt.beta(), u));
    // tail template: rigorous only deep in the convergent regime
    double beta = wt.beta();
    if (beta > 5.0) {
        out.truncError = 8.0 * std::exp(-(beta - 5.0) * (Lmax + 2));
        out.rigorousTail = true;
    } else {
        double s1 = shells[size_t(Lmax - 4)], s3 = shells[size_t(Lmax)];
        double r = (s1 > 0 && s3 > 0) ? std::sqrt(s3 / s1) : 0.0;
        out.truncError = (r > 0 && r < 1) ? s3 * r / (1.0 - r) : s3;
        out.rigorousTail = false;
    }
    switch (wt.mode()) {
        case WeightTable::PureSOS: out.label = "pure-SOS"; break;
        case WeightTable::Truncated: out.label = "truncated-level-" + std::to_string(n); break;
        default: out.label = "full-with-weights-w"; break;
    }
    return out;
}

ClusterSet::ClusterSet(WeightTable& wt, int Lmax) : wt_(wt), Lmax_(Lmax) {
    const DualVertex origin{0, 0};
    // translation classes of single contours: smallest visited vertex at origin
    {
        TrailSpec spec{0, Lmax / 2, -Lmax / 2, Lmax / 2, Lmax, origin, origin};
        std::map<std::pair<int, int>, long long> acc;
        for (const Contour& t : enumerateTrails(spec)) {
            int id = wt_.classOf(t);
            acc[{id, +1}]++;
            acc[{id, -1}]++;
        }
        for (auto& [key, cnt] : acc) singles_.push_back({key.first, key.second, cnt});
    }
    // multi-contour clusters: every member length <= Lmax-4, all vertices
    // lex >= origin, some member through the origin
    {
        const int R = Lmax - 2;
        TrailSpec spec{0, R, -R, R, Lmax - 4, std::nullopt, origin};
        std::vector<Contour> pool;
        for (Contour c : enumerateTrails(spec)) {
            c.sign = +1; pool.push_back(c);
            c.sign = -1; pool.push_back(c);
        }
        IncompatGraph g(std::move(pool));
        std::vector<int> roots;
        for (int i = 0; i < int(g.pool().size()); ++i) {
            const auto& v = g.geometry(i).vertices;
            if (std::binary_search(v.begin(), v.end(), origin)) roots.push_back(i);
        }
        for (const auto& sub : connectedSubsets(g, roots, Lmax, 8)) {
            if (sub.size() < 2) continue;
            Multi mu;
            const int m = int(sub.size());
            for (int idx : sub) {
                mu.ids.push_back(wt_.classOf(g.pool()[size_t(idx)]));
                mu.signs.push_back(g.pool()[size_t(idx)].sign);
                mu.totalLen += g.pool()[size_t(idx)].length();
            }
            mu.compat.assign(size_t(m), 0u);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    if (i != j && !g.incompatible(sub[size_t(i)], sub[size_t(j)]))
                        mu.compat[size_t(i)] |= 1u << j;
            multis_.push_back(std::move(mu));
        }
    }
}

template <class W>
f128 ClusterSet::evalWith(W&& logw, std::vector<double>* shells) {
    using std::exp; using std::log;
    std::unordered_map<int, f128> wMemo, l1pMemo;
    auto wOf = [&](int id, int sign) {
        int key = id * 2 + (sign > 0);
        auto it = wMemo.find(key);
        if (it == wMemo.end()) it = wMemo.emplace(key, exp(logw(id, sign))).first;
        return it->second;
    };
    auto l1pOf = [&](int id, int sign) {
        int key = id * 2 + (sign > 0);
        auto it = l1pMemo.find(key);
        if (it == l1pMemo.end()) it = l1pMemo.emplace(key, log(1 + wOf(id, sign))).first;
        return it->second;
    };
    f128 f = 0;
    for (const Single& s : singles_) {
        f128 term = f128(s.count) * l1pOf(s.id, s.sign);
        f += term;
        if (shells) (*shells)[size_t(wt_.shape(s.id).length)] += std::abs(double(term));
    }
    std::vector<f128> w;
    for (const Multi& mu : multis_) {
        w.clear();
        for (size_t i = 0; i < mu.ids.size(); ++i) w.push_back(wOf(mu.ids[i], mu.signs[i]));
        f128 term = wtFromMasks(w, mu.compat);
        f += term;
        if (shells) (*shells)[size_t(mu.totalLen)] += std::abs(double(term));
    }
    return f;
}

double ClusterSet::tailEstimate(const std::vector<double>& shells, bool* rigorous) const {
    double beta = wt_.beta();
    if (beta > 5.0) {
        if (rigorous) *rigorous = true;
        return 8.0 * std::exp(-(beta - 5.0) * (Lmax_ + 2));
    }
    if (rigorous) *rigorous = false;
    double s1 = shells[size_t(Lmax_ - 4)], s3 = shells[size_t(Lmax_)];
    double r = (s1 > 0 && s3 > 0) ? std::sqrt(s3 / s1) : 0.0;
    return (r > 0 && r < 1) ? s3 * r / (1.0 - r) : s3;
}

FreeEnergyValue ClusterSet::eval(int n, double u) {
    f128 y = wallY(wt_.beta(), u);
    std::vector<double> shells(size_t(Lmax_) + 1, 0.0);
    FreeEnergyValue out;
    out.value = evalWith([&](int id, int sign) { return wt_.logWeight(id, sign, n, y); }, &shells);
    if (wt_.mode() != WeightTable::PureSOS && n == 0) out.value += log(y);
    out.Lmax = Lmax_;
    out.truncError = tailEstimate(shells, &out.rigorousTail);
    lastShell_ = shells[size_t(Lmax_)];
    switch (wt_.mode()) {
        case WeightTable::PureSOS: out.label = "pure-SOS"; break;
        case WeightTable::Truncated: out.label = "truncated-level-" + std::to_string(n); break;
        default: out.label = "full-with-weights-w"; break;
    }
    return out;
}

f128 ClusterSet::delta(int nLow, int nHigh, double u, double* tail) {
    using std::exp; using std::log;
    f128 y = wallY(wt_.beta(), u);
    std::vector<double> shells(size_t(Lmax_) + 1, 0.0);
    std::unordered_map<int, std::pair<f128, f128>> memo;  // (id,sign) -> (wLow, wHigh)
    auto wPair = [&](int id, int sign) {
        int key = id * 2 + (sign > 0);
        auto it = memo.find(key);
        if (it == memo.end())
            it = memo.emplace(key, std::make_pair(exp(wt_.logWeight(id, sign, nLow, y)),
                                                  exp(wt_.logWeight(id, sign, nHigh, y))))
                     .first;
        return it->second;
    };
    f128 d = 0;
    if (wt_.mode() != WeightTable::PureSOS) {
        if (nLow == 0) d += log(y);
        if (nHigh == 0) d -= log(y);
    }
    for (const Single& s : singles_) {
        auto [a, b] = wPair(s.id, s.sign);
        f128 term = f128(s.count) * (log(1 + a) - log(1 + b));
        d += term;
        shells[size_t(wt_.shape(s.id).length)] += std::abs(double(term));
    }
    std::vector<f128> wa, wb;
    for (const Multi& mu : multis_) {
        wa.clear(); wb.clear();
        for (size_t i = 0; i < mu.ids.size(); ++i) {
            auto [a, b] = wPair(mu.ids[i], mu.signs[i]);
            wa.push_back(a);
            wb.push_back(b);
        }
        f128 term = wtFromMasks(wa, mu.compat) - wtFromMasks(wb, mu.compat);
        d += term;
        shells[size_t(mu.totalLen)] += std::abs(double(term));
    }
    if (tail) *tail = tailEstimate(shells, nullptr);
    return d;
}

f128 logRestrictedPure(const Contour& c, double beta) {
    ContourGeometry g = geometryOf(c);
    int d0 = int(std::ceil(36.0 * std::log(10.0) / (4.0 * beta))) + 2;
    TransferDomain dom;
    dom.cells = g.interior;
    dom.boundaryValue = d0;
    dom.hmin = 0;
    dom.hmax = 2 * d0;
    dom.boxes.assign(dom.cells.size(), {dom.hmin, dom.hmax});
    for (size_t i = 0; i < dom.cells.size(); ++i) {
        if (!std::binary_search(g.deltaMinus.begin(), g.deltaMinus.end(), dom.cells[i])) continue;
        if (c.sign > 0) dom.boxes[i].first = d0;
        else dom.boxes[i].second = d0;
    }
    transposeIfTall(dom);
    return logEval(transferAt<f128>(dom, beta, f128(1)), f128(1));
}

}  // namespace soslab

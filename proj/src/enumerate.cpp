#include "soslab/enumerate.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace soslab {

namespace {

int dist(DualVertex u, DualVertex v) { return std::abs(u.a - v.a) + std::abs(u.b - v.b); }

struct TrailDfs {
    const TrailSpec& spec;
    std::vector<Contour>& out;
    Edge e0;
    DualVertex startV;
    std::vector<Edge> used;
    std::unordered_map<DualVertex, int, DualVertexHash> deg;
    bool anchorSeen = false;

    TrailDfs(const TrailSpec& s, std::vector<Contour>& o) : spec(s), out(o) {}

    bool vertexOk(DualVertex v) const {
        if (v.a < spec.aLo || v.a > spec.aHi || v.b < spec.bLo || v.b > spec.bHi) return false;
        if (spec.minVertex) {
            auto m = *spec.minVertex;
            if (v.a < m.a || (v.a == m.a && v.b < m.b)) return false;
        }
        return true;
    }

    void run(Edge start) {
        e0 = start;
        auto ends = edgeEndpoints(start);
        if (!vertexOk(ends[0]) || !vertexOk(ends[1])) return;
        startV = ends[0];
        used.push_back(start);
        deg[ends[0]]++;
        deg[ends[1]]++;
        anchorSeen = spec.anchor && (ends[0] == *spec.anchor || ends[1] == *spec.anchor);
        step(start, ends[1]);
        used.pop_back();
    }

    void step(Edge cur, DualVertex at) {
        int len = int(used.size());
        // close?
        if (at == startV && len >= 4 && (!spec.anchor || anchorSeen)) {
            bool ok = true;
            if (deg[startV] == 4) {  // closing turn must be linked at a pinch
                ok = linkedDirs(dirFrom(startV, cur), dirFrom(startV, e0));
            }
            if (ok) {
                auto sorted = used;
                std::sort(sorted.begin(), sorted.end());
                out.push_back(Contour{std::move(sorted), +1});
            }
        }
        if (len >= spec.maxLen) return;
        int remaining = spec.maxLen - len;
        int need = dist(at, startV);
        if (spec.anchor && !anchorSeen)
            need = dist(at, *spec.anchor) + dist(*spec.anchor, startV);
        if (need > remaining) return;

        int din = dirFrom(at, cur);
        int d = deg[at];  // counts cur already
        for (int dout = 0; dout < 4; ++dout) {
            if (dout == din) continue;
            if (d >= 3 && dout != 3 - din) continue;  // second pass: forced linked turn
            Edge next = edgeAt(at, dout);
            if (next < e0 || next == e0) continue;
            if (std::find(used.begin(), used.end(), next) != used.end()) continue;
            auto ends = edgeEndpoints(next);
            DualVertex to = (ends[0] == at) ? ends[1] : ends[0];
            if (!vertexOk(to)) continue;
            if (deg[to] >= 4) continue;
            used.push_back(next);
            deg[to]++;
            deg[at] = d + 1;
            bool prevAnchor = anchorSeen;
            if (spec.anchor && to == *spec.anchor) anchorSeen = true;
            step(next, to);
            anchorSeen = prevAnchor;
            deg[at] = d;
            deg[to]--;
            used.pop_back();
        }
    }
};

}  // namespace

std::vector<Contour> enumerateTrails(const TrailSpec& spec) {
    std::vector<Contour> raw;
    TrailDfs dfs(spec, raw);
    for (int a = spec.aLo; a <= spec.aHi; ++a)
        for (int b = spec.bLo; b <= spec.bHi; ++b)
            for (int dir = 0; dir < 2; ++dir) {
                Edge e{a, b, dir};
                TrailDfs d2(spec, raw);
                d2.run(e);
            }
    // dedup (safety) and validate
    std::set<std::vector<Edge>> seen;
    std::vector<Contour> out;
    for (auto& c : raw) {
        if (!seen.insert(c.edges).second) continue;
        if (!isValidContour(c)) continue;
        if (spec.minVertex) {
            // enforce "smallest visited vertex == minVertex" when requested by
            // the caller via anchor==minVertex; plain minVertex is just a bound
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Contour> enumerateContours(int W, int H, int maxLen,
                                       std::optional<DualVertex> anchor) {
    if (maxLen < 4 || maxLen % 2 != 0)
        throw std::invalid_argument("maxLen must be even and >= 4");
    TrailSpec spec{-1, W - 1, -1, H - 1, maxLen, anchor, std::nullopt};
    auto geom = enumerateTrails(spec);
    std::vector<Contour> out;
    out.reserve(2 * geom.size());
    for (auto& c : geom) {
        out.push_back(c);
        out.push_back(Contour{c.edges, -1});
    }
    std::sort(out.begin(), out.end());
    return out;
}

IncompatGraph::IncompatGraph(std::vector<Contour> pool) : pool_(std::move(pool)) {
    geo_.reserve(pool_.size());
    for (size_t i = 0; i < pool_.size(); ++i) {
        geo_.push_back(geometryOf(pool_[i]));
        const auto& g = geo_.back();
        auto add = [&](const Cell& c) { cellIndex_[c].push_back(int(i)); };
        for (auto& c : g.interior) add(c);
        for (auto& c : g.deltaMinus) add(c);
        for (auto& c : g.deltaPlus) add(c);
    }
    nbrCache_.resize(pool_.size());
}

bool IncompatGraph::incompatible(int i, int j) const {
    if (i == j) return false;
    return !isCompatible(pool_[i], geo_[i], pool_[j], geo_[j]);
}

const std::vector<int>& IncompatGraph::neighbors(int i) {
    if (nbrCache_[i]) return *nbrCache_[i];
    std::unordered_set<int> cand;
    const auto& g = geo_[i];
    auto scan = [&](const Cell& c) {
        auto it = cellIndex_.find(c);
        if (it != cellIndex_.end())
            for (int j : it->second)
                if (j != i) cand.insert(j);
    };
    for (auto& c : g.interior) scan(c);
    for (auto& c : g.deltaMinus) scan(c);
    for (auto& c : g.deltaPlus) scan(c);
    std::vector<int> nbrs;
    for (int j : cand)
        if (incompatible(i, j)) nbrs.push_back(j);
    std::sort(nbrs.begin(), nbrs.end());
    nbrCache_[i] = std::move(nbrs);
    return *nbrCache_[i];
}

namespace {

/* Connected-subset growth: emit S, then for each extension candidate v branch
   into "include v" (recurse with v's fresh neighbors added to the frontier)
   and "exclude v for the rest of this frame" (forb). forb flips are undone on
   frame exit so sibling subtrees are unaffected. */
void growClusters(IncompatGraph& g, std::vector<int>& S, int lenS,
                  std::vector<int> ext, std::vector<char>& forb,
                  int maxTotalLen, int sizeCap,
                  std::vector<std::vector<int>>& out) {
    out.push_back(S);
    std::vector<int> flipped;
    while (!ext.empty()) {
        int v = ext.back();
        ext.pop_back();
        if (forb[v]) continue;  // already decided in this frame
        forb[v] = 1;
        flipped.push_back(v);
        int lv = g.pool()[v].length();
        if (int(S.size()) < sizeCap && lenS + lv <= maxTotalLen) {
            std::vector<int> newExt = ext;
            for (int w : g.neighbors(v))
                if (!forb[w]) newExt.push_back(w);
            S.push_back(v);
            growClusters(g, S, lenS + lv, std::move(newExt), forb, maxTotalLen, sizeCap, out);
            S.pop_back();
        }
    }
    for (int v : flipped) forb[v] = 0;
}

}  // namespace

std::vector<std::vector<int>> connectedSubsets(IncompatGraph& g,
                                               const std::vector<int>& roots,
                                               int maxTotalLen, int sizeCap) {
    std::vector<std::vector<int>> out;
    const int n = int(g.pool().size());
    std::vector<char> isRoot(n, 0);
    for (int r : roots) isRoot[r] = 1;
    for (size_t ri = 0; ri < roots.size(); ++ri) {
        int r = roots[ri];
        if (g.pool()[r].length() > maxTotalLen) continue;
        std::vector<char> forb(n, 0);
        for (size_t rj = 0; rj < ri; ++rj) forb[roots[rj]] = 1;  // dedup across roots
        forb[r] = 1;
        std::vector<int> S{r};
        std::vector<int> ext;
        for (int w : g.neighbors(r))
            if (!forb[w]) ext.push_back(w);
        growClusters(g, S, g.pool()[r].length(), std::move(ext), forb, maxTotalLen,
                     sizeCap, out);
    }
    return out;
}

std::vector<ContourCollection> enumerateClusters(const std::vector<Contour>& pool,
                                                 int maxTotalLen, DualVertex anchor,
                                                 int sizeCap) {
    IncompatGraph g(pool);
    std::vector<int> roots;
    for (size_t i = 0; i < pool.size(); ++i) {
        const auto& vs = g.geometry(int(i)).vertices;
        if (std::binary_search(vs.begin(), vs.end(), anchor)) roots.push_back(int(i));
    }
    auto subsets = connectedSubsets(g, roots, maxTotalLen, sizeCap);
    std::vector<ContourCollection> out;
    out.reserve(subsets.size());
    for (auto& s : subsets) {
        ContourCollection cc;
        cc.kind = ContourCollection::Cluster;
        for (int i : s) cc.items.push_back(pool[i]);
        std::sort(cc.items.begin(), cc.items.end());
        out.push_back(std::move(cc));
    }
    return out;
}

}  // namespace soslab

#include "soslab/cylinder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace soslab {

long long fieldEnergy(const HeightField& f) {
    long long e = 0;
    for (int y = 0; y < f.H; ++y)
        for (int x = 0; x < f.W; ++x) {
            int v = f.at(x, y);
            // right and down bonds count each interior pair once; left/up
            // collar bonds are where the neighbor lies outside
            e += std::abs(v - f.at(x + 1, y));
            e += std::abs(v - f.at(x, y + 1));
            if (x == 0) e += std::abs(v - f.boundaryLevel);
            if (y == 0) e += std::abs(v - f.boundaryLevel);
        }
    return e;
}

namespace {

// split an edge set into closed trails using the linked rule; assumes the set
// came from a level line (all vertex degrees even)
std::vector<std::vector<Edge>> splitTrails(const std::set<Edge>& edges) {
    std::set<Edge> remaining = edges;
    std::vector<std::vector<Edge>> trails;
    while (!remaining.empty()) {
        Edge start = *remaining.begin();
        std::vector<Edge> trail;
        Edge e = start;
        DualVertex at = edgeEndpoints(start)[1];
        for (;;) {
            trail.push_back(e);
            remaining.erase(e);
            // pick the continuation at `at`
            int din = dirFrom(at, e);
            int nIncident = 0;
            int otherDir = -1;
            for (int d = 0; d < 4; ++d) {
                if (edges.count(edgeAt(at, d))) {
                    ++nIncident;
                    if (d != din) otherDir = d;
                }
            }
            int dout = (nIncident == 4) ? (3 - din) : otherDir;
            Edge next = edgeAt(at, dout);
            if (next == start) break;
            auto ends = edgeEndpoints(next);
            at = (ends[0] == at) ? ends[1] : ends[0];
            e = next;
        }
        trails.push_back(std::move(trail));
    }
    return trails;
}

}  // namespace

std::vector<Cylinder> extractCylinders(const HeightField& f) {
    int lo = f.boundaryLevel, hi = f.boundaryLevel;
    for (int v : f.h) { lo = std::min(lo, v); hi = std::max(hi, v); }

    // (sorted trail, sign) -> levels where it appears
    std::map<std::pair<std::vector<Edge>, int>, std::vector<int>> found;

    for (int level = lo + 1; level <= hi; ++level) {
        std::set<Edge> lines;
        // an edge is drawn when exactly one of its two cells is >= level;
        // scan all bonds touching the box (collar sits at boundaryLevel)
        for (int y = -1; y < f.H; ++y)
            for (int x = -1; x < f.W; ++x) {
                int v = f.at(x, y);
                int vr = f.at(x + 1, y);
                int vd = f.at(x, y + 1);
                // bond (x,y)-(x+1,y) is crossed by vertical dual edge (x, y-1, 1)
                if ((v >= level) != (vr >= level)) lines.insert(Edge{x, y - 1, 1});
                // bond (x,y)-(x,y+1) crossed by horizontal dual edge (x-1, y, 0)
                if ((v >= level) != (vd >= level)) lines.insert(Edge{x - 1, y, 0});
            }
        for (auto& trail : splitTrails(lines)) {
            std::vector<Edge> sorted = trail;
            std::sort(sorted.begin(), sorted.end());
            Contour c{sorted, +1};
            auto interior = interiorOf(c);
            // orientation: + when the high side is inside
            Cell probe = interior.front();
            int sign = (f.at(probe.x, probe.y) >= level) ? +1 : -1;
            found[{std::move(sorted), sign}].push_back(level);
        }
    }

    std::vector<Cylinder> out;
    for (auto& [key, levels] : found) {
        // levels are consecutive by monotonicity of {phi >= level}
        out.push_back(Cylinder{Contour{key.first, key.second}, int(levels.size())});
    }
    std::sort(out.begin(), out.end());
    return out;
}

HeightField fieldFromCylinders(const std::vector<Cylinder>& cyls, int W, int H, int n) {
    std::vector<ContourGeometry> geo;
    geo.reserve(cyls.size());
    for (auto& cy : cyls) {
        if (cy.k < 1) throw std::invalid_argument("cylinder intensity must be >= 1");
        geo.push_back(geometryOf(cy.contour));
    }
    for (size_t i = 0; i < cyls.size(); ++i)
        for (size_t j = i + 1; j < cyls.size(); ++j)
            if (!isCompatible(cyls[i].contour, geo[i], cyls[j].contour, geo[j]))
                throw std::invalid_argument("incompatible cylinder collection");
    HeightField f{W, H, n, std::vector<int>(size_t(W) * H, n)};
    for (size_t i = 0; i < cyls.size(); ++i) {
        int delta = cyls[i].contour.sign * cyls[i].k;
        for (auto& c : geo[i].interior) {
            if (c.x < 0 || c.x >= W || c.y < 0 || c.y >= H)
                throw std::invalid_argument("cylinder interior outside domain");
            f.ref(c.x, c.y) += delta;
        }
    }
    for (int v : f.h)
        if (v < 0) throw std::invalid_argument("cylinder collection dips below the wall");
    return f;
}

}  // namespace soslab

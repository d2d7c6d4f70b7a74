#include "soslab/contour.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace soslab {

Contour canonicalize(std::vector<Edge> edges, int sign) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Contour{std::move(edges), sign >= 0 ? +1 : -1};
}

namespace {

std::unordered_map<DualVertex, std::vector<Edge>, DualVertexHash>
incidenceMap(const Contour& c) {
    std::unordered_map<DualVertex, std::vector<Edge>, DualVertexHash> inc;
    for (const auto& e : c.edges)
        for (auto v : edgeEndpoints(e)) inc[v].push_back(e);
    return inc;
}

}  // namespace

bool isValidContour(const Contour& c, std::string* why) {
    auto fail = [&](const char* m) { if (why) *why = m; return false; };
    if (c.edges.size() < 4 || c.edges.size() % 2 != 0) return fail("length must be even and >= 4");
    if (!std::is_sorted(c.edges.begin(), c.edges.end())) return fail("edges not canonical");
    if (std::adjacent_find(c.edges.begin(), c.edges.end()) != c.edges.end())
        return fail("duplicate edge");
    auto inc = incidenceMap(c);
    for (auto& [v, es] : inc) {
        if (es.size() != 2 && es.size() != 4) return fail("vertex degree not 2 or 4");
        // degree 4 means all four incident edges present; the linked pairing
        // {N,W},{S,E} is then automatic, nothing more to check here
    }
    // walk the trail: at degree-2 vertices take the other edge, at degree-4
    // vertices take the linked partner of the incoming direction; the walk
    // must return to the start edge after consuming every edge exactly once
    {
        Edge start = c.edges.front();
        std::set<Edge> seen;
        Edge e = start;
        DualVertex to = edgeEndpoints(start)[1];
        for (size_t i = 0; i < c.edges.size(); ++i) {
            if (!seen.insert(e).second) return fail("edge repeated in trail");
            const auto& es = inc[to];
            Edge next;
            if (es.size() == 2) {
                next = (es[0] == e) ? es[1] : es[0];
            } else {
                next = edgeAt(to, 3 - dirFrom(to, e));
            }
            auto ends = edgeEndpoints(next);
            to = (ends[0] == to) ? ends[1] : ends[0];
            e = next;
        }
        if (seen.size() != c.edges.size() || e != start)
            return fail("trail is not a single closed cycle");
    }
    if (interiorOf(c).empty()) return fail("empty interior");
    return true;
}

std::vector<Cell> interiorOf(const Contour& c) {
    // cell (x,y) is interior iff a leftward ray crosses an odd number of
    // vertical trail edges; the vertical edge (a,y-1,1) separates (a,y),(a+1,y)
    std::map<int, std::vector<int>> vertByRow;  // row y -> sorted list of a
    int ymin = 1 << 30, ymax = -(1 << 30);
    for (const auto& e : c.edges) {
        if (e.dir == 1) vertByRow[e.b + 1].push_back(e.a);
        ymin = std::min(ymin, e.b);
        ymax = std::max(ymax, e.b + 2);
    }
    std::vector<Cell> out;
    for (auto& [y, as] : vertByRow) {
        std::sort(as.begin(), as.end());
        // between consecutive crossings with odd parity the cells are inside:
        // after crossing edge at a, cells x in (a, nextA] have parity flipped
        for (size_t i = 0; i + 1 < as.size(); i += 2)
            for (int x = as[i] + 1; x <= as[i + 1]; ++x) out.push_back({x, y});
    }
    std::sort(out.begin(), out.end());
    return out;
}

ContourGeometry geometryOf(const Contour& c) {
    ContourGeometry g;
    g.interior = interiorOf(c);
    std::set<Cell> inside(g.interior.begin(), g.interior.end());
    std::set<Cell> delta;
    for (const auto& e : c.edges)
        for (auto cell : edgeCells(e)) delta.insert(cell);
    std::map<DualVertex, int> deg;
    for (const auto& e : c.edges)
        for (auto v : edgeEndpoints(e)) deg[v]++;
    for (auto& [v, d] : deg) {
        g.vertices.push_back(v);
        if (d == 4) {
            g.pinches.push_back(v);
            for (auto cell : cellsAround(v)) delta.insert(cell);
        }
    }
    for (const auto& cell : delta)
        (inside.count(cell) ? g.deltaMinus : g.deltaPlus).push_back(cell);
    return g;
}

namespace {

enum Rel { DISJOINT, A_IN_B, B_IN_A, OVERLAP };

Rel interiorRelation(const std::vector<Cell>& a, const std::vector<Cell>& b) {
    // both sorted
    std::vector<Cell> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (common.empty()) return DISJOINT;
    if (common.size() == a.size()) return A_IN_B;
    if (common.size() == b.size()) return B_IN_A;
    return OVERLAP;
}

bool intersects(const std::vector<Cell>& a, const std::vector<Cell>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else return true;
    }
    return false;
}

// trails interfere if they share an edge, or share a vertex at which either
// contour's own pair of edges is not linked
bool trailsInterfere(const Contour& a, const ContourGeometry& ga,
                     const Contour& b, const ContourGeometry& gb) {
    {
        size_t i = 0, j = 0;
        while (i < a.edges.size() && j < b.edges.size()) {
            if (a.edges[i] < b.edges[j]) ++i;
            else if (b.edges[j] < a.edges[i]) ++j;
            else return true;
        }
    }
    std::vector<DualVertex> shared;
    std::set_intersection(ga.vertices.begin(), ga.vertices.end(),
                          gb.vertices.begin(), gb.vertices.end(),
                          std::back_inserter(shared));
    auto ownPairLinked = [](const Contour& c, DualVertex v) {
        int dirs[4], k = 0;
        for (int d = 0; d < 4; ++d) {
            Edge e = edgeAt(v, d);
            if (std::binary_search(c.edges.begin(), c.edges.end(), e)) dirs[k++] = d;
        }
        if (k == 4) return true;  // pinch: linked pairing automatic
        return k == 2 && linkedDirs(dirs[0], dirs[1]);
    };
    for (auto v : shared)
        if (!ownPairLinked(a, v) || !ownPairLinked(b, v)) return true;
    return false;
}

}  // namespace

bool isCompatible(const Contour& a, const ContourGeometry& ga,
                  const Contour& b, const ContourGeometry& gb) {
    if (a.edges == b.edges) return false;  // (i): identical trails
    Rel rel = interiorRelation(ga.interior, gb.interior);
    if (rel == OVERLAP) return false;      // (i): nested or disjoint required
    if (a.sign == b.sign) {
        if (rel == DISJOINT) {
            if (trailsInterfere(a, ga, b, gb)) return false;
            if (intersects(gb.interior, ga.deltaPlus)) return false;   // (ii)
            if (intersects(ga.interior, gb.deltaPlus)) return false;
        }
        // same sign, nested: always compatible
    } else {
        if (rel != DISJOINT) {  // (iii): opposite sign, nested
            if (trailsInterfere(a, ga, b, gb)) return false;
            const auto& inner = (rel == A_IN_B) ? ga.interior : gb.interior;
            const auto& outerDm = (rel == A_IN_B) ? gb.deltaMinus : ga.deltaMinus;
            if (intersects(inner, outerDm)) return false;
        }
        // opposite sign, disjoint: always compatible
    }
    return true;
}

bool isCompatible(const Contour& a, const Contour& b) {
    return isCompatible(a, geometryOf(a), b, geometryOf(b));
}

bool isExternallyCompatible(const Contour& a, const Contour& b) {
    auto ga = geometryOf(a), gb = geometryOf(b);
    if (!isCompatible(a, ga, b, gb)) return false;
    return interiorRelation(ga.interior, gb.interior) == DISJOINT;
}

std::string serializeContour(const Contour& c) {
    std::ostringstream os;
    os << (c.sign > 0 ? '+' : '-');
    for (const auto& e : c.edges) {
        auto ends = edgeEndpoints(e);
        os << ';' << 2 * ends[0].a + 1 << ',' << 2 * ends[0].b + 1 << '-'
           << 2 * ends[1].a + 1 << ',' << 2 * ends[1].b + 1;
    }
    return os.str();
}

std::optional<Contour> parseContour(const std::string& line) {
    if (line.empty() || (line[0] != '+' && line[0] != '-')) return std::nullopt;
    int sign = line[0] == '+' ? +1 : -1;
    std::vector<Edge> edges;
    size_t pos = 1;
    while (pos < line.size()) {
        if (line[pos] != ';') return std::nullopt;
        ++pos;
        int v[4], k = 0;
        while (k < 4) {
            const char* b = line.data() + pos;
            const char* e = line.data() + line.size();
            int val;
            auto [p, ec] = std::from_chars(b, e, val);
            if (ec != std::errc{} || p == b) return std::nullopt;
            v[k++] = val;
            pos = size_t(p - line.data());
            if (k < 4) {
                char want = (k == 2) ? '-' : ',';
                if (pos >= line.size() || line[pos] != want) return std::nullopt;
                ++pos;
            }
        }
        // doubled half-integers: must be odd
        for (int i = 0; i < 4; ++i)
            if ((v[i] % 2 + 2) % 2 != 1) return std::nullopt;
        int a1 = (v[0] - 1) / 2, b1 = (v[1] - 1) / 2;
        int a2 = (v[2] - 1) / 2, b2 = (v[3] - 1) / 2;
        if (a2 == a1 + 1 && b2 == b1) edges.push_back({a1, b1, 0});
        else if (a2 == a1 && b2 == b1 + 1) edges.push_back({a1, b1, 1});
        else if (a1 == a2 + 1 && b1 == b2) edges.push_back({a2, b2, 0});
        else if (a1 == a2 && b1 == b2 + 1) edges.push_back({a2, b2, 1});
        else return std::nullopt;
    }
    return canonicalize(std::move(edges), sign);
}

}  // namespace soslab

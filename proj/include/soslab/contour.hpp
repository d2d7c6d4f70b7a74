#pragma once
#include <optional>
#include <string>
#include <vector>

#include "soslab/lattice.hpp"

namespace soslab {

/* A contour: a signed closed trail of dual edges. The trail may revisit a dual
   vertex (then all four incident edges belong to it and consecutive edges pair
   up by the linked rule). Stored as the sorted edge set plus the sign; equality
   and ordering are on that pair. */
struct Contour {
    std::vector<Edge> edges;  // sorted, canonical
    int sign = +1;
    auto operator<=>(const Contour&) const = default;
    int length() const { return int(edges.size()); }
};

/* Geometry derived from the trail: interior cells (parity fill), the
   neighborhood Delta split into its interior and exterior parts, and the
   distinct dual vertices visited. */
struct ContourGeometry {
    std::vector<Cell> interior;    // sorted
    std::vector<Cell> deltaMinus;  // Delta ∩ interior, sorted
    std::vector<Cell> deltaPlus;   // Delta ∩ exterior, sorted
    std::vector<DualVertex> vertices;  // distinct visited vertices, sorted
    std::vector<DualVertex> pinches;   // 4-valent vertices
};

// sort the edge list; sign kept. Does not validate.
Contour canonicalize(std::vector<Edge> edges, int sign);

// closed-trail check: degrees in {2,4}, a single trail under the linked rule
// covering all edges, linked pairing consistent at every 4-valent vertex.
bool isValidContour(const Contour& c, std::string* why = nullptr);

std::vector<Cell> interiorOf(const Contour& c);
ContourGeometry geometryOf(const Contour& c);

/* Compatibility per the geometric non-interference rules:
   (i)   distinct trails, interiors nested or disjoint, trails do not cross;
   (ii)  same sign + disjoint interiors: neither interior meets the other's
         Delta+ (and no trail interference at shared edges/vertices);
   (iii) opposite sign + nested: the inner interior avoids the outer Delta-
         (and no trail interference).
   "Trail interference" = a shared edge, or a shared vertex at which either
   contour's own pair of edges is not linked. */
bool isCompatible(const Contour& a, const Contour& b);
bool isCompatible(const Contour& a, const ContourGeometry& ga,
                  const Contour& b, const ContourGeometry& gb);
bool isExternallyCompatible(const Contour& a, const Contour& b);

// line format: "sign;x1,y1-x2,y2;..." with half-integer coords doubled
std::string serializeContour(const Contour& c);
std::optional<Contour> parseContour(const std::string& line);

}  // namespace soslab

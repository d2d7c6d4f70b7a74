#pragma once
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "soslab/contour.hpp"

namespace soslab {

/* Low-level trail enumeration: geometric (unsigned) contours whose dual
   vertices stay in [aLo,aHi]x[bLo,bHi], length <= maxLen, optionally visiting
   `anchor`, optionally with all vertices lex-(a,b) >= minVertex. */
struct TrailSpec {
    int aLo, aHi, bLo, bHi;
    int maxLen;
    std::optional<DualVertex> anchor;
    std::optional<DualVertex> minVertex;
};
std::vector<Contour> enumerateTrails(const TrailSpec& spec);

/* High-level enumeration: all canonical signed contours with interior inside
   the WxH cell window [0,W)x[0,H), |trail| <= maxLen, optionally anchored.
   Throws std::invalid_argument on odd or <4 maxLen. */
std::vector<Contour> enumerateContours(int W, int H, int maxLen,
                                       std::optional<DualVertex> anchor = std::nullopt);

struct ContourCollection {
    std::vector<Contour> items;
    enum Kind { Generic, Cluster } kind = Generic;
};

/* Incompatibility graph over a fixed pool, with a spatial index so neighbor
   queries stay local. Geometries are computed once. */
class IncompatGraph {
  public:
    explicit IncompatGraph(std::vector<Contour> pool);
    const std::vector<Contour>& pool() const { return pool_; }
    const ContourGeometry& geometry(int i) const { return geo_[i]; }
    const std::vector<int>& neighbors(int i);  // incompatible partners, sorted
    bool incompatible(int i, int j) const;

  private:
    std::vector<Contour> pool_;
    std::vector<ContourGeometry> geo_;
    std::unordered_map<Cell, std::vector<int>, CellHash> cellIndex_;
    std::vector<std::optional<std::vector<int>>> nbrCache_;
};

/* All connected subsets (under incompatibility) of the pool that contain at
   least one root index, with total trail length <= maxTotalLen and at most
   sizeCap contours. Each subset is produced exactly once (assigned to its
   smallest contained root). */
std::vector<std::vector<int>> connectedSubsets(IncompatGraph& g,
                                               const std::vector<int>& roots,
                                               int maxTotalLen, int sizeCap);

/* High-level cluster enumeration: subsets of `pool` visiting `anchor`,
   L(C) <= maxTotalLen, connected under incompatibility. */
std::vector<ContourCollection> enumerateClusters(const std::vector<Contour>& pool,
                                                 int maxTotalLen, DualVertex anchor,
                                                 int sizeCap = 8);

}  // namespace soslab

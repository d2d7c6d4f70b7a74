#pragma once
#include <map>
#include <tuple>
#include <vector>

#include "soslab/contour.hpp"
#include "soslab/transfer.hpp"

namespace soslab {

/* Contour weights. The restricted sums z^h_m depend on the interior cell set
   only (the trail and its inner collar are both determined by it), so they are
   cached per translation/D4 class of the interior, as polynomials in y = e^h.

   w^u_n(gamma) = e^{-beta|trail|} z^h_{n+eps}(gamma) / zbar^h_n(gamma), where
   zbar keeps the boundary at n and peels off the configurations whose inner
   collar avoids level n. Negative contours at n = 0 carry weight zero. */

struct ShapeClass {
    std::vector<Cell> cells;        // canonical interior
    std::vector<char> onCollar;     // aligned: cell touches the trail
    int length = 0;                 // |trail| = boundary bond count
};

// canonical representative of the interior under translations and D4
std::vector<Cell> canonicalInterior(std::vector<Cell> cells);

class WeightTable {
  public:
    enum Mode { Raw, Truncated, PureSOS };
    WeightTable(double beta, Mode mode = Raw);

    double beta() const { return beta_; }
    Mode mode() const { return mode_; }

    int classOf(const Contour& c);
    int classOfInterior(std::vector<Cell> interior);
    const ShapeClass& shape(int id) const { return shapes_[size_t(id)]; }
    int nClasses() const { return int(shapes_.size()); }

    // log z^h_m: boundary m, one-sided constraint eps*(phi - c) >= 0 on the
    // inner collar, wall at zero, reward y per zero-height site
    f128 logZ(int id, int eps, int m, int c, const f128& y);

    // log w^u_n with the table's mode applied; -inf encodes weight zero
    f128 logWeight(int id, int sign, int n, const f128& y);
    f128 logWeight(const Contour& c, int n, double u);

    bool isStable(int id, int sign, int n, const f128& y);
    bool isStable(const Contour& c, int n, double u);

    f128 logPureWeight(int length) const;  // log 1/(e^{beta L}-1)

  private:
    f128 logRawWeight(int id, int sign, int n, const f128& y);
    double beta_;
    Mode mode_;
    std::map<std::vector<Cell>, int> ids_;
    std::vector<ShapeClass> shapes_;
    std::map<std::tuple<int, int, int, int>, ZPoly<f128>> polys_;
};

struct KPResult {
    double lhs = 0;     // summed part
    double tail = 0;    // geometric bound on |trail| > maxLen
    bool pass = false;  // lhs + tail <= 1
};

// sum e^{(beta-4)|trail|} w over signed contours through `anchor`
KPResult kpCheck(WeightTable& wt, int n, double u, DualVertex anchor, int maxLen);

}  // namespace soslab

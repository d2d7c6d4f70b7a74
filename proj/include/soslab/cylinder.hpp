#pragma once
#include <vector>

#include "soslab/contour.hpp"

namespace soslab {

/* Height field on a WxH cell box with a frozen collar at boundaryLevel. */
struct HeightField {
    int W = 0, H = 0;
    int boundaryLevel = 0;
    std::vector<int> h;  // row-major: h[y*W + x]

    int at(int x, int y) const {
        if (x < 0 || x >= W || y < 0 || y >= H) return boundaryLevel;
        return h[size_t(y) * W + x];
    }
    int& ref(int x, int y) { return h[size_t(y) * W + x]; }
};

struct Cylinder {
    Contour contour;
    int k = 1;  // intensity >= 1
    auto operator<=>(const Cylinder&) const = default;
};

// H^n_Lambda(phi): half the interior gradient sum plus the collar terms
long long fieldEnergy(const HeightField& f);

// level-line extraction with the linked splitting rule; repeated geometric
// contours across consecutive levels merge into intensities
std::vector<Cylinder> extractCylinders(const HeightField& f);

// phi(x) = n + sum of signed intensities over enclosing interiors;
// throws std::invalid_argument if the contours are not pairwise compatible
HeightField fieldFromCylinders(const std::vector<Cylinder>& cyls, int W, int H, int n);

}  // namespace soslab

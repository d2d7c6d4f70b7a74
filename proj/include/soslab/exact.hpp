#pragma once
#include <vector>

#include "soslab/transfer.hpp"

namespace soslab {

// wetting threshold h_w(beta) = log(e^{4b}/(e^{4b}-1)) and helpers
double wettingH(double beta);
inline double couplingJ(double beta) { return std::exp(-2.0 * beta); }
// e^{h_w + u} evaluated in quad precision
f128 wallY(double beta, double u);

struct BoxResult {
    f128 logZ = 0;
    double tailBound = 0;  // bound on the neglected mass from capping heights
    int hmaxUsed = 0;
};

// height cap giving relative truncation error below ~1e-12
int autoHmax(double beta, int n, long long nCells);

/* log Z^{n,h_w+u}_{W x H}: wall at zero, boundary condition n, reward e^h per
   zero-height site. hmax < 0 selects the automatic cap. quad switches the
   accumulator to float128. */
BoxResult wallPartition(int W, int H, double beta, double u, int n,
                        int hmax = -1, bool quad = false);

/* log Z_{W x H} of the unconstrained SOS field (no wall, no reward), realised
   by a deep symmetric window around the boundary level. */
BoxResult freePartition(int W, int H, double beta, int depth = -1, bool quad = false);

// pinning free energy of a finite site set under the critical reward h_w
f128 hbar(const std::vector<Cell>& sites, double beta);

// P[phi >= level on all `sites`] for the no-wall field on a W x H box, bc 0
double peakProbability(int W, int H, const std::vector<Cell>& sites, int level, double beta);

// Ursell function of (delta_{x,0})_{x in sites}, |sites| <= 3, wall model
f128 ursellWall(int W, int H, double beta, double u, int n, const std::vector<Cell>& sites);

}  // namespace soslab

#pragma once
#include <string>
#include <vector>

#include "soslab/expansion.hpp"

namespace soslab {

/* Prefactor constants of the staircase asymptotics: alpha1 governs single-site
   peaks, alpha2 nearest-neighbour double peaks, both estimated from exact peak
   probabilities of the unconstrained field on a finite box and extrapolated
   over the level. */
struct AsymptoticConstants {
    double alpha1 = 0, alpha2 = 0;
    double alpha1Err = 0, alpha2Err = 0;
    double beta = 0;
    int nUsed = 0;
};

AsymptoticConstants estimateAlphas(double beta, int maxN, int boxW = 7, int boxH = 5);

// piecewise-affine envelope of the layering staircase
struct EnvelopeValue {
    double value = 0;
    int level = 0;  // maximising level, smallest on ties (== levelCap when u -> 0+)
};
EnvelopeValue envelopeF(double beta, double u, const AsymptoticConstants& a,
                        int levelCap = 64);
// angular point between levels n and n-1
double envelopeAngularPoint(double beta, int n, const AsymptoticConstants& a);

struct LayeringReport {
    int n = 0;
    double beta = 0;
    int lmax = 0;
    double uMinus = 0, uPlus = 0;   // search bracket, scale J^{n+2}
    double uStar = 0;               // located crossing (midpoint of the residual bracket)
    double bracketWidth = 0;
    double slopeLeft = 0, slopeRight = 0;  // df/du of the active level on each side
    double ratioToAsymptotic = 0;   // uStar / angular point u_n (0 when alphas unknown)
    double truncError = 0;          // truncation estimate for the crossing function
    double maxAbsDelta = 0;         // largest |Delta_n| seen on the scan grid
    std::string status;             // "resolved" or "unresolved"
};

/* Locate u*_n as the first sign change of Delta_n(u) = f^tr_{n-1} - f^tr_n on
   [J^{n+2}/200, 200 J^{n+2}], refined by bisection to width 1e-3 J^{n+2} or 40
   iterations. The set must be built from a Truncated-mode table. */
LayeringReport locateUStar(ClusterSet& cs, int n,
                           const AsymptoticConstants* alphas = nullptr);
// convenience wrapper owning the table and set
LayeringReport locateUStar(int n, double beta, int Lmax,
                           const AsymptoticConstants* alphas = nullptr);

struct SlopePoint {
    double u = 0;
    double slope = 0;
    bool flagged = false;  // stencil straddles a level crossing
};
// centered finite differences of f^tr_n over the grid
std::vector<SlopePoint> derivativeScan(ClusterSet& cs, int n,
                                       const std::vector<double>& grid);

}  // namespace soslab

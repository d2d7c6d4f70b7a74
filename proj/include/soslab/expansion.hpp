#pragma once
#include <string>
#include <vector>

#include "soslab/enumerate.hpp"
#include "soslab/weights.hpp"

namespace soslab {

struct ClusterTerm {
    f128 wT = 0;
    int totalLen = 0;
    int sites = 0;  // |C| = distinct dual points visited
};

struct FreeEnergyValue {
    f128 value = 0;
    double truncError = 0;
    int Lmax = 0;
    std::string label;
    bool rigorousTail = false;
};

// modified weight w^T(C) by inclusion-exclusion over sub-collections
ClusterTerm clusterWT(const ContourCollection& cluster, WeightTable& wt, int n, double u,
                      int sizeCap = 8);

/* Reference form of the density: f(w) = sum over clusters through `anchor`
   of w^T(C)/|C|. Quadratic-ish in the pool size; fine up to Lmax ~ 12. */
FreeEnergyValue freeEnergyDensity(WeightTable& wt, int n, double u, int Lmax,
                                  DualVertex anchor = {0, 0});

/* Production form: each translation class of clusters counted once (its
   lexicographically smallest visited dual vertex pinned at the origin), so
   f(w) = sum over classes of w^T — the 1/|C| cancels against multiplicity.
   The geometry (classes, signs, compatibility masks) is built once per
   (beta, Lmax) and reused across levels and u values. */
class ClusterSet {
  public:
    ClusterSet(WeightTable& wt, int Lmax);

    FreeEnergyValue eval(int n, double u);
    /* f(w at nLow) - f(w at nHigh), accumulated cluster by cluster so common
       parts cancel before rounding. `tail` receives the truncation estimate
       for the difference itself. */
    f128 delta(int nLow, int nHigh, double u, double* tail = nullptr);
    // largest |w^T| contribution in the outermost shell of the last eval
    double lastShellMagnitude() const { return lastShell_; }
    int Lmax() const { return Lmax_; }
    WeightTable& table() { return wt_; }

  private:
    struct Single { int id, sign; long long count; };
    struct Multi {
        std::vector<int> ids;     // class id per contour
        std::vector<int> signs;
        std::vector<unsigned> compat;  // bit j set when contour j is compatible
        int totalLen = 0;
    };
    template <class W>
    f128 evalWith(W&& logw, std::vector<double>* shells);
    double tailEstimate(const std::vector<double>& shells, bool* rigorous) const;

    WeightTable& wt_;
    int Lmax_;
    std::vector<Single> singles_;
    std::vector<int> singleLens_;
    std::vector<Multi> multis_;
    double lastShell_ = 0;
};

// log of the restricted pure-SOS sum z(gamma): boundary heights free (no
// wall), inner collar on the contour's side; used by the polymer Z identity
f128 logRestrictedPure(const Contour& c, double beta);

}  // namespace soslab

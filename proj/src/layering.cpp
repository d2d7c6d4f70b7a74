#include "soslab/layering.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "soslab/exact.hpp"

namespace soslab {

namespace {

// Aitken acceleration on the last three terms of a level sequence
double accelerate(const std::vector<double>& x, double* err) {
    const size_t m = x.size();
    if (m < 2) {
        *err = x.empty() ? 0.0 : std::abs(x.back());
        return x.empty() ? 0.0 : x.back();
    }
    double last = x[m - 1], prev = x[m - 2];
    if (m == 2) {
        *err = std::abs(last - prev);
        return last;
    }
    double d1 = last - prev;
    double d2 = last - 2.0 * prev + x[m - 3];
    if (d2 == 0.0) {
        *err = std::abs(d1);
        return last;
    }
    double acc = last - d1 * d1 / d2;
    *err = std::abs(acc - last) + std::abs(d1);
    return acc;
}

}  // namespace

AsymptoticConstants estimateAlphas(double beta, int maxN, int boxW, int boxH) {
    if (maxN < 2) throw std::invalid_argument("maxN must be at least 2");
    const Cell c0{boxW / 2, boxH / 2};
    const Cell c1{boxW / 2 + 1, boxH / 2};
    std::vector<double> a1, a2;
    for (int n = 1; n <= maxN; ++n) {
        a1.push_back(std::exp(4.0 * beta * n) * peakProbability(boxW, boxH, {c0}, n, beta));
        a2.push_back(std::exp(6.0 * beta * n) * peakProbability(boxW, boxH, {c0, c1}, n, beta));
    }
    AsymptoticConstants out;
    out.beta = beta;
    out.nUsed = maxN;
    out.alpha1 = accelerate(a1, &out.alpha1Err);
    out.alpha2 = accelerate(a2, &out.alpha2Err);
    return out;
}

EnvelopeValue envelopeF(double beta, double u, const AsymptoticConstants& a, int levelCap) {
    if (u < 0) throw std::invalid_argument("u must be nonnegative");
    // the wide exponent range of float128 keeps deep levels from underflowing
    const f128 J = f128(couplingJ(beta));
    const f128 J3 = J * J * J;
    const f128 drop = 2 * f128(a.alpha2) * (J3 - J3 * J) / (1 - J3);
    f128 bestV = 0;
    int bestN = 0;
    f128 line = f128(a.alpha1) * f128(u) - drop;  // level 0
    bestV = line;
    for (int n = 1; n <= levelCap; ++n) {
        line = f128(a.alpha1) * pow(J, 2 * n) * f128(u) - drop * pow(J, 3 * n);
        if (line > bestV) { bestV = line; bestN = n; }
    }
    return {double(bestV), bestN};
}

double envelopeAngularPoint(double beta, int n, const AsymptoticConstants& a) {
    const double J = couplingJ(beta);
    return 2.0 * a.alpha2 * std::pow(J, n + 2) / (a.alpha1 * (1.0 + J));
}

LayeringReport locateUStar(ClusterSet& cs, int n, const AsymptoticConstants* alphas) {
    if (n < 1) throw std::invalid_argument("layering levels start at n = 1");
    if (cs.table().mode() != WeightTable::Truncated)
        throw std::invalid_argument("locateUStar needs a truncated-mode weight table");
    const double beta = cs.table().beta();
    const double J = couplingJ(beta);
    const double scale = std::pow(J, n + 2);

    LayeringReport rep;
    rep.n = n;
    rep.beta = beta;
    rep.lmax = cs.Lmax();
    rep.uMinus = scale / 200.0;
    rep.uPlus = 200.0 * scale;

    // coarse geometric scan for the first sign change of Delta_n
    const int N = 33;
    const double ratio = std::pow(rep.uPlus / rep.uMinus, 1.0 / (N - 1));
    std::vector<double> us(N), ds(N);
    for (int i = 0; i < N; ++i) {
        us[size_t(i)] = rep.uMinus * std::pow(ratio, i);
        double tail = 0;
        ds[size_t(i)] = double(cs.delta(n - 1, n, us[size_t(i)], &tail));
        rep.truncError = std::max(rep.truncError, tail);
        rep.maxAbsDelta = std::max(rep.maxAbsDelta, std::abs(ds[size_t(i)]));
    }
    int bracket = -1;
    for (int i = 0; i + 1 < N; ++i)
        if (ds[size_t(i)] == 0.0 || (ds[size_t(i)] < 0) != (ds[size_t(i + 1)] < 0)) {
            bracket = i;
            break;
        }
    if (bracket < 0 || rep.maxAbsDelta <= rep.truncError) {
        rep.status = "unresolved";
        return rep;
    }

    double lo = us[size_t(bracket)], hi = us[size_t(bracket) + 1];
    double dlo = ds[size_t(bracket)];
    for (int it = 0; it < 40 && hi - lo > 1e-3 * scale; ++it) {
        double mid = 0.5 * (lo + hi);
        double dm = double(cs.delta(n - 1, n, mid));
        if (dm == 0.0) { lo = hi = mid; break; }
        if ((dm < 0) == (dlo < 0)) { lo = mid; dlo = dm; }
        else hi = mid;
    }
    rep.uStar = 0.5 * (lo + hi);
    rep.bracketWidth = hi - lo;
    rep.status = "resolved";

    // one-sided derivatives of the active level's density across the crossing
    auto slopeAt = [&](int level, double u) {
        double du = 0.02 * u;
        f128 fp = cs.eval(level, u + du).value;
        f128 fm = cs.eval(level, u - du).value;
        return double((fp - fm) / f128(2.0 * du));
    };
    rep.slopeLeft = slopeAt(n, rep.uStar * 0.9);
    rep.slopeRight = slopeAt(n - 1, rep.uStar * 1.1);
    if (alphas && alphas->alpha1 > 0)
        rep.ratioToAsymptotic = rep.uStar / envelopeAngularPoint(beta, n, *alphas);
    return rep;
}

LayeringReport locateUStar(int n, double beta, int Lmax, const AsymptoticConstants* alphas) {
    WeightTable wt(beta, WeightTable::Truncated);
    ClusterSet cs(wt, Lmax);
    return locateUStar(cs, n, alphas);
}

std::vector<SlopePoint> derivativeScan(ClusterSet& cs, int n, const std::vector<double>& grid) {
    std::vector<SlopePoint> out;
    for (double u : grid) {
        SlopePoint p;
        p.u = u;
        const double du = 0.01 * u;
        f128 fp = cs.eval(n, u + du).value;
        f128 fm = cs.eval(n, u - du).value;
        p.slope = double((fp - fm) / f128(2.0 * du));
        // flag the point when a crossing with a neighbouring level sits
        // inside the stencil
        auto changes = [&](int lo, int hi) {
            double a = double(cs.delta(lo, hi, u - du));
            double b = double(cs.delta(lo, hi, u + du));
            return (a < 0) != (b < 0);
        };
        if (n >= 1 && changes(n - 1, n)) p.flagged = true;
        if (changes(n, n + 1)) p.flagged = true;
        out.push_back(p);
    }
    return out;
}

}  // namespace soslab

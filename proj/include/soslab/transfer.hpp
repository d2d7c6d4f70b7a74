#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/float128.hpp>

#include "soslab/lattice.hpp"

namespace soslab {

using f128 = boost::multiprecision::float128;

/* Exact summation over height configurations on an arbitrary finite cell set.
   Heights live in the window [hmin, hmax]; every cell outside the set is
   frozen at boundaryValue. Bonds counted: all nearest-neighbour bonds with at
   least one endpoint in the set. Per-cell boxes [lo, hi] restrict individual
   heights (used for one-sided constraints and peak events).

   transferPoly sums the Boltzmann weight e^{-beta H} and either tracks the
   number of sites at height zero as a polynomial coefficient index (so the
   result is Z(y) = e^{logScale} * sum_j coeff[j] y^j with y = e^h), or folds a
   fixed y in directly (coeff has a single entry). */

struct TransferDomain {
    std::vector<Cell> cells;  // need not be sorted; duplicates are invalid
    int boundaryValue = 0;
    int hmin = 0, hmax = 0;
    // optional per-cell boxes, aligned with `cells` (empty = unconstrained)
    std::vector<std::pair<int, int>> boxes;
};

template <class S>
struct ZPoly {
    S logScale = S(0);
    std::vector<S> coeff;  // index = number of zero-height sites
    bool zero = false;     // whole sum vanished (incompatible constraints)
};

template <class S>
S logEval(const ZPoly<S>& p, const S& y) {
    if (p.zero) return -std::numeric_limits<S>::infinity();
    S acc = 0, pw = 1;
    for (const S& c : p.coeff) { acc += c * pw; pw *= y; }
    using std::log;
    return p.logScale + log(acc);
}

namespace detail {

template <class S>
ZPoly<S> transferPolyImpl(const TransferDomain& dom, double beta, bool trackZeros, S yFixed) {
    using std::abs; using std::exp; using std::log;
    const int K = dom.hmax - dom.hmin + 1;
    if (K <= 0) throw std::invalid_argument("empty height window");
    const size_t N = dom.cells.size();
    if (!dom.boxes.empty() && dom.boxes.size() != N)
        throw std::invalid_argument("boxes size mismatch");

    // cell lookup and raster order (y-major, then x)
    std::vector<int> order(N);
    for (size_t i = 0; i < N; ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const Cell &a = dom.cells[i], &b = dom.cells[j];
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    std::map<Cell, int> inShape;
    for (size_t i = 0; i < N; ++i)
        if (!inShape.emplace(dom.cells[i], int(i)).second)
            throw std::invalid_argument("duplicate cell");

    int x0 = dom.cells[0].x, x1 = x0;
    for (const Cell& c : dom.cells) { x0 = std::min(x0, c.x); x1 = std::max(x1, c.x); }
    const int Wb = x1 - x0 + 1;

    const S r = exp(S(-beta));
    // r^t tables for |height difference| and boundary gaps
    const int maxGap = K + abs(dom.boundaryValue - dom.hmin) + abs(dom.hmax - dom.boundaryValue) + 2;
    std::vector<S> rp(size_t(maxGap) + 1);
    rp[0] = 1;
    for (int t = 1; t <= maxGap; ++t) rp[t] = rp[t - 1] * r;

    const int ncoef = trackZeros ? int(N) + 1 : 1;
    const int zeroDigit = -dom.hmin;  // digit representing height 0, if in window

    std::vector<int> dims(size_t(Wb), 1);
    size_t stateSize = 1;
    // layout: dp[j*stateSize + idx], mixed radix little-endian by slot
    std::vector<S> dp(size_t(ncoef), S(0));
    dp[0] = 1;
    std::vector<S> buf;
    S logScale = 0;
    ZPoly<S> out;

    auto boundaryFactor = [&](int k) {  // bond to a frozen neighbour
        return rp[size_t(abs(k + dom.hmin - dom.boundaryValue))];
    };

    for (size_t oi = 0; oi < N; ++oi) {
        const int ci = order[oi];
        const Cell c = dom.cells[size_t(ci)];
        const int s = c.x - x0;

        size_t pBelow = 1;
        for (int t = 0; t < s; ++t) pBelow *= size_t(dims[size_t(t)]);
        size_t pAbove = 1;
        for (int t = s + 1; t < Wb; ++t) pAbove *= size_t(dims[size_t(t)]);
        const size_t pS = size_t(dims[size_t(s)]);
        const size_t oldState = stateSize;
        const size_t newState = pBelow * size_t(K) * pAbove;

        const bool upInShape = inShape.count({c.x, c.y - 1}) != 0;
        buf.assign(size_t(ncoef) * newState, S(0));

        if (upInShape) {
            // slot already holds the up-neighbour: apply the |k-h| kernel
            std::vector<S> v(static_cast<size_t>(K)), fwd(v), bwd(v);
            for (int j = 0; j < ncoef; ++j) {
                const S* src = dp.data() + size_t(j) * oldState;
                S* dst = buf.data() + size_t(j) * newState;
                for (size_t hi2 = 0; hi2 < pAbove; ++hi2)
                    for (size_t lo = 0; lo < pBelow; ++lo) {
                        const size_t base = hi2 * pS * pBelow + lo;
                        for (int h = 0; h < K; ++h) v[size_t(h)] = src[base + size_t(h) * pBelow];
                        fwd[0] = v[0];
                        for (int h = 1; h < K; ++h) fwd[size_t(h)] = v[size_t(h)] + r * fwd[size_t(h) - 1];
                        bwd[size_t(K) - 1] = v[size_t(K) - 1];
                        for (int h = K - 2; h >= 0; --h) bwd[size_t(h)] = v[size_t(h)] + r * bwd[size_t(h) + 1];
                        const size_t nbase = hi2 * size_t(K) * pBelow + lo;
                        for (int k = 0; k < K; ++k)
                            dst[nbase + size_t(k) * pBelow] = fwd[size_t(k)] + bwd[size_t(k)] - v[size_t(k)];
                    }
            }
        } else {
            // up-neighbour frozen; the slot may hold a stale column entry with
            // no remaining interactions -> marginalise it, then expand
            for (int j = 0; j < ncoef; ++j) {
                const S* src = dp.data() + size_t(j) * oldState;
                S* dst = buf.data() + size_t(j) * newState;
                for (size_t hi2 = 0; hi2 < pAbove; ++hi2)
                    for (size_t lo = 0; lo < pBelow; ++lo) {
                        S m = 0;
                        for (size_t h = 0; h < pS; ++h)
                            m += src[hi2 * pS * pBelow + h * pBelow + lo];
                        const size_t nbase = hi2 * size_t(K) * pBelow + lo;
                        for (int k = 0; k < K; ++k)
                            dst[nbase + size_t(k) * pBelow] = m * boundaryFactor(k);
                    }
            }
        }
        dims[size_t(s)] = K;
        stateSize = newState;
        dp.swap(buf);

        // pointwise factors: left bond, exterior right/down bonds, cell box
        int lo = dom.hmin, hi = dom.hmax;
        if (!dom.boxes.empty()) {
            lo = std::max(lo, dom.boxes[size_t(ci)].first);
            hi = std::min(hi, dom.boxes[size_t(ci)].second);
        }
        const bool leftInShape = inShape.count({c.x - 1, c.y}) != 0;
        const bool rightExterior = inShape.count({c.x + 1, c.y}) == 0;
        const bool downExterior = inShape.count({c.x, c.y + 1}) == 0;
        std::vector<S> perK(static_cast<size_t>(K));
        for (int k = 0; k < K; ++k) {
            if (k + dom.hmin < lo || k + dom.hmin > hi) { perK[size_t(k)] = 0; continue; }
            S f = 1;
            if (!leftInShape) f *= boundaryFactor(k);
            if (rightExterior) f *= boundaryFactor(k);
            if (downExterior) f *= boundaryFactor(k);
            if (!trackZeros && k == zeroDigit) f *= yFixed;
            perK[size_t(k)] = f;
        }
        const size_t pBb = pBelow;  // strides below slot unchanged
        for (int j = 0; j < ncoef; ++j) {
            S* d = dp.data() + size_t(j) * stateSize;
            for (size_t hi2 = 0; hi2 < pAbove; ++hi2)
                for (int k = 0; k < K; ++k) {
                    const S f = perK[size_t(k)];
                    S* row = d + hi2 * size_t(K) * pBb + size_t(k) * pBb;
                    for (size_t t = 0; t < pBb; ++t) row[t] *= f;
                }
        }
        if (leftInShape) {
            // left neighbour occupies slot s-1 with full radix K
            const size_t pBb2 = pBb / size_t(K);
            for (int j = 0; j < ncoef; ++j) {
                S* d = dp.data() + size_t(j) * stateSize;
                for (size_t hi2 = 0; hi2 < pAbove; ++hi2)
                    for (int k = 0; k < K; ++k)
                        for (int k2 = 0; k2 < K; ++k2) {
                            const S f = rp[size_t(abs(k - k2))];
                            S* row = d + ((hi2 * size_t(K) + size_t(k)) * size_t(K) + size_t(k2)) * pBb2;
                            for (size_t t = 0; t < pBb2; ++t) row[t] *= f;
                        }
            }
        }

        // shift the zero-count index for states where this cell sits at 0
        if (trackZeros && zeroDigit >= 0 && zeroDigit < K) {
            for (int j = ncoef - 2; j >= 0; --j) {
                S* src = dp.data() + size_t(j) * stateSize;
                S* dst = dp.data() + size_t(j + 1) * stateSize;
                for (size_t hi2 = 0; hi2 < pAbove; ++hi2) {
                    const size_t base = (hi2 * size_t(K) + size_t(zeroDigit)) * pBb;
                    for (size_t t = 0; t < pBb; ++t) {
                        dst[base + t] = src[base + t];
                        src[base + t] = 0;
                    }
                }
            }
        }

        // rescale to keep magnitudes near 1
        S mx = 0;
        for (const S& v : dp) mx = std::max(mx, v);
        if (mx == S(0)) { out.zero = true; out.coeff.assign(size_t(ncoef), S(0)); return out; }
        if (mx > S(1e100) || mx < S(1e-100)) {
            const S inv = S(1) / mx;
            for (S& v : dp) v *= inv;
            logScale += log(mx);
        }
    }

    out.logScale = logScale;
    out.coeff.assign(size_t(ncoef), S(0));
    for (int j = 0; j < ncoef; ++j) {
        S acc = 0;
        const S* src = dp.data() + size_t(j) * stateSize;
        for (size_t t = 0; t < stateSize; ++t) acc += src[t];
        out.coeff[size_t(j)] = acc;
    }
    return out;
}

}  // namespace detail

template <class S>
ZPoly<S> transferPoly(const TransferDomain& dom, double beta) {
    return detail::transferPolyImpl<S>(dom, beta, true, S(1));
}

// fixed wall reward y = e^h folded in; single coefficient
template <class S>
ZPoly<S> transferAt(const TransferDomain& dom, double beta, const S& y) {
    return detail::transferPolyImpl<S>(dom, beta, false, y);
}

// transpose a domain so the bounding-box width is the smaller side
inline bool transposeIfTall(TransferDomain& dom) {
    int x0 = dom.cells[0].x, x1 = x0, y0 = dom.cells[0].y, y1 = y0;
    for (const Cell& c : dom.cells) {
        x0 = std::min(x0, c.x); x1 = std::max(x1, c.x);
        y0 = std::min(y0, c.y); y1 = std::max(y1, c.y);
    }
    if (x1 - x0 <= y1 - y0) return false;
    for (Cell& c : dom.cells) std::swap(c.x, c.y);
    return true;
}

}  // namespace soslab

#include "soslab/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "soslab/exact.hpp"

namespace soslab {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double logCondWeight(const int nb[4], double beta, double h, int k) {
    int s = 0;
    for (int i = 0; i < 4; ++i) s += std::abs(k - nb[i]);
    return -beta * s + (k == 0 ? h : 0.0);
}

/* scale M (the conditional's log-mode) and total mass T relative to it; the
   tail beyond the largest neighbour is a ratio-e^{-4beta} geometric series */
void condNormalisation(const int nb[4], double beta, double h, int n4,
                       double* M, double* T) {
    double m = logCondWeight(nb, beta, h, 0);
    for (int k = 1; k <= n4; ++k) m = std::max(m, logCondWeight(nb, beta, h, k));
    double t = 0;
    for (int k = 0; k <= n4; ++k) t += std::exp(logCondWeight(nb, beta, h, k) - m);
    const double r = std::exp(-4.0 * beta);
    // the tail beyond n4 never touches the k = 0 reward atom
    t += std::exp(logCondWeight(nb, beta, h, n4 + 1) - m) / (1.0 - r);
    *M = m;
    *T = t;
}

}  // namespace

double CounterRng::uniform(std::uint64_t sweep, std::uint64_t site, std::uint64_t draw) const {
    std::uint64_t x = mix64(seed ^ mix64(sweep ^ mix64(site ^ mix64(draw))));
    return double(x >> 11) * 0x1.0p-53;
}

int sampleConditional(const int nb[4], double beta, double h, double u01) {
    if (beta <= 0) throw std::invalid_argument("beta must be positive");
    const int n4 = std::max(std::max(nb[0], nb[1]), std::max(nb[2], nb[3]));
    double M, T;
    condNormalisation(nb, beta, h, n4, &M, &T);
    double t = u01 * T;
    for (int k = 0; k <= n4; ++k) {
        double w = std::exp(logCondWeight(nb, beta, h, k) - M);
        if (t < w) return k;
        t -= w;
    }
    // geometric tail: P(n4 + j) = w(n4 + 1) r^{j-1} for j >= 1
    const double r = std::exp(-4.0 * beta);
    const double w1 = std::exp(logCondWeight(nb, beta, h, n4 + 1) - M);
    double x = 1.0 - t * (1.0 - r) / w1;
    if (x <= 0) x = std::numeric_limits<double>::min();
    int j = int(std::ceil(std::log(x) / std::log(r)));
    return n4 + std::max(j, 1);
}

double conditionalProb(const int nb[4], double beta, double h, int k) {
    const int n4 = std::max(std::max(nb[0], nb[1]), std::max(nb[2], nb[3]));
    double M, T;
    condNormalisation(nb, beta, h, n4, &M, &T);
    return std::exp(logCondWeight(nb, beta, h, k) - M) / T;
}

ChainState makeChain(int W, int H, const ModelParams& p, std::uint64_t seed) {
    if (W <= 0 || H <= 0) throw std::invalid_argument("empty domain");
    if (p.beta <= 0) throw std::invalid_argument("beta must be positive");
    if (p.level < 0) throw std::invalid_argument("boundary level must be nonnegative");
    ChainState s;
    s.field.W = W;
    s.field.H = H;
    s.field.boundaryLevel = p.level;
    s.field.h.assign(size_t(W) * H, p.level);
    s.params = p;
    s.seed = seed;
    return s;
}

void heatBathSite(ChainState& s, int x, int y, std::uint64_t draw) {
    const HeightField& f = s.field;
    int nb[4] = {f.at(x - 1, y), f.at(x + 1, y), f.at(x, y - 1), f.at(x, y + 1)};
    CounterRng rng{s.seed};
    double u01 = rng.uniform(std::uint64_t(s.sweepCount), std::uint64_t(y) * f.W + x, draw);
    double h = wettingH(s.params.beta) + s.params.u;
    s.field.ref(x, y) = sampleConditional(nb, s.params.beta, h, u01);
}

void sweepChain(ChainState& s) {
    const int W = s.field.W, H = s.field.H, N = W * H;
    if (s.sweepCount % 2 == 0) {
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) heatBathSite(s, x, y);
    } else {
        // seeded permutation; the per-site uniforms are keyed by the site
        // itself, so the visit order changes nothing but the schedule
        CounterRng rng{s.seed};
        std::vector<int> order(static_cast<size_t>(N));
        std::iota(order.begin(), order.end(), 0);
        for (int i = N - 1; i > 0; --i) {
            int j = int(rng.uniform(std::uint64_t(s.sweepCount), std::uint64_t(i), 1) * (i + 1));
            std::swap(order[size_t(i)], order[size_t(j)]);
        }
        for (int idx : order) heatBathSite(s, idx % W, idx / W);
    }
    ++s.sweepCount;
}

double contactFraction(const HeightField& f) {
    long long c = std::count(f.h.begin(), f.h.end(), 0);
    return double(c) / double(f.h.size());
}

double meanHeight(const HeightField& f) {
    long long t = std::accumulate(f.h.begin(), f.h.end(), 0ll);
    return double(t) / double(f.h.size());
}

SeriesStats batchStats(const std::vector<double>& xs, int minBatches) {
    SeriesStats st;
    const size_t n = xs.size();
    if (n == 0) return st;
    st.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / double(n);
    if (n < size_t(2 * minBatches)) {
        st.batches = 1;
        double v = 0;
        for (double x : xs) v += (x - st.mean) * (x - st.mean);
        st.se = std::sqrt(v / double(n) / double(std::max<size_t>(n - 1, 1)));
        return st;
    }
    const int nb = minBatches;
    const size_t m = n / size_t(nb);
    double vb = 0;
    for (int b = 0; b < nb; ++b) {
        double bm = 0;
        for (size_t i = size_t(b) * m; i < size_t(b + 1) * m; ++i) bm += xs[i];
        bm /= double(m);
        vb += (bm - st.mean) * (bm - st.mean);
    }
    vb /= double(nb - 1);
    st.batches = nb;
    st.se = std::sqrt(vb / double(nb));
    double s2 = 0;
    for (double x : xs) s2 += (x - st.mean) * (x - st.mean);
    s2 /= double(n - 1);
    st.tauInt = s2 > 0 ? std::max(0.5, st.se * st.se * double(n) / (2.0 * s2)) : 0.5;
    return st;
}

RunResult runChain(int W, int H, const ModelParams& p, long long sweeps,
                   std::uint64_t seed, const std::vector<std::string>& observables,
                   long long burnin, long long thin) {
    return continueChain(makeChain(W, H, p, seed), sweeps, observables, burnin, thin);
}

RunResult continueChain(ChainState init, long long sweeps,
                        const std::vector<std::string>& observables,
                        long long burnin, long long thin) {
    RunResult out;
    out.state = std::move(init);
    const ModelParams& p = out.state.params;
    const int W = out.state.field.W, H = out.state.field.H;
    if (thin < 1) thin = 1;
    if (burnin < 0) {
        // pilot run: burn 10x the fitted autocorrelation time of the contact
        // fraction
        long long pilot = std::min<long long>(2000, std::max<long long>(200, sweeps / 5));
        ChainState probe = out.state;
        std::vector<double> cs;
        for (long long t = 0; t < pilot; ++t) {
            sweepChain(probe);
            cs.push_back(contactFraction(probe.field));
        }
        burnin = std::min<long long>(llround(10.0 * batchStats(cs).tauInt) + 1, sweeps / 2);
    }
    auto want = [&](const std::string& s) {
        return std::find(observables.begin(), observables.end(), s) != observables.end();
    };
    const bool obContact = want("contact"), obHeight = want("height");
    const bool obHist = want("histogram"), obPerc = want("percolation");
    if (obContact) out.series["contact"].name = "contact";
    if (obHeight) out.series["height"].name = "height";
    if (obPerc) {
        out.series["perc_largest"].name = "perc_largest";
        out.series["perc_crossing"].name = "perc_crossing";
    }
    long long histCount = 0;
    for (long long t = 0; t < sweeps; ++t) {
        sweepChain(out.state);
        if (t < burnin || (t - burnin) % thin != 0) continue;
        if (obContact) {
            out.series["contact"].sweeps.push_back(t);
            out.series["contact"].samples.push_back(contactFraction(out.state.field));
        }
        if (obHeight) {
            out.series["height"].sweeps.push_back(t);
            out.series["height"].samples.push_back(meanHeight(out.state.field));
        }
        if (obHist) {
            for (int v : out.state.field.h) {
                if (size_t(v) >= out.histogram.size()) out.histogram.resize(size_t(v) + 1, 0.0);
                out.histogram[size_t(v)] += 1.0;
            }
            ++histCount;
        }
        if (obPerc) {
            PercolationReport r = levelPercolation(out.state.field, p.level);
            out.series["perc_largest"].sweeps.push_back(t);
            out.series["perc_largest"].samples.push_back(r.largestFraction);
            out.series["perc_crossing"].sweeps.push_back(t);
            out.series["perc_crossing"].samples.push_back(r.crossing ? 1.0 : 0.0);
        }
    }
    if (histCount > 0)
        for (double& v : out.histogram) v /= double(histCount) * W * H;
    for (auto& [k, s] : out.series) s.finalize();
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(size_t(n)) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[size_t(x)] != x) x = p[size_t(x)] = p[size_t(p[size_t(x)])];
        return x;
    }
    void unite(int a, int b) { p[size_t(find(a))] = find(b); }
};

}  // namespace

PercolationReport levelPercolation(const HeightField& f, int level) {
    const int W = f.W, H = f.H, N = W * H;
    PercolationReport rep;
    auto idx = [&](int x, int y) { return y * W + x; };

    // nearest-neighbour components of the level set
    UnionFind uf(N);
    int onCount = 0;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (f.at(x, y) != level) continue;
            ++onCount;
            if (x + 1 < W && f.at(x + 1, y) == level) uf.unite(idx(x, y), idx(x + 1, y));
            if (y + 1 < H && f.at(x, y + 1) == level) uf.unite(idx(x, y), idx(x, y + 1));
        }
    rep.levelFraction = double(onCount) / double(N);
    std::vector<int> size(size_t(N), 0);
    std::vector<int> xlo(size_t(N), W), xhi(size_t(N), -1), ylo(size_t(N), H), yhi(size_t(N), -1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (f.at(x, y) != level) continue;
            int r = uf.find(idx(x, y));
            ++size[size_t(r)];
            xlo[size_t(r)] = std::min(xlo[size_t(r)], x);
            xhi[size_t(r)] = std::max(xhi[size_t(r)], x);
            ylo[size_t(r)] = std::min(ylo[size_t(r)], y);
            yhi[size_t(r)] = std::max(yhi[size_t(r)], y);
        }
    for (int r = 0; r < N; ++r) {
        if (size[size_t(r)] == 0) continue;
        rep.largestFraction = std::max(rep.largestFraction, double(size[size_t(r)]) / N);
        if ((xlo[size_t(r)] == 0 && xhi[size_t(r)] == W - 1) ||
            (ylo[size_t(r)] == 0 && yhi[size_t(r)] == H - 1))
            rep.crossing = true;
    }

    // star components (the (1,1) diagonal added) of the strict off-level sets
    for (int side = 0; side < 2; ++side) {
        auto in = [&](int x, int y) {
            int v = f.at(x, y);
            return side == 0 ? v > level : v < level;
        };
        UnionFind su(N);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                if (!in(x, y)) continue;
                if (x + 1 < W && in(x + 1, y)) su.unite(idx(x, y), idx(x + 1, y));
                if (y + 1 < H && in(x, y + 1)) su.unite(idx(x, y), idx(x, y + 1));
                if (x + 1 < W && y + 1 < H && in(x + 1, y + 1))
                    su.unite(idx(x, y), idx(x + 1, y + 1));
            }
        std::vector<int> sxlo(size_t(N), W), sxhi(size_t(N), -1), sylo(size_t(N), H),
            syhi(size_t(N), -1);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                if (!in(x, y)) continue;
                int r = su.find(idx(x, y));
                sxlo[size_t(r)] = std::min(sxlo[size_t(r)], x);
                sxhi[size_t(r)] = std::max(sxhi[size_t(r)], x);
                sylo[size_t(r)] = std::min(sylo[size_t(r)], y);
                syhi[size_t(r)] = std::max(syhi[size_t(r)], y);
            }
        for (int r = 0; r < N; ++r) {
            if (sxhi[size_t(r)] < 0) continue;
            int d = std::max(sxhi[size_t(r)] - sxlo[size_t(r)], syhi[size_t(r)] - sylo[size_t(r)]) + 1;
            rep.maxOffDiameter = std::max(rep.maxOffDiameter, d);
        }
    }
    return rep;
}

SandwichResult sandwichRun(int W, int H, const ModelParams& p, long long sweeps,
                           std::uint64_t seed) {
    SandwichResult out;
    ModelParams lowP = p;
    lowP.level = 0;
    out.low = makeChain(W, H, lowP, seed);
    out.high = makeChain(W, H, p, seed);
    long long ok = 0, total = 0;
    for (long long t = 0; t < sweeps; ++t) {
        sweepChain(out.low);
        sweepChain(out.high);
        double gap = 0;
        for (int i = 0; i < W * H; ++i) {
            ++total;
            if (out.low.field.h[size_t(i)] <= out.high.field.h[size_t(i)]) ++ok;
            gap += out.high.field.h[size_t(i)] - out.low.field.h[size_t(i)];
        }
        out.gapSeries.push_back(gap / double(W * H));
    }
    out.dominationFrequency = total > 0 ? double(ok) / double(total) : 1.0;
    return out;
}

void writeCheckpoint(std::ostream& os, const ChainState& s) {
    os << "soslab-chain 1\n";
    os << s.field.W << ' ' << s.field.H << ' ' << s.params.level << '\n';
    os << std::hexfloat << s.params.beta << ' ' << s.params.u << std::defaultfloat << '\n';
    os << s.seed << ' ' << s.sweepCount << '\n';
    for (int y = 0; y < s.field.H; ++y) {
        for (int x = 0; x < s.field.W; ++x)
            os << s.field.h[size_t(y) * s.field.W + x] << (x + 1 < s.field.W ? ' ' : '\n');
    }
}

ChainState readCheckpoint(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "soslab-chain" || version != 1)
        throw std::runtime_error("unrecognised checkpoint header");
    int W = 0, H = 0;
    ModelParams p;
    is >> W >> H >> p.level;
    std::string betaTok, uTok;
    is >> betaTok >> uTok;
    p.beta = std::strtod(betaTok.c_str(), nullptr);
    p.u = std::strtod(uTok.c_str(), nullptr);
    std::uint64_t seed = 0;
    long long sweeps = 0;
    is >> seed >> sweeps;
    if (!is || W <= 0 || H <= 0) throw std::runtime_error("corrupt checkpoint");
    ChainState s = makeChain(W, H, p, seed);
    s.sweepCount = sweeps;
    for (int i = 0; i < W * H; ++i) {
        is >> s.field.h[size_t(i)];
        if (s.field.h[size_t(i)] < 0) throw std::runtime_error("negative height in checkpoint");
    }
    if (!is) throw std::runtime_error("corrupt checkpoint");
    return s;
}

}  // namespace soslab

#pragma once
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "soslab/cylinder.hpp"

namespace soslab {

struct ModelParams {
    double beta = 2.0;
    double u = 0.0;  // reward offset, h = h_w(beta) + u
    int level = 0;   // boundary condition n
};

/* Counter-based generator: every uniform is a pure function of
   (seed, sweep, site, draw), so site order and replication never change the
   law and any draw can be replayed in isolation. */
struct CounterRng {
    std::uint64_t seed = 0;
    double uniform(std::uint64_t sweep, std::uint64_t site, std::uint64_t draw) const;
};

/* Exact single-site conditional: P(k) ~ exp(-beta sum |k - nb_i| + h 1{k=0}),
   k >= 0. Sampled by CDF inversion ascending from k = 0, so a shared uniform
   yields the monotone coupling. */
int sampleConditional(const int nb[4], double beta, double h, double u01);
// normalized conditional mass at k (used by the sampler's own inversion)
double conditionalProb(const int nb[4], double beta, double h, int k);

struct ChainState {
    HeightField field;
    ModelParams params;
    std::uint64_t seed = 0;
    long long sweepCount = 0;
};

ChainState makeChain(int W, int H, const ModelParams& p, std::uint64_t seed);

/* One heat-bath sweep: raster order on even sweep indices, a seeded random
   permutation on odd ones. */
void sweepChain(ChainState& s);
// resample one site in place
void heatBathSite(ChainState& s, int x, int y, std::uint64_t draw = 0);

double contactFraction(const HeightField& f);
double meanHeight(const HeightField& f);

struct SeriesStats {
    double mean = 0;
    double se = 0;       // batch-means standard error (autocorrelation-adjusted)
    double tauInt = 0.5; // integrated autocorrelation time
    int batches = 0;
};
SeriesStats batchStats(const std::vector<double>& xs, int minBatches = 20);

struct ObservableSeries {
    std::string name;
    std::vector<long long> sweeps;
    std::vector<double> samples;
    SeriesStats stats;  // filled by finalize()
    void finalize(int minBatches = 20) { stats = batchStats(samples, minBatches); }
};

struct RunResult {
    ChainState state;
    std::map<std::string, ObservableSeries> series;
    std::vector<double> histogram;  // height occupation frequencies
};

/* Drive a chain for `sweeps` sweeps recording the requested observables
   ("contact", "height", "histogram", "percolation") every `thin` sweeps after
   `burnin`. Deterministic given the seed. */
RunResult runChain(int W, int H, const ModelParams& p, long long sweeps,
                   std::uint64_t seed, const std::vector<std::string>& observables,
                   long long burnin = 0, long long thin = 1);
// same driver starting from an existing state (checkpoint resume)
RunResult continueChain(ChainState init, long long sweeps,
                        const std::vector<std::string>& observables,
                        long long burnin = 0, long long thin = 1);

struct PercolationReport {
    double levelFraction = 0;    // |phi^{-1}(level)| / |Lambda|
    double largestFraction = 0;  // largest level component / |Lambda|
    bool crossing = false;       // level component spans left-right or top-bottom
    int maxOffDiameter = 0;      // largest star-component extent off the level
};
/* Nearest-neighbour components of phi^{-1}(level); components of the sites
   above and below under star-connectivity (the (1,1) diagonal added, not the
   other one). */
PercolationReport levelPercolation(const HeightField& f, int level);

struct SandwichResult {
    ChainState low, high;        // boundary conditions 0 and n
    double dominationFrequency = 0;  // fraction of (sweep, site) checks with low <= high
    std::vector<double> gapSeries;   // mean height gap per sweep
};
// coupled chains driven by the same uniforms from boundary conditions 0 and n
SandwichResult sandwichRun(int W, int H, const ModelParams& p, long long sweeps,
                           std::uint64_t seed);

// line-based checkpoint of a chain
void writeCheckpoint(std::ostream& os, const ChainState& s);
ChainState readCheckpoint(std::istream& is);

}  // namespace soslab

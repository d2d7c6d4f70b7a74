#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "soslab/enumerate.hpp"
#include "soslab/exact.hpp"
#include "soslab/expansion.hpp"
#include "soslab/io.hpp"
#include "soslab/layering.hpp"
#include "soslab/mcmc.hpp"
#include "soslab/weights.hpp"

using json = nlohmann::json;
using namespace soslab;

namespace {

constexpr const char* kVersion = "soslab 1.0.0";

// exit-code 3 carrier: the computation finished but could not resolve the
// requested quantity; the partial result has already been emitted
struct Unresolved : std::exception {
    const char* what() const noexcept override { return "unresolved"; }
};

struct RunContext {
    std::string outDir;                 // empty: print to stdout, no manifest
    std::string configFile;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    json extra;                         // command-specific manifest entries
    std::time_t start = std::time(nullptr);

    void add(const std::string& name, const std::string& content) {
        files.emplace_back(name, content);
    }
};

std::string isoTime(std::time_t t) {
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// effective config = every option the subcommand saw, flag or config file
json effectiveConfig(const CLI::App* cmd) {
    json cfg = json::object();
    for (const CLI::Option* o : cmd->get_options()) {
        std::string name = o->get_lnames().empty() ? o->get_name() : o->get_lnames()[0];
        if (name == "help") continue;
        if (o->count() > 0)
            cfg[name] = o->results().size() == 1 ? json(o->results()[0]) : json(o->results());
        else if (!o->get_default_str().empty())
            cfg[name] = o->get_default_str();
    }
    return cfg;
}

void finishRun(RunContext& ctx, const CLI::App* cmd, bool forceManifest) {
    if (ctx.outDir.empty() && !forceManifest) {
        for (auto& [name, content] : ctx.files) std::cout << content;
        return;
    }
    std::string dir = ctx.outDir.empty() ? "." : ctx.outDir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    json manifest;
    manifest["command"] = cmd->get_name();
    manifest["version"] = kVersion;
    manifest["config"] = effectiveConfig(cmd);
    if (!ctx.configFile.empty()) {
        manifest["config_file"] = ctx.configFile;
        manifest["config_file_hash"] = hex64(fnv1a64(readFile(ctx.configFile)));
    }
    const char* threads = std::getenv("SOSLAB_THREADS");
    manifest["thread_budget"] = threads ? std::atoi(threads) : 1;
    manifest["start"] = isoTime(ctx.start);
    manifest["end"] = isoTime(std::time(nullptr));
    json outs = json::array();
    for (auto& [name, content] : ctx.files) {
        writeTextAtomic(dir + "/" + name, content);
        outs.push_back({{"file", name}, {"fnv1a64", hex64(fnv1a64(content))}});
    }
    manifest["outputs"] = outs;
    if (!ctx.extra.is_null()) manifest["run"] = ctx.extra;
    writeTextAtomic(dir + "/manifest.json", manifest.dump(2) + "\n");
}

std::pair<int, int> parseSize(const std::string& s) {
    int w = 0, h = 0;
    char x = 0;
    std::istringstream is(s);
    if (!(is >> w >> x >> h) || x != 'x' || w < 1 || h < 1 || !(is >> std::ws).eof())
        throw CLI::ValidationError("expected WxH with positive integers: " + s);
    return {w, h};
}

std::pair<int, int> parsePair(const std::string& s) {
    int a = 0, b = 0;
    char c = 0;
    std::istringstream is(s);
    if (!(is >> a >> c >> b) || c != ',' || !(is >> std::ws).eof())
        throw CLI::ValidationError("expected X,Y integers: " + s);
    return {a, b};
}

std::vector<double> parseGrid(const std::string& s) {
    double lo = 0, hi = 0;
    long long steps = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 1 ||
        steps > 100000 || !(is >> std::ws).eof())
        throw CLI::ValidationError("expected lo:hi:steps: " + s);
    std::vector<double> g;
    for (long long i = 0; i < steps; ++i)
        g.push_back(steps == 1 ? lo : lo + (hi - lo) * double(i) / double(steps - 1));
    return g;
}

void requirePositive(double v, const char* name) {
    if (!(v > 0)) throw CLI::ValidationError(std::string(name) + " must be > 0");
}

// ---- subcommand bodies ----

void cmdContoursEnumerate(RunContext& ctx, const std::string& window, int maxLen,
                          const std::string& anchorStr) {
    auto [W, H] = parseSize(window);
    std::optional<DualVertex> anchor;
    if (!anchorStr.empty()) {
        auto [a, b] = parsePair(anchorStr);
        anchor = DualVertex{a, b};
    }
    std::vector<Contour> cs;
    try {
        cs = enumerateContours(W, H, maxLen, anchor);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError(e.what());
    }
    std::ostringstream os;
    for (const Contour& c : cs) os << serializeContour(c) << '\n';
    os << "count " << cs.size() << '\n';
    ctx.add("contours.txt", os.str());
}

void cmdExactZ(RunContext& ctx, const std::string& domain, double beta, double u,
               int level, bool barred, int hmax) {
    requirePositive(beta, "beta");
    if (level < 0) throw CLI::ValidationError("level must be >= 0");
    f128 logValue = 0;
    double tailBound = 0;
    int w = 0, h = 0;
    char x = 0;
    std::istringstream is(domain);
    if ((is >> w >> x >> h) && x == 'x' && (is >> std::ws).eof() && w >= 1 && h >= 1) {
        if (barred) throw CLI::ValidationError("--barred applies to contour domains only");
        BoxResult r = wallPartition(w, h, beta, u, level, hmax, true);
        logValue = r.logZ;
        tailBound = r.tailBound;
    } else {
        auto c = parseContour(domain);
        if (!c) throw CLI::ValidationError("domain is neither WxH nor a contour: " + domain);
        std::string why;
        if (!isValidContour(*c, &why)) throw CLI::ValidationError("invalid contour: " + why);
        WeightTable wt(beta);
        int id = wt.classOf(*c);
        f128 y = wallY(beta, u);
        int eps = c->sign;
        if (barred) {
            // zbar_n = z(boundary n, constraint n) - z(boundary n, constraint n+eps)
            f128 a = wt.logZ(id, eps, level, level, y);
            f128 b = wt.logZ(id, eps, level, level + eps, y);
            logValue = a + log1p(-exp(b - a));
        } else {
            logValue = wt.logZ(id, eps, level, level, y);
        }
        // heights are capped well past the quad-precision noise floor; bound
        // the discarded mass per cell by the first excluded level
        int cap = std::max(level, level + eps) +
                  int(std::ceil(36.0 * std::log(10.0) / (4.0 * beta))) + 2;
        double q4 = std::exp(-4.0 * beta);
        tailBound = double(wt.shape(id).cells.size()) *
                    std::exp(-4.0 * beta * (cap + 1 - level)) / (1.0 - q4);
    }
    std::ostringstream os;
    os << "logValue " << fmt17(double(logValue)) << '\n'
       << "tailBound " << fmt17(tailBound) << '\n';
    ctx.add("exact_z.txt", os.str());
}

void cmdExpansionFreeEnergy(RunContext& ctx, double beta, double u, int level, int lmax,
                            bool truncated) {
    requirePositive(beta, "beta");
    if (level < 0) throw CLI::ValidationError("level must be >= 0");
    if (lmax < 4 || lmax % 2) throw CLI::ValidationError("lmax must be even and >= 4");
    WeightTable wt(beta, truncated ? WeightTable::Truncated : WeightTable::Raw);
    ClusterSet cs(wt, lmax);
    FreeEnergyValue f = cs.eval(level, u);
    CsvTable t;
    t.header = {"beta", "u", "level", "lmax", "value", "trunc_error"};
    t.rows.push_back({fmt17(beta), fmt17(u), std::to_string(level), std::to_string(lmax),
                      fmt17(double(f.value)), fmt17(f.truncError)});
    ctx.add("free_energy.csv", t.str());
}

void cmdWeightsScan(RunContext& ctx, double beta, int level, int maxLen,
                    const std::string& gridStr) {
    requirePositive(beta, "beta");
    if (level < 0) throw CLI::ValidationError("level must be >= 0");
    if (maxLen < 4 || maxLen % 2) throw CLI::ValidationError("max-len must be even and >= 4");
    std::vector<double> grid = parseGrid(gridStr);
    // one representative per translation class: shift the lex-least visited
    // dual vertex to the origin and dedup
    int R = maxLen / 2 + 1;
    std::vector<Contour> pool = enumerateTrails({-R, R, -R, R, maxLen, std::nullopt, std::nullopt});
    std::set<Contour> reps;
    for (const Contour& c : pool) {
        Edge e0 = c.edges.front();
        DualVertex mn{e0.a, e0.b};
        for (const Edge& e : c.edges) mn = std::min(mn, DualVertex{e.a, e.b});
        std::vector<Edge> shifted;
        for (const Edge& e : c.edges) shifted.push_back({e.a - mn.a, e.b - mn.b, e.dir});
        reps.insert(canonicalize(std::move(shifted), +1));
    }
    WeightTable wt(beta);
    CsvTable t;
    t.header = {"contour_id", "u", "log_w", "stable"};
    for (const Contour& rep : reps) {
        for (int sign : {+1, -1}) {
            Contour c = rep;
            c.sign = sign;
            for (double u : grid) {
                f128 lw = wt.logWeight(c, level, u);
                bool st = wt.isStable(c, level, u);
                t.rows.push_back({'"' + serializeContour(c) + '"', fmt17(u),
                                  std::isinf(double(lw)) ? "-inf" : fmt17(double(lw)),
                                  st ? "1" : "0"});
            }
        }
    }
    ctx.add("weights_scan.csv", t.str());
}

json reportJson(const LayeringReport& r) {
    return json{{"n", r.n},
                {"beta", r.beta},
                {"lmax", r.lmax},
                {"u_minus", r.uMinus},
                {"u_plus", r.uPlus},
                {"u_star", r.uStar},
                {"bracket_width", r.bracketWidth},
                {"slope_left", r.slopeLeft},
                {"slope_right", r.slopeRight},
                {"ratio_to_asymptotic", r.ratioToAsymptotic},
                {"trunc_error", r.truncError},
                {"max_abs_delta", r.maxAbsDelta},
                {"status", r.status}};
}

void cmdLayeringLocate(RunContext& ctx, double beta, int n, int lmax) {
    requirePositive(beta, "beta");
    if (n < 1) throw CLI::ValidationError("n must be >= 1");
    if (lmax < 4 || lmax % 2) throw CLI::ValidationError("lmax must be even and >= 4");
    AsymptoticConstants a = estimateAlphas(beta, 3);
    LayeringReport r = locateUStar(n, beta, lmax, &a);
    ctx.add("layering.json", reportJson(r).dump(2) + "\n");
    if (r.status != "resolved") throw Unresolved{};
}

void cmdLayeringTable(RunContext& ctx, double beta, int nMax, int lmax) {
    requirePositive(beta, "beta");
    if (nMax < 1) throw CLI::ValidationError("n-max must be >= 1");
    if (lmax < 4 || lmax % 2) throw CLI::ValidationError("lmax must be even and >= 4");
    AsymptoticConstants a = estimateAlphas(beta, 3);
    WeightTable wt(beta, WeightTable::Truncated);
    ClusterSet cs(wt, lmax);
    CsvTable t;
    t.header = {"n", "u_minus", "u_star", "u_plus", "ratio_to_asymptotic", "status"};
    bool allResolved = true;
    for (int n = 1; n <= nMax; ++n) {
        LayeringReport r = locateUStar(cs, n, &a);
        allResolved = allResolved && r.status == "resolved";
        t.rows.push_back({std::to_string(n), fmt17(r.uMinus), fmt17(r.uStar), fmt17(r.uPlus),
                          fmt17(r.ratioToAsymptotic), r.status});
    }
    ctx.add("layering_table.csv", t.str());
    if (!allResolved) throw Unresolved{};
}

void cmdMcmcRun(RunContext& ctx, const std::string& size, double beta, double u, int level,
                long long sweeps, std::uint64_t seed, const std::string& observables,
                long long burnin, long long thin, const std::string& resume) {
    requirePositive(beta, "beta");
    if (level < 0) throw CLI::ValidationError("level must be >= 0");
    if (sweeps < 1) throw CLI::ValidationError("sweeps must be >= 1");
    if (thin < 1) throw CLI::ValidationError("thin must be >= 1");
    std::vector<std::string> obs;
    {
        std::istringstream is(observables);
        std::string tok;
        while (std::getline(is, tok, ','))
            if (!tok.empty()) obs.push_back(tok);
    }
    static const std::set<std::string> known{"contact", "height", "histogram", "percolation"};
    for (const std::string& o : obs)
        if (!known.count(o)) throw CLI::ValidationError("unknown observable: " + o);

    RunResult r;
    if (!resume.empty()) {
        std::ifstream is(resume);
        if (!is) throw std::runtime_error("cannot open checkpoint: " + resume);
        r = continueChain(readCheckpoint(is), sweeps, obs, std::max<long long>(burnin, 0), thin);
    } else {
        auto [W, H] = parseSize(size);
        ModelParams p{beta, u, level};
        r = runChain(W, H, p, sweeps, seed, obs, burnin, thin);
    }

    json stats = json::object();
    for (auto& [name, s] : r.series) {
        CsvTable t;
        t.header = {"sweep", name};
        for (size_t i = 0; i < s.samples.size(); ++i)
            t.rows.push_back({std::to_string(s.sweeps[i]), fmt17(s.samples[i])});
        ctx.add(name + ".csv", t.str());
        stats[name] = {{"mean", s.stats.mean},
                       {"se", s.stats.se},
                       {"tau_int", s.stats.tauInt},
                       {"batches", s.stats.batches},
                       {"samples", s.samples.size()}};
    }
    if (!r.histogram.empty()) {
        CsvTable t;
        t.header = {"height", "frequency"};
        for (size_t k = 0; k < r.histogram.size(); ++k)
            t.rows.push_back({std::to_string(k), fmt17(r.histogram[k])});
        ctx.add("histogram.csv", t.str());
    }
    std::ostringstream cp;
    writeCheckpoint(cp, r.state);
    ctx.add("checkpoint.txt", cp.str());
    ctx.extra = {{"seed", r.state.seed},
                 {"sweeps_total", r.state.sweepCount},
                 {"beta", r.state.params.beta},
                 {"u", r.state.params.u},
                 {"level", r.state.params.level},
                 {"width", r.state.field.W},
                 {"height", r.state.field.H},
                 {"series", stats}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"soslab: a numerical laboratory for the 2D SOS wetting model"};
    app.require_subcommand(1);
    app.fallthrough(false);
    RunContext ctx;
    app.add_option("--out-dir", ctx.outDir,
                   "write outputs plus manifest.json here (default: stdout)");
    app.set_config("--config", "", "config file; command-line flags override it");
    app.allow_config_extras(false);

    // contours
    auto* contours = app.add_subcommand("contours", "contour enumeration");
    auto* cEnum = contours->add_subcommand("enumerate", "list contours in a window");
    std::string window, anchorStr;
    int cMaxLen = 0;
    cEnum->add_option("--window", window, "cell window WxH")->required();
    cEnum->add_option("--max-len", cMaxLen, "maximum trail length")->required();
    cEnum->add_option("--anchor", anchorStr, "dual vertex X,Y the trail must visit");
    contours->require_subcommand(1);

    // exact
    auto* exact = app.add_subcommand("exact", "transfer-matrix evaluation");
    auto* eZ = exact->add_subcommand("z", "restricted partition function");
    std::string domain;
    double eBeta = 0, eU = 0;
    int eLevel = 0, eHmax = -1;
    bool eBarred = false;
    eZ->add_option("--domain", domain, "WxH rectangle or a serialized contour")->required();
    eZ->add_option("--beta", eBeta, "inverse temperature")->required();
    eZ->add_option("--u", eU, "reward offset above h_w")->capture_default_str();
    eZ->add_option("--level", eLevel, "boundary level n")->required();
    eZ->add_flag("--barred", eBarred, "evaluate zbar (contour domains)");
    eZ->add_option("--hmax", eHmax, "height cap (-1: automatic)")->capture_default_str();
    exact->require_subcommand(1);

    // expansion
    auto* expansion = app.add_subcommand("expansion", "cluster expansion");
    auto* xFe = expansion->add_subcommand("free-energy", "free-energy density");
    double xBeta = 0, xU = 0;
    int xLevel = 0, xLmax = 0;
    bool xTrunc = false;
    xFe->add_option("--beta", xBeta, "inverse temperature")->required();
    xFe->add_option("--u", xU, "reward offset above h_w")->capture_default_str();
    xFe->add_option("--level", xLevel, "boundary level n")->required();
    xFe->add_option("--lmax", xLmax, "cluster length cutoff")->required();
    xFe->add_flag("--truncated", xTrunc, "use truncated weights");
    expansion->require_subcommand(1);

    // weights
    auto* weights = app.add_subcommand("weights", "contour-weight tables");
    auto* wScan = weights->add_subcommand("scan", "weights over a u grid");
    double wBeta = 0;
    int wLevel = 0, wMaxLen = 0;
    std::string gridStr;
    wScan->add_option("--beta", wBeta, "inverse temperature")->required();
    wScan->add_option("--level", wLevel, "boundary level n")->required();
    wScan->add_option("--max-len", wMaxLen, "maximum trail length")->required();
    wScan->add_option("--u-grid", gridStr, "lo:hi:steps, linear")->required();
    weights->require_subcommand(1);

    // layering
    auto* layering = app.add_subcommand("layering", "layering transitions");
    auto* lLoc = layering->add_subcommand("locate", "locate u*_n");
    double lBeta = 0;
    int lN = 0, lLmax = 10;
    lLoc->add_option("--beta", lBeta, "inverse temperature")->required();
    lLoc->add_option("--n", lN, "transition index")->required();
    lLoc->add_option("--lmax", lLmax, "cluster length cutoff")->capture_default_str();
    auto* lTab = layering->add_subcommand("table", "u*_n for n = 1..n-max");
    double tBeta = 0;
    int tNMax = 0, tLmax = 10;
    lTab->add_option("--beta", tBeta, "inverse temperature")->required();
    lTab->add_option("--n-max", tNMax, "largest transition index")->required();
    lTab->add_option("--lmax", tLmax, "cluster length cutoff")->capture_default_str();
    layering->require_subcommand(1);

    // mcmc
    auto* mcmc = app.add_subcommand("mcmc", "Markov-chain sampling");
    auto* mRun = mcmc->add_subcommand("run", "heat-bath chain");
    std::string mSize, mObs = "contact", mResume;
    double mBeta = 0, mU = 0;
    int mLevel = 0;
    long long mSweeps = 0, mBurnin = -1, mThin = 1;
    std::uint64_t mSeed = 0;
    mRun->add_option("--size", mSize, "box WxH");
    mRun->add_option("--beta", mBeta, "inverse temperature")->required();
    mRun->add_option("--u", mU, "reward offset above h_w")->capture_default_str();
    mRun->add_option("--level", mLevel, "boundary level n")->capture_default_str();
    mRun->add_option("--sweeps", mSweeps, "number of sweeps")->required();
    mRun->add_option("--seed", mSeed, "RNG seed")->required();
    mRun->add_option("--observables", mObs, "comma list: contact,height,histogram,percolation")
        ->capture_default_str();
    mRun->add_option("--burnin", mBurnin, "burn-in sweeps (-1: pilot estimate)")->capture_default_str();
    mRun->add_option("--thin", mThin, "sample every k-th sweep")->capture_default_str();
    mRun->add_option("--resume", mResume, "checkpoint file to continue from");
    mcmc->require_subcommand(1);

    CLI::App* ran = nullptr;
    bool forceManifest = false;
    try {
        app.parse(argc, argv);
        if (cEnum->parsed()) {
            ran = cEnum;
            cmdContoursEnumerate(ctx, window, cMaxLen, anchorStr);
        } else if (eZ->parsed()) {
            ran = eZ;
            cmdExactZ(ctx, domain, eBeta, eU, eLevel, eBarred, eHmax);
        } else if (xFe->parsed()) {
            ran = xFe;
            cmdExpansionFreeEnergy(ctx, xBeta, xU, xLevel, xLmax, xTrunc);
        } else if (wScan->parsed()) {
            ran = wScan;
            cmdWeightsScan(ctx, wBeta, wLevel, wMaxLen, gridStr);
        } else if (lLoc->parsed()) {
            ran = lLoc;
            cmdLayeringLocate(ctx, lBeta, lN, lLmax);
        } else if (lTab->parsed()) {
            ran = lTab;
            cmdLayeringTable(ctx, tBeta, tNMax, tLmax);
        } else if (mRun->parsed()) {
            ran = mRun;
            if (mResume.empty() && mSize.empty())
                throw CLI::ValidationError("--size is required unless --resume is given");
            forceManifest = true;  // mcmc always writes a manifest
            cmdMcmcRun(ctx, mSize, mBeta, mU, mLevel, mSweeps, mSeed, mObs, mBurnin, mThin,
                       mResume);
        }
        ctx.configFile = app.get_config_ptr() && app.get_config_ptr()->count()
                             ? app.get_config_ptr()->as<std::string>()
                             : "";
        finishRun(ctx, ran, forceManifest);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Unresolved&) {
        // partial result wanted: emit what we have, then signal
        try {
            finishRun(ctx, ran, forceManifest);
        } catch (const std::exception& io) {
            std::cerr << "error: " << io.what() << '\n';
            return 4;
        }
        std::cerr << "status: unresolved\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}

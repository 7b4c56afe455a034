#include "rvs_cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rvs/errors.hpp"
#include "rvs/hypgeom.hpp"

namespace rvs::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kDetTol = 1e-9;

const std::vector<std::pair<std::string, Command>>& commandTable() {
    static const std::vector<std::pair<std::string, Command>> t{
        {"classify", Command::Classify}, {"renorm", Command::Renorm}, {"lyapunov", Command::Lyapunov},
        {"scan", Command::Scan},         {"refine", Command::Refine}, {"mcg", Command::Mcg},
        {"verify-lemmas", Command::VerifyLemmas}};
    return t;
}

std::vector<std::string> splitOn(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parseReal(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError(what + ": '" + s + "' is not a number");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError(what + ": '" + s + "' is not a finite number");
    return v;
}

std::uint64_t parseCount(const std::string& s, const std::string& what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw UsageError(what + ": '" + s + "' is not a nonnegative integer");
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw UsageError(what + ": '" + s + "' is out of range");
    }
}

Representation parseRep(const std::string& text) {
    if (auto fx = namedFixture(text)) return *fx;
    const auto parts = splitOn(text, ',');
    if (parts.size() != 8) {
        throw UsageError("--rep needs 8 comma-separated reals (A then B, row-major) or a fixture name");
    }
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = parseReal(parts[i], "--rep");
    const char* names[2] = {"A", "B"};
    for (int m = 0; m < 2; ++m) {
        const double* e = v + 4 * m;
        const double det = e[0] * e[3] - e[1] * e[2];
        if (std::abs(det - 1.0) > kDetTol) {
            std::ostringstream msg;
            msg << "matrix " << names[m] << " has determinant " << det << ", expected 1";
            throw UsageError(msg.str());
        }
    }
    return makeRepresentation(Matrix2::unchecked(v[0], v[1], v[2], v[3]),
                              Matrix2::unchecked(v[4], v[5], v[6], v[7]));
}

AlphaArg parseAlpha(const std::string& s) {
    AlphaArg a;
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::uint64_t p = parseCount(s.substr(0, slash), "--alpha");
        const std::uint64_t q = parseCount(s.substr(slash + 1), "--alpha");
        if (q == 0 || p == 0 || p >= q) throw UsageError("--alpha p/q needs 0 < p < q");
        a.rational = std::make_pair(p, q);
        return a;
    }
    const double v = parseReal(s, "--alpha");
    if (!(v > 0.0 && v < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    a.value = v;
    return a;
}

std::vector<std::uint64_t> parseDigits(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (const auto& part : splitOn(s, ',')) {
        const std::uint64_t d = parseCount(part, "--digits");
        if (d == 0) throw UsageError("--digits entries must be positive");
        out.push_back(d);
    }
    if (out.empty()) throw UsageError("--digits is empty");
    return out;
}

std::string fmt12(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.12g", v);
    return buf;
}

Json certificateJSON(const RenormTrace& t) {
    const Verdict& v = t.verdict;
    Json c;
    c["atStep"] = v.atStep;
    switch (v.kind) {
        case VerdictKind::UniformlyHyperbolic:
            c["mu"] = v.cone->mu;
            c["C"] = v.cone->C;
            c["wordLength"] = v.cone->wordLength;
            c["chiLowerBound"] = v.chiLowerBound;
            break;
        case VerdictKind::CertifiedBounded:
            c["maxTraceNorm"] = v.maxTraceNorm;
            c["traceBound"] = t.traceBound;
            break;
        case VerdictKind::FiniteOrder:
            c["spectrumMember"] = v.spectrumMember;
            break;
        case VerdictKind::Undecided:
            c["reason"] = v.reason;
            c["maxTraceNorm"] = v.maxTraceNorm;
            break;
    }
    return c;
}

Json scanPointJSON(const ScanPoint& p) {
    Json j;
    j["theta"] = p.theta;
    j["alpha"] = p.alpha;
    j["verdict"] = toString(p.verdict);
    j["chi"] = p.chi;
    j["steps"] = p.steps;
    j["mu_lower"] = p.muLower;
    return j;
}

struct Slope {
    CocyclePair pair;
    CFExpansion cf;
    std::optional<Rotation2IET> iet;  // exact state when alpha is p/q or a decimal
    double alpha{0};
};

Slope resolveSlope(const RunConfig& cfg) {
    Slope s;
    const std::size_t nDigits = cfg.budget.maxAccelSteps + 1;
    if (cfg.theta) {
        const ChartPoint cp = chartFor(cfg.rep, *cfg.theta);
        s.pair = cp.pair;
        s.alpha = cp.alpha;
        s.cf = slopeExpansion(*cfg.theta, nDigits, cfg.budget.maxDigit);
        return s;
    }
    if (!cfg.alpha) throw UsageError("this command needs --theta, --alpha or --digits");
    s.pair = {cfg.rep.A, cfg.rep.B};
    const AlphaArg& a = *cfg.alpha;
    if (!a.digits.empty()) {
        s.cf = expansionFromDigits(a.digits, false);
        s.alpha = static_cast<double>(valueOfDigits(a.digits));
        return s;
    }
    s.iet = a.rational ? Rotation2IET::fromRational(a.rational->first, a.rational->second)
                       : Rotation2IET::fromAlpha(*a.value);
    s.alpha = static_cast<double>(s.iet->alpha());
    s.cf = continuedFraction(*s.iet, nDigits, cfg.budget.maxDigit);
    return s;
}

void writeOutput(const RunConfig& cfg, const std::string& doc, std::ostream& out) {
    if (cfg.outputPath.empty()) {
        out << doc;
        out.flush();
        if (!out) throw std::runtime_error("failed writing to standard output");
        return;
    }
    std::ofstream f(cfg.outputPath, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + cfg.outputPath + "' for writing");
    f << doc;
    f.close();
    if (!f) throw std::runtime_error("failed writing '" + cfg.outputPath + "'");
}

Json isometryJSON(const Matrix2& m) {
    Json j;
    j["trace"] = m.trace();
    const IsometryClass k = classify(m);
    if (const auto* e = std::get_if<Elliptic>(&k)) {
        j["class"] = "elliptic";
        j["angle"] = e->angle;
        j["center"] = {e->center.real(), e->center.imag()};
    } else if (const auto* h = std::get_if<Hyperbolic>(&k)) {
        j["class"] = "hyperbolic";
        j["translationLength"] = h->translationLength;
        j["attracting"] = h->attracting.angle();
        j["repelling"] = h->repelling.angle();
    } else if (std::holds_alternative<Parabolic>(k)) {
        j["class"] = "parabolic";
    } else if (std::holds_alternative<Identity>(k)) {
        j["class"] = "identity";
    } else {
        j["class"] = "indeterminate";
    }
    return j;
}

std::string runClassify(const RunConfig& cfg) {
    const CocyclePair p = cfg.theta ? chartFor(cfg.rep, *cfg.theta).pair : CocyclePair{cfg.rep.A, cfg.rep.B};
    const TraceCoords tc = traceCoords(p);
    Json j;
    j["type"] = toString(classifyWithInvariant(p, cfg.rep.c));
    j["x"] = tc.x;
    j["y"] = tc.y;
    j["z"] = tc.z;
    j["c"] = cfg.rep.c;
    j["inK"] = kMembership(p).inK;
    j["A"] = isometryJSON(p.A);
    j["B"] = isometryJSON(p.B);
    return j.dump(2) + "\n";
}

std::string runRenorm(const RunConfig& cfg) {
    const Slope s = resolveSlope(cfg);
    const RenormTrace t = renormDecision(s.pair, s.cf, cfg.budget, cfg.rep.c);
    std::ostringstream os;
    emitRenormJSON(t, os);
    return os.str();
}

std::string runLyapunov(const RunConfig& cfg) {
    const Slope s = resolveSlope(cfg);
    const Rotation2IET t = s.iet ? *s.iet : Rotation2IET::fromAlpha(s.alpha);
    const LyapunovEstimate e = directExponent(s.pair, t, cfg.iters, cfg.samples, cfg.seed);
    Json j;
    j["chi"] = e.chi;
    j["stdError"] = e.stdError;
    j["nIters"] = e.nIters;
    j["samples"] = e.samplePoints;
    j["perSample"] = e.perSample;
    return j.dump(2) + "\n";
}

std::string runMcg(const RunConfig& cfg) {
    const Slope s = resolveSlope(cfg);
    CFExpansion cf = s.cf;
    if (cfg.theta) cf = slopeExpansion(*cfg.theta, cfg.mcgSteps + 2, cfg.budget.maxDigit);
    else if (s.iet) cf = continuedFraction(*s.iet, cfg.mcgSteps + 2, cfg.budget.maxDigit);
    Representation chart = makeRepresentation(s.pair.A, s.pair.B);
    chart.c = cfg.rep.c;  // invariant; the twisted chart pair is badly conditioned
    chart.degenerate = cfg.rep.degenerate;
    const MCGResult r = mcgTrajectory(chart, cf, cfg.mcgSteps);
    Json j;
    Json word = Json::array();
    for (const Twist& t : r.trajectory.twistWord) {
        word.push_back({{"generator", std::string(1, t.generator)}, {"power", t.power}, {"digitIndex", t.digitIndex}});
    }
    j["twistWord"] = word;
    Json norms = Json::array();
    for (const BigInt& n : r.trajectory.normsL1) norms.push_back(n.str());
    j["normsL1"] = norms;
    j["logL1Traces"] = r.logL1Traces;
    if (r.hyperbolic) {
        j["hyperbolic"] = {{"stepIndex", r.hyperbolic->stepIndex},
                           {"mu", r.hyperbolic->mu},
                           {"muOriginal", r.hyperbolic->muOriginal},
                           {"growthLog", r.hyperbolic->growthLog}};
    } else {
        j["hyperbolic"] = nullptr;
    }
    if (r.bounded) {
        j["bounded"] = {{"maxTraceNorm", r.bounded->maxTraceNorm},
                        {"bound", r.bounded->bound},
                        {"traceNorms", r.bounded->traceNorms}};
    } else {
        j["bounded"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string runScan(const RunConfig& cfg) {
    ScanOptions opt;
    opt.computeChi = cfg.chi;
    opt.chiIters = cfg.iters;
    opt.chiSamples = cfg.samples;
    opt.seed = cfg.seed;
    const ScanResult r = cfg.command == Command::Scan
                             ? scanGrid(cfg.rep, cfg.thetaLo, cfg.thetaHi, cfg.gridN, cfg.budget, opt)
                             : refineSpectrum(cfg.rep, cfg.thetaLo, cfg.thetaHi, cfg.depth, cfg.budget, opt);
    std::ostringstream os;
    if (cfg.format == "json") emitScanJSON(r, os);
    else emitScanCSV(r, os);
    return os.str();
}

int runLemmas(const RunConfig& cfg, std::string& doc) {
    const auto results = verifyLemmas(cfg.lemmaDraws, cfg.seed);
    bool all = true;
    std::ostringstream os;
    if (cfg.format == "json") {
        Json j = Json::array();
        for (const auto& r : results) {
            j.push_back({{"name", r.name},
                         {"draws", r.draws},
                         {"passed", r.passed},
                         {"maxResidual", r.maxResidual},
                         {"failures", r.failures}});
            all = all && r.ok();
        }
        os << j.dump(2) << "\n";
    } else {
        for (const auto& r : results) {
            os << r.name << ": " << r.passed << "/" << r.draws << " passed, max residual " << r.maxResidual
               << (r.ok() ? "" : "  FAILED") << "\n";
            for (const auto& f : r.failures) os << "  " << f << "\n";
            all = all && r.ok();
        }
    }
    doc = os.str();
    return all ? kExitOk : kExitLemmas;
}

}  // namespace

const char* toString(Command c) {
    for (const auto& [name, cmd] : commandTable()) {
        if (cmd == c) return name.c_str();
    }
    return "?";
}

std::vector<std::string> fixtureNames() {
    return {"fuchsian", "ee-generic", "commuting-hyperbolic", "commuting-elliptic", "identity"};
}

std::optional<Representation> namedFixture(const std::string& name) {
    if (name == "fuchsian") {
        // Schottky pair: disjoint axes 0-inf and 1-3, both translating by 3
        return makeRepresentation(
            translationAlong(BoundaryPoint::fromValue(0.0), BoundaryPoint::infinity(), 3.0),
            translationAlong(BoundaryPoint::fromValue(1.0), BoundaryPoint::fromValue(3.0), 3.0));
    }
    if (name == "ee-generic") {
        const auto [A, B] = canonicalRotationPair(1.0, 2.0, 2.5);
        return makeRepresentation(A, B);
    }
    if (name == "commuting-hyperbolic") return makeRepresentation(Matrix2::diagonal(2.0), Matrix2::diagonal(2.0));
    if (name == "commuting-elliptic") {
        return makeRepresentation(Matrix2::rotation(1.0), Matrix2::rotation(std::numbers::sqrt2));
    }
    if (name == "identity") return makeRepresentation(Matrix2::identity(), Matrix2::identity());
    return std::nullopt;
}

RunConfig parseArgs(const std::vector<std::string>& argv) {
    CLI::App app{"Spectrum of SL(2,R) punctured-torus representations via Rauzy-Veech renormalization", "rvs"};
    app.set_version_flag("--version", "rvs 0.1.0");
    std::string command, rep = "ee-generic", theta, alpha, digits, format = "csv", out;
    RunConfig cfg;
    std::uint64_t maxSteps = cfg.budget.maxAccelSteps, maxDigit = cfg.budget.maxDigit;
    double traceBound = 0;
    std::uint64_t grid = cfg.gridN, steps = cfg.mcgSteps;
    bool noChi = false;

    std::vector<std::string> names;
    for (const auto& kv : commandTable()) names.push_back(kv.first);
    app.add_option("command", command, "classify | renorm | lyapunov | scan | refine | mcg | verify-lemmas")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("--rep", rep, "8 reals a,b,c,d (A) then B, or a fixture name");
    app.add_option("--theta", theta, "slope angle, or lo:hi for scan and refine");
    app.add_option("--alpha", alpha, "rotation amount for pair (A, B): decimal or p/q");
    app.add_option("--digits", digits, "continued-fraction digits a1,a2,... of alpha");
    app.add_option("--grid", grid, "scan grid points");
    app.add_option("--depth", cfg.depth, "refinement depth");
    app.add_option("--max-steps", maxSteps, "accelerated renormalization steps");
    app.add_option("--max-digit", maxDigit, "largest continued-fraction digit accepted");
    app.add_option("--trace-bound", traceBound, "bounded-verdict trace bound (0: B(c) + 4)");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--iters", cfg.iters, "iterations for Lyapunov estimates");
    app.add_option("--samples", cfg.samples, "start points for Lyapunov estimates");
    app.add_option("--steps", steps, "twists in the mcg trajectory");
    app.add_option("--draws", cfg.lemmaDraws, "random draws per lemma");
    app.add_flag("--no-chi", noChi, "skip Lyapunov estimates in scans");
    app.add_option("--out", out, "output file (default: standard output)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.set_config("--config", "", "key = value file; flags on the command line win");

    std::vector<std::string> rev(argv.rbegin(), argv.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForVersion&) {
        throw HelpRequested("rvs 0.1.0\n");
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    for (const auto& [name, cmd] : commandTable()) {
        if (name == command) cfg.command = cmd;
    }
    cfg.repArg = rep;
    cfg.rep = parseRep(rep);
    cfg.format = format;
    cfg.outputPath = out;
    cfg.chi = !noChi;
    if (maxSteps < 1) throw UsageError("--max-steps must be positive");
    if (maxDigit < 1) throw UsageError("--max-digit must be positive");
    if (traceBound < 0) throw UsageError("--trace-bound must be nonnegative");
    cfg.budget.maxAccelSteps = maxSteps;
    cfg.budget.maxDigit = maxDigit;
    cfg.budget.traceBound = traceBound;
    if (grid < 2) throw UsageError("--grid must be at least 2");
    cfg.gridN = grid;
    if (cfg.depth < 1 || cfg.depth > 30) throw UsageError("--depth must be in 1..30");
    if (cfg.iters < 1) throw UsageError("--iters must be positive");
    if (cfg.samples < 1) throw UsageError("--samples must be positive");
    if (steps < 1) throw UsageError("--steps must be positive");
    cfg.mcgSteps = steps;
    if (cfg.lemmaDraws < 1) throw UsageError("--draws must be positive");

    const bool ranged = cfg.command == Command::Scan || cfg.command == Command::Refine;
    if (!theta.empty()) {
        const auto colon = theta.find(':');
        if (colon != std::string::npos) {
            if (!ranged) throw UsageError("--theta lo:hi is only valid for scan and refine");
            cfg.thetaLo = parseReal(theta.substr(0, colon), "--theta");
            cfg.thetaHi = parseReal(theta.substr(colon + 1), "--theta");
            if (!(cfg.thetaLo < cfg.thetaHi)) throw UsageError("--theta range must have lo < hi");
        } else {
            if (ranged) throw UsageError("scan and refine need --theta lo:hi");
            cfg.theta = parseReal(theta, "--theta");
        }
    }
    if (!alpha.empty() && !digits.empty()) throw UsageError("give --alpha or --digits, not both");
    if (!alpha.empty()) cfg.alpha = parseAlpha(alpha);
    if (!digits.empty()) {
        AlphaArg a;
        a.digits = parseDigits(digits);
        cfg.alpha = a;
    }
    if (cfg.theta && cfg.alpha) throw UsageError("give either --theta or --alpha/--digits");
    return cfg;
}

void emitScanCSV(const ScanResult& result, std::ostream& out) {
    std::vector<const ScanPoint*> rows;
    for (const auto& p : result.points) rows.push_back(&p);
    std::stable_sort(rows.begin(), rows.end(), [](const ScanPoint* a, const ScanPoint* b) { return a->theta < b->theta; });
    out << "theta,alpha,verdict,chi,steps,mu_lower\n";
    for (const ScanPoint* p : rows) {
        out << fmt12(p->theta) << ',' << fmt12(p->alpha) << ',' << toString(p->verdict) << ',' << fmt12(p->chi) << ','
            << p->steps << ',' << fmt12(p->muLower) << '\n';
    }
}

void emitScanJSON(const ScanResult& result, std::ostream& out) {
    Json j;
    j["thetaLo"] = result.thetaLo;
    j["thetaHi"] = result.thetaHi;
    j["depth"] = result.depth;
    std::vector<const ScanPoint*> rows;
    for (const auto& p : result.points) rows.push_back(&p);
    std::stable_sort(rows.begin(), rows.end(), [](const ScanPoint* a, const ScanPoint* b) { return a->theta < b->theta; });
    Json pts = Json::array();
    for (const ScanPoint* p : rows) pts.push_back(scanPointJSON(*p));
    j["points"] = pts;
    Json ivs = Json::array();
    for (const auto& iv : result.certifiedHyperbolicIntervals) {
        ivs.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"samples", iv.samples}, {"depth", iv.depth}});
    }
    j["certifiedHyperbolicIntervals"] = ivs;
    Json cands = Json::array();
    for (const auto& c : result.candidateSpectrumPoints) {
        cands.push_back({{"theta", c.theta}, {"depth", c.depth}, {"boundedSteps", c.boundedSteps}});
    }
    j["candidateSpectrumPoints"] = cands;
    out << j.dump(2) << "\n";
}

void emitRenormJSON(const RenormTrace& trace, std::ostream& out) {
    Json j;
    j["verdict"] = toString(trace.verdict.kind);
    Json steps = Json::array();
    for (const RenormStep& s : trace.steps) {
        Json e;
        e["n"] = s.n;
        e["digit"] = s.digit;
        e["winner"] = s.winner ? Json(toString(*s.winner)) : Json(nullptr);
        e["type"] = toString(s.type);
        e["x"] = s.coords.x;
        e["y"] = s.coords.y;
        e["z"] = s.coords.z;
        e["inK"] = s.inK;
        steps.push_back(std::move(e));
    }
    j["steps"] = steps;
    j["certificate"] = certificateJSON(trace);
    out << j.dump(2) << "\n";
}

std::string reemitJSON(const std::string& text) { return Json::parse(text).dump(2) + "\n"; }

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.rep.degenerate && cfg.command != Command::Classify && cfg.command != Command::VerifyLemmas) {
        err << "warning: commutator trace " << cfg.rep.c << " <= 2, representation is outside the generic regime\n";
    }
    std::string doc;
    int code = kExitOk;
    switch (cfg.command) {
        case Command::Classify: doc = runClassify(cfg); break;
        case Command::Renorm: doc = runRenorm(cfg); break;
        case Command::Lyapunov: doc = runLyapunov(cfg); break;
        case Command::Scan:
        case Command::Refine: doc = runScan(cfg); break;
        case Command::Mcg: doc = runMcg(cfg); break;
        case Command::VerifyLemmas: code = runLemmas(cfg, doc); break;
    }
    writeOutput(cfg, doc, out);
    return code;
}

int runMain(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parseArgs(argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        return run(cfg, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace rvs::cli

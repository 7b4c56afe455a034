#include "rvs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rvs/errors.hpp"
#include "rvs/parallel.hpp"

namespace rvs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryTol = 1e-12;
constexpr double kCoverTol = 1e-14;

long double toLD(const BigInt& v) { return v.convert_to<long double>(); }

long double tailValue(const Rational& r) { return toLD(r.p) / toLD(r.q); }

// [0; d_1, ..., d_n] as an exact fraction.
Rational convergent(const std::vector<std::uint64_t>& digits) {
    BigInt p0 = 1, p1 = 0, q0 = 0, q1 = 1;
    for (std::uint64_t d : digits) {
        BigInt p2 = BigInt(d) * p1 + p0;
        BigInt q2 = BigInt(d) * q1 + q0;
        p0 = p1;
        p1 = p2;
        q0 = q1;
        q1 = q2;
    }
    return {p1, q1};
}

}  // namespace

Representation makeRepresentation(const Matrix2& A, const Matrix2& B) {
    Representation r;
    r.A = A;
    r.B = B;
    r.c = traceCoords({A, B}).cDirect;
    r.degenerate = !(r.c > 2.0 + kTraceEps);
    return r;
}

ChartPoint chartFor(const Representation& rep, double theta) {
    if (!std::isfinite(theta)) throw ChartBoundaryError("slope angle is not finite");
    theta -= kPi * std::round(theta / kPi);
    const double at = std::abs(theta);
    if (at < kBoundaryTol || std::abs(at - 0.25 * kPi) < kBoundaryTol || std::abs(at - 0.5 * kPi) < kBoundaryTol) {
        throw ChartBoundaryError("slope angle on a chart boundary");
    }
    const long double t = std::tan(static_cast<long double>(at));
    ChartPoint cp{};
    if (at < 0.25 * kPi) {
        cp.alpha = static_cast<double>(t);
        cp.wraps = 0;
        cp.quadrant = theta > 0 ? 1 : 4;
        cp.pair = theta > 0 ? CocyclePair{rep.A, rep.B} : CocyclePair{rep.A, rep.B.inverse()};
        return cp;
    }
    const long double k = std::floor(t);
    const long double frac = t - k;
    if (frac < kBoundaryTol || frac > 1.0L - kBoundaryTol) throw ChartBoundaryError("integer slope tangent");
    cp.alpha = static_cast<double>(frac);
    cp.wraps = static_cast<std::uint64_t>(k);
    cp.quadrant = theta > 0 ? 2 : 3;
    const Matrix2 Ak = power(rep.A, cp.wraps);
    cp.pair = theta > 0 ? CocyclePair{rep.A, rep.B * Ak} : CocyclePair{rep.A, rep.B.inverse() * Ak};
    return cp;
}

CFExpansion slopeExpansion(double theta, std::size_t maxDigits, std::uint64_t digitCap) {
    using HP = boost::multiprecision::cpp_bin_float_100;
    theta -= kPi * std::round(theta / kPi);
    HP x = abs(tan(HP(theta)));
    x -= floor(x);
    HP err = HP("1e-99");
    CFExpansion cf;
    cf.q.push_back(1);
    cf.remainders.push_back(x.convert_to<long double>());
    while (cf.digits.size() < maxDigits) {
        if (x <= err) {
            cf.terminated = x <= HP("1e-95");
            break;
        }
        const HP inv = 1 / x;
        err = err * inv * inv;  // |d(1/x)| = |dx| / x^2
        if (err > HP("1e-6")) break;
        const HP fl = floor(inv);
        if (fl > HP(static_cast<double>(digitCap))) {
            cf.capped = true;
            break;
        }
        HP rest = inv - fl;
        // the next digit is ambiguous inside the error ball
        if (rest < err || 1 - rest < err) break;
        cf.digits.push_back(fl.convert_to<std::uint64_t>());
        const std::size_t n = cf.digits.size();
        const BigInt prev2 = n >= 2 ? cf.q[n - 2] : BigInt(0);
        cf.q.push_back(BigInt(cf.digits.back()) * cf.q[n - 1] + prev2);
        cf.remainders.push_back(rest.convert_to<long double>());
        x = rest;
    }
    return cf;
}

ChartPoint reversedChart(const ChartPoint& cp) {
    ChartPoint r = cp;
    r.alpha = 1.0 - cp.alpha;
    r.pair = {cp.pair.B.inverse(), cp.pair.A.inverse()};
    return r;
}

double thetaFor(int quadrant, std::uint64_t wraps, long double alpha) {
    switch (quadrant) {
        case 1: return static_cast<double>(std::atan(alpha));
        case 2: return static_cast<double>(std::atan(static_cast<long double>(wraps) + alpha));
        case 3: return static_cast<double>(-std::atan(static_cast<long double>(wraps) + alpha));
        case 4: return static_cast<double>(-std::atan(alpha));
    }
    throw std::invalid_argument("quadrant must be 1..4");
}

const char* toString(PointVerdict v) {
    switch (v) {
        case PointVerdict::Hyperbolic: return "hyperbolic";
        case PointVerdict::Bounded: return "bounded";
        case PointVerdict::FiniteIn: return "finite_in";
        case PointVerdict::FiniteOut: return "finite_out";
        case PointVerdict::Undecided: return "undecided";
        case PointVerdict::Degenerate: return "degenerate";
    }
    return "degenerate";
}

PointVerdict pointVerdictFromString(const std::string& s) {
    for (PointVerdict v : {PointVerdict::Hyperbolic, PointVerdict::Bounded, PointVerdict::FiniteIn,
                           PointVerdict::FiniteOut, PointVerdict::Undecided, PointVerdict::Degenerate}) {
        if (s == toString(v)) return v;
    }
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

PointVerdict pointVerdictOf(const RenormTrace& t) {
    switch (t.verdict.kind) {
        case VerdictKind::UniformlyHyperbolic: return PointVerdict::Hyperbolic;
        case VerdictKind::CertifiedBounded: return PointVerdict::Bounded;
        case VerdictKind::FiniteOrder:
            return t.verdict.spectrumMember ? PointVerdict::FiniteIn : PointVerdict::FiniteOut;
        case VerdictKind::Undecided: return PointVerdict::Undecided;
    }
    return PointVerdict::Undecided;
}

std::string Cylinder::signature() const {
    std::ostringstream os;
    os << quadrant << ':' << wraps << ':';
    for (std::uint64_t d : prefix) os << d << ',';
    os << '>' << minDigit;
    return os.str();
}

namespace {

// Cylinder of slopes sharing the trace's prefix up to absorption.
Cylinder cylinderOf(const RenormTrace& tr, const ChartPoint& cp) {
    Cylinder cyl{};
    cyl.quadrant = cp.quadrant;
    cyl.wraps = cp.wraps;
    const RenormStep& last = tr.steps[tr.verdict.atStep];
    Rational inner, outer;
    if (last.runIndex == 0) {
        cyl.minDigit = 1;
        inner = {1, 1};
        outer = {0, 1};
    } else {
        const std::size_t j = last.runIndex;
        cyl.prefix.assign(tr.expansion.digits.begin(), tr.expansion.digits.begin() + (j - 1));
        cyl.minDigit = last.digit + (j == 1 ? 1 : 0);
        std::vector<std::uint64_t> withMin = cyl.prefix;
        withMin.push_back(cyl.minDigit);
        inner = convergent(withMin);
        outer = convergent(cyl.prefix);
    }
    const double tInner = thetaFor(cp.quadrant, cp.wraps, tailValue(inner));
    const double tOuter = thetaFor(cp.quadrant, cp.wraps, tailValue(outer));
    const auto isEdge = [](const Rational& r) { return r.p == 0 || r.p == r.q; };
    if (tInner < tOuter) {
        cyl.thetaLo = tInner;
        cyl.thetaHi = tOuter;
        cyl.alphaLo = inner;
        cyl.alphaHi = outer;
    } else {
        cyl.thetaLo = tOuter;
        cyl.thetaHi = tInner;
        cyl.alphaLo = outer;
        cyl.alphaHi = inner;
    }
    cyl.loIsEdge = isEdge(cyl.alphaLo);
    cyl.hiIsEdge = isEdge(cyl.alphaHi);
    return cyl;
}

std::size_t boundedPrefix(const RenormTrace& tr) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < tr.steps.size(); ++i) {
        const TraceCoords& c = tr.steps[i].coords;
        if (std::max({std::abs(c.x), std::abs(c.y), std::abs(c.z)}) > tr.traceBound) break;
        ++n;
    }
    return n;
}

}  // namespace

ScanPoint evaluateSlope(const Representation& rep, double theta, const DecisionBudget& budget,
                        const ScanOptions& opt) {
    ScanPoint sp;
    sp.theta = theta;
    ChartPoint cp;
    try {
        cp = chartFor(rep, theta);
    } catch (const ChartBoundaryError&) {
        sp.verdict = PointVerdict::Degenerate;
        return sp;
    }
    sp.alpha = cp.alpha;
    if (opt.computeChi) {
        sp.chi = directExponent(cp.pair, Rotation2IET::fromAlpha(cp.alpha), opt.chiIters, opt.chiSamples, opt.seed).chi;
    }
    RenormTrace tr;
    try {
        // c from the representation: the twisted chart pairs have large entries
        tr = renormDecision(cp.pair, slopeExpansion(theta, budget.maxAccelSteps + 1, budget.maxDigit), budget, rep.c);
    } catch (const DegeneratePairError&) {
        sp.verdict = PointVerdict::Degenerate;
        return sp;
    } catch (const PreconditionError&) {
        sp.verdict = PointVerdict::Degenerate;
        return sp;
    }
    sp.verdict = pointVerdictOf(tr);
    sp.steps = tr.steps.size() - 1;
    sp.boundedSteps = boundedPrefix(tr);
    if (tr.verdict.kind == VerdictKind::UniformlyHyperbolic) {
        sp.muLower = tr.verdict.cone->mu;
        sp.chiLowerBound = tr.verdict.chiLowerBound;
        sp.cylinder = cylinderOf(tr, cp);
    }
    return sp;
}

ScanResult scanGrid(const Representation& rep, double thetaLo, double thetaHi, std::size_t n,
                    const DecisionBudget& budget, const ScanOptions& opt) {
    if (!(thetaLo < thetaHi)) throw EmptyIntervalError("scan range is empty");
    if (n < 2) throw PreconditionError("grid needs at least two points");
    ScanResult res;
    res.thetaLo = thetaLo;
    res.thetaHi = thetaHi;
    res.points.resize(n);
    parallelFor(n, [&](std::size_t i) {
        const double th = thetaLo + (thetaHi - thetaLo) * static_cast<double>(i) / static_cast<double>(n - 1);
        res.points[i] = evaluateSlope(rep, th, budget, opt);
    });
    return res;
}

namespace {

struct Node {
    double lo, hi;
    int depth;
};

bool onChartBoundary(const Representation& rep, double theta) {
    try {
        (void)chartFor(rep, theta);
        return false;
    } catch (const ChartBoundaryError&) {
        return true;
    }
}

class Gluer {
public:
    Gluer(const Representation& rep, const DecisionBudget& budget) : rep_(rep), budget_(budget) {}

    // Whether the rational alpha of a cylinder endpoint is a finite-order slope off the spectrum.
    bool outside(const Cylinder& cyl, const Rational& r) {
        if (r.p <= 0 || r.p >= r.q) return false;
        if (r.q >= (BigInt(1) << 62)) return false;
        std::ostringstream key;
        key << cyl.quadrant << ':' << cyl.wraps << ':' << r.p << '/' << r.q;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(key.str());
            if (it != memo_.end()) return it->second;
        }
        bool ok = false;
        try {
            const double th = thetaFor(cyl.quadrant, cyl.wraps, tailValue(r));
            const ChartPoint cp = chartFor(rep_, th);
            if (cp.quadrant == cyl.quadrant && cp.wraps == cyl.wraps) {
                const auto t = Rotation2IET::fromRational(r.p.convert_to<std::uint64_t>(),
                                                          r.q.convert_to<std::uint64_t>());
                DecisionBudget b = budget_;
                b.maxAccelSteps = std::max<std::size_t>(b.maxAccelSteps, 200);
                const RenormTrace tr =
                    renormDecision(cp.pair, continuedFraction(t, b.maxAccelSteps + 1, b.maxDigit), b, rep_.c);
                ok = pointVerdictOf(tr) == PointVerdict::FiniteOut;
            }
        } catch (const std::exception&) {
            ok = false;
        }
        std::lock_guard<std::mutex> lock(mu_);
        memo_[key.str()] = ok;
        return ok;
    }

private:
    const Representation& rep_;
    DecisionBudget budget_;
    std::mutex mu_;
    std::map<std::string, bool> memo_;
};

bool sameChart(const Cylinder& a, const Cylinder& b) { return a.quadrant == b.quadrant && a.wraps == b.wraps; }

using Probe = std::function<std::optional<Cylinder>(double)>;

struct Walk {
    std::vector<Cylinder> cyls;
    std::vector<Cylinder> probed;
    int probesLeft{32};
};

// Index of a cylinder carrying the walk past cur, or -1.
int stepFrom(double cur, int from, bool curEdge, const std::vector<Cylinder>& cyls, Gluer& gluer) {
    int next = -1;
    for (std::size_t i = 0; i < cyls.size(); ++i) {
        const Cylinder& c = cyls[i];
        if (c.thetaLo < cur - kCoverTol && c.thetaHi > cur + kCoverTol) {
            if (next < 0 || c.thetaHi > cyls[next].thetaHi) next = static_cast<int>(i);
        }
    }
    if (next >= 0) return next;
    for (std::size_t i = 0; i < cyls.size(); ++i) {
        const Cylinder& c = cyls[i];
        if (std::abs(c.thetaLo - cur) > kCoverTol) continue;
        bool ok = false;
        if (curEdge && c.loIsEdge) ok = true;
        else if (from >= 0 && sameChart(cyls[from], c) && cyls[from].alphaHi == c.alphaLo) ok = gluer.outside(c, c.alphaLo);
        if (ok && (next < 0 || c.thetaHi > cyls[next].thetaHi)) next = static_cast<int>(i);
    }
    return next;
}

// Walks [lo, hi] left to right through open cylinders, crossing a shared
// endpoint only at a chart edge or a glued rational.  When stuck, evaluates
// slopes just right of the stuck point.
bool covered(double lo, double hi, bool loBoundary, bool hiBoundary, Walk& w, Gluer& gluer, const Probe& probe) {
    double cur = lo;
    int from = -1;
    bool curEdge = loBoundary;
    const double width = hi - lo;
    for (;;) {
        int next = stepFrom(cur, from, curEdge, w.cyls, gluer);
        for (int k : {2, 5, 8, 12, 16, 20, 26}) {
            if (next >= 0 || w.probesLeft <= 0) break;
            const double th = cur + width * std::ldexp(1.0, -k);
            if (!(th > cur)) break;
            --w.probesLeft;
            if (auto c = probe(th)) {
                w.cyls.push_back(*c);
                w.probed.push_back(*c);
                next = stepFrom(cur, from, curEdge, w.cyls, gluer);
            }
        }
        if (next < 0) return false;
        cur = w.cyls[next].thetaHi;
        from = next;
        curEdge = w.cyls[next].hiIsEdge;
        if (cur > hi + kCoverTol) return true;
        if (std::abs(cur - hi) <= kCoverTol && curEdge && hiBoundary) return true;
    }
}

}  // namespace

ScanResult refineSpectrum(const Representation& rep, double thetaLo, double thetaHi, int depth,
                          const DecisionBudget& budget, const ScanOptions& opt) {
    if (!(thetaLo < thetaHi)) throw EmptyIntervalError("refinement range is empty");
    if (depth < 1 || depth > 30) throw PreconditionError("depth must be in 1..30");
    ScanResult res;
    res.thetaLo = thetaLo;
    res.thetaHi = thetaHi;
    res.depth = depth;

    std::map<double, ScanPoint> cache;
    std::map<std::string, Cylinder> cylinders;
    Gluer gluer(rep, budget);
    const bool loBoundary = onChartBoundary(rep, thetaLo);
    const bool hiBoundary = onChartBoundary(rep, thetaHi);
    ScanOptions probeOpt = opt;
    probeOpt.computeChi = false;
    const Probe probe = [&](double th) { return evaluateSlope(rep, th, budget, probeOpt).cylinder; };

    std::vector<Node> frontier{{thetaLo, thetaHi, 1}};
    std::vector<Node> certified;
    while (!frontier.empty()) {
        std::vector<double> todo;
        for (const Node& nd : frontier) {
            for (double th : {nd.lo, 0.5 * (nd.lo + nd.hi), nd.hi}) {
                if (!cache.count(th)) todo.push_back(th);
            }
        }
        std::sort(todo.begin(), todo.end());
        todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
        std::vector<ScanPoint> fresh(todo.size());
        parallelFor(todo.size(), [&](std::size_t i) { fresh[i] = evaluateSlope(rep, todo[i], budget, opt); });
        for (std::size_t i = 0; i < todo.size(); ++i) {
            if (fresh[i].cylinder) cylinders.emplace(fresh[i].cylinder->signature(), *fresh[i].cylinder);
            cache.emplace(todo[i], std::move(fresh[i]));
        }

        std::vector<Walk> walks(frontier.size());
        std::vector<char> ok(frontier.size(), 0);
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            const Node& nd = frontier[i];
            for (const auto& kv : cylinders) {
                const Cylinder& c = kv.second;
                if (c.thetaLo < nd.hi + kCoverTol && c.thetaHi > nd.lo - kCoverTol) walks[i].cyls.push_back(c);
            }
        }
        parallelFor(frontier.size(), [&](std::size_t i) {
            const Node& nd = frontier[i];
            const bool lb = nd.lo == thetaLo && loBoundary;
            const bool hb = nd.hi == thetaHi && hiBoundary;
            ok[i] = covered(nd.lo, nd.hi, lb, hb, walks[i], gluer, probe);
        });

        std::vector<Node> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            const Node& nd = frontier[i];
            for (const Cylinder& c : walks[i].probed) cylinders.emplace(c.signature(), c);
            const double mid = 0.5 * (nd.lo + nd.hi);
            if (ok[i]) {
                certified.push_back(nd);
            } else if (nd.depth < depth) {
                next.push_back({nd.lo, mid, nd.depth + 1});
                next.push_back({mid, nd.hi, nd.depth + 1});
            } else {
                res.candidateSpectrumPoints.push_back({mid, nd.depth, cache.at(mid).boundedSteps});
            }
        }
        frontier = std::move(next);
    }

    std::sort(certified.begin(), certified.end(), [](const Node& a, const Node& b) { return a.lo < b.lo; });
    for (const Node& nd : certified) {
        auto& out = res.certifiedHyperbolicIntervals;
        if (!out.empty() && out.back().hi == nd.lo) {
            out.back().hi = nd.hi;
            out.back().depth = std::max(out.back().depth, nd.depth);
        } else {
            out.push_back({nd.lo, nd.hi, 0, nd.depth});
        }
    }
    for (auto& iv : res.certifiedHyperbolicIntervals) {
        for (auto it = cache.lower_bound(iv.lo); it != cache.end() && it->first <= iv.hi; ++it) ++iv.samples;
    }
    std::sort(res.candidateSpectrumPoints.begin(), res.candidateSpectrumPoints.end(),
              [](const CandidatePoint& a, const CandidatePoint& b) { return a.theta < b.theta; });
    res.points.reserve(cache.size());
    for (auto& kv : cache) res.points.push_back(std::move(kv.second));
    return res;
}

std::vector<std::uint64_t> boundedPathDigits(const CocyclePair& p, std::size_t nRuns, std::uint64_t maxDigit) {
    constexpr double kMargin = 1e-3;
    CocyclePair pair = normalizePair(p);
    if (classifyPair(pair) != PairType::EE) throw PreconditionError("bounded path needs an elliptic-elliptic pair");
    const auto safelyElliptic = [](const CocyclePair& q) {
        return std::abs(q.A.trace()) < 2.0 - kMargin && std::abs(q.B.trace()) < 2.0 - kMargin;
    };
    std::vector<std::uint64_t> digits;
    for (std::size_t j = 1; j <= nRuns; ++j) {
        const int which = j % 2 == 1 ? 1 : 2;
        std::optional<CocyclePair> found;
        std::uint64_t n = 1;
        // same arithmetic as renormDecision on an EE pair
        for (; n <= maxDigit; ++n) {
            const CocyclePair cand = tauPower(pair, which, n);
            if (safelyElliptic(cand) && classifyPair(cand) == PairType::EE) {
                found = cand;
                break;
            }
        }
        if (!found) return {};
        digits.push_back(j == 1 ? n + 1 : n);
        pair = normalizePair(*found);
    }
    return digits;
}

BigInt IntMatrix::normL1() const { return abs(a) + abs(b) + abs(c) + abs(d); }

namespace {

// m * 2^e with 0.5 <= |m| < 1, or m = 0.
struct XFloat {
    long double m{0};
    long long e{0};

    static XFloat of(long double v) {
        XFloat x;
        int ex = 0;
        x.m = std::frexp(v, &ex);
        x.e = ex;
        return x;
    }
    XFloat norm() const {
        if (m == 0) return {};
        int ex = 0;
        XFloat x;
        x.m = std::frexp(m, &ex);
        x.e = e + ex;
        return x;
    }
    friend XFloat operator*(const XFloat& a, const XFloat& b) { return XFloat{a.m * b.m, a.e + b.e}.norm(); }
    friend XFloat operator-(const XFloat& a, const XFloat& b) {
        if (a.m == 0) return XFloat{-b.m, b.e};
        if (b.m == 0) return a;
        const long long top = std::max(a.e, b.e);
        const long long da = a.e - top, db = b.e - top;
        const long double am = da < -200 ? 0.0L : std::ldexp(a.m, static_cast<int>(da));
        const long double bm = db < -200 ? 0.0L : std::ldexp(b.m, static_cast<int>(db));
        return XFloat{am - bm, top}.norm();
    }
    double logAbs() const {
        if (m == 0) return -std::numeric_limits<double>::infinity();
        return static_cast<double>(std::log(std::abs(m)) + static_cast<long double>(e) * std::numbers::ln2_v<long double>);
    }
    bool fitsDouble() const { return e < 1000; }
    double value() const { return static_cast<double>(std::ldexp(m, static_cast<int>(e))); }
};

double logSumAbs(const XFloat& x, const XFloat& y, const XFloat& z) {
    const double lx = x.logAbs(), ly = y.logAbs(), lz = z.logAbs();
    const double top = std::max({lx, ly, lz});
    if (!std::isfinite(top)) return top;
    return top + std::log(std::exp(lx - top) + std::exp(ly - top) + std::exp(lz - top));
}

}  // namespace

MCGResult mcgTrajectory(const Representation& rep, double alpha, std::size_t nSteps) {
    return mcgTrajectory(rep, continuedFraction(alpha, nSteps + 2), nSteps);
}

MCGResult mcgTrajectory(const Representation& rep, const CFExpansion& cf, std::size_t nSteps) {
    MCGResult res;
    MCGTrajectory& trj = res.trajectory;
    IntMatrix phi;
    trj.matrices.push_back(phi);
    trj.normsL1.push_back(phi.normL1());

    const std::size_t k = cf.size();
    CocyclePair pair = normalizePair({rep.A, rep.B});
    TraceCoords tc = traceCoords(pair);
    XFloat x = XFloat::of(tc.x), y = XFloat::of(tc.y), z = XFloat::of(tc.z);
    bool matrixMode = true;
    bool absorbed = classifyWithInvariant(pair, rep.c) == PairType::HHplus;
    std::optional<std::size_t> absorbedAt;
    CocyclePair absorbedPair;
    long double ra = 1, rb = 1, absorbedReturn = 1;
    bool havePair = absorbed;
    if (absorbed) {
        absorbedAt = 0;
        absorbedPair = pair;
    }
    const double bound = kTraceBound(rep.c) + 4.0;
    double maxNorm = std::max({std::abs(tc.x), std::abs(tc.y), std::abs(tc.z)});
    std::vector<double> traceNorms;

    for (std::size_t j = 1; j <= k && trj.twistWord.size() < nSteps; ++j) {
        std::int64_t len = static_cast<std::int64_t>(cf.digits[j - 1]) - (j == 1 ? 1 : 0);
        if (cf.terminated && j == k) len -= 1;
        if (len <= 0) continue;
        const auto n = static_cast<std::uint64_t>(len);
        const int which = j % 2 == 1 ? 1 : 2;
        trj.twistWord.push_back({which == 1 ? 'a' : 'b', n, j});
        if (which == 1) {
            phi.a += BigInt(n) * phi.c;
            phi.b += BigInt(n) * phi.d;
            rb += static_cast<long double>(n) * ra;
        } else {
            phi.c += BigInt(n) * phi.a;
            phi.d += BigInt(n) * phi.b;
            ra += static_cast<long double>(n) * rb;
        }
        trj.matrices.push_back(phi);
        trj.normsL1.push_back(phi.normL1());

        if (matrixMode) {
            const CocyclePair moved = tauPower(pair, which, n);
            if (moved.A.finite() && moved.B.finite() && std::max(moved.A.maxAbs(), moved.B.maxAbs()) < 1e100) {
                pair = normalizePair(moved);
                tc = traceCoords(pair);
                x = XFloat::of(tc.x);
                y = XFloat::of(tc.y);
                z = XFloat::of(tc.z);
            } else {
                matrixMode = false;
            }
        }
        if (!matrixMode) {
            // tau1: (x, y, z) -> (x, U_n, U_{n+1}), U_0 = y, U_1 = z, U_{i+1} = x U_i - U_{i-1}
            const XFloat f = which == 1 ? x : y;
            XFloat u0 = which == 1 ? y : x, u1 = z;
            for (std::uint64_t i = 0; i < n; ++i) {
                XFloat u2 = f * u1 - u0;
                u0 = u1;
                u1 = u2;
            }
            if (which == 1) y = u0;
            else x = u0;
            z = u1;
        }
        const std::size_t idx = trj.twistWord.size();
        if (!absorbed && matrixMode && classifyWithInvariant(pair, rep.c) == PairType::HHplus) {
            absorbed = true;
            absorbedAt = idx;
            absorbedPair = pair;
            havePair = true;
            absorbedReturn = std::max(ra, rb);
        } else if (!absorbed && !matrixMode && x.fitsDouble() && y.fitsDouble() && z.fitsDouble() &&
                   pairTypeFromTraces(x.value(), y.value(), z.value()) == PairType::HHplus) {
            absorbed = true;
            absorbedAt = idx;
        }
        res.logL1Traces.push_back(logSumAbs(x, y, z));
        const double tn = std::exp(std::max({x.logAbs(), y.logAbs(), z.logAbs()}));
        traceNorms.push_back(tn);
        maxNorm = std::max(maxNorm, tn);
    }

    if (havePair) {
        if (const auto cone = coneCertificate(absorbedPair)) {
            HyperbolicityWitness w;
            w.stepIndex = *absorbedAt;
            w.mu = cone->mu;
            w.muOriginal = std::pow(cone->mu, 1.0 / static_cast<double>(absorbedReturn));
            w.growthLog = res.logL1Traces;
            res.hyperbolic = w;
        }
    }
    if (!absorbed) {
        BoundedWitness b;
        b.maxTraceNorm = maxNorm;
        b.bound = bound;
        b.traceNorms = traceNorms;
        if (maxNorm <= bound) res.bounded = b;
    }
    return res;
}

}  // namespace rvs

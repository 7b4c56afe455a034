#include "rvs/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rvs/errors.hpp"
#include "rvs/hypgeom.hpp"
#include "rvs/parallel.hpp"

namespace rvs {

namespace {

constexpr int kRenormCadence = 32;
constexpr double kOverflowEntry = 1e150;

struct Raw {
    double a, b, c, d;
};

inline Raw rawMul(const Matrix2& m, const Raw& r) {
    return {m.a * r.a + m.b * r.c, m.a * r.b + m.b * r.d, m.c * r.a + m.d * r.c,
            m.c * r.b + m.d * r.d};
}

inline double opNorm(const Raw& r) {
    const double s1 = std::hypot(r.a + r.d, r.b - r.c);
    const double s2 = std::hypot(r.a - r.d, r.b + r.c);
    return 0.5 * (s1 + s2);
}

// log||rho_n(x)|| at each requested checkpoint (ascending).
std::vector<double> orbitLogNorms(const CocyclePair& p, double alpha, double x,
                                  const std::vector<std::uint64_t>& checkpoints) {
    std::vector<double> out;
    out.reserve(checkpoints.size());
    Raw m{1, 0, 0, 1};
    double logAcc = 0.0;
    const double cut = 1.0 - alpha;
    std::size_t next = 0;
    const std::uint64_t last = checkpoints.empty() ? 0 : checkpoints.back();
    for (std::uint64_t n = 1; n <= last; ++n) {
        m = rawMul(x <= cut ? p.A : p.B, m);
        x = x <= cut ? x + alpha : x + alpha - 1.0;
        if (n % kRenormCadence == 0) {
            const double s = opNorm(m);
            m = {m.a / s, m.b / s, m.c / s, m.d / s};
            logAcc += std::log(s);
        }
        while (next < checkpoints.size() && checkpoints[next] == n) {
            out.push_back(logAcc + std::log(opNorm(m)));
            ++next;
        }
    }
    return out;
}

std::vector<double> stratifiedStarts(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double shift = u(rng);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = (i + shift) / n;
    return xs;
}

struct Run {
    Winner winner;
    std::uint64_t length;
    std::size_t index;  // 1-based digit index
};

}  // namespace

const char* toString(VerdictKind k) {
    switch (k) {
        case VerdictKind::UniformlyHyperbolic: return "hyperbolic";
        case VerdictKind::CertifiedBounded: return "bounded";
        case VerdictKind::FiniteOrder: return "finite";
        case VerdictKind::Undecided: return "undecided";
    }
    return "undecided";
}

LyapunovEstimate directExponent(const CocyclePair& p, const Rotation2IET& t, std::uint64_t nIters,
                                int nSamples, std::uint64_t seed) {
    if (nIters < 1) throw PreconditionError("nIters must be at least 1");
    if (nSamples < 1) throw PreconditionError("nSamples must be at least 1");
    const double alpha = static_cast<double>(t.alpha());
    const std::vector<double> xs = stratifiedStarts(nSamples, seed);
    LyapunovEstimate est;
    est.nIters = nIters;
    est.samplePoints = nSamples;
    est.perSample.assign(nSamples, 0.0);
    parallelFor(nSamples, [&](std::size_t i) {
        est.perSample[i] = orbitLogNorms(p, alpha, xs[i], {nIters}).front() / static_cast<double>(nIters);
    });
    double sum = 0.0;
    for (double v : est.perSample) sum += v;
    est.chi = sum / nSamples;
    if (nSamples > 1) {
        double ss = 0.0;
        for (double v : est.perSample) ss += (v - est.chi) * (v - est.chi);
        est.stdError = std::sqrt(ss / (nSamples - 1)) / std::sqrt(static_cast<double>(nSamples));
    }
    return est;
}

bool transitionAllowed(PairType before, int which, PairType after) {
    using P = PairType;
    if (after == P::Degenerate) return false;
    switch (before) {
        case P::HHplus: return after == P::HHplus;
        case P::EE: return after == P::EE || after == (which == 1 ? P::EH : P::HE);
        case P::HE:
            return which == 1 ? (after == P::HE || after == P::HHplus)
                              : (after == P::HE || after == P::EE);
        case P::EH:
            return which == 2 ? (after == P::EH || after == P::HHplus)
                              : (after == P::EH || after == P::EE);
        case P::HHminus:
            return after == P::HHminus || after == P::HHplus || after == (which == 1 ? P::HE : P::EH);
        case P::Degenerate: return false;
    }
    return false;
}

CocyclePair normalizePair(const CocyclePair& p) {
    const Matrix2* ref = nullptr;
    if (std::abs(p.A.trace()) < 2.0 - kTraceEps) ref = &p.A;
    else if (std::abs(p.B.trace()) < 2.0 - kTraceEps) ref = &p.B;
    if (!ref) return p;
    const auto cls = classify(*ref);
    const auto* e = std::get_if<Elliptic>(&cls);
    if (!e || !(e->center.imag() > 0.0) || !std::isfinite(e->center.real())) return p;
    const Matrix2 m = movePointFromI(e->center);
    const Matrix2 mi = m.inverse();
    return {mi * p.A * m, mi * p.B * m};
}

namespace {

RenormStep makeStep(const CocyclePair& pair, double c, std::size_t n, std::uint64_t digit, std::optional<Winner> w,
                    int which) {
    RenormStep s;
    s.n = n;
    s.digit = digit;
    s.winner = w;
    s.pair = pair;
    s.coords = traceCoords(pair);
    s.type = classifyWithInvariant(pair, c);
    s.inK = kMembership(pair).inK;
    s.escorted = s.inK;
    if (!s.escorted && which != 0) {
        const double x = s.coords.x, y = s.coords.y, z = s.coords.z;
        s.escorted = which == 1 ? kMembershipFromTraces(x, x * y - z, y).inK
                                : kMembershipFromTraces(x * y - z, y, x).inK;
    }
    return s;
}

double maxTrace(const TraceCoords& t) {
    return std::max({std::abs(t.x), std::abs(t.y), std::abs(t.z)});
}

}  // namespace

RenormTrace renormDecision(const CocyclePair& p0, const CFExpansion& cf, const DecisionBudget& budget) {
    return renormDecision(p0, cf, budget, traceCoords(p0).c);
}

RenormTrace renormDecision(const CocyclePair& p0, const CFExpansion& cf, const DecisionBudget& budget, double c) {
    if (budget.maxAccelSteps < 1 || budget.maxDigit < 1) throw PreconditionError("budget fields must be positive");
    RenormTrace tr;
    tr.expansion = cf;
    tr.c = c;
    tr.traceBound = budget.traceBound > 0.0 ? budget.traceBound : kTraceBound(tr.c) + 4.0;

    std::vector<Run> runs;
    const std::size_t k = cf.size();
    for (std::size_t j = 1; j <= k; ++j) {
        const Winner w = j % 2 == 1 ? Winner::Bottom : Winner::Top;
        std::int64_t len = static_cast<std::int64_t>(cf.digits[j - 1]) - (j == 1 ? 1 : 0);
        if (cf.terminated && j == k) len -= 1;
        if (len < 0) throw PreconditionError("rotation amount is within tolerance of 0 or 1");
        runs.push_back({w, static_cast<std::uint64_t>(len), j});
    }

    // P_j = alpha x_1 ... x_j
    std::vector<long double> P(k + 1, 0.0L);
    P[0] = cf.remainders.empty() ? 0.0L : cf.remainders[0];
    for (std::size_t j = 1; j <= k; ++j) P[j] = P[j - 1] * cf.remainders[j];

    CocyclePair pair = normalizePair(p0);
    RenormStep s0 = makeStep(pair, tr.c, 0, 0, std::nullopt, 0);
    s0.lengthA = 1.0L - P[0];
    s0.lengthB = P[0];
    tr.steps.push_back(s0);
    if (s0.type == PairType::Degenerate) throw DegeneratePairError("initial pair is degenerate");

    long double ra = 1, rb = 1;
    double maxNorm = maxTrace(s0.coords);
    bool withinBound = maxNorm <= tr.traceBound;
    auto finishHyperbolic = [&](const RenormStep& s) {
        Verdict& v = tr.verdict;
        v.atStep = s.n;
        v.lastPair = s.pair;
        v.maxTraceNorm = maxNorm;
        v.cone = coneCertificate(s.pair);
        if (!v.cone) {
            v.kind = VerdictKind::Undecided;
            v.reason = "no certified cone for an HH+ pair";
            return;
        }
        v.kind = VerdictKind::UniformlyHyperbolic;
        v.chiLowerBound = static_cast<double>(s.lengthA + s.lengthB) * std::log(v.cone->mu);
    };
    if (s0.type == PairType::HHplus) {
        finishHyperbolic(s0);
        return tr;
    }

    std::size_t consumed = 0;
    for (const Run& run : runs) {
        if (run.length == 0) {
            ++consumed;
            continue;
        }
        if (tr.steps.size() >= budget.maxAccelSteps) break;
        if (run.length > budget.maxDigit) {
            tr.verdict.kind = VerdictKind::Undecided;
            tr.verdict.reason = "digit exceeds cap";
            tr.verdict.atStep = tr.steps.size() - 1;
            tr.verdict.maxTraceNorm = maxNorm;
            tr.verdict.lastPair = pair;
            return tr;
        }
        const int which = run.winner == Winner::Bottom ? 1 : 2;
        const PairType before = tr.steps.back().type;
        std::uint64_t used = run.length;
        const bool incremental = before == PairType::HHminus || (before == PairType::HE && which == 1) ||
                                 (before == PairType::EH && which == 2);
        if (incremental) {
            for (std::uint64_t i = 1; i <= run.length; ++i) {
                pair = which == 1 ? tau1(pair) : tau2(pair);
                if (std::max(pair.A.maxAbs(), pair.B.maxAbs()) > kOverflowEntry) {
                    tr.verdict.kind = VerdictKind::Undecided;
                    tr.verdict.reason = "overflow";
                    tr.verdict.atStep = tr.steps.size() - 1;
                    tr.verdict.maxTraceNorm = maxNorm;
                    tr.verdict.lastPair = pair;
                    return tr;
                }
                if (i < run.length && classifyWithInvariant(pair, tr.c) == PairType::HHplus) {
                    used = i;
                    break;
                }
            }
        } else {
            pair = tauPower(pair, which, run.length);
        }
        pair = normalizePair(pair);
        if (which == 1) rb += static_cast<long double>(used) * ra;
        else ra += static_cast<long double>(used) * rb;

        RenormStep s = makeStep(pair, tr.c, tr.steps.size(), used, run.winner, which);
        s.returnA = ra;
        s.returnB = rb;
        s.runIndex = run.index;
        const std::size_t j = run.index;
        const long double xj = cf.remainders[j];
        const long double winnerLen = used == run.length && !(cf.terminated && j == k)
                                          ? P[j]
                                          : P[j - 1] * (static_cast<long double>(cf.digits[j - 1]) + xj -
                                                        static_cast<long double>(used) - (j == 1 ? 1 : 0));
        if (which == 1) {
            s.lengthA = winnerLen;
            s.lengthB = P[j - 1];
        } else {
            s.lengthB = winnerLen;
            s.lengthA = P[j - 1];
        }
        if (!transitionAllowed(before, which, s.type)) {
            tr.auditViolations.push_back("step " + std::to_string(s.n) + ": " + toString(before) + " -> " +
                                         toString(s.type) + " via tau" + std::to_string(which));
        }
        maxNorm = std::max(maxNorm, maxTrace(s.coords));
        withinBound = withinBound && maxTrace(s.coords) <= tr.traceBound;
        tr.steps.push_back(s);
        ++consumed;
        if (s.type == PairType::Degenerate) throw DegeneratePairError("renormalized pair is degenerate");
        if (s.type == PairType::HHplus) {
            finishHyperbolic(s);
            return tr;
        }
    }

    Verdict& v = tr.verdict;
    v.atStep = tr.steps.size() - 1;
    v.maxTraceNorm = maxNorm;
    v.lastPair = pair;
    if (consumed == runs.size() && cf.terminated) {
        const int which = (k % 2 == 1) ? 1 : 2;
        v.kind = VerdictKind::FiniteOrder;
        v.lastPair = which == 1 ? tau1(pair) : tau2(pair);
        const Matrix2& survivor = which == 1 ? v.lastPair.B : v.lastPair.A;
        v.spectrumMember = !isHyperbolic(classify(survivor));
        return tr;
    }
    if (tr.steps.size() >= budget.maxAccelSteps) {
        v.kind = withinBound ? VerdictKind::CertifiedBounded : VerdictKind::Undecided;
        if (!withinBound) v.reason = "trace bound exceeded";
        return tr;
    }
    v.kind = VerdictKind::Undecided;
    v.reason = cf.capped ? "digit exceeds cap" : "continued fraction exhausted";
    return tr;
}

RenormTrace renormDecision(const CocyclePair& p, const Rotation2IET& t, const DecisionBudget& budget) {
    return renormDecision(p, continuedFraction(t, budget.maxAccelSteps + 1, budget.maxDigit), budget);
}

RenormTrace renormDecision(const CocyclePair& p, double alpha, const DecisionBudget& budget) {
    return renormDecision(p, Rotation2IET::fromAlpha(alpha), budget);
}

double boundednessImpliesZero(const CocyclePair& p, const Rotation2IET& t, const RenormTrace& trace,
                              std::uint64_t nCheck, int nSamples, std::uint64_t seed) {
    if (trace.verdict.kind != VerdictKind::CertifiedBounded) {
        throw PreconditionError("boundedness check requires a CertifiedBounded trace");
    }
    if (nCheck < 8) throw PreconditionError("nCheck must be at least 8");
    std::vector<std::uint64_t> checkpoints;
    for (int kk = 3; kk >= 0; --kk) checkpoints.push_back(nCheck >> kk);
    const double alpha = static_cast<double>(t.alpha());
    const std::vector<double> xs = stratifiedStarts(nSamples, seed);
    std::vector<std::vector<double>> logs(nSamples);
    parallelFor(nSamples, [&](std::size_t i) { logs[i] = orbitLogNorms(p, alpha, xs[i], checkpoints); });
    double worst = 0.0;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        double mean = 0.0;
        for (int i = 0; i < nSamples; ++i) mean += logs[i][c];
        mean /= nSamples * static_cast<double>(checkpoints[c]);
        worst = std::max(worst, mean);
    }
    return worst;
}

}  // namespace rvs

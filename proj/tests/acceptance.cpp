// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: rvs_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "random_pairs.hpp"
#include "rvs/errors.hpp"
#include "rvs/parallel.hpp"
#include "rvs_cli/cli.hpp"

using namespace rvs;

namespace {

struct Outcome {
    bool pass{true};
    std::ostringstream detail;

    void require(bool cond) { pass = pass && cond; }
};

struct Criterion {
    int id;
    const char* name;
    double limitSeconds;
    std::function<void(Outcome&)> body;
};

std::vector<std::uint64_t> euclidDigits(double alpha, std::size_t n) {
    int e = 0;
    const double m = std::frexp(alpha, &e);
    BigInt p = static_cast<std::int64_t>(std::ldexp(m, 53));
    BigInt q = BigInt(1) << (53 - e);
    std::vector<std::uint64_t> out;
    while (p != 0 && out.size() < n) {
        const BigInt a = q / p;
        out.push_back(static_cast<std::uint64_t>(a));
        const BigInt r = q - a * p;
        q = p;
        p = r;
    }
    return out;
}

Representation eeGeneric() {
    const auto [A, B] = canonicalRotationPair(1.0, 2.0, 2.5);
    return makeRepresentation(A, B);
}

Representation fuchsian() {
    return makeRepresentation(translationAlong(BoundaryPoint::fromValue(0.0), BoundaryPoint::infinity(), 3.0),
                              translationAlong(BoundaryPoint::fromValue(1.0), BoundaryPoint::fromValue(3.0), 3.0));
}

// 1
void fricke(Outcome& o) {
    constexpr double kTol = 1e-8;
    std::mt19937_64 rng(101);
    double worst = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const CocyclePair p{test::randomKAK(rng), test::randomKAK(rng)};
        const TraceCoords t = traceCoords(p);
        worst = std::max(worst, std::abs(t.x * t.x + t.y * t.y + t.z * t.z - t.x * t.y * t.z - (t.cDirect + 2.0)));
    }
    o.require(worst <= kTol);
    o.detail << n << " pairs, max residual " << worst << " (tol " << kTol << ")";
}

// 2 and 3 share the run
struct CFRun {
    int digitMismatch{0}, returnMismatch{0}, returnChecks{0}, returnSkipped{0}, boundViolations{0}, boundChecks{0};
    bool done{false};
};
CFRun cfRun;
constexpr std::uint64_t kMaxSimulated = 2000000000;

void runContinuedFractions() {
    if (cfRun.done) return;
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        double alpha = u(rng);
        while (alpha == 0.0) alpha = u(rng);
        const Rotation2IET t = Rotation2IET::fromAlpha(alpha);
        const CFExpansion cf = continuedFraction(t, 15);
        if (cf.digits != euclidDigits(alpha, 15)) ++cfRun.digitMismatch;
        for (std::size_t n = 1; n <= 8 && n < cf.q.size(); ++n) {
            if (cf.q[n] + cf.q[n - 1] > kMaxSimulated) {
                ++cfRun.returnSkipped;  // orbit too long to simulate within the time limit
                continue;
            }
            ++cfRun.returnChecks;
            try {
                const FirstReturnRecord r = firstReturnOracle(t, n, 2 * kMaxSimulated);
                const auto qn = static_cast<std::uint64_t>(cf.q[n]), qm = static_cast<std::uint64_t>(cf.q[n - 1]);
                if (std::set<std::uint64_t>{r.returnTimes.first, r.returnTimes.second} !=
                    std::set<std::uint64_t>{qn, qn + qm}) {
                    ++cfRun.returnMismatch;
                }
            } catch (const std::exception&) {
                ++cfRun.returnMismatch;
            }
        }
        // bottom-wins normalization: alpha > 1/2 is read as 1 - alpha
        const CFExpansion norm = alpha < 0.5 ? cf : continuedFraction(Rotation2IET::fromAlpha(1.0 - alpha), 15);
        for (std::size_t n = 0; n < norm.q.size(); ++n) {
            ++cfRun.boundChecks;
            if (norm.q[n].convert_to<double>() < std::pow(std::numbers::sqrt2, static_cast<double>(n)) - 1e-9) {
                ++cfRun.boundViolations;
            }
        }
    }
    cfRun.done = true;
}

void cfDigits(Outcome& o) {
    runContinuedFractions();
    o.require(cfRun.digitMismatch == 0 && cfRun.returnMismatch == 0);
    o.detail << "1000 alphas x 15 digits: " << cfRun.digitMismatch << " digit mismatches; return times "
             << cfRun.returnChecks - cfRun.returnMismatch << "/" << cfRun.returnChecks << " match {q_n, q_n+q_n-1} ("
             << cfRun.returnSkipped << " with q_n + q_n-1 > " << kMaxSimulated << " not simulated)";
}

void qBound(Outcome& o) {
    runContinuedFractions();
    o.require(cfRun.boundViolations == 0 && cfRun.boundChecks > 0);
    o.detail << cfRun.boundChecks << " convergents, " << cfRun.boundViolations << " below sqrt2^n";
}

// 4
void coneSoundness(Outcome& o) {
    std::mt19937_64 rng(104);
    std::vector<CocyclePair> pairs;
    while (pairs.size() < 50) pairs.push_back(test::randomHHplus(rng));
    std::atomic<long> words{0}, bad{0}, missing{0};
    parallelFor(pairs.size(), [&](std::size_t i) {
        const auto cert = coneCertificate(pairs[i]);
        if (!cert || !(cert->mu > 1.0)) {
            ++missing;
            return;
        }
        long w = 0, b = 0;
        test::forEachWord(pairs[i], 12, [&](const Matrix2& m, int len) {
            ++w;
            const bool growth = spectralRadius(m) >= cert->C * std::pow(cert->mu, len) * (1.0 - 1e-12);
            const IsometryClass k = classify(m);
            const auto* h = std::get_if<Hyperbolic>(&k);
            if (!growth || !h || !cert->contains(h->attracting)) ++b;
        });
        words += w;
        bad += b;
    });
    o.require(bad == 0 && missing == 0);
    o.detail << "50 HH+ pairs, " << words << " words of length <= 12, " << bad << " violations, " << missing
             << " missing certificates";
}

// 5
void transitions(Outcome& o) {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::size_t nMax = 10000;
    int eeBad = 0, heBad = 0, hhBad = 0;
    for (int done = 0; done < 100;) {
        const auto [A, B] = canonicalRotationPair(0.3 + 2 * u01(rng), 0.3 + 5.6 * u01(rng), 0.3 + 5.6 * u01(rng));
        if (!(traceCoords({A, B}).cDirect > 2.0 + 1e-6)) continue;
        ++done;
        const auto seq = tauPowerTypeSequence({A, B}, 1, nMax);
        const bool both = std::count(seq.begin(), seq.end(), PairType::EE) > 0 &&
                          std::count(seq.begin(), seq.end(), PairType::EH) > 0;
        const bool only = std::all_of(seq.begin(), seq.end(), [](PairType t) { return t == PairType::EE || t == PairType::EH; });
        if (!both || !only) ++eeBad;
    }
    for (int done = 0; done < 100;) {
        const auto [A, B] = canonicalMixedPair(0.3 + 3 * u01(rng), 0.1 + 2 * u01(rng), 0.3 + 5.6 * u01(rng));
        if (classifyPair({A, B}) != PairType::HE || !(traceCoords({A, B}).cDirect > 2.0 + 1e-6)) continue;
        ++done;
        const auto seq = tauPowerTypeSequence({A, B}, 1, nMax);
        const auto first = std::find(seq.begin(), seq.end(), PairType::HHplus);
        const bool ok = first != seq.end() && std::all_of(seq.begin(), first, [](PairType t) { return t == PairType::HE; }) &&
                        std::all_of(first, seq.end(), [](PairType t) { return t == PairType::HHplus; });
        if (!ok) ++heBad;
    }
    for (int done = 0; done < 100;) {
        const auto [A, B] = canonicalHHMinusPair(0.1 + 2 * u01(rng), 0.3 + 3 * u01(rng), 0.2 + 2 * u01(rng));
        if (classifyPair({A, B}) != PairType::HHminus) continue;
        ++done;
        const auto seq = tauPowerTypeSequence({A, B}, 1, nMax);
        std::size_t i = 0;
        while (i < seq.size() && seq[i] == PairType::HHminus) ++i;
        const std::size_t n1 = i;
        while (i < seq.size() && seq[i] == PairType::HE) ++i;
        const std::size_t n2 = i;
        const bool tail = std::all_of(seq.begin() + static_cast<long>(n2), seq.end(),
                                      [](PairType t) { return t == PairType::HHplus; });
        if (!(n1 <= n2 && n2 < seq.size() && tail)) ++hhBad;
    }
    // every renormalization run must stay inside the diagram
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    int runs = 0, violations = 0, degenerate = 0;
    for (int i = 0; i < 300; ++i) {
        CocyclePair p;
        switch (i % 3) {
            case 0: p = test::randomGenericEE(rng); break;
            case 1: p = {test::randomKAK(rng), test::randomKAK(rng)}; break;
            default: {
                const auto [A, B] = canonicalHHMinusPair(0.1 + 2 * u01(rng), 0.3 + 3 * u01(rng), 0.2 + 2 * u01(rng));
                p = {A, B};
            }
        }
        try {
            const RenormTrace t = renormDecision(p, ua(rng));
            ++runs;
            if (!t.auditViolations.empty()) ++violations;
        } catch (const DegeneratePairError&) {
            ++degenerate;
        }
    }
    o.require(eeBad == 0 && heBad == 0 && hhBad == 0 && violations == 0);
    o.detail << "regime failures EE " << eeBad << "/100, HE " << heBad << "/100, HH- " << hhBad << "/100; " << violations
             << " out-of-diagram runs in " << runs << " decisions (" << degenerate << " degenerate starts skipped)";
}

// 6
void dichotomy(Outcome& o) {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    struct Job {
        CocyclePair p;
        Rotation2IET t;
        CFExpansion cf;
        bool fromPath;
    };
    std::vector<Job> jobs;
    while (jobs.size() < 200) {
        const CocyclePair p{test::randomKAK(rng), test::randomKAK(rng)};
        if (!(traceCoords(p).cDirect > 2.0 + 1e-6)) continue;
        double a = ua(rng);
        while (a == 0.0) a = ua(rng);
        const Rotation2IET t = Rotation2IET::fromAlpha(a);
        jobs.push_back({p, t, continuedFraction(t, 61), false});
    }
    // bounded instances: digits chosen so the renormalized pairs stay elliptic
    for (int found = 0; found < 20;) {
        const CocyclePair p = test::randomGenericEE(rng);
        const auto digits = boundedPathDigits(p, 61);
        if (digits.empty()) continue;
        ++found;
        jobs.push_back({p, Rotation2IET::fromAlpha(static_cast<double>(valueOfDigits(digits))),
                        expansionFromDigits(digits, false), true});
    }
    std::vector<VerdictKind> kinds(jobs.size());
    std::vector<char> ok(jobs.size(), 1), degenerate(jobs.size(), 0);
    std::vector<double> ratio(jobs.size(), 0), bchi(jobs.size(), 0);
    parallelFor(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        RenormTrace tr;
        try {
            tr = renormDecision(j.p, j.cf);
        } catch (const DegeneratePairError&) {
            degenerate[i] = 1;
            kinds[i] = VerdictKind::Undecided;
            return;
        }
        kinds[i] = tr.verdict.kind;
        if (tr.verdict.kind == VerdictKind::UniformlyHyperbolic) {
            const double chi = directExponent(j.p, j.t, 100000).chi;
            ratio[i] = chi / tr.verdict.chiLowerBound;
            ok[i] = chi >= 0.9 * tr.verdict.chiLowerBound;
        } else if (tr.verdict.kind == VerdictKind::CertifiedBounded) {
            bchi[i] = directExponent(j.p, j.t, 100000).chi;
            ok[i] = bchi[i] <= 0.05;
        }
    });
    int uh = 0, cb = 0, fo = 0, und = 0, deg = 0, bad = 0, pathBounded = 0;
    double worstRatio = 1e300, worstBounded = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!jobs[i].fromPath) {
            uh += kinds[i] == VerdictKind::UniformlyHyperbolic;
            cb += kinds[i] == VerdictKind::CertifiedBounded;
            fo += kinds[i] == VerdictKind::FiniteOrder;
            und += kinds[i] == VerdictKind::Undecided;
            deg += degenerate[i];
        } else {
            pathBounded += kinds[i] == VerdictKind::CertifiedBounded;
        }
        if (kinds[i] == VerdictKind::UniformlyHyperbolic) worstRatio = std::min(worstRatio, ratio[i]);
        if (kinds[i] == VerdictKind::CertifiedBounded) worstBounded = std::max(worstBounded, bchi[i]);
        bad += !ok[i];
    }
    o.require(und <= 10 && bad == 0 && pathBounded == 20);
    o.detail << "200 random pairs: " << uh << " hyperbolic, " << cb << " bounded, " << fo << " finite, " << und
             << " undecided (" << deg << " degenerate; limit 10); bounded-path instances " << pathBounded
             << "/20 bounded; min chi/lower bound " << worstRatio << " (need >= 0.9); max bounded chi "
             << worstBounded << " (need <= 0.05); " << bad << " failing checks";
}

// 7
void knownValues(Outcome& o) {
    const auto t = Rotation2IET::fromAlpha(1.0 / std::numbers::phi);
    const double h = directExponent({Matrix2::diagonal(2.0), Matrix2::diagonal(2.0)}, t, 100000).chi;
    const double e = directExponent({Matrix2::rotation(1.0), Matrix2::rotation(std::numbers::sqrt2)}, t, 100000).chi;
    o.require(std::abs(h - std::numbers::ln2) <= 1e-6 && e <= 1e-6);
    o.detail << "commuting hyperbolic chi - ln 2 = " << h - std::numbers::ln2 << " (tol 1e-6); commuting elliptic chi = "
             << e << " (tol 1e-6)";
}

// 8
void scanner(Outcome& o) {
    const Representation rep = eeGeneric();
    const double lo = 0.0, hi = 0.25 * std::numbers::pi, width = hi - lo;
    const int depth = 14;
    ScanOptions opt;
    opt.computeChi = false;
    const ScanResult r = refineSpectrum(rep, lo, hi, depth, {}, opt);

    const auto& cand = r.candidateSpectrumPoints;
    const bool nonEmpty = !cand.empty();

    // (b) dyadic cells of width 2^-12 (relative): each meets a certified interval or a hyperbolic sample
    const int cells = 1 << 12;
    int bare = 0;
    double coveredLength = 0;
    for (const auto& iv : r.certifiedHyperbolicIntervals) coveredLength += iv.hi - iv.lo;
    for (int k = 0; k < cells; ++k) {
        const double a = lo + width * k / cells, b = lo + width * (k + 1) / cells;
        bool hit = false;
        for (const auto& iv : r.certifiedHyperbolicIntervals) {
            if (iv.lo < b && iv.hi > a) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            auto it = std::lower_bound(r.points.begin(), r.points.end(), a,
                                       [](const ScanPoint& p, double v) { return p.theta < v; });
            for (; it != r.points.end() && it->theta <= b; ++it) {
                if (it->verdict == PointVerdict::Hyperbolic) {
                    hit = true;
                    break;
                }
            }
        }
        bare += !hit;
    }
    // (c) no isolated candidates at 2^(-d+3)
    const double reach = width * std::ldexp(1.0, -depth + 3);
    int isolated = 0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const bool left = i > 0 && cand[i].theta - cand[i - 1].theta <= reach;
        const bool right = i + 1 < cand.size() && cand[i + 1].theta - cand[i].theta <= reach;
        isolated += !(left || right);
    }
    o.require(nonEmpty && bare == 0 && isolated == 0);
    o.detail << "c = " << rep.c << ", depth " << depth << ": (a) " << cand.size() << " candidates; (b) " << bare << "/"
             << cells << " cells without a certified-hyperbolic sample; (c) " << isolated
             << " isolated candidates; certified length fraction " << coveredLength / width << ", " << r.points.size()
             << " samples";
}

// 9
void mcgGrowth(Outcome& o) {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> ua(0.02, 0.98);
    int slopes = 0, growthBad = 0;
    double worstMargin = 1e300;
    for (const Representation& rep : {eeGeneric(), fuchsian()}) {
        for (int tries = 0; tries < 40; ++tries) {
            const CFExpansion cf = continuedFraction(Rotation2IET::fromAlpha(ua(rng)), 60);
            const MCGResult m = mcgTrajectory(rep, cf, 30);
            if (!m.hyperbolic) continue;
            const HyperbolicityWitness& w = *m.hyperbolic;
            const auto& tw = m.trajectory.twistWord;
            if (tw.size() < w.stepIndex + 4) continue;  // need three accelerated times past absorption
            ++slopes;
            for (std::size_t j = w.stepIndex + 1; j < tw.size(); ++j) {
                const double q = cf.q[tw[j].digitIndex].convert_to<double>();
                const double need = 0.5 * std::log(w.muOriginal) * q;
                worstMargin = std::min(worstMargin, w.growthLog[j] - need);
                if (w.growthLog[j] < need) ++growthBad;
            }
        }
    }
    // candidate slopes: bounded digit paths
    int candidates = 0, boundBad = 0;
    double worstNorm = 0, bound = 0;
    for (int found = 0; found < 10;) {
        const CocyclePair p = test::randomGenericEE(rng);
        const auto digits = boundedPathDigits(p, 25);
        if (digits.empty()) continue;
        ++found;
        const Representation rep = makeRepresentation(p.A, p.B);
        const MCGResult m = mcgTrajectory(rep, expansionFromDigits(digits, false), 20);
        ++candidates;
        if (!m.bounded || m.bounded->traceNorms.size() < 20) {
            ++boundBad;
            continue;
        }
        for (double tn : m.bounded->traceNorms) {
            worstNorm = std::max(worstNorm, tn / m.bounded->bound);
            if (tn > m.bounded->bound) ++boundBad;
        }
        bound = m.bounded->bound;
    }
    o.require(slopes >= 10 && growthBad == 0 && boundBad == 0);
    o.detail << slopes << " non-spectrum slopes, " << growthBad << " accelerated times below 0.5 ln(mu) q_n (min margin "
             << worstMargin << "); " << candidates << " candidate slopes x 20 twists, " << boundBad
             << " above B(c)+4 (max norm/bound " << worstNorm << ", last bound " << bound << ")";
}

// 10
void lemmas(Outcome& o) {
    const auto results = cli::verifyLemmas(100, 0);
    double worst = 0;
    for (const auto& r : results) {
        o.require(r.ok() && r.draws == 100);
        worst = std::max(worst, r.maxResidual);
        o.detail << r.name << " " << r.passed << "/" << r.draws << ", ";
    }
    o.require(results.size() == 3 && worst <= 1e-8);
    o.detail << "max residual " << worst << " (tol 1e-8)";
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "Fricke identity", 5, fricke},
        {2, "continued fraction and Rauzy induction agree", 30, cfDigits},
        {3, "q_n >= sqrt2^n", 30, qBound},
        {4, "cone certificate soundness", 60, coneSoundness},
        {5, "transition diagram", 120, transitions},
        {6, "dichotomy", 600, dichotomy},
        {7, "known Lyapunov exponents", 5, knownValues},
        {8, "spectrum scanner structure", 900, scanner},
        {9, "mapping class group growth", 120, mcgGrowth},
        {10, "lemma suite", 60, lemmas},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    std::printf("acceptance: %u worker thread(s)\n", threadCount());
    int failed = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool inTime = secs <= c.limitSeconds;
        const bool pass = o.pass && inTime;
        failed += !pass;
        std::printf("%s [%d] %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.str().c_str(), secs, c.limitSeconds, inTime ? "" : " TIME EXCEEDED");
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

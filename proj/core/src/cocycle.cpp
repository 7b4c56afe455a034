#include "rvs/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rvs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoincidenceTol = 1e-12;

double wrap(double phi) {
    phi = std::fmod(phi, kTwoPi);
    return phi < 0 ? phi + kTwoPi : phi;
}

enum class Kind { E, H, Bad };

Kind kindOfTrace(double t, double eps) {
    const double a = std::abs(t);
    if (a < 2.0 - eps) return Kind::E;
    if (a > 2.0 + eps) return Kind::H;
    return Kind::Bad;
}

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Disjoint-axis test for two hyperbolics after sign normalization:
// z' = x'y'/2 +- 2 sinh(a) sinh(b) cosh(d).
PairType hhFromTraces(double xp, double yp, double zp, double shA, double shB, double eps) {
    const double dev = zp - 0.5 * xp * yp;
    const double kappa = std::abs(dev) / (2.0 * shA * shB);
    if (kappa < 1.0 - eps) return PairType::HHplus;  // crossing axes
    if (!(kappa > 1.0 + eps)) return PairType::Degenerate;
    return dev > 0.0 ? PairType::HHplus : PairType::HHminus;
}

}  // namespace

const char* toString(PairType t) {
    switch (t) {
        case PairType::EE: return "EE";
        case PairType::EH: return "EH";
        case PairType::HE: return "HE";
        case PairType::HHplus: return "HH+";
        case PairType::HHminus: return "HH-";
        case PairType::Degenerate: return "DEG";
    }
    return "DEG";
}

PairType pairTypeFromString(const std::string& s) {
    for (PairType t : {PairType::EE, PairType::EH, PairType::HE, PairType::HHplus,
                       PairType::HHminus, PairType::Degenerate}) {
        if (s == toString(t)) return t;
    }
    throw std::invalid_argument("unknown pair type '" + s + "'");
}

CocyclePair tau1(const CocyclePair& p) { return {p.A, p.B * p.A}; }
CocyclePair tau2(const CocyclePair& p) { return {p.B * p.A, p.B}; }

CocyclePair tauPower(const CocyclePair& p, int which, std::uint64_t n) {
    if (which == 1) return {p.A, p.B * power(p.A, n)};
    if (which == 2) return {power(p.B, n) * p.A, p.B};
    throw std::invalid_argument("tau index must be 1 or 2");
}

CocyclePair tauInverse(const CocyclePair& p, int which) {
    if (which == 1) return {p.A, p.B * p.A.inverse()};
    if (which == 2) return {p.B.inverse() * p.A, p.B};
    throw std::invalid_argument("tau index must be 1 or 2");
}

TraceCoords traceCoords(const CocyclePair& p) {
    TraceCoords t{};
    t.x = p.A.trace();
    t.y = p.B.trace();
    t.z = (p.A * p.B).trace();
    t.c = t.x * t.x + t.y * t.y + t.z * t.z - t.x * t.y * t.z - 2.0;
    t.cDirect = (p.A * p.B * p.A.inverse() * p.B.inverse()).trace();
    t.residual = std::abs(t.c - t.cDirect);
    return t;
}

PairType pairTypeFromTraces(double x, double y, double z, double eps) {
    const Kind ka = kindOfTrace(x, eps), kb = kindOfTrace(y, eps);
    if (ka == Kind::Bad || kb == Kind::Bad) return PairType::Degenerate;
    if (ka == Kind::E && kb == Kind::E) return PairType::EE;
    if (ka == Kind::E) return PairType::EH;
    if (kb == Kind::E) return PairType::HE;
    const double xp = std::abs(x), yp = std::abs(y), zp = z * sgn(x) * sgn(y);
    return hhFromTraces(xp, yp, zp, std::sqrt(0.25 * xp * xp - 1.0), std::sqrt(0.25 * yp * yp - 1.0), eps);
}

PairType classifyPair(const CocyclePair& p, double eps) {
    const IsometryClass ka = classify(p.A, eps), kb = classify(p.B, eps);
    const bool ea = isElliptic(ka), eb = isElliptic(kb);
    const bool ha = isHyperbolic(ka), hb = isHyperbolic(kb);
    if (!(ea || ha) || !(eb || hb)) return PairType::Degenerate;
    if (ea && eb) return PairType::EE;
    if (ea) return PairType::EH;
    if (eb) return PairType::HE;
    if (std::max(spectralRadius(p.A), spectralRadius(p.B)) > kConditioningRadius) {
        return pairTypeFromTraces(p.A.trace(), p.B.trace(), (p.A * p.B).trace(), eps);
    }
    const auto& hA = std::get<Hyperbolic>(ka);
    const auto& hB = std::get<Hyperbolic>(kb);
    const BoundaryPoint pts[4] = {hA.attracting, hA.repelling, hB.attracting, hB.repelling};
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (projectiveDistance(pts[i], pts[j]) < kCoincidenceTol) return PairType::Degenerate;
        }
    }
    const bool aBside = cyclicallyOrdered(hA.attracting, hB.attracting, hA.repelling);
    const bool rBside = cyclicallyOrdered(hA.attracting, hB.repelling, hA.repelling);
    // crossing axes (only when c < 2): the fixed points alternate A, B, A, B,
    // so the attracting points are adjacent and a common cone exists
    if (aBside != rBside) return PairType::HHplus;
    const bool rAside = cyclicallyOrdered(hA.attracting, hA.repelling, hB.attracting);
    const bool rBside2 = cyclicallyOrdered(hA.attracting, hB.repelling, hB.attracting);
    return rAside == rBside2 ? PairType::HHplus : PairType::HHminus;
}

PairType classifyWithInvariant(const CocyclePair& p, double c, double eps) {
    if (!(c > 2.0 + eps)) return classifyPair(p, eps);
    const double x = p.A.trace(), y = p.B.trace();
    const Kind ka = kindOfTrace(x, eps), kb = kindOfTrace(y, eps);
    if (ka != Kind::H || kb != Kind::H) return classifyPair(p, eps);
    const double xp = std::abs(x), yp = std::abs(y), zp = (p.A * p.B).trace() * sgn(x) * sgn(y);
    return zp - 0.5 * xp * yp > 0.0 ? PairType::HHplus : PairType::HHminus;
}

KMembership kMembershipFromTraces(double x, double y, double z, double eps) {
    KMembership k;
    k.ellipticA = std::abs(x) < 2.0 - eps;
    k.ellipticB = std::abs(y) < 2.0 - eps;
    k.ellipticAB = std::abs(z) < 2.0 - eps;
    k.inK = k.witnessCount() >= 2;
    return k;
}

KMembership kMembership(const CocyclePair& p, double eps) {
    return kMembershipFromTraces(p.A.trace(), p.B.trace(), (p.A * p.B).trace(), eps);
}

double kTraceBound(double c) { return 2.0 + std::sqrt(8.0 + std::abs(c + 2.0)); }

bool ConeCertificate::contains(const BoundaryPoint& p) const {
    const double base = lo.angle();
    return wrap(p.angle() - base) <= wrap(hi.angle() - base);
}

namespace {

bool strictlyInside(const ConeCertificate& cert, const BoundaryPoint& p) {
    const double base = cert.lo.angle();
    const double d = wrap(p.angle() - base);
    const double w = wrap(cert.hi.angle() - base);
    return d > 1e-14 && d < w - 1e-14;
}

void enumerateWords(const Matrix2& prefix, int len, int maxLen, const CocyclePair& p,
                    std::vector<std::pair<double, int>>& out) {
    if (len > 0) {
        const double r = spectralRadius(prefix);
        out.emplace_back(std::log(r), len);
    }
    if (len == maxLen) return;
    enumerateWords(prefix * p.A, len + 1, maxLen, p, out);
    enumerateWords(prefix * p.B, len + 1, maxLen, p, out);
}

}  // namespace

std::optional<ConeCertificate> coneCertificate(const CocyclePair& p, int maxWordLength) {
    const IsometryClass ka = classify(p.A), kb = classify(p.B);
    if (!isHyperbolic(ka) || !isHyperbolic(kb)) return std::nullopt;
    const auto& hA = std::get<Hyperbolic>(ka);
    const auto& hB = std::get<Hyperbolic>(kb);
    for (const auto& a : {hA.attracting, hB.attracting}) {
        for (const auto& r : {hA.repelling, hB.repelling}) {
            if (projectiveDistance(a, r) < kCoincidenceTol) return std::nullopt;
        }
    }
    BoundaryPoint rl = hA.repelling, rr = hB.repelling;
    double span = kTwoPi;
    if (projectiveDistance(rl, rr) >= kCoincidenceTol) {
        const bool aIn = cyclicallyOrdered(rl, hA.attracting, rr);
        const bool bIn = cyclicallyOrdered(rl, hB.attracting, rr);
        if (aIn != bIn) return std::nullopt;
        if (!aIn) std::swap(rl, rr);
        span = wrap(rr.angle() - rl.angle());
    }
    const double base = rl.angle();
    const double da = wrap(hA.attracting.angle() - base);
    const double db = wrap(hB.attracting.angle() - base);
    const double first = std::min(da, db), second = std::max(da, db);

    ConeCertificate cert{};
    cert.lo = BoundaryPoint::fromAngle(base + 0.5 * first);
    cert.hi = BoundaryPoint::fromAngle(base + 0.5 * (second + span));
    for (const Matrix2* m : {&p.A, &p.B}) {
        if (!strictlyInside(cert, boundaryAction(*m, cert.lo)) ||
            !strictlyInside(cert, boundaryAction(*m, cert.hi))) {
            return std::nullopt;
        }
    }

    std::vector<std::pair<double, int>> words;
    words.reserve((std::size_t{2} << maxWordLength));
    enumerateWords(Matrix2::identity(), 0, maxWordLength, p, words);
    double logMu = std::numeric_limits<double>::infinity();
    for (const auto& [lr, n] : words) logMu = std::min(logMu, lr / n);
    if (!(logMu > 0.0) || !std::isfinite(logMu)) return std::nullopt;
    double logRatio = std::numeric_limits<double>::infinity();
    for (const auto& [lr, n] : words) logRatio = std::min(logRatio, lr - n * logMu);
    cert.mu = std::exp(logMu);
    cert.C = 0.5 * std::exp(logRatio);
    cert.wordLength = maxWordLength;
    return cert;
}

std::vector<PairType> tauPowerTypeSequence(const CocyclePair& p, int which, std::size_t nMax,
                                           double eps) {
    if (which != 1 && which != 2) throw std::invalid_argument("tau index must be 1 or 2");
    const double x = p.A.trace(), y = p.B.trace(), z = (p.A * p.B).trace();
    const double f = which == 1 ? x : y;
    double u0 = which == 1 ? y : x;
    double u1 = z;
    int scale = 0;  // true values are u * 2^scale
    const Kind kf = kindOfTrace(f, eps);
    const double fp = std::abs(f);

    // kappa^2 - 1 = 4 (c - 2) / ((f^2 - 4)(v^2 - 4)) for hyperbolic v, and c is
    // invariant along the sequence: axes stay disjoint exactly when c > 2
    const double c = traceCoords(p).cDirect;

    std::vector<PairType> out;
    out.reserve(nMax);
    for (std::size_t n = 1; n <= nMax; ++n) {
        const double u2 = f * u1 - u0;
        u0 = u1;
        u1 = u2;
        if (std::max(std::abs(u0), std::abs(u1)) > 0x1p600) {
            u0 = std::ldexp(u0, -600);
            u1 = std::ldexp(u1, -600);
            scale += 600;
        }
        if (kf == Kind::Bad) {
            out.push_back(PairType::Degenerate);
            continue;
        }
        const Kind kv = scale == 0 ? kindOfTrace(u0, eps) : Kind::H;
        if (kf != Kind::H || kv != Kind::H) {
            if (scale == 0) {
                out.push_back(which == 1 ? pairTypeFromTraces(f, u0, u1, eps)
                                         : pairTypeFromTraces(u0, f, u1, eps));
            } else {
                out.push_back(which == 1 ? PairType::EH : PairType::HE);
            }
            continue;
        }
        if (!(c > 2.0 + eps)) {
            out.push_back(which == 1 ? pairTypeFromTraces(f, u0, u1, eps)
                                     : pairTypeFromTraces(u0, f, u1, eps));
            if (scale != 0) out.back() = PairType::Degenerate;
            continue;
        }
        const double vp = std::abs(u0);
        const double wp = u1 * sgn(f) * sgn(u0);
        const double dev = wp - 0.5 * fp * vp;
        out.push_back(dev > 0.0 ? PairType::HHplus : PairType::HHminus);
    }
    return out;
}

}  // namespace rvs

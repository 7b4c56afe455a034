#include "rvs/hypgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rvs/errors.hpp"

namespace rvs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kBisectTol = 1e-10;
constexpr int kBisectMaxIter = 200;

double det2(const BoundaryPoint& x, const BoundaryPoint& y) { return x.u * y.v - x.v * y.u; }

// Image of q under a Mobius map sending p1 -> 0 and p2 -> inf.
double normalizedValue(const BoundaryPoint& q, const BoundaryPoint& p1, const BoundaryPoint& p2) {
    return det2(q, p1) / det2(q, p2);
}

}  // namespace

double hypDistance(HPoint p, HPoint q) {
    if (!(p.imag() > 0.0 && q.imag() > 0.0)) throw PreconditionError("points must lie in the upper half-plane");
    const double num = std::norm(p - q);
    return std::acosh(1.0 + num / (2.0 * p.imag() * q.imag()));
}

bool geodesicsCross(const BoundaryPoint& p1, const BoundaryPoint& p2, const BoundaryPoint& q1,
                    const BoundaryPoint& q2) {
    const double r = normalizedValue(q1, p1, p2);
    const double s = normalizedValue(q2, p1, p2);
    return r * s < 0.0;
}

double geodesicDistance(const BoundaryPoint& p1, const BoundaryPoint& p2, const BoundaryPoint& q1,
                        const BoundaryPoint& q2) {
    const double r = std::abs(normalizedValue(q1, p1, p2));
    const double s = std::abs(normalizedValue(q2, p1, p2));
    if (geodesicsCross(p1, p2, q1, q2)) return 0.0;
    const double k = std::max(r, s) / std::min(r, s);
    if (!std::isfinite(k)) return std::numeric_limits<double>::infinity();
    if (k <= 1.0) return 0.0;
    return std::acosh((k + 1.0) / (k - 1.0));
}

double pointGeodesicDistance(HPoint z, const BoundaryPoint& p1, const BoundaryPoint& p2) {
    const HPoint w = (z * p1.v - p1.u) / (z * p2.v - p2.u);
    return std::asinh(std::abs(w.real()) / std::abs(w.imag()));
}

Matrix2 movePointFromI(HPoint z) {
    if (!(z.imag() > 0.0)) throw PreconditionError("center must lie in the upper half-plane");
    const double s = std::sqrt(z.imag());
    return Matrix2::unchecked(s, z.real() / s, 0.0, 1.0 / s);
}

Matrix2 rotationAbout(HPoint z, double phi) {
    const Matrix2 p = movePointFromI(z);
    return p * Matrix2::rotation(0.5 * phi) * p.inverse();
}

Matrix2 translationAlong(const BoundaryPoint& rep, const BoundaryPoint& att, double t) {
    const double dq = det2(att, rep);
    if (std::abs(dq) < 1e-300) throw PreconditionError("axis endpoints must be distinct");
    const double l = std::exp(0.5 * t), il = 1.0 / l;
    // Q = [att rep], M = Q diag(l, 1/l) Q^-1
    const double a = (att.u * l * rep.v - rep.u * il * att.v) / dq;
    const double b = (-att.u * l * rep.u + rep.u * il * att.u) / dq;
    const double c = (att.v * l * rep.v - rep.v * il * att.v) / dq;
    const double d = (-att.v * l * rep.u + rep.v * il * att.u) / dq;
    return Matrix2(a, b, c, d);
}

EllipticData ellipticData(const Matrix2& m) {
    const IsometryClass k = classify(m);
    if (const auto* e = std::get_if<Elliptic>(&k)) return {e->center, e->angle};
    throw PreconditionError("matrix is not elliptic");
}

HyperbolicData hyperbolicData(const Matrix2& m) {
    const IsometryClass k = classify(m);
    if (const auto* h = std::get_if<Hyperbolic>(&k)) {
        return {h->repelling, h->attracting, h->translationLength};
    }
    throw PreconditionError("matrix is not hyperbolic");
}

Matrix2 fromEllipticData(const EllipticData& e) { return rotationAbout(e.center, 2.0 * e.angle); }

Matrix2 fromHyperbolicData(const HyperbolicData& h) {
    return translationAlong(h.repelling, h.attracting, h.translationLength);
}

PairGeometry pairGeometry(const Matrix2& A, const Matrix2& B, double eps) {
    const IsometryClass ka = classify(A, eps), kb = classify(B, eps);
    const auto* ea = std::get_if<Elliptic>(&ka);
    const auto* eb = std::get_if<Elliptic>(&kb);
    const auto* ha = std::get_if<Hyperbolic>(&ka);
    const auto* hb = std::get_if<Hyperbolic>(&kb);
    if (ea && eb) return {hypDistance(ea->center, eb->center), false};
    if (ea && hb) return {pointGeodesicDistance(ea->center, hb->repelling, hb->attracting), false};
    if (ha && eb) return {pointGeodesicDistance(eb->center, ha->repelling, ha->attracting), false};
    if (ha && hb) {
        if (geodesicsCross(ha->repelling, ha->attracting, hb->repelling, hb->attracting)) {
            return {0.0, true};
        }
        return {geodesicDistance(ha->repelling, ha->attracting, hb->repelling, hb->attracting), false};
    }
    throw DegeneratePairError("pair geometry needs elliptic or hyperbolic matrices");
}

std::pair<Matrix2, Matrix2> canonicalRotationPair(double d, double thetaA, double thetaB) {
    return {rotationAbout({0.0, 1.0}, thetaA), rotationAbout({0.0, std::exp(d)}, thetaB)};
}

std::pair<Matrix2, Matrix2> canonicalMixedPair(double t, double d, double theta) {
    return {Matrix2::diagonal(std::exp(0.5 * t)), rotationAbout({std::sinh(d), 1.0}, theta)};
}

std::pair<Matrix2, Matrix2> canonicalHHMinusPair(double tA, double tB, double d) {
    const double ch = std::cosh(d);
    const double sk = std::sqrt((ch + 1.0) / (ch - 1.0));
    return {Matrix2::diagonal(std::exp(0.5 * tA)),
            translationAlong(BoundaryPoint::fromValue(sk), BoundaryPoint::fromValue(1.0 / sk), tB)};
}

namespace {

struct Root {
    double x;
    double residual;
};

// in: a point where sgn*(|tr|-2) < 0, out: a point where it is > 0.
Root bisect(const std::function<double(double)>& trace, double in, double out, double sgn) {
    auto h = [&](double x) { return sgn * (std::abs(trace(x)) - 2.0); };
    Root best{in, std::abs(h(in))};
    for (int it = 0; it < kBisectMaxIter; ++it) {
        const double mid = 0.5 * (in + out);
        const double hm = h(mid);
        if (std::abs(hm) < best.residual) best = {mid, std::abs(hm)};
        if (std::abs(hm) <= kBisectTol) return {mid, std::abs(hm)};
        if (mid == in || mid == out) return best;
        if (hm < 0.0) in = mid;
        else out = mid;
    }
    throw BisectionFailure("bisection on |trace| = 2 did not converge");
}

}  // namespace

TypeWindow findTypeWindow(const std::function<double(double)>& trace, double lo, double hi,
                          bool elliptic, int grid) {
    if (!(hi > lo) || grid < 4) throw PreconditionError("bad window search domain");
    const double sgn = elliptic ? 1.0 : -1.0;
    auto score = [&](double x) { return sgn * std::abs(trace(x)); };
    const double h = (hi - lo) / grid;
    int best = 1;
    double bestVal = score(lo + h);
    for (int i = 2; i < grid; ++i) {
        const double v = score(lo + i * h);
        if (v < bestVal) {
            bestVal = v;
            best = i;
        }
    }
    double a = lo + (best - 1) * h, b = lo + (best + 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = score(x1), f2 = score(x2);
    for (int it = 0; it < 100 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - g * (b - a); f1 = score(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + g * (b - a); f2 = score(x2);
        }
    }
    double xm = lo + best * h;
    if (std::min(f1, f2) < bestVal) xm = f1 < f2 ? x1 : x2;
    if (!(score(xm) < sgn * 2.0)) {
        throw EmptyIntervalError(elliptic ? "no elliptic product in the searched range"
                                          : "no hyperbolic product in the searched range");
    }
    auto inside = [&](double x) { return score(x) < sgn * 2.0; };
    // walk out one grid cell at a time; the last cell before the domain edge
    // is bisected directly so narrow outside arcs near lo or hi are kept
    auto edge = [&](double step, double bound) {
        double in = xm, out = xm + step;
        while ((step < 0 ? out > bound : out < bound) && inside(out)) {
            in = out;
            out += step;
        }
        if (step < 0 ? out <= bound : out >= bound) {
            out = bound;
            if (inside(bound)) throw NoTransitionError("type window reaches the domain boundary");
        }
        return bisect(trace, in, out, sgn);
    };
    const Root rl = edge(-h, lo);
    const Root rr = edge(h, hi);
    return {rl.x, rr.x, rl.residual, rr.residual};
}

RotationWindow ellipticProductWindow(double d, double thetaA) {
    if (!(d > 0.0)) throw PreconditionError("center distance must be positive");
    auto trace = [&](double thetaB) {
        const auto [A, B] = canonicalRotationPair(d, thetaA, thetaB);
        return (A * B).trace();
    };
    auto hyp = [&](double x) { return std::abs(trace(x)) > 2.0; };
    // first crossing walking away from thetaB = 0 (where AB = A is elliptic)
    // in direction dir; the window can be far narrower than any fixed grid
    auto crossing = [&](double dir) {
        constexpr int kGrid = 2048;
        const double h = kTwoPi / kGrid;
        int j = 1;
        while (j < kGrid && !hyp(dir * j * h)) ++j;
        if (j == kGrid) throw NoTransitionError("product stays elliptic for every rotation angle");
        double in = (j - 1) * h, out = j * h;
        if (j == 1) {
            in = h;
            for (int k = 0; k < 1000 && hyp(dir * in); ++k) {
                out = in;
                in *= 0.5;
            }
            if (hyp(dir * in)) throw NoTransitionError("no elliptic neighbourhood of the identity rotation");
        }
        auto f = [&](double x) { return trace(dir * x); };
        return bisect(f, in, out, 1.0);
    };
    const Root plus = crossing(1.0), minus = crossing(-1.0);
    return {minus.x, plus.x, minus.residual, plus.residual};
}

double ellipticProductThreshold(double d, double thetaA) { return ellipticProductWindow(d, thetaA).plus; }

TypeWindow mixedProductInterval(double t, double d) {
    if (!(t > 0.0)) throw PreconditionError("translation length must be positive");
    if (!(d >= 0.0)) throw PreconditionError("distance must be nonnegative");
    auto trace = [&](double theta) {
        const auto [A, B] = canonicalMixedPair(t, d, theta);
        return (A * B).trace();
    };
    return findTypeWindow(trace, 0.0, kTwoPi, true, 2048);
}

HHThresholds hhMinusThresholds(double tB, double d) {
    if (!(tB > 0.0 && d > 0.0)) throw PreconditionError("thresholds need tB > 0 and d > 0");
    auto trace = [&](double tA) {
        const auto [A, B] = canonicalHHMinusPair(tA, tB, d);
        return (A * B).trace();
    };
    const double tMax = 4.0 * (tB + 2.0 * d + 8.0);
    const TypeWindow w = findTypeWindow(trace, 0.0, tMax, true, 8192);
    return {w.lo, w.hi, w.residualLo, w.residualHi};
}

}  // namespace rvs

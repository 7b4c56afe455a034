#include "rvs/mat2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rvs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Beyond this ratio the computed determinant is dominated by cancellation.
constexpr double kDetConditionLimit = 1e12;

double wrapAngle(double phi) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0) phi += kTwoPi;
    if (phi >= kTwoPi) phi -= kTwoPi;
    return phi;
}

}  // namespace

Matrix2::Matrix2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
    const double det = a * d - b * c;
    if (!(det > 0.0) || !std::isfinite(det)) {
        throw std::domain_error("matrix determinant must be positive, got " + std::to_string(det));
    }
    const double s = 1.0 / std::sqrt(det);
    a *= s; b *= s; c *= s; d *= s;
}

Matrix2 Matrix2::rotation(double t) {
    const double co = std::cos(t), si = std::sin(t);
    return unchecked(co, -si, si, co);
}

Matrix2 Matrix2::diagonal(double lambda) {
    if (!(lambda != 0.0)) throw std::domain_error("diagonal entry must be nonzero");
    return unchecked(lambda, 0.0, 0.0, 1.0 / lambda);
}

double Matrix2::maxAbs() const {
    return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

bool Matrix2::finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

Matrix2 renormalize(const Matrix2& m) {
    const double p = m.a * m.d, q = m.b * m.c;
    const double det = p - q;
    const double scale = std::abs(p) + std::abs(q);
    if (!(det > 0.0) || !std::isfinite(scale) || scale > kDetConditionLimit * det) return m;
    const double s = 1.0 / std::sqrt(det);
    return Matrix2::unchecked(m.a * s, m.b * s, m.c * s, m.d * s);
}

Matrix2 mul(const Matrix2& x, const Matrix2& y) {
    return renormalize(Matrix2::unchecked(x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                                          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d));
}

Matrix2 power(const Matrix2& m, std::uint64_t n) {
    Matrix2 result;
    Matrix2 base = m;
    while (n > 0) {
        if (n & 1u) result = mul(result, base);
        n >>= 1u;
        if (n > 0) base = mul(base, base);
    }
    return result;
}

double maxEntryDistance(const Matrix2& x, const Matrix2& y) {
    return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                     std::abs(x.d - y.d)});
}

double projectiveDistance(const Matrix2& x, const Matrix2& y) {
    return std::min(maxEntryDistance(x, y), maxEntryDistance(x, -y));
}

BoundaryPoint BoundaryPoint::fromVector(double u, double v) {
    const double n = std::hypot(u, v);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("degenerate boundary vector");
    u /= n;
    v /= n;
    if (v < 0.0 || (v == 0.0 && u < 0.0)) {
        u = -u;
        v = -v;
    }
    if (v == 0.0) v = 0.0;
    BoundaryPoint p;
    p.u = u;
    p.v = v;
    return p;
}

BoundaryPoint BoundaryPoint::fromValue(double x) {
    if (std::isinf(x)) return infinity();
    return fromVector(x, 1.0);
}

double BoundaryPoint::value() const {
    if (v == 0.0) return std::numeric_limits<double>::infinity();
    return u / v;
}

double BoundaryPoint::angle() const { return wrapAngle(2.0 * std::atan2(u, v)); }

BoundaryPoint BoundaryPoint::fromAngle(double phi) {
    const double h = 0.5 * phi;
    return fromVector(std::sin(h), std::cos(h));
}

double projectiveDistance(const BoundaryPoint& p, const BoundaryPoint& q) {
    return std::abs(p.u * q.v - p.v * q.u);
}

bool cyclicallyOrdered(const BoundaryPoint& p, const BoundaryPoint& q, const BoundaryPoint& r) {
    const double a0 = p.angle();
    const double dq = wrapAngle(q.angle() - a0);
    const double dr = wrapAngle(r.angle() - a0);
    return dq > 0.0 && dq < dr;
}

BoundaryPoint boundaryAction(const Matrix2& m, const BoundaryPoint& p) {
    return BoundaryPoint::fromVector(m.a * p.u + m.b * p.v, m.c * p.u + m.d * p.v);
}

std::complex<double> mobius(const Matrix2& m, std::complex<double> z) {
    return (m.a * z + m.b) / (m.c * z + m.d);
}

namespace {

BoundaryPoint eigendirection(const Matrix2& m, double lambda) {
    const double u1 = m.b, v1 = lambda - m.a;
    const double u2 = lambda - m.d, v2 = m.c;
    if (std::hypot(u1, v1) >= std::hypot(u2, v2)) return BoundaryPoint::fromVector(u1, v1);
    return BoundaryPoint::fromVector(u2, v2);
}

}  // namespace

IsometryClass classify(const Matrix2& m, double eps) {
    const double tr = m.trace();
    if (maxEntryDistance(m, Matrix2::identity()) <= eps) return Identity{1};
    if (maxEntryDistance(m, -Matrix2::identity()) <= eps) return Identity{-1};
    const double at = std::abs(tr);
    if (at < 2.0 - eps) {
        const double s = std::sqrt(std::max(0.0, 4.0 - tr * tr));
        double theta = std::acos(std::clamp(0.5 * tr, -1.0, 1.0));
        if (m.c < 0.0) theta = kTwoPi - theta;
        const std::complex<double> center((m.a - m.d) / (2.0 * m.c), s / (2.0 * std::abs(m.c)));
        return Elliptic{theta, center};
    }
    if (at > 2.0 + eps) {
        const double root = std::sqrt(tr * tr - 4.0);
        const double big = 0.5 * (tr + std::copysign(root, tr));
        const double small = 1.0 / big;
        return Hyperbolic{2.0 * std::acosh(0.5 * at), eigendirection(m, big), eigendirection(m, small)};
    }
    if (at == 2.0) {
        return Parabolic{eigendirection(m, 0.5 * tr)};
    }
    return Indeterminate{tr};
}

double spectralRadius(const Matrix2& m) {
    const double at = std::abs(m.trace());
    if (at < 2.0) return 1.0;
    return 0.5 * (at + std::sqrt(at * at - 4.0));
}

}  // namespace rvs

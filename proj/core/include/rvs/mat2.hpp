#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <variant>

namespace rvs {

inline constexpr double kTraceEps = 1e-9;

/// Real 2x2 matrix with determinant one, row-major.
struct Matrix2 {
    double a{1}, b{0}, c{0}, d{1};

    constexpr Matrix2() = default;
    /// Rescales by 1/sqrt(det); throws std::domain_error when det <= 0.
    Matrix2(double a_, double b_, double c_, double d_);

    /// No determinant check; the caller guarantees det == 1.
    static constexpr Matrix2 unchecked(double a, double b, double c, double d) {
        Matrix2 m;
        m.a = a; m.b = b; m.c = c; m.d = d;
        return m;
    }

    static constexpr Matrix2 identity() { return {}; }
    static Matrix2 rotation(double t);
    static Matrix2 diagonal(double lambda);

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }
    constexpr Matrix2 inverse() const { return unchecked(d, -b, -c, a); }
    constexpr Matrix2 operator-() const { return unchecked(-a, -b, -c, -d); }
    double maxAbs() const;
    bool finite() const;
};

/// Product with determinant renormalization.
Matrix2 mul(const Matrix2& m1, const Matrix2& m2);
inline Matrix2 operator*(const Matrix2& m1, const Matrix2& m2) { return mul(m1, m2); }
Matrix2 power(const Matrix2& m, std::uint64_t n);
/// Rescale to det 1 when the determinant is numerically meaningful.
Matrix2 renormalize(const Matrix2& m);
double maxEntryDistance(const Matrix2& m1, const Matrix2& m2);
/// Distance to the other matrix or to its negative, whichever is smaller.
double projectiveDistance(const Matrix2& m1, const Matrix2& m2);

/// Point of RP^1 stored as a unit vector (u:v); the value is u/v.
struct BoundaryPoint {
    double u{0}, v{1};

    static BoundaryPoint fromValue(double x);
    static BoundaryPoint infinity() { return fromVector(1.0, 0.0); }
    static BoundaryPoint fromVector(double u, double v);

    double value() const;
    bool isInfinite() const { return v == 0.0; }
    /// Position on the circle, 2*atan(value) mapped into [0, 2pi).
    double angle() const;
    static BoundaryPoint fromAngle(double phi);
};

/// |sin| of the angle between the representing vectors.
double projectiveDistance(const BoundaryPoint& p, const BoundaryPoint& q);
/// True when q is met strictly before r going counterclockwise from p.
bool cyclicallyOrdered(const BoundaryPoint& p, const BoundaryPoint& q, const BoundaryPoint& r);

BoundaryPoint boundaryAction(const Matrix2& m, const BoundaryPoint& p);
std::complex<double> mobius(const Matrix2& m, std::complex<double> z);

struct Elliptic {
    double angle;                 // trace = 2 cos(angle), angle in (0, 2pi)
    std::complex<double> center;  // fixed point in the upper half-plane
};
struct Parabolic {
    BoundaryPoint fixed;
};
struct Hyperbolic {
    double translationLength;
    BoundaryPoint attracting;
    BoundaryPoint repelling;
};
struct Identity {
    int sign;
};
struct Indeterminate {
    double trace;
};

using IsometryClass = std::variant<Elliptic, Parabolic, Hyperbolic, Identity, Indeterminate>;

IsometryClass classify(const Matrix2& m, double eps = kTraceEps);
double spectralRadius(const Matrix2& m);

inline bool isElliptic(const IsometryClass& k) { return std::holds_alternative<Elliptic>(k); }
inline bool isHyperbolic(const IsometryClass& k) { return std::holds_alternative<Hyperbolic>(k); }

}  // namespace rvs

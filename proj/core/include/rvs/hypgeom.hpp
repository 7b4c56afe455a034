#pragma once

#include <complex>
#include <functional>
#include <utility>

#include "rvs/mat2.hpp"

namespace rvs {

using HPoint = std::complex<double>;

struct EllipticData {
    HPoint center;
    double angle;  // matrix angle, trace = 2 cos(angle)
};

struct HyperbolicData {
    BoundaryPoint repelling;
    BoundaryPoint attracting;
    double translationLength;
};

struct PairGeometry {
    double distance{0};
    bool crossing{false};
};

double hypDistance(HPoint p, HPoint q);
/// Distance between the geodesics (p1,p2) and (q1,q2); 0 if they cross.
double geodesicDistance(const BoundaryPoint& p1, const BoundaryPoint& p2,
                        const BoundaryPoint& q1, const BoundaryPoint& q2);
double pointGeodesicDistance(HPoint z, const BoundaryPoint& p1, const BoundaryPoint& p2);
/// True when the endpoint pairs separate each other on the circle.
bool geodesicsCross(const BoundaryPoint& p1, const BoundaryPoint& p2,
                    const BoundaryPoint& q1, const BoundaryPoint& q2);

EllipticData ellipticData(const Matrix2& m);
HyperbolicData hyperbolicData(const Matrix2& m);
Matrix2 fromEllipticData(const EllipticData& e);
Matrix2 fromHyperbolicData(const HyperbolicData& h);

/// Rotation about z by the plane angle phi (matrix angle phi/2).
Matrix2 rotationAbout(HPoint z, double phi);
/// Translation by t along the geodesic from rep to att.
Matrix2 translationAlong(const BoundaryPoint& rep, const BoundaryPoint& att, double t);
/// Isometry taking i to z.
Matrix2 movePointFromI(HPoint z);

PairGeometry pairGeometry(const Matrix2& A, const Matrix2& B, double eps = kTraceEps);

/// Angles below are plane rotation angles in (0, 2pi).
std::pair<Matrix2, Matrix2> canonicalRotationPair(double d, double thetaA, double thetaB);
/// A translates by t along (0, inf); B rotates by theta about sinh(d) + i.
std::pair<Matrix2, Matrix2> canonicalMixedPair(double t, double d, double theta);
/// Alternating configuration: A along (0, inf), B repels at sqrt(k), attracts at 1/sqrt(k).
std::pair<Matrix2, Matrix2> canonicalHHMinusPair(double tA, double tB, double d);

struct TypeWindow {
    double lo, hi;
    double residualLo, residualHi;  // ||tr| - 2| at the endpoints
};

/// Locates the arc of [lo, hi] around the extremum of |trace| where the
/// product is elliptic (elliptic = true) or hyperbolic, then bisects both
/// endpoints to |trace| = 2.
TypeWindow findTypeWindow(const std::function<double(double)>& trace, double lo, double hi,
                          bool elliptic, int grid = 1024);

/// Elliptic window of theta_B for the rotation pair: AB elliptic for
/// theta_B in (-minus, plus) modulo 2pi.
struct RotationWindow {
    double minus, plus;
    double residualMinus, residualPlus;
};
RotationWindow ellipticProductWindow(double d, double thetaA);
double ellipticProductThreshold(double d, double thetaA);

TypeWindow mixedProductInterval(double t, double d);

struct HHThresholds {
    double t1, t2;
    double residual1, residual2;
};
HHThresholds hhMinusThresholds(double tB, double d);

}  // namespace rvs

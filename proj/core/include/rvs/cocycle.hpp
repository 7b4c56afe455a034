#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvs/mat2.hpp"

namespace rvs {

/// A on I_a, B on I_b.
struct CocyclePair {
    Matrix2 A, B;
};

enum class PairType { EE, EH, HE, HHplus, HHminus, Degenerate };

const char* toString(PairType t);
/// Inverse of toString; throws std::invalid_argument on an unknown label.
PairType pairTypeFromString(const std::string& s);

CocyclePair tau1(const CocyclePair& p);  // (A, B A)
CocyclePair tau2(const CocyclePair& p);  // (B A, B)
/// which = 1: (A, B A^n); which = 2: (B^n A, B).
CocyclePair tauPower(const CocyclePair& p, int which, std::uint64_t n);
CocyclePair tauInverse(const CocyclePair& p, int which);

struct TraceCoords {
    double x, y, z;  // tr A, tr B, tr AB
    double c;        // x^2 + y^2 + z^2 - xyz - 2
    double cDirect;  // tr(A B A^-1 B^-1)
    double residual;
};

TraceCoords traceCoords(const CocyclePair& p);

/// Circular-order classification; switches to traces when either spectral
/// radius exceeds kConditioningRadius.
PairType classifyPair(const CocyclePair& p, double eps = kTraceEps);
/// For a pair with known commutator trace c (invariant under tau moves).
/// When c > 2 two hyperbolics have disjoint axes, so only the orientation
/// is decided and nearly asymptotic axes are not reported degenerate.
PairType classifyWithInvariant(const CocyclePair& p, double c, double eps = kTraceEps);
/// Classification from (tr A, tr B, tr AB) alone.
PairType pairTypeFromTraces(double x, double y, double z, double eps = kTraceEps);

inline constexpr double kConditioningRadius = 1e5;

struct KMembership {
    bool inK{false};
    bool ellipticA{false}, ellipticB{false}, ellipticAB{false};
    int witnessCount() const { return int(ellipticA) + int(ellipticB) + int(ellipticAB); }
};

KMembership kMembership(const CocyclePair& p, double eps = kTraceEps);
KMembership kMembershipFromTraces(double x, double y, double z, double eps = kTraceEps);

/// Bound on |x|, |y|, |z| over K at commutator trace c.
double kTraceBound(double c);

struct ConeCertificate {
    BoundaryPoint lo, hi;  // arc from lo counterclockwise to hi
    double mu;
    double C;
    int wordLength;        // longest word used to fit mu and C

    bool contains(const BoundaryPoint& p) const;
};

std::optional<ConeCertificate> coneCertificate(const CocyclePair& p, int maxWordLength = 12);

/// Types of tauPower(p, which, n) for n = 1..nMax from the scaled trace
/// recursion, so large n does not overflow.
std::vector<PairType> tauPowerTypeSequence(const CocyclePair& p, int which, std::size_t nMax,
                                           double eps = kTraceEps);

}  // namespace rvs

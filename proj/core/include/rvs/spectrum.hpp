#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvs/cocycle.hpp"
#include "rvs/iet.hpp"
#include "rvs/lyapunov.hpp"

namespace rvs {

struct Representation {
    Matrix2 A, B;
    double c{2};
    bool degenerate{true};  // c <= 2
};

Representation makeRepresentation(const Matrix2& A, const Matrix2& B);

/// Quadrants of slope angle in (-pi/2, pi/2):
/// 1: (0, pi/4), 2: (pi/4, pi/2), 3: (-pi/2, -pi/4), 4: (-pi/4, 0).
struct ChartPoint {
    double alpha;
    CocyclePair pair;
    int quadrant;
    std::uint64_t wraps;  // floor(|tan theta|) in quadrants 2 and 3
};

/// Throws ChartBoundaryError at theta in {0, +-pi/4, +-pi/2} and at integer tangents.
ChartPoint chartFor(const Representation& rep, double theta);
/// Same dynamics read backwards: rotation by 1 - alpha with (B^-1, A^-1).
ChartPoint reversedChart(const ChartPoint& cp);
/// Digits of frac(|tan theta|) for the exact value of theta, from a
/// 100-digit evaluation of the tangent.  Stops early once the working
/// precision no longer pins the next digit.
CFExpansion slopeExpansion(double theta, std::size_t maxDigits, std::uint64_t digitCap = kDefaultDigitCap);
/// Inverse of the chart map for a given quadrant and wrap count.
double thetaFor(int quadrant, std::uint64_t wraps, long double alpha);

enum class PointVerdict { Hyperbolic, Bounded, FiniteIn, FiniteOut, Undecided, Degenerate };

const char* toString(PointVerdict v);
PointVerdict pointVerdictFromString(const std::string& s);
PointVerdict pointVerdictOf(const RenormTrace& t);

struct Rational {
    BigInt p{0}, q{1};
    bool operator==(const Rational& o) const { return p * o.q == o.p * q; }
};

/// Continued-fraction cylinder on which the absorbing renormalization prefix
/// is constant; every slope in it is uniformly hyperbolic.
struct Cylinder {
    std::vector<std::uint64_t> prefix;  // digits before the absorbing run
    std::uint64_t minDigit;             // absorbing digit is at least this
    int quadrant;
    std::uint64_t wraps;
    double thetaLo, thetaHi;            // open interval
    Rational alphaLo, alphaHi;          // alpha at thetaLo and thetaHi
    bool loIsEdge, hiIsEdge;            // endpoint alpha is 0 or 1 (chart boundary)

    std::string signature() const;
};

struct ScanPoint {
    double theta{0};
    double alpha{0};
    PointVerdict verdict{PointVerdict::Degenerate};
    double chi{0};
    std::size_t steps{0};
    double muLower{1};
    double chiLowerBound{0};
    std::size_t boundedSteps{0};
    std::optional<Cylinder> cylinder;
};

struct CertifiedInterval {
    double lo, hi;
    int samples;
    int depth;
};

struct CandidatePoint {
    double theta;
    int depth;
    std::size_t boundedSteps;
};

struct ScanResult {
    std::vector<ScanPoint> points;  // sorted by theta
    std::vector<CertifiedInterval> certifiedHyperbolicIntervals;
    std::vector<CandidatePoint> candidateSpectrumPoints;
    double thetaLo{0}, thetaHi{0};
    int depth{0};
};

struct ScanOptions {
    bool computeChi{true};
    std::uint64_t chiIters{10000};
    int chiSamples{4};
    std::uint64_t seed{0};
};

ScanPoint evaluateSlope(const Representation& rep, double theta, const DecisionBudget& budget,
                        const ScanOptions& opt = {});

ScanResult scanGrid(const Representation& rep, double thetaLo, double thetaHi, std::size_t n,
                    const DecisionBudget& budget = {}, const ScanOptions& opt = {});

/// Adaptive bisection; the root interval is depth 1.  An interval is certified
/// when the cylinders of its sampled hyperbolic slopes cover it, glued at
/// rational endpoints whose finite-order monodromy is hyperbolic.
ScanResult refineSpectrum(const Representation& rep, double thetaLo, double thetaHi, int depth,
                          const DecisionBudget& budget = {}, const ScanOptions& opt = {});

/// Greedy digits keeping every renormalized pair elliptic-elliptic.
/// Returns the digits [a_1, a_2, ...] of a slope parameter alpha; empty when
/// no admissible digit below maxDigit exists at some step.
std::vector<std::uint64_t> boundedPathDigits(const CocyclePair& p, std::size_t nRuns,
                                             std::uint64_t maxDigit = 10000);

struct IntMatrix {
    BigInt a{1}, b{0}, c{0}, d{1};
    BigInt det() const { return a * d - b * c; }
    BigInt normL1() const;
};

struct Twist {
    char generator;  // 'a' for runs applying tau1, 'b' for tau2
    std::uint64_t power;
    std::size_t digitIndex;
};

struct MCGTrajectory {
    std::vector<Twist> twistWord;
    std::vector<IntMatrix> matrices;  // phi_0 = I, phi_{n+1} = T_n phi_n
    std::vector<BigInt> normsL1;
};

struct HyperbolicityWitness {
    std::size_t stepIndex;        // twist index where HH+ was reached
    double mu;                    // cone rate of the absorbed pair
    double muOriginal;            // per-letter rate mu^(1/max return time)
    std::vector<double> growthLog;  // log(|x|+|y|+|z|) after each twist
};

struct BoundedWitness {
    double maxTraceNorm;
    double bound;
    std::vector<double> traceNorms;  // max(|x|,|y|,|z|) after each twist
};

struct MCGResult {
    MCGTrajectory trajectory;
    std::optional<HyperbolicityWitness> hyperbolic;
    std::optional<BoundedWitness> bounded;
    std::vector<double> logL1Traces;  // log(|x|+|y|+|z|) after each twist
};

MCGResult mcgTrajectory(const Representation& rep, double alpha, std::size_t nSteps);
MCGResult mcgTrajectory(const Representation& rep, const CFExpansion& cf, std::size_t nSteps);

}  // namespace rvs

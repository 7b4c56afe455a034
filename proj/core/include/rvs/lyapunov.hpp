#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvs/cocycle.hpp"
#include "rvs/iet.hpp"

namespace rvs {

struct LyapunovEstimate {
    double chi{0};
    std::uint64_t nIters{0};
    int samplePoints{0};
    double stdError{0};
    std::vector<double> perSample;
};

/// Mean of log||rho_n(x)||_2 / n over stratified start points.
LyapunovEstimate directExponent(const CocyclePair& p, const Rotation2IET& t, std::uint64_t nIters,
                                int nSamples = 8, std::uint64_t seed = 0);

struct DecisionBudget {
    std::size_t maxAccelSteps{60};
    std::uint64_t maxDigit{kDefaultDigitCap};
    double traceBound{0};  // 0 selects kTraceBound(c) + 4
};

struct RenormStep {
    std::size_t n{0};
    std::uint64_t digit{0};
    std::optional<Winner> winner;  // empty for the initial pair
    PairType type{PairType::Degenerate};
    TraceCoords coords{};
    bool inK{false};
    bool escorted{false};  // pair or its one-step tau preimage lies in K
    CocyclePair pair;
    long double returnA{1}, returnB{1};
    long double lengthA{0}, lengthB{0};
    std::size_t runIndex{0};  // 1-based continued-fraction run, 0 for the start
};

enum class VerdictKind { UniformlyHyperbolic, CertifiedBounded, FiniteOrder, Undecided };

const char* toString(VerdictKind k);

struct Verdict {
    VerdictKind kind{VerdictKind::Undecided};
    std::size_t atStep{0};
    std::optional<ConeCertificate> cone;
    double chiLowerBound{0};  // |I_n| ln(mu) for hyperbolic runs
    double maxTraceNorm{0};
    bool spectrumMember{false};
    CocyclePair lastPair;
    std::string reason;
};

struct RenormTrace {
    std::vector<RenormStep> steps;
    Verdict verdict;
    double c{0};
    double traceBound{0};
    CFExpansion expansion;
    std::vector<std::string> auditViolations;
};

/// Whether a move by tau_which from type `before` may land on `after`.
bool transitionAllowed(PairType before, int which, PairType after);

/// Conjugates the pair so that an elliptic center sits at i; no-op otherwise.
CocyclePair normalizePair(const CocyclePair& p);

/// Throws DegeneratePairError when a renormalized pair is non-generic.
RenormTrace renormDecision(const CocyclePair& p, double alpha, const DecisionBudget& budget = {});
RenormTrace renormDecision(const CocyclePair& p, const Rotation2IET& t, const DecisionBudget& budget = {});
RenormTrace renormDecision(const CocyclePair& p, const CFExpansion& cf, const DecisionBudget& budget = {});
/// c = tr[A,B] supplied by the caller, e.g. from a better-conditioned pair in the same orbit.
RenormTrace renormDecision(const CocyclePair& p, const CFExpansion& cf, const DecisionBudget& budget, double c);

/// Max over checkpoints nCheck / 2^k (k = 0..3) of the sampled log-norm rate.
/// Throws PreconditionError unless the verdict is CertifiedBounded.
double boundednessImpliesZero(const CocyclePair& p, const Rotation2IET& t, const RenormTrace& trace,
                              std::uint64_t nCheck, int nSamples = 4, std::uint64_t seed = 0);

}  // namespace rvs

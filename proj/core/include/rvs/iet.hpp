#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rvs {

__extension__ using u128 = unsigned __int128;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr double kRationalTol = 1e-13;
inline constexpr std::uint64_t kDefaultDigitCap = 1000000;

enum class Winner { Top, Bottom };

inline Winner opposite(Winner w) { return w == Winner::Top ? Winner::Bottom : Winner::Top; }
const char* toString(Winner w);

/// Rotation x -> x + alpha on [0,1] with I_a = [0, 1-alpha], I_b = (1-alpha, 1].
///
/// The state is kept as an exact ratio rem = num/den.  When expect is Bottom
/// alpha = rem, otherwise alpha = 1 - rem, so rem is always the Gauss-map
/// remainder and small remainders keep full relative precision.  A double
/// input is converted to its exact dyadic value; exact = true (p/q input)
/// switches the tie test to exact equality.
struct Rotation2IET {
    u128 num{1}, den{2};
    Winner expect{Winner::Bottom};
    bool exact{false};

    static Rotation2IET fromAlpha(double alpha);
    static Rotation2IET fromRational(std::uint64_t p, std::uint64_t q);

    long double alpha() const;
    long double rem() const;
    long double lengthA() const { return 1.0L - alpha(); }
    long double lengthB() const { return alpha(); }
    /// Winner of the next elementary step; throws FiniteOrderError on a tie.
    Winner nextWinner() const;
};

double apply(const Rotation2IET& t, double x);

struct RauzyResult {
    Winner winner;
    Rotation2IET next;
};

/// One elementary step: first return on the winner-length left interval,
/// rescaled.  Keeps the expect flag.
RauzyResult rauzyStep(const Rotation2IET& t);

struct AccelResult {
    std::uint64_t digit;
    Winner winner;   // the repeated winner, digit-1 times
    Winner closing;  // the final step, always opposite(winner)
    Rotation2IET next;

    std::vector<Winner> elementaryWinners() const;
};

/// digit-1 steps won by t.expect followed by one opposite step.
AccelResult acceleratedStep(const Rotation2IET& t, std::uint64_t digitCap = kDefaultDigitCap);

struct CFExpansion {
    std::vector<std::uint64_t> digits;
    std::vector<BigInt> q;                  // q_0 = 1, q_1 = a_1, ...
    std::vector<long double> remainders;    // x_n after digit n, x_0 = alpha
    bool terminated{false};
    bool capped{false};                     // next digit exceeded the cap

    std::size_t size() const { return digits.size(); }
};

CFExpansion continuedFraction(double alpha, std::size_t maxDigits,
                              std::uint64_t digitCap = kDefaultDigitCap);
CFExpansion continuedFraction(const Rotation2IET& t, std::size_t maxDigits,
                              std::uint64_t digitCap = kDefaultDigitCap);
/// Denominators and remainders for a given digit list (alpha = [0; a_1, a_2, ...]).
CFExpansion expansionFromDigits(const std::vector<std::uint64_t>& digits, bool terminated);
/// Value of [0; a_1, ..., a_n] in long double.
long double valueOfDigits(const std::vector<std::uint64_t>& digits);

struct FirstReturnRecord {
    long double subintervalRight{1};
    long double lengthA{0}, lengthB{0};
    std::pair<std::uint64_t, std::uint64_t> returnTimes{1, 1};    // simulated
    std::pair<std::uint64_t, std::uint64_t> predictedTimes{1, 1}; // combinatorial
};

/// After nAccel accelerated steps, simulates the orbit of one point in each
/// continuity piece of the induced map until it re-enters [0, x_n).
FirstReturnRecord firstReturnOracle(const Rotation2IET& t, std::size_t nAccel,
                                    std::uint64_t maxIterations = 10000000);

}  // namespace rvs

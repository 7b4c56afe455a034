#include "rvs/iet.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "rvs/errors.hpp"

namespace rvs {

namespace {

long double ratio(u128 n, u128 d) {
    return static_cast<long double>(n) / static_cast<long double>(d);
}

bool nearHalf(const Rotation2IET& t) {
    const u128 twice = 2 * t.num;
    const u128 diff = twice > t.den ? twice - t.den : t.den - twice;
    if (t.exact) return diff == 0;
    return static_cast<long double>(diff) <= kRationalTol * static_cast<long double>(t.den);
}

// Gauss step on rem = num/den: quotient, new remainder and a flag for a
// remainder within tolerance of 0 (+1) or of 1 (-1).
struct GaussStep {
    u128 quotient;
    u128 remainder;
    int nearInteger;
};

GaussStep gauss(const Rotation2IET& t) {
    GaussStep g{t.den / t.num, t.den % t.num, 0};
    if (t.exact) {
        if (g.remainder == 0) g.nearInteger = 1;
        return g;
    }
    const long double n = static_cast<long double>(t.num);
    if (static_cast<long double>(g.remainder) <= kRationalTol * n) g.nearInteger = 1;
    else if (static_cast<long double>(t.num - g.remainder) <= kRationalTol * n) g.nearInteger = -1;
    return g;
}

}  // namespace

const char* toString(Winner w) { return w == Winner::Top ? "top" : "bottom"; }

Rotation2IET Rotation2IET::fromAlpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("rotation amount must lie in (0,1), got " + std::to_string(alpha));
    }
    int e = 0;
    const double m = std::frexp(alpha, &e);
    auto mant = static_cast<std::uint64_t>(std::ldexp(m, 53));
    int shift = 53 - e;
    if (shift > 126) {
        mant >>= (shift - 126);
        shift = 126;
        if (mant == 0) mant = 1;
    }
    Rotation2IET t;
    t.num = mant;
    t.den = static_cast<u128>(1) << shift;
    while ((t.num & 1) == 0 && (t.den & 1) == 0) {
        t.num >>= 1;
        t.den >>= 1;
    }
    t.expect = Winner::Bottom;
    t.exact = false;
    return t;
}

Rotation2IET Rotation2IET::fromRational(std::uint64_t p, std::uint64_t q) {
    if (p == 0 || p >= q) throw PreconditionError("rational rotation needs 0 < p < q");
    const std::uint64_t g = std::gcd(p, q);
    Rotation2IET t;
    t.num = p / g;
    t.den = q / g;
    t.expect = Winner::Bottom;
    t.exact = true;
    return t;
}

long double Rotation2IET::rem() const { return ratio(num, den); }

long double Rotation2IET::alpha() const {
    return expect == Winner::Bottom ? ratio(num, den) : ratio(den - num, den);
}

Winner Rotation2IET::nextWinner() const {
    if (nearHalf(*this)) throw FiniteOrderError("tie: both continuity intervals have equal length");
    return 2 * num < den ? expect : opposite(expect);
}

double apply(const Rotation2IET& t, double x) {
    const double a = static_cast<double>(t.alpha());
    return x <= 1.0 - a ? x + a : x + a - 1.0;
}

RauzyResult rauzyStep(const Rotation2IET& t) {
    const Winner w = t.nextWinner();
    Rotation2IET n = t;
    if (w == t.expect) {
        n.den = t.den - t.num;
    } else {
        n.num = 2 * t.num - t.den;
        n.den = t.num;
    }
    return {w, n};
}

std::vector<Winner> AccelResult::elementaryWinners() const {
    std::vector<Winner> out(digit - 1, winner);
    out.push_back(closing);
    return out;
}

AccelResult acceleratedStep(const Rotation2IET& t, std::uint64_t digitCap) {
    const GaussStep g = gauss(t);
    if (g.quotient > digitCap) {
        throw BudgetExceeded("accelerated digit exceeds cap " + std::to_string(digitCap));
    }
    if (g.nearInteger != 0) {
        throw FiniteOrderError("rational termination inside an accelerated step");
    }
    Rotation2IET n = t;
    n.num = g.remainder;
    n.den = t.num;
    n.expect = opposite(t.expect);
    return {static_cast<std::uint64_t>(g.quotient), t.expect, opposite(t.expect), n};
}

namespace {

void appendDenominator(CFExpansion& cf) {
    const std::size_t n = cf.digits.size();
    const BigInt prev2 = n >= 2 ? cf.q[n - 2] : BigInt(0);
    cf.q.push_back(BigInt(cf.digits.back()) * cf.q[n - 1] + prev2);
}

}  // namespace

CFExpansion continuedFraction(const Rotation2IET& start, std::size_t maxDigits,
                              std::uint64_t digitCap) {
    CFExpansion cf;
    cf.q.push_back(1);
    cf.remainders.push_back(start.rem());
    Rotation2IET t = start;
    while (cf.digits.size() < maxDigits) {
        const GaussStep g = gauss(t);
        u128 digit = g.quotient + (g.nearInteger < 0 ? 1 : 0);
        if (digit > digitCap) {
            cf.capped = true;
            break;
        }
        cf.digits.push_back(static_cast<std::uint64_t>(digit));
        appendDenominator(cf);
        if (g.nearInteger != 0) {
            cf.remainders.push_back(0.0L);
            cf.terminated = true;
            break;
        }
        cf.remainders.push_back(ratio(g.remainder, t.num));
        t.den = t.num;
        t.num = g.remainder;
    }
    return cf;
}

CFExpansion continuedFraction(double alpha, std::size_t maxDigits, std::uint64_t digitCap) {
    return continuedFraction(Rotation2IET::fromAlpha(alpha), maxDigits, digitCap);
}

long double valueOfDigits(const std::vector<std::uint64_t>& digits) {
    long double x = 0.0L;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        x = 1.0L / (static_cast<long double>(*it) + x);
    }
    return x;
}

CFExpansion expansionFromDigits(const std::vector<std::uint64_t>& digits, bool terminated) {
    CFExpansion cf;
    cf.q.push_back(1);
    for (auto a : digits) {
        if (a == 0) throw PreconditionError("continued fraction digits must be positive");
        cf.digits.push_back(a);
        appendDenominator(cf);
    }
    cf.terminated = terminated;
    cf.remainders.assign(digits.size() + 1, 0.0L);
    long double x = 0.0L;
    for (std::size_t k = digits.size(); k-- > 0;) {
        x = 1.0L / (static_cast<long double>(digits[k]) + x);
        cf.remainders[k] = x;
    }
    return cf;
}

FirstReturnRecord firstReturnOracle(const Rotation2IET& start, std::size_t nAccel,
                                    std::uint64_t maxIterations) {
    FirstReturnRecord rec;
    long double la = start.lengthA(), lb = start.lengthB();
    std::uint64_t ra = 1, rb = 1;
    Rotation2IET t = start;
    for (std::size_t k = 0; k < nAccel; ++k) {
        const AccelResult acc = acceleratedStep(t);
        Rotation2IET e = t;
        for (Winner w : acc.elementaryWinners()) {
            const RauzyResult r = rauzyStep(e);
            if (r.winner != w) throw FiniteOrderError("winner sequence broke inside a step");
            if (w == Winner::Top) {
                lb -= la;
                ra += rb;
            } else {
                la -= lb;
                rb += ra;
            }
            e = r.next;
        }
        t = acc.next;
        if (ra > maxIterations || rb > maxIterations) {
            throw BudgetExceeded("return times exceed the simulation budget");
        }
    }
    rec.lengthA = la;
    rec.lengthB = lb;
    rec.subintervalRight = la + lb;
    rec.predictedTimes = {ra, rb};

    const long double alpha = start.alpha();
    const long double right = rec.subintervalRight;
    auto simulate = [&](long double x) {
        std::uint64_t n = 0;
        do {
            x = x <= 1.0L - alpha ? x + alpha : x + alpha - 1.0L;
            if (++n > maxIterations) throw BudgetExceeded("orbit did not return within budget");
        } while (!(x < right));
        return n;
    };
    rec.returnTimes = {simulate(0.5L * la), simulate(la + 0.5L * lb)};
    return rec;
}

}  // namespace rvs

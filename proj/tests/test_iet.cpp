#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "testing.hpp"
#include "rvs/errors.hpp"
#include "rvs/iet.hpp"
#include "support.hpp"

using namespace rvs;

namespace {

const double kInvPhi = 0.6180339887498949;

// Euclid on the exact binary value of alpha
std::vector<std::uint64_t> euclidDigits(double alpha, std::size_t n) {
    int e = 0;
    const double m = std::frexp(alpha, &e);
    BigInt p = static_cast<std::int64_t>(std::ldexp(m, 53));
    BigInt q = BigInt(1) << (53 - e);
    std::vector<std::uint64_t> out;
    while (p != 0 && out.size() < n) {
        const BigInt a = q / p;
        out.push_back(static_cast<std::uint64_t>(a));
        const BigInt r = q - a * p;
        q = p;
        p = r;
    }
    return out;
}

}  // namespace

TEST_CASE("apply examples") {
    const Rotation2IET t = Rotation2IET::fromRational(3, 10);
    CHECK(apply(t, 0.5) == doctest::Approx(0.8));
    CHECK(apply(t, 0.9) == doctest::Approx(0.2));
    CHECK(apply(t, 0.7) == doctest::Approx(1.0));
}

TEST_CASE("rotation state keeps alpha and lengths") {
    const Rotation2IET t = Rotation2IET::fromAlpha(0.3);
    CHECK(static_cast<double>(t.alpha()) == 0.3);
    CHECK(t.lengthA() + t.lengthB() == doctest::Approx(1.0));
    CHECK_THROWS(Rotation2IET::fromAlpha(0.0));
    CHECK_THROWS(Rotation2IET::fromAlpha(1.0));
    CHECK_THROWS(Rotation2IET::fromRational(5, 5));
}

TEST_CASE("rauzyStep winners") {
    CHECK(rauzyStep(Rotation2IET::fromAlpha(0.7)).winner == Winner::Top);
    CHECK(rauzyStep(Rotation2IET::fromAlpha(0.3)).winner == Winner::Bottom);
    CHECK_THROWS_AS(rauzyStep(Rotation2IET::fromRational(1, 2)), FiniteOrderError);
}

TEST_CASE("golden rotation is a fixed point of the accelerated map") {
    const Rotation2IET t = Rotation2IET::fromAlpha(kInvPhi);
    const AccelResult a = acceleratedStep(t);
    CHECK(a.digit == 1);
    // the Gauss remainder is fixed; the rotation amount alternates phi^-1, phi^-2
    CHECK(static_cast<double>(a.next.rem()) == doctest::Approx(kInvPhi).epsilon(1e-12));
    CHECK(static_cast<double>(a.next.alpha()) == doctest::Approx(1 - kInvPhi).epsilon(1e-12));
    Rotation2IET s = t;
    for (int i = 0; i < 2; ++i) s = rauzyStep(s).next;
    CHECK(static_cast<double>(s.alpha()) == doctest::Approx(kInvPhi).epsilon(1e-12));
    CHECK(static_cast<double>(s.rem()) == doctest::Approx(kInvPhi).epsilon(1e-12));
}

TEST_CASE("continuedFraction examples") {
    const CFExpansion g = continuedFraction(kInvPhi, 20);
    REQUIRE(g.size() == 20);
    std::uint64_t f0 = 1, f1 = 1;
    for (std::size_t n = 0; n < 20; ++n) {
        CHECK(g.digits[n] == 1);
        CHECK(g.q[n] == f0);
        const std::uint64_t f2 = f0 + f1;
        f0 = f1;
        f1 = f2;
    }
    const CFExpansion s = continuedFraction(0.7, 20);
    CHECK(s.digits == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(s.terminated);
    const CFExpansion r = continuedFraction(Rotation2IET::fromRational(2, 5), 20);
    CHECK(r.digits == std::vector<std::uint64_t>{2, 2});
    CHECK(r.terminated);
    CHECK_THROWS_AS(acceleratedStep(acceleratedStep(acceleratedStep(Rotation2IET::fromRational(2, 5)).next).next),
                    FiniteOrderError);
}

TEST_CASE("accelerated digit of 0.7") {
    CHECK(acceleratedStep(Rotation2IET::fromAlpha(0.7)).digit == 1);
    CHECK(acceleratedStep(Rotation2IET::fromAlpha(0.3)).digit == 3);
}

TEST_CASE("expansionFromDigits and valueOfDigits") {
    const CFExpansion e = expansionFromDigits({1, 2, 3}, true);
    CHECK(e.q == std::vector<BigInt>{1, 1, 3, 10});
    CHECK(static_cast<double>(valueOfDigits({1, 2, 3})) == doctest::Approx(0.7));
    CHECK(e.terminated);
}

TEST_CASE("property: accelerated step equals its elementary steps") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(1e-3, 1 - 1e-3);
    for (int i = 0; i < 1000; ++i) {
        Rotation2IET t = Rotation2IET::fromAlpha(u(rng));
        for (int k = 0; k < 3; ++k) {
            const AccelResult a = acceleratedStep(t);
            Rotation2IET s = t;
            std::vector<Winner> ws;
            for (std::uint64_t j = 0; j < a.digit; ++j) {
                const RauzyResult r = rauzyStep(s);
                ws.push_back(r.winner);
                s = r.next;
            }
            CHECK(ws == a.elementaryWinners());
            CHECK(std::abs(static_cast<double>(s.alpha() - a.next.alpha())) <= 1e-12);
            t = a.next;
        }
    }
}

TEST_CASE("property: digits agree with exact Euclid and q_n >= sqrt2^n") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double alpha = u(rng);
        const CFExpansion cf = continuedFraction(Rotation2IET::fromAlpha(alpha), 15);
        const auto oracle = euclidDigits(alpha, 15);
        REQUIRE(cf.size() == 15);
        CHECK(cf.digits == oracle);
        // the bound is stated for bottom-wins starts (a_1 >= 2); a top-wins
        // start is the reflection 1 - alpha with the intervals relabelled
        const CFExpansion norm = alpha < 0.5 ? cf : continuedFraction(Rotation2IET::fromAlpha(1 - alpha), 15);
        for (std::size_t n = 0; n < norm.q.size(); ++n) {
            CHECK(static_cast<double>(norm.q[n]) >= std::pow(std::sqrt(2.0), static_cast<double>(n)) - 1e-9);
        }
        // unnormalized, only q_1 = a_1 = 1 can fall below
        for (std::size_t n = 0; n < cf.q.size(); ++n) {
            if (n != 1) CHECK(static_cast<double>(cf.q[n]) >= std::pow(std::sqrt(2.0), static_cast<double>(n)) - 1e-9);
        }
        CHECK(cf.q[5] >= 6);
    }
}

TEST_CASE("firstReturnOracle examples") {
    const FirstReturnRecord g = firstReturnOracle(Rotation2IET::fromAlpha(kInvPhi), 3);
    CHECK(std::set<std::uint64_t>{g.returnTimes.first, g.returnTimes.second} == std::set<std::uint64_t>{3, 5});
    const FirstReturnRecord s = firstReturnOracle(Rotation2IET::fromAlpha(0.7), 1);
    CHECK(std::set<std::uint64_t>{s.returnTimes.first, s.returnTimes.second} == std::set<std::uint64_t>{1, 2});
    const FirstReturnRecord z = firstReturnOracle(Rotation2IET::fromAlpha(0.3), 0);
    CHECK(z.returnTimes == std::pair<std::uint64_t, std::uint64_t>{1, 1});
}

TEST_CASE("property: return times are q_n and q_n + q_{n-1}") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        const double alpha = u(rng);
        const Rotation2IET t = Rotation2IET::fromAlpha(alpha);
        const CFExpansion cf = continuedFraction(t, 9);
        for (std::size_t n = 1; n <= 8; ++n) {
            if (cf.q[n] > 1000000) break;
            const FirstReturnRecord r = firstReturnOracle(t, n);
            const std::uint64_t qn = static_cast<std::uint64_t>(cf.q[n]), qm = static_cast<std::uint64_t>(cf.q[n - 1]);
            CHECK(std::set<std::uint64_t>{r.returnTimes.first, r.returnTimes.second} ==
                  std::set<std::uint64_t>{qn, qn + qm});
            CHECK(r.returnTimes == r.predictedTimes);
        }
    }
}

TEST_CASE("digit cap flags near-rational input") {
    const CFExpansion c = continuedFraction(Rotation2IET::fromAlpha(1e-9), 5, 1000);
    CHECK(c.capped);
}

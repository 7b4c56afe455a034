#include <cmath>
#include <numbers>

#include "testing.hpp"
#include "rvs/cocycle.hpp"
#include "rvs/errors.hpp"
#include "rvs/hypgeom.hpp"
#include "support.hpp"

using namespace rvs;
using std::numbers::pi;

namespace {
const double kArccosh32 = std::acosh(1.5);

bool ellipticM(const Matrix2& m) { return std::abs(m.trace()) < 2.0; }

Matrix2 conj(const Matrix2& g, const Matrix2& m) { return g * m * g.inverse(); }
}  // namespace

TEST_CASE("hypDistance examples") {
    CHECK(hypDistance({0, 1}, {0, 1}) == 0.0);
    CHECK(hypDistance({0, 1}, {0, 2}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(hypDistance({0, 1}, {1, 1}) == doctest::Approx(0.9624236501).epsilon(1e-10));
}

TEST_CASE("hypDistance is invariant under isometries") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-2, 2), v(0.2, 3);
    for (int i = 0; i < 500; ++i) {
        const HPoint p{u(rng), v(rng)}, q{u(rng), v(rng)};
        const Matrix2 g = test::randomSL2(rng, 1.5);
        CHECK(std::abs(hypDistance(mobius(g, p), mobius(g, q)) - hypDistance(p, q)) < 1e-8);
    }
}

TEST_CASE("pairGeometry: rotations about i and 2i") {
    const PairGeometry g = pairGeometry(rotationAbout({0, 1}, 1.0), rotationAbout({0, 2}, 2.0));
    CHECK_FALSE(g.crossing);
    CHECK(g.distance == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("pairGeometry: disjoint axes 0-inf and 1-3") {
    const Matrix2 B = translationAlong(BoundaryPoint::fromValue(1), BoundaryPoint::fromValue(3), 1.0);
    const PairGeometry g = pairGeometry(Matrix2::diagonal(2.0), B);
    CHECK_FALSE(g.crossing);
    // half-circle of center 2 and radius 1 against the vertical axis: cosh d = 2
    CHECK(g.distance == doctest::Approx(std::log(2.0 + std::sqrt(3.0))).epsilon(1e-10));
}

TEST_CASE("pairGeometry: axes 0-inf and -1..1 cross at i") {
    const Matrix2 B = translationAlong(BoundaryPoint::fromValue(-1), BoundaryPoint::fromValue(1), 1.0);
    const PairGeometry g = pairGeometry(Matrix2::diagonal(2.0), B);
    CHECK(g.crossing);
    CHECK(g.distance == 0.0);
}

TEST_CASE("geometric constructors") {
    const Matrix2 r = rotationAbout({0.5, 2.0}, 1.2);
    CHECK(std::abs(mobius(r, {0.5, 2.0}) - HPoint(0.5, 2.0)) < 1e-12);
    CHECK(std::abs(r.trace()) == doctest::Approx(2 * std::cos(0.6)));
    const Matrix2 t = translationAlong(BoundaryPoint::fromValue(-2), BoundaryPoint::fromValue(5), 0.7);
    const auto h = std::get<Hyperbolic>(classify(t));
    CHECK(h.translationLength == doctest::Approx(0.7));
    CHECK(h.attracting.value() == doctest::Approx(5.0));
    CHECK(h.repelling.value() == doctest::Approx(-2.0));
    CHECK(std::abs(mobius(movePointFromI({3, 0.25}), {0, 1}) - HPoint(3, 0.25)) < 1e-12);
}

TEST_CASE("geodesic distances") {
    CHECK(geodesicsCross(BoundaryPoint::fromValue(0), BoundaryPoint::infinity(), BoundaryPoint::fromValue(-1),
                         BoundaryPoint::fromValue(1)));
    CHECK_FALSE(geodesicsCross(BoundaryPoint::fromValue(0), BoundaryPoint::infinity(), BoundaryPoint::fromValue(1),
                               BoundaryPoint::fromValue(3)));
    CHECK(pointGeodesicDistance({0, 1}, BoundaryPoint::fromValue(0), BoundaryPoint::infinity()) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // i against the unit-radius half-circle over [2, 4]:  cosh d = ...
    const double d = pointGeodesicDistance({0, 1}, BoundaryPoint::fromValue(2), BoundaryPoint::fromValue(4));
    // closed form: sinh d = |(|z-c|^2 - r^2)| / (2 r Im z) for a half-circle of center c, radius r
    CHECK(d == doctest::Approx(std::asinh((10.0 - 1.0) / 2.0)).epsilon(1e-10));
}

TEST_CASE("property: data round trip up to sign") {
    std::mt19937_64 rng(22);
    int ell = 0, hyp = 0;
    for (int i = 0; i < 2000; ++i) {
        const Matrix2 m = test::randomSL2(rng);
        const auto k = classify(m);
        if (isElliptic(k)) {
            ++ell;
            CHECK(projectiveDistance(fromEllipticData(ellipticData(m)), m) <= 1e-8);
        } else if (isHyperbolic(k)) {
            ++hyp;
            CHECK(projectiveDistance(fromHyperbolicData(hyperbolicData(m)), m) <= 1e-8 * std::max(1.0, m.maxAbs()));
        }
    }
    CHECK(ell > 100);
    CHECK(hyp > 100);
}

TEST_CASE("ellipticProductThreshold marks the elliptic window") {
    for (double thetaA : {0.7, pi / 2, 2.5, 4.0}) {
        const double alpha = ellipticProductThreshold(3.0, thetaA);
        auto tr = [&](double thetaB) {
            const auto [A, B] = canonicalRotationPair(3.0, thetaA, thetaB);
            return std::abs((A * B).trace());
        };
        CHECK(tr(alpha / 2) < 2.0);
        CHECK(std::abs(tr(alpha) - 2.0) <= 1e-8);
        CHECK(tr(pi) > 2.0);
    }
}

TEST_CASE("ellipticProductThreshold decays with distance") {
    CHECK(ellipticProductThreshold(2, pi / 2) > ellipticProductThreshold(4, pi / 2));
    CHECK(ellipticProductThreshold(20, pi / 2) < 0.1);
    for (double thetaA : {0.5, 1.5, 3.0, 5.0}) {
        double prev = 2 * pi;
        for (double d : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            const double a = ellipticProductThreshold(d, thetaA);
            CHECK(a < prev);
            prev = a;
        }
    }
    CHECK_THROWS_AS(ellipticProductThreshold(0.0, 1.0), PreconditionError);
}

TEST_CASE("mixedProductInterval regimes") {
    const double t = 2 * kArccosh32, d = kArccosh32;
    const TypeWindow w = mixedProductInterval(t, d);
    CHECK(w.residualLo <= 1e-8);
    CHECK(w.residualHi <= 1e-8);
    auto pairAt = [&](double theta) { return canonicalMixedPair(t, d, theta); };
    const auto [Am, Bm] = pairAt(0.5 * (w.lo + w.hi));
    CHECK(ellipticM(Am * Bm));
    for (double theta : {0.5 * w.lo, 0.5 * (w.hi + 2 * pi)}) {
        const auto [A, B] = pairAt(theta);
        CHECK(isHyperbolic(classify(A * B)));
        CHECK(classifyPair({A, A * B}) == PairType::HHplus);
    }
}

TEST_CASE("mixedProductInterval is never empty: the trace runs from tr A to -tr A") {
    for (auto [t, d] : {std::pair{6.0, 0.0}, std::pair{0.5, 8.0}, std::pair{2.0, 1.0}}) {
        const TypeWindow w = mixedProductInterval(t, d);
        CHECK(0.0 < w.lo);
        CHECK(w.lo < w.hi);
        CHECK(w.hi < 2 * pi);
        CHECK(w.residualLo <= 1e-8);
        CHECK(w.residualHi <= 1e-8);
    }
    // a far center squeezes the window against 2 pi
    CHECK(mixedProductInterval(0.5, 8.0).lo > 2 * pi - 0.02);
}

TEST_CASE("property: hhMinusThresholds three regimes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> len(0.3, 4.0), dist(0.2, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double tB = len(rng), d = dist(rng);
        const HHThresholds h = hhMinusThresholds(tB, d);
        REQUIRE(0.0 < h.t1);
        REQUIRE(h.t1 < h.t2);
        auto typeAt = [&](double tA) {
            const auto [A, B] = canonicalHHMinusPair(tA, tB, d);
            return classifyPair({A, A * B});
        };
        CHECK(typeAt(h.t1 / 2) == PairType::HHminus);
        const auto [A, B] = canonicalHHMinusPair(0.5 * (h.t1 + h.t2), tB, d);
        CHECK(ellipticM(A * B));
        CHECK(typeAt(2 * h.t2) == PairType::HHplus);
    }
}

TEST_CASE("property: thresholds survive a random conjugation") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> len(0.3, 3.0), dist(0.3, 2.0), ang(0.4, 5.8);
    for (int i = 0; i < 50; ++i) {
        const Matrix2 g = test::randomSL2(rng, 1.5);
        const double d = dist(rng), thetaA = ang(rng);
        const double a = ellipticProductThreshold(d, thetaA);
        auto conjTrace = [&](double thetaB) {
            const auto [A, B] = canonicalRotationPair(d, thetaA, thetaB);
            return (conj(g, A) * conj(g, B)).trace();
        };
        const TypeWindow w = findTypeWindow(conjTrace, 0.0, 2 * pi, false, 2048);
        CHECK(std::abs(w.lo - a) <= 1e-7);

        const double tB = len(rng);
        const HHThresholds h = hhMinusThresholds(tB, d);
        auto conjTraceHH = [&](double tA) {
            const auto [A, B] = canonicalHHMinusPair(tA, tB, d);
            return (conj(g, A) * conj(g, B)).trace();
        };
        const TypeWindow e = findTypeWindow(conjTraceHH, 0.0, 4.0 * (tB + 2.0 * d + 8.0), true, 8192);
        CHECK(std::abs(e.lo - h.t1) <= 1e-7);
        CHECK(std::abs(e.hi - h.t2) <= 1e-7);
    }
}

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rvs/errors.hpp"
#include "rvs/hypgeom.hpp"
#include "rvs_cli/cli.hpp"

namespace rvs::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kResidualTol = 1e-8;

bool elliptic(const Matrix2& m) { return std::abs(m.trace()) < 2.0; }
bool hyperbolic(const Matrix2& m) { return std::abs(m.trace()) > 2.0; }

struct Draw {
    std::ostringstream why;
    bool ok{true};
    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) why << "; ";
            why << what;
            ok = false;
        }
    }
};

void record(LemmaResult& r, Draw& d, const std::string& params) {
    ++r.draws;
    if (d.ok) ++r.passed;
    else r.failures.push_back(params + ": " + d.why.str());
}

// Elliptic window of the rotation pair shrinks as the centers separate.
LemmaResult checkRotationProducts(int draws, std::mt19937_64& rng) {
    LemmaResult res;
    res.name = "prodRR";
    std::uniform_real_distribution<double> angle(0.3, kTwoPi - 0.3), dist(0.5, 3.0);
    for (int i = 0; i < draws; ++i) {
        const double thetaA = angle(rng), d = dist(rng);
        std::ostringstream params;
        params << "thetaA=" << thetaA << " d=" << d;
        Draw check;
        try {
            double prevPlus = 0, prevMinus = 0;
            for (int k = 0; k < 3; ++k) {
                const double dk = d * std::ldexp(1.0, k);
                const RotationWindow w = ellipticProductWindow(dk, thetaA);
                const double r = std::max(w.residualMinus, w.residualPlus);
                res.maxResidual = std::max(res.maxResidual, r);
                check.require(r <= kResidualTol, "residual " + std::to_string(r));
                auto product = [&](double thetaB) {
                    const auto [A, B] = canonicalRotationPair(dk, thetaA, thetaB);
                    return A * B;
                };
                check.require(elliptic(product(0.5 * w.plus)), "not elliptic inside +window");
                check.require(elliptic(product(kTwoPi - 0.5 * w.minus)), "not elliptic inside -window");
                check.require(hyperbolic(product(0.5 * (w.plus + kTwoPi - w.minus))), "not hyperbolic outside");
                if (k > 0) {
                    check.require(w.plus < prevPlus && w.minus < prevMinus, "window does not shrink with d");
                }
                prevPlus = w.plus;
                prevMinus = w.minus;
            }
        } catch (const std::exception& e) {
            check.require(false, e.what());
        }
        record(res, check, params.str());
    }
    return res;
}

// Rotation against a translation: elliptic exactly on I(t, d), (H,H)+ outside.
LemmaResult checkMixedProducts(int draws, std::mt19937_64& rng) {
    LemmaResult res;
    res.name = "prodHR";
    std::uniform_real_distribution<double> len(0.3, 4.0), dist(0.2, 3.0);
    for (int i = 0; i < draws; ++i) {
        const double t = len(rng), d = dist(rng);
        std::ostringstream params;
        params << "t=" << t << " d=" << d;
        Draw check;
        auto pairAt = [&](double theta) { return canonicalMixedPair(t, d, theta); };
        auto outsideOk = [&](double theta) {
            const auto [A, B] = pairAt(theta);
            const Matrix2 AB = A * B;
            return hyperbolic(AB) && classifyPair({A, AB}) == PairType::HHplus;
        };
        try {
            const TypeWindow w = mixedProductInterval(t, d);
            const double r = std::max(w.residualLo, w.residualHi);
            res.maxResidual = std::max(res.maxResidual, r);
            check.require(r <= kResidualTol, "residual " + std::to_string(r));
            const auto [A, B] = pairAt(0.5 * (w.lo + w.hi));
            check.require(elliptic(A * B), "midpoint product not elliptic");
            check.require(outsideOk(0.5 * w.lo), "below I(t,d): not (H,H)+");
            check.require(outsideOk(0.5 * (w.hi + kTwoPi)), "above I(t,d): not (H,H)+");
        } catch (const EmptyIntervalError&) {
            // no elliptic product: the whole circle must be in the (H,H)+ regime
            for (int k = 1; k < 64; ++k) {
                if (!outsideOk(kTwoPi * k / 64.0)) {
                    check.require(false, "empty I(t,d) but a non-(H,H)+ product");
                    break;
                }
            }
        } catch (const std::exception& e) {
            check.require(false, e.what());
        }
        record(res, check, params.str());
    }
    return res;
}

// Alternating translations: (H,H)- below t1, elliptic product between, (H,H)+ above t2.
LemmaResult checkHyperbolicProducts(int draws, std::mt19937_64& rng) {
    LemmaResult res;
    res.name = "prodHH";
    std::uniform_real_distribution<double> len(0.3, 4.0), dist(0.2, 3.0);
    for (int i = 0; i < draws; ++i) {
        const double tB = len(rng), d = dist(rng);
        std::ostringstream params;
        params << "tB=" << tB << " d=" << d;
        Draw check;
        try {
            const HHThresholds h = hhMinusThresholds(tB, d);
            const double r = std::max(h.residual1, h.residual2);
            res.maxResidual = std::max(res.maxResidual, r);
            check.require(r <= kResidualTol, "residual " + std::to_string(r));
            check.require(0.0 < h.t1 && h.t1 < h.t2, "thresholds out of order");
            auto typeAt = [&](double tA) {
                const auto [A, B] = canonicalHHMinusPair(tA, tB, d);
                return classifyPair({A, A * B});
            };
            const auto [A, B] = canonicalHHMinusPair(0.5 * (h.t1 + h.t2), tB, d);
            check.require(typeAt(0.5 * h.t1) == PairType::HHminus, "t1/2 not (H,H)-");
            check.require(elliptic(A * B), "midpoint product not elliptic");
            check.require(typeAt(2.0 * h.t2) == PairType::HHplus, "2 t2 not (H,H)+");
        } catch (const std::exception& e) {
            check.require(false, e.what());
        }
        record(res, check, params.str());
    }
    return res;
}

}  // namespace

std::vector<LemmaResult> verifyLemmas(int draws, std::uint64_t seed) {
    if (draws < 1) throw UsageError("--draws must be positive");
    std::vector<LemmaResult> out;
    std::mt19937_64 rng(seed);
    out.push_back(checkRotationProducts(draws, rng));
    out.push_back(checkMixedProducts(draws, rng));
    out.push_back(checkHyperbolicProducts(draws, rng));
    return out;
}

}  // namespace rvs::cli

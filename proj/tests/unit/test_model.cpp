#include <doctest.h>

#include <cmath>
#include <random>

#include "mlsg/model.hpp"

using namespace mlsg;

namespace {

ModelParams with_c0(double c0) {
    ModelParams p = baseline_params();
    p.c0 = c0;
    return p;
}

ModelParams with_gamma_x(double gx) {
    ModelParams p = baseline_params();
    p.gamma_x = gx;
    return p;
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("time curve interpolates linearly and rejects bad knots") {
    TimeCurve c({{0.0, 0.1}, {0.5, 0.3}, {1.0, 0.2}});
    CHECK(c(0.0) == 0.1);
    CHECK(c(0.25) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c(0.75) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(c(1.0) == 0.2);
    CHECK_THROWS_AS(c(1.5), std::domain_error);
    CHECK_THROWS_AS(TimeCurve({{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(TimeCurve({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("parameter validation names the violated constraint") {
    ModelParams p = baseline_params();
    CHECK_NOTHROW(p.validate());

    p.gamma_w = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), "ModelParams: gamma_w must be > 0",
                         std::invalid_argument);

    p = baseline_params();
    p.delta = TimeCurve::constant(-0.1, 0.0, 1.0);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    p = baseline_params();
    p.beta_p = TimeCurve::constant(0.1, 0.0, 0.5); // does not span the horizon
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("k constants match hand-evaluated closed forms at the study baseline") {
    const ModelParams p = baseline_params();
    const KSet k = k_constants(p, 0.0);

    // Independent arithmetic straight from the definitions.
    const double gp = 0.1, gw = 1e-4, gx = 0.1, al = 1.0, c0 = 1.0;
    const double den = gp * (2 * gw + gp);
    CHECK(k.k3 == doctest::Approx((gw + gp) * gx / den).epsilon(1e-14));
    CHECK(k.k4 == doctest::Approx(((gw + gp) * al - c0 * gw * gw) / den).epsilon(1e-14));
    CHECK(k.k2 == doctest::Approx((2 * gw * 0.1 - 0.2 * gp) / den).epsilon(1e-14));

    CHECK(k.k3 == doctest::Approx(0.999002).epsilon(1e-6));
    CHECK(k.k4 == doctest::Approx(9.99002).epsilon(1e-6));
    CHECK(k.k2 == doctest::Approx(-1.994012).epsilon(1e-6));

    CHECK(k.k1 < 0.0);
    CHECK(k.k13 < 0.0);
    const KSet k_late = k_constants(p, 1.0);
    CHECK(k_late.k1 < 0.0);
    CHECK(k_late.k13 < 0.0);
}

TEST_CASE("gamma_x = 0 zeroes the goodwill-channel constants") {
    const ModelParams p = with_gamma_x(0.0);
    for (double t : {0.0, 0.37, 1.0}) {
        const KSet k = k_constants(p, t);
        CHECK(k.k3 == 0.0);
        CHECK(k.k7 == 0.0);
        CHECK(k.k14 == 0.0);
        CHECK(k.k17 == 0.0);
    }
}

TEST_CASE("k3 and k4 are time independent, bitwise") {
    const ModelParams p = baseline_params();
    const KSet ref = k_constants(p, 0.0);
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const KSet k = k_constants(p, ut(gen));
        CHECK(k.k3 == ref.k3);
        CHECK(k.k4 == ref.k4);
    }
}

TEST_CASE("only k4, k8, k12, k15, k18 depend on c0") {
    const KSet a = k_constants(with_c0(1.0), 0.42);
    const KSet b = k_constants(with_c0(2.5), 0.42);
    CHECK(a.k1 == b.k1);
    CHECK(a.k2 == b.k2);
    CHECK(a.k3 == b.k3);
    CHECK(a.k5 == b.k5);
    CHECK(a.k6 == b.k6);
    CHECK(a.k7 == b.k7);
    CHECK(a.k9 == b.k9);
    CHECK(a.k10 == b.k10);
    CHECK(a.k11 == b.k11);
    CHECK(a.k13 == b.k13);
    CHECK(a.k14 == b.k14);
    CHECK(a.k16 == b.k16);
    CHECK(a.k17 == b.k17);
    CHECK(a.k4 != b.k4);
    CHECK(a.k8 != b.k8);
    CHECK(a.k12 != b.k12);
    CHECK(a.k15 != b.k15);
    CHECK(a.k18 != b.k18);
}

TEST_CASE("k8 recomposes from its components to machine precision") {
    const ModelParams p = with_c0(1.7);
    const KSet k = k_constants(p, 0.61);
    const double recomposed = (p.alpha + p.c0 * p.gamma_w - p.gamma_p * k.k4) /
                              (2.0 * p.gamma_w);
    CHECK(k.k8 == doctest::Approx(recomposed).epsilon(1e-15));
}

TEST_CASE("phi/psi coefficients are c0-invariant, bitwise") {
    const PhiPsiSet a = phi_psi(with_c0(1.0), 0.42);
    const PhiPsiSet b = phi_psi(with_c0(2.5), 0.42);
    CHECK(a.phi1 == b.phi1);
    CHECK(a.phi2 == b.phi2);
    CHECK(a.phi3 == b.phi3);
    CHECK(a.phi4 == b.phi4);
    CHECK(a.phi5 == b.phi5);
    CHECK(a.phi6 == b.phi6);
    CHECK(a.psi1 == b.psi1);
    CHECK(a.psi2 == b.psi2);
    CHECK(a.psi3 == b.psi3);
    CHECK(a.psi4 == b.psi4);
    CHECK(a.psi5 == b.psi5);
    CHECK(a.psi6 == b.psi6);
}

TEST_CASE("phi6 and psi6 vanish with gamma_x and pin to k7 k14 / 2 otherwise") {
    const PhiPsiSet z = phi_psi(with_gamma_x(0.0), 0.3);
    CHECK(z.phi6 == 0.0);
    CHECK(z.psi6 == 0.0);

    const ModelParams p = baseline_params();
    const PhiPsiSet c = phi_psi(p, 0.0);
    const KSet k = k_constants(p, 0.0);
    CHECK(c.phi6 == doctest::Approx(0.5 * k.k7 * k.k14).epsilon(1e-15));
    // Independently evaluated value at the study baseline, t = 0.
    CHECK(c.phi6 == doctest::Approx(2.4900299201989602e-05).epsilon(1e-13));
    CHECK(c.psi6 == doctest::Approx(0.5 * k.k14 * k.k17).epsilon(1e-15));

    // phi2 = e^{-rt} gamma_p^2 k2^2 / gamma_w >= 0, i.e. -2 e^{-rt} gamma_p k2 k6.
    CHECK(c.phi2 >= 0.0);
    CHECK(c.phi2 == doctest::Approx(-2.0 * k.k2 * k.k6 * p.gamma_p).epsilon(1e-14));
}

TEST_CASE("out-of-range time is a domain error") {
    const ModelParams p = baseline_params();
    CHECK_THROWS_AS(k_constants(p, -0.1), std::domain_error);
    CHECK_THROWS_AS(k_constants(p, 1.1), std::domain_error);
    CHECK_THROWS_AS(phi_psi(p, 2.0), std::domain_error);
}

TEST_CASE("concavity diagnostics") {
    const ModelParams p = baseline_params();
    for (double t : {0.0, 0.5, 1.0}) {
        const ConcavityDiagnostics d = concavity_diagnostics(p, t);
        const double emrt = std::exp(-p.r * t);
        CHECK(d.seller_wholesale == doctest::Approx(-2.0 * emrt * 1e-4).epsilon(1e-14));
        CHECK(d.seller_innovation == doctest::Approx(-2.0 * emrt).epsilon(1e-14));
        CHECK(d.buyer_innovation == doctest::Approx(-2.0 * emrt).epsilon(1e-14));
        CHECK(d.buyer_retail < 0.0);
        CHECK(d.all_strictly_negative);
    }

    ModelParams q = baseline_params();
    q.r = 0.0;
    q.gamma_w = 0.5;
    const ConcavityDiagnostics d = concavity_diagnostics(q, 0.25);
    CHECK(d.seller_wholesale == doctest::Approx(-1.0).epsilon(1e-15));
}

} // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <random>

#include "mlsg/hamnash.hpp"

using namespace mlsg;

TEST_SUITE("hamnash") {

TEST_CASE("hamiltonian values at hand-checked points") {
    const ModelParams p = baseline_params();

    // All controls and adjoint data zero at the origin.
    const HamiltonianPair h0 =
        hamiltonian_values(p, HamiltonianPoint{0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 0, 0, 0, 0);
    CHECK(h0.h_s == doctest::Approx(-p.c0 * p.alpha).epsilon(1e-15));
    CHECK(h0.h_b == 0.0);

    const HamiltonianPair ht =
        hamiltonian_values(p, HamiltonianPoint{0.4, 0.0, 0.0, 0.0, 0.0, 0.0}, 0, 0, 0, 0);
    CHECK(ht.h_s == doctest::Approx(std::exp(-0.05 * 0.4) * (-p.c0 * p.alpha)).epsilon(1e-15));

    // y1 = 1, x = 1, everything else zero, expanded by hand:
    // y1 * (-beta_x x) + e^0 [(0 - c0)(alpha + gamma_x x)] = -0.1 - 1.1 = -1.2
    const HamiltonianPair h1 =
        hamiltonian_values(p, HamiltonianPoint{0.0, 1.0, 1.0, 0.0, 0.0, 0.0}, 0, 0, 0, 0);
    CHECK(h1.h_s == doctest::Approx(-1.2).epsilon(1e-14));
}

TEST_CASE("seller hamiltonian is strictly concave in the wholesale price") {
    const ModelParams p = baseline_params();
    const HamiltonianPoint pt{0.2, 1.0, 0.3, -0.1, 0.05, 0.02};
    const double h1 = hamiltonian_values(p, pt, 0.1, 1.0, 2.0, 0.1).h_s;
    const double h2 = hamiltonian_values(p, pt, 0.1, 2.0, 2.0, 0.1).h_s;
    const double h3 = hamiltonian_values(p, pt, 0.1, 3.0, 2.0, 0.1).h_s;
    CHECK(h1 + h3 < 2.0 * h2);
}

TEST_CASE("follower fixed point matches the closed-form responses") {
    const ModelParams p = baseline_params();

    // Demand-neutralising retail price: the wholesale response collapses to c0/2.
    {
        const HamiltonianPoint pt{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        const double pr = p.alpha / p.gamma_p;
        const FollowerResult f = follower_nash_numeric(p, pt, 0.0, pr);
        CHECK(f.w == doctest::Approx(p.c0 / 2.0).epsilon(1e-10));
        CHECK(f.w == doctest::Approx(gamma_maps::wholesale(p, pt, pr)).epsilon(1e-12));
        CHECK(std::abs(f.i_b) < 1e-12); // y2 = a2 = 0
    }

    // Random points: numeric fixed point vs closed forms.
    std::mt19937_64 gen(555);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    std::uniform_real_distribution<double> ux(0.0, 10.0);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    std::uniform_real_distribution<double> ua(-0.5, 0.5);
    std::uniform_real_distribution<double> uc(0.0, 12.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const HamiltonianPoint pt{ut(gen), ux(gen), uy(gen), uy(gen), ua(gen), ua(gen)};
        const double i_s = uc(gen), pr = uc(gen);
        const FollowerResult f = follower_nash_numeric(p, pt, i_s, pr);
        worst = std::max({worst, std::abs(f.w - gamma_maps::wholesale(p, pt, pr)),
                          std::abs(f.i_b - gamma_maps::buyer_innovation(p, pt))});
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("leader fixed point matches the closed-form responses") {
    const ModelParams p = baseline_params();

    // Zero adjoint data: the innovation responses vanish and the price maps
    // reduce to their K tails.
    {
        const HamiltonianPoint pt{0.3, 2.0, 0.0, 0.0, 0.0, 0.0};
        const KSet k = k_constants(p, pt.t);
        const LeaderResult L = leader_nash_numeric(p, pt);
        CHECK(std::abs(L.i_s) < 1e-10);
        CHECK(std::abs(L.i_b) < 1e-10);
        CHECK(L.p == doctest::Approx(k.k3 * pt.x + k.k4).epsilon(1e-10));
        CHECK(L.w == doctest::Approx(k.k7 * pt.x + k.k8).epsilon(1e-10));
    }

    // Fully populated point, agreement at the module tolerance.
    {
        const HamiltonianPoint pt{0.5, 1.0, 0.1, -0.2, 0.01, 0.02};
        const LeaderResult L = leader_nash_numeric(p, pt);
        CHECK(std::abs(L.i_s - gamma_maps::seller_innovation(p, pt)) < 1e-8);
        CHECK(std::abs(L.p - gamma_maps::retail(p, pt)) < 1e-8);
        CHECK(std::abs(L.w - gamma_maps::wholesale_composed(p, pt)) < 1e-8);
        CHECK(std::abs(L.i_b - gamma_maps::buyer_innovation_composed(p, pt)) < 1e-8);
        CHECK(L.monotone_after_two);
    }

    // The retail response is linear in (y2, a2) once y1 = a1 = 0.
    {
        const HamiltonianPoint pt{0.25, 3.0, 0.0, 0.7, 0.0, -0.3};
        const KSet k = k_constants(p, pt.t);
        const LeaderResult L = leader_nash_numeric(p, pt);
        CHECK(std::abs(L.p - (k.k2 * pt.y2 + 0.5 * k.k2 * pt.a2 + k.k3 * pt.x + k.k4)) <
              1e-8);
    }
}

TEST_CASE("innovation responses are state and cross-gradient independent") {
    const ModelParams p = baseline_params();
    const HamiltonianPoint a{0.6, 0.5, 0.2, -0.4, 0.1, -0.05};
    HamiltonianPoint b = a;
    b.x = 7.5;
    const LeaderResult la = leader_nash_numeric(p, a);
    const LeaderResult lb = leader_nash_numeric(p, b);
    CHECK(std::abs(la.i_s - lb.i_s) < 1e-10);
    CHECK(std::abs(la.i_b - lb.i_b) < 1e-10);
}

TEST_CASE("multi-start initialisations land on the same fixed point") {
    const ModelParams p = baseline_params();
    const HamiltonianPoint pt{0.5, 1.0, 0.1, -0.2, 0.01, 0.02};
    const LeaderResult ref = leader_nash_numeric(p, pt);
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int s = 0; s < 5; ++s) {
        const LeaderResult L = leader_nash_numeric(p, pt, {}, u(gen), u(gen));
        CHECK(std::abs(L.i_s - ref.i_s) < 1e-8);
        CHECK(std::abs(L.p - ref.p) < 1e-8);
        CHECK(std::abs(L.w - ref.w) < 1e-8);
        CHECK(std::abs(L.i_b - ref.i_b) < 1e-8);
    }
}

TEST_CASE("best-response error decreases monotonically after the second iteration") {
    const ModelParams p = baseline_params();
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const HamiltonianPoint pt{ut(gen), 1.0, uy(gen), uy(gen), 0.5 * uy(gen),
                                  0.5 * uy(gen)};
        const LeaderResult L = leader_nash_numeric(p, pt);
        CHECK(L.monotone_after_two);
        for (std::size_t j = 2; j < L.errors.size(); ++j)
            CHECK(L.errors[j] <= L.errors[j - 1]);
    }
}

TEST_CASE("points outside the horizon are rejected") {
    const ModelParams p = baseline_params();
    CHECK_THROWS_AS(
        hamiltonian_values(p, HamiltonianPoint{1.5, 0, 0, 0, 0, 0}, 0, 0, 0, 0),
        std::domain_error);
}

} // TEST_SUITE

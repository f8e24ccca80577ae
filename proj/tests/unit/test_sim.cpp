#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "mlsg/sim.hpp"
#include "oracles.hpp"

using namespace mlsg;

namespace {

struct Fixture {
    ModelParams params = baseline_params();
    RiccatiSolution solution;
    StrategyCoefficients coeffs;
    Fixture() {
        solution = solve_riccati(params, TimeMesh{1.0, 10000});
        coeffs = strategy_coefficients(params, solution);
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

struct ThreadEnvGuard {
    explicit ThreadEnvGuard(const char* v) { setenv("MLSG_THREADS", v, 1); }
    ~ThreadEnvGuard() { unsetenv("MLSG_THREADS"); }
};

} // namespace

TEST_SUITE("sim") {

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.n_paths = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n_paths = 1;
    cfg.n_steps = 5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.n_steps = 100;
    cfg.sigma_scale = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("noiseless single path reproduces the deterministic integrator") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 1;
    cfg.n_steps = 4000000;
    cfg.seed = 7;
    cfg.x0 = 1.0;
    cfg.sigma_scale = 0.0;
    const SimResult r = simulate(f.params, f.coeffs, cfg);
    const oracle::DeterministicProfit det =
        oracle::deterministic_profit_oracle(f.params, f.coeffs, 1.0, 400000);
    CHECK(std::abs(r.j_s_mean - det.j_s) < 1e-8);
    CHECK(std::abs(r.j_b_mean - det.j_b) < 1e-8);
    CHECK(r.j_s_se == 0.0);
    CHECK(r.clamp_fraction == 0.0);
}

TEST_CASE("identity perturbation is bitwise invisible") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 512;
    cfg.n_steps = 200;
    cfg.seed = 99;
    cfg.x0 = 1.0;
    const SimResult plain = simulate(f.params, f.coeffs, cfg);
    cfg.perturbation = Perturbation{Perturbation::Player::buyer,
                                    Perturbation::Target::pair, 1.0, 0.0};
    const SimResult perturbed = simulate(f.params, f.coeffs, cfg);
    CHECK(plain.j_s_mean == perturbed.j_s_mean);
    CHECK(plain.j_b_mean == perturbed.j_b_mean);
    CHECK(plain.j_s_se == perturbed.j_s_se);
    CHECK(plain.negative_x_fraction == perturbed.negative_x_fraction);
}

TEST_CASE("results are bitwise identical across runs and worker counts") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 4321;
    cfg.n_steps = 150;
    cfg.seed = 2024;
    cfg.x0 = 1.0;
    SimResult one, two, rerun;
    {
        ThreadEnvGuard env("1");
        one = simulate(f.params, f.coeffs, cfg);
    }
    {
        ThreadEnvGuard env("2");
        two = simulate(f.params, f.coeffs, cfg);
        rerun = simulate(f.params, f.coeffs, cfg);
    }
    CHECK(one.j_s_mean == two.j_s_mean);
    CHECK(one.j_b_mean == two.j_b_mean);
    CHECK(one.j_s_se == two.j_s_se);
    CHECK(one.j_b_se == two.j_b_se);
    CHECK(one.clamp_fraction == two.clamp_fraction);
    CHECK(one.negative_x_fraction == two.negative_x_fraction);
    CHECK(two.j_s_mean == rerun.j_s_mean);
    CHECK(two.j_b_se == rerun.j_b_se);
}

TEST_CASE("standard error scales like one over root paths") {
    const Fixture& f = fixture();
    double se[3];
    int i = 0;
    for (std::int64_t n : {1000, 10000, 100000}) {
        SimConfig cfg;
        cfg.n_paths = n;
        cfg.n_steps = 200;
        cfg.seed = 11;
        cfg.x0 = 1.0;
        se[i++] = simulate(f.params, f.coeffs, cfg).j_s_se;
    }
    const double root10 = std::sqrt(10.0);
    CHECK(se[0] / se[1] == doctest::Approx(root10).epsilon(0.2));
    CHECK(se[1] / se[2] == doctest::Approx(root10).epsilon(0.2));
}

TEST_CASE("profit estimates bracket the value function at moderate scale") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.n_steps = 500;
    cfg.seed = 42;
    cfg.x0 = 1.0;
    const SimResult r = simulate(f.params, f.coeffs, cfg);
    const ValuePair v = value_functions(f.solution, 0.0, cfg.x0);
    REQUIRE(r.clamp_fraction < 1e-3);
    CHECK(std::abs(r.j_s_mean - v.v_s) <= 3.0 * r.j_s_se);
    CHECK(std::abs(r.j_b_mean - v.v_b) <= 3.0 * r.j_b_se);
}

TEST_CASE("paired deviation differences vanish at factor one") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 1000;
    cfg.n_steps = 100;
    cfg.seed = 5;
    cfg.x0 = 1.0;
    const DeviationReport rep = deviation_test(f.params, f.solution, cfg, {1.0});
    REQUIRE(rep.entries.size() == 2);
    for (const auto& e : rep.entries) {
        CHECK(e.delta_mean == 0.0);
        CHECK(e.paired_se == 0.0);
        CHECK_FALSE(e.improves);
    }
}

TEST_CASE("noiseless deviations never help the deviating player") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 1;
    cfg.n_steps = 20000;
    cfg.seed = 1;
    cfg.x0 = 1.0;
    cfg.sigma_scale = 0.0;
    const DeviationReport rep =
        deviation_test(f.params, f.solution, cfg, {0.9, 0.95, 1.05, 1.1});
    CHECK(rep.pass);
    for (const auto& e : rep.entries) CHECK(e.delta_mean <= 1e-8);
}

TEST_CASE("exploding paths are excluded and reported as an error beyond 1%") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 8;
    cfg.n_steps = 50;
    cfg.seed = 3;
    cfg.x0 = 1.0;
    cfg.perturbation =
        Perturbation{Perturbation::Player::buyer, Perturbation::Target::leader, 1.0,
                     1e160}; // absurd offset forces non-finite states
    CHECK_THROWS_AS(simulate(f.params, f.coeffs, cfg), std::runtime_error);
}

TEST_CASE("recorded paths have the documented shape") {
    const Fixture& f = fixture();
    SimConfig cfg;
    cfg.n_paths = 3;
    cfg.n_steps = 40;
    cfg.seed = 8;
    cfg.x0 = 1.0;
    std::vector<PathRecord> records;
    simulate_recording(f.params, f.coeffs, cfg, records);
    REQUIRE(records.size() == 3);
    for (const auto& r : records) {
        CHECK(r.t.size() == 40);
        CHECK(r.x.size() == 40);
        CHECK(r.x[0] == 1.0);
        CHECK(r.d.size() == 40);
    }
}

} // TEST_SUITE

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mlsg/riccati.hpp"
#include "mlsg/strategies.hpp"

namespace mlsg {

/// Multiplicative/additive tweak of one player's controls, applied to the
/// unclamped linear forms before the nonnegativity clamp.
struct Perturbation {
    enum class Player { seller, buyer };
    /// Which of the player's controls is perturbed. The leader control is
    /// I_s for the seller and p for the buyer; the follower control is w for
    /// the seller and I_b for the buyer. `pair` perturbs both, which is what
    /// the equilibrium deviation test uses.
    enum class Target { leader, follower, pair };
    Player player = Player::seller;
    Target target = Target::pair;
    double factor = 1.0;
    double offset = 0.0;
};

struct SimConfig {
    std::int64_t n_paths = 1;
    int n_steps = 1000;
    std::uint64_t seed = 0;
    double x0 = 1.0;
    double sigma_scale = 1.0; ///< 1 = model diffusion, 0 = deterministic
    std::optional<Perturbation> perturbation;

    void validate() const;
};

struct SimResult {
    double j_s_mean = 0.0, j_s_se = 0.0;
    double j_b_mean = 0.0, j_b_se = 0.0;
    /// Fraction of (path, step) pairs whose diffusion argument was negative
    /// before being clamped to zero inside the square root.
    double clamp_fraction = 0.0;
    /// Fraction of (path, step) pairs with negative goodwill.
    double negative_x_fraction = 0.0;
    std::int64_t excluded_paths = 0;
    SimConfig config;
};

/// First few simulated paths, for CSV dumping.
struct PathRecord {
    std::vector<double> t, x, w, i_s, p, i_b, d;
};

/// Euler-Maruyama Monte Carlo under the clamped feedback strategies:
///   x_{k+1} = x_k + drift dt + sigma_scale sqrt(max(diff_arg, 0)) dW,
/// profits accumulated by the left-endpoint rectangle rule on the discounted
/// instantaneous profits. Per-path noise streams are derived from
/// (seed, path index), and aggregation is performed in path order, so the
/// result is bitwise reproducible for any worker count. Worker count is
/// capped by the MLSG_THREADS environment variable.
/// Throws std::runtime_error if more than 1% of paths hit a non-finite state.
SimResult simulate(const ModelParams& params, const StrategyCoefficients& coeffs,
                   const SimConfig& cfg);

/// simulate() that also records the first min(n_paths, max_records) paths.
SimResult simulate_recording(const ModelParams& params,
                             const StrategyCoefficients& coeffs,
                             const SimConfig& cfg,
                             std::vector<PathRecord>& records,
                             int max_records = 10);

struct DeviationEntry {
    Perturbation::Player player = Perturbation::Player::seller;
    double factor = 1.0;
    double delta_mean = 0.0; ///< deviating player's profit, perturbed - equilibrium
    double paired_se = 0.0;
    double equilibrium_mean = 0.0;
    bool improves = false; ///< delta_mean > 3 * paired_se
};

struct DeviationReport {
    std::vector<DeviationEntry> entries;
    bool pass = true; ///< no deviation improves beyond 3 paired SE
};

/// Equilibrium deviation test with common random numbers: for each factor f
/// and each player, the player's control pair is scaled by f while the
/// opponent keeps the equilibrium feedback maps; in particular the seller's
/// wholesale response is re-evaluated against the buyer's deviated retail
/// price. The factor-f run and the factor-1 baseline share per-path noise,
/// so the reported difference carries a paired standard error.
DeviationReport deviation_test(const ModelParams& params,
                               const RiccatiSolution& solution,
                               const SimConfig& cfg,
                               const std::vector<double>& factors = {0.9, 0.95,
                                                                     1.05, 1.1});

/// CSV dump of recorded paths: path,t,x,w,I_s,p,I_b,D.
void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& records);

} // namespace mlsg

#pragma once

#include <vector>

#include "mlsg/model.hpp"

namespace mlsg {

/// Point in the Hamiltonian-level game: state x at time t, with the two
/// players' value gradients (y1, y2) and curvatures (a1, a2).
struct HamiltonianPoint {
    double t = 0.0;
    double x = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

struct HamiltonianPair {
    double h_s = 0.0;
    double h_b = 0.0;
};

/// Literal evaluation of the two Hamiltonians at given controls:
///   H_i = y_i * drift + (1/2) * diffusion_arg * a_i + e^{-rt} * profit_i
/// with drift, diffusion argument and instantaneous profits taken straight
/// from the model equations.
HamiltonianPair hamiltonian_values(const ModelParams& params,
                                   const HamiltonianPoint& pt, double i_s,
                                   double w, double p, double i_b);

struct NashOptions {
    int max_iterations = 200;
    double tolerance = 1e-10;
    /// Finite-difference probe width for the exact quadratic vertex.
    double probe = 1.0;
};

struct FollowerResult {
    double w = 0.0;
    double i_b = 0.0;
    int iterations = 0;
    std::vector<double> errors; ///< sup change per iteration
};

struct LeaderResult {
    double i_s = 0.0;
    double p = 0.0;
    double w = 0.0;   ///< induced follower wholesale price
    double i_b = 0.0; ///< induced follower innovation effort
    int iterations = 0;
    std::vector<double> errors;
    /// True when the iteration error is non-increasing from the second
    /// iteration on (reported, not assumed).
    bool monotone_after_two = true;
};

/// Inner static Nash game over (w, i_b) given leader actions (i_s, p).
/// Best responses are exact quadratic vertices obtained from
/// finite-difference probes of the Hamiltonians (exact for quadratics);
/// simultaneous (Jacobi) updates iterate to the fixed point. Throws
/// std::runtime_error if a best-response quadratic is not strictly concave
/// or the iteration does not converge.
FollowerResult follower_nash_numeric(const ModelParams& params,
                                     const HamiltonianPoint& pt, double i_s,
                                     double p, const NashOptions& opts = {});

/// Outer static Nash game over the leadership pair (i_s, p); every
/// Hamiltonian evaluation embeds the inner follower game. Oscillation
/// triggers 0.5 damping. Initial iterate defaults to (0, 0).
LeaderResult leader_nash_numeric(const ModelParams& params,
                                 const HamiltonianPoint& pt,
                                 const NashOptions& opts = {},
                                 double i_s_init = 0.0, double p_init = 0.0);

/// Closed-form response maps, for cross-validation of the numeric path.
namespace gamma_maps {

/// Wholesale-price best response given leader actions (depends on p only).
double wholesale(const ModelParams& params, const HamiltonianPoint& pt,
                 double p);
/// Buyer innovation response; independent of leader actions and of x.
double buyer_innovation(const ModelParams& params, const HamiltonianPoint& pt);
/// Seller innovation leadership response; independent of x.
double seller_innovation(const ModelParams& params, const HamiltonianPoint& pt);
/// Retail-price leadership response: K1 y1 + K1 a1/2 + K2 y2 + K2 a2/2 + K3 x + K4.
double retail(const ModelParams& params, const HamiltonianPoint& pt);
/// Wholesale price with the leadership responses substituted:
/// K5 y1 + K5 a1/2 + K6 y2 + K6 a2/2 + K7 x + K8.
double wholesale_composed(const ModelParams& params, const HamiltonianPoint& pt);
/// Buyer innovation with the leadership responses substituted.
double buyer_innovation_composed(const ModelParams& params,
                                 const HamiltonianPoint& pt);

} // namespace gamma_maps

} // namespace mlsg

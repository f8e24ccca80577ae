#pragma once

#include <iosfwd>
#include <vector>

#include "mlsg/model.hpp"
#include "mlsg/riccati.hpp"

namespace mlsg {

/// Slope/intercept decomposition of the four feedback equilibrium controls,
/// nodewise on the solution mesh:
///   w  = w_x  x + w_0      (wholesale price, seller)
///   p  = p_x  x + p_0      (retail price, buyer)
///   I_s = i_sx x + i_s0    (seller innovation effort)
///   I_b = i_bx x + i_b0    (buyer innovation effort)
struct StrategyCoefficients {
    TimeMesh mesh;
    std::vector<double> w_x, w_0, p_x, p_0, i_sx, i_s0, i_bx, i_b0;
};

/// Controls after the nonnegativity clamp.
struct Controls {
    double w = 0.0;
    double i_s = 0.0;
    double p = 0.0;
    double i_b = 0.0;
};

struct ValuePair {
    double v_s = 0.0;
    double v_b = 0.0;
};

/// Builds the coefficient trajectories from a complete solution:
///   w_x = 2 K5 P2 + 2 K6 N2 + K7,   w_0 = K5 (P1+P2) + K6 (N1+N2) + K8,
///   p_x = 2 K1 P2 + 2 K2 N2 + K3,   p_0 = K1 (P1+P2) + K2 (N1+N2) + K4,
///   i_sx = e^{rt} delta P2,         i_s0 = e^{rt} delta (P1+P2) / 2,
///   i_bx = e^{rt} delta N2,         i_b0 = e^{rt} delta (N1+N2) / 2.
/// Throws std::invalid_argument when the solution is incomplete.
StrategyCoefficients strategy_coefficients(const ModelParams& params,
                                           const RiccatiSolution& solution);

/// Linear (unclamped) control values at (t, x); coefficients are linearly
/// interpolated between mesh nodes.
Controls evaluate_strategies_unclamped(const StrategyCoefficients& coeffs,
                                       double t, double x);

/// Controls actually applied in practice: max(linear form, 0) entrywise.
Controls evaluate_strategies(const StrategyCoefficients& coeffs, double t,
                             double x);

/// V_s(t,x) = P2 x^2 + P1 x + P0 and the buyer analogue, with coefficient
/// values linearly interpolated between mesh nodes.
ValuePair value_functions(const RiccatiSolution& solution, double t, double x);

/// CSV with header t,w_x,w_0,p_x,p_0,I_sx,I_s0,I_bx,I_b0.
void write_strategy_csv(std::ostream& os, const StrategyCoefficients& coeffs);

} // namespace mlsg

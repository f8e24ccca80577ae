#pragma once

#include <iosfwd>
#include <string>

#include "mlsg/time_curve.hpp"

namespace mlsg {

/// Economic and dynamics constants of the goodwill / innovation / pricing
/// model. Time-varying effectiveness coefficients are piecewise-linear
/// curves on [0, horizon]; everything is treated as dimensionless.
struct ModelParams {
    TimeCurve beta_p; ///< retail price effectiveness on goodwill, > 0
    TimeCurve beta_w; ///< wholesale price effectiveness on goodwill, > 0
    TimeCurve delta;  ///< innovation effectiveness, > 0
    double beta_x = 0.0;  ///< goodwill decay rate, > 0
    double gamma_p = 0.0; ///< retail price sensitivity of demand, > 0
    double gamma_w = 0.0; ///< wholesale price sensitivity of demand, > 0
    double gamma_x = 0.0; ///< goodwill sensitivity of demand, >= 0
    double alpha = 0.0;   ///< base market size, > 0
    double c0 = 0.0;      ///< unit production cost, >= 0
    double r = 0.0;       ///< discount rate, >= 0
    double horizon = 0.0; ///< terminal time T, > 0

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Baseline parameter set of the numerical study: constant coefficient
/// curves beta_p = 0.1, beta_w = 0.2, delta = 0.1 on [0, 1] and
/// beta_x = 0.1, gamma_p = 0.1, gamma_w = 1e-4, gamma_x = 0.1, alpha = 1,
/// c0 = 1, r = 0.05, T = 1.
ModelParams baseline_params();

/// The closed-form coefficient family K1..K18 at a fixed time. K1, K2, K5,
/// K9, K10, K12, K13, K16 carry the e^{rt} discount-unwinding factor and the
/// coefficient curves, so they vary with t; K3, K4 and the purely structural
/// combinations do not.
struct KSet {
    double k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, k13, k14, k15,
        k16, k17, k18;
};

/// Coefficients of the quadratic two-equation system satisfied by the
/// x^2-level value coefficients (P2, N2):
///   P2' + phi1 P2^2 + phi2 N2^2 + phi3 P2 N2 + phi4 P2 + phi5 N2 + phi6 = 0
///   N2' + psi1 P2^2 + psi2 N2^2 + psi3 P2 N2 + psi4 P2 + psi5 N2 + psi6 = 0
struct PhiPsiSet {
    double phi1, phi2, phi3, phi4, phi5, phi6;
    double psi1, psi2, psi3, psi4, psi5, psi6;
};

/// Second derivatives of each player's Hamiltonian in its own control,
/// evaluated after the opposing follower response has been substituted.
/// All four must be strictly negative for the interior argmax formulas to
/// be the actual maximizers.
struct ConcavityDiagnostics {
    double seller_wholesale;  ///< d2 H_s / d w^2      = -2 e^{-rt} gamma_w
    double seller_innovation; ///< d2 H_s / d I_s^2    = -2 e^{-rt}
    double buyer_retail;      ///< d2 H_b / d p^2 after the wholesale response
    double buyer_innovation;  ///< d2 H_b / d I_b^2    = -2 e^{-rt}
    bool all_strictly_negative = false;
};

/// Evaluates K1..K18 at time t. Throws std::domain_error if t is outside
/// [0, horizon]; params must satisfy validate().
KSet k_constants(const ModelParams& params, double t);

/// Evaluates the quadratic-stage coefficient set at time t.
PhiPsiSet phi_psi(const ModelParams& params, double t);

/// Second-order (concavity) diagnostics at time t. Never throws on a
/// non-negative entry; the flag reports it instead.
ConcavityDiagnostics concavity_diagnostics(const ModelParams& params, double t);

} // namespace mlsg

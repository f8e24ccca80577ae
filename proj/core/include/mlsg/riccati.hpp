#pragma once

#include <iosfwd>
#include <vector>

#include "mlsg/mesh.hpp"
#include "mlsg/model.hpp"

namespace mlsg {

struct RiccatiOptions {
    double blowup_threshold = 1e9;
};

/// Quadratic-coefficient pair (P2, N2) on a mesh, solved first; the
/// remaining four equations are linear/quadrature stages given this pair.
struct QuadraticStage {
    TimeMesh mesh;
    std::vector<double> p2, n2;
    bool existence_ok = true;
    /// Largest backward-from-terminal horizon tau such that the integration
    /// stayed below the blow-up threshold on [t_end - tau, t_end]. Equals
    /// t_end when existence_ok.
    double eta = 0.0;
};

struct LinearStage {
    std::vector<double> p1, n1;
};

struct ConstantStage {
    std::vector<double> p0, n0;
};

/// The six value-function coefficient trajectories on a uniform mesh:
/// V_s(t,x) = P2 x^2 + P1 x + P0, V_b(t,x) = N2 x^2 + N1 x + N0, with all
/// six vanishing at t = t_end. Nodes before t_end - eta hold NaN when the
/// quadratic stage blew up.
struct RiccatiSolution {
    TimeMesh mesh;
    std::vector<double> p2, p1, p0, n2, n1, n0;
    bool existence_ok = true;
    double eta = 0.0;
};

/// Stage 1: integrates the time-reversed quadratic system forward from the
/// origin with classic fixed-step RK4, then maps back to forward time. On
/// blow-up the trajectory is truncated, existence_ok is false and eta is
/// refined by bisecting the final step.
QuadraticStage solve_p2n2(const ModelParams& params, const TimeMesh& mesh,
                          const RiccatiOptions& opts = {});

/// Cross-check route for stage 1: RK4 directly on the backward equations in
/// forward time (negative step from t_end), using the unabbreviated
/// right-hand sides. Used by verification tests; no blow-up refinement.
QuadraticStage solve_p2n2_direct(const ModelParams& params, const TimeMesh& mesh,
                                 const RiccatiOptions& opts = {});

/// Stage 2: backward RK4 on the linear pair (P1, N1); stage-1 values at
/// half-steps come from cubic Hermite interpolation (node values plus
/// analytic node derivatives). Requires quad.existence_ok.
LinearStage solve_p1n1(const ModelParams& params, const TimeMesh& mesh,
                       const QuadraticStage& quad);

/// Stage 3: backward quadrature of the two constant-term equations, whose
/// right-hand sides contain no P0/N0.
ConstantStage solve_p0n0(const ModelParams& params, const TimeMesh& mesh,
                         const QuadraticStage& quad, const LinearStage& lin);

/// Runs the three stages and assembles the full solution. If stage 1 blows
/// up, the remaining stages are skipped and all trajectories except the
/// valid (P2, N2) suffix are NaN.
RiccatiSolution solve_riccati(const ModelParams& params, const TimeMesh& mesh,
                              const RiccatiOptions& opts = {});

/// Node-wise defect of each coefficient ODE: central finite difference of
/// the trajectory plus the analytic right-hand side. Endpoints are excluded
/// (NaN in the per-node vectors, ignored by the sup norms).
struct RiccatiResidual {
    std::vector<double> p2, p1, p0, n2, n1, n0; ///< per-node defects
    double sup_p2 = 0, sup_p1 = 0, sup_p0 = 0, sup_n2 = 0, sup_n1 = 0, sup_n0 = 0;
    double sup_all() const;
};

RiccatiResidual riccati_residual(const ModelParams& params,
                                 const RiccatiSolution& solution);

/// Pointwise defect of the two dynamic-programming PDEs under the quadratic
/// value ansatz: time derivatives from central differences of the
/// coefficient trajectories, space derivatives analytic. Evaluation times
/// snap to the nearest interior mesh node.
struct HjbResidual {
    std::vector<double> t;                    ///< snapped node times
    std::vector<double> x;                    ///< evaluation states
    std::vector<std::vector<double>> seller;  ///< [t index][x index]
    std::vector<std::vector<double>> buyer;
    double sup_seller = 0.0;
    double sup_buyer = 0.0;
};

HjbResidual hjb_residual(const ModelParams& params, const RiccatiSolution& solution,
                         const std::vector<double>& t_grid,
                         const std::vector<double>& x_grid);

/// CSV with header t,P2,P1,P0,N2,N1,N0 at full double precision.
void write_riccati_csv(std::ostream& os, const RiccatiSolution& solution);

/// Parses the CSV produced by write_riccati_csv. Throws std::runtime_error
/// with a line number on malformed input.
RiccatiSolution read_riccati_csv(std::istream& is);

} // namespace mlsg

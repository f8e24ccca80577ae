#include "mlsg/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mlsg/csv.hpp"

// The six coefficient ODEs close the quadratic value ansatz
//   V_s = P2 x^2 + P1 x + P0,   V_b = N2 x^2 + N1 x + N0
// over the equilibrium feedback maps. They are triangular: (P2, N2) is a
// coupled quadratic pair, (P1, N1) is linear given the pair, and (P0, N0)
// are plain integrals of known trajectories. All six vanish at t_end.
//
// Stage 1 is integrated as the time-reversed initial value problem from the
// origin (the form whose local existence is what the Picard-Lindelof
// argument guarantees); stages 2 and 3 are integrated backward in physical
// time with stage-1 values at RK4 half-steps supplied by cubic Hermite
// interpolation from node values and analytic node derivatives.

namespace mlsg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared bracket values of the unabbreviated right-hand sides.
struct Brackets {
    KSet k;
    double emrt, ert, dl2;
    double gp, lever_k2, beta_x, c0;
};

Brackets brackets_at(const ModelParams& params, double t) {
    Brackets b;
    b.k = k_constants(params, t);
    b.ert = std::exp(params.r * t);
    b.emrt = 1.0 / b.ert;
    const double dl = params.delta(t);
    b.dl2 = dl * dl;
    b.gp = params.gamma_p;
    b.lever_k2 = (1.0 + params.gamma_p / (2.0 * params.gamma_w)) * b.k.k2;
    b.beta_x = params.beta_x;
    b.c0 = params.c0;
    return b;
}

// F such that dP2/dt + F = 0 (and the N2 analogue).
void quad_rhs(const Brackets& b, double p2, double n2, double& f_p2, double& f_n2) {
    const KSet& k = b.k;
    const double a = 2.0 * k.k9 * p2 + 2.0 * k.k10 * n2 + k.k11;
    const double c1 = 2.0 * k.k5 * p2 + 2.0 * k.k6 * n2 + k.k7;
    const double d1 = 2.0 * k.k13 * p2 - 2.0 * b.gp * k.k2 * n2 + k.k14;
    const double f1 = 2.0 * k.k16 * p2 + 2.0 * b.lever_k2 * n2 + k.k17;
    f_p2 = 2.0 * p2 * a + 0.5 * b.emrt * c1 * d1 - b.ert * b.dl2 * p2 * p2;
    f_n2 = 2.0 * n2 * a + 0.5 * b.emrt * f1 * d1 - b.ert * b.dl2 * n2 * n2;
}

// F such that dP1/dt + F = 0 (and the N1 analogue), given (P2, N2).
void lin_rhs(const Brackets& b, double p1, double n1, double p2, double n2,
             double& f_p1, double& f_n1) {
    const KSet& k = b.k;
    const double a = 2.0 * k.k9 * p2 + 2.0 * k.k10 * n2 + k.k11;
    const double bb = k.k9 * (p1 + p2) + k.k10 * (n1 + n2) + k.k12;
    const double c1 = 2.0 * k.k5 * p2 + 2.0 * k.k6 * n2 + k.k7;
    const double c0v = k.k5 * (p1 + p2) + k.k6 * (n1 + n2) + k.k8 - b.c0;
    const double d1 = 2.0 * k.k13 * p2 - 2.0 * b.gp * k.k2 * n2 + k.k14;
    const double d0 = k.k13 * (p1 + p2) - b.gp * k.k2 * (n1 + n2) + k.k15;
    const double f1 = 2.0 * k.k16 * p2 + 2.0 * b.lever_k2 * n2 + k.k17;
    const double f0 = k.k16 * (p1 + p2) + b.lever_k2 * (n1 + n2) + k.k18;
    f_p1 = 2.0 * p2 * bb + p1 * a + p2 * (a + 2.0 * b.beta_x) +
           0.5 * b.emrt * (c1 * d0 + c0v * d1) - b.ert * b.dl2 * p2 * (p1 + p2);
    f_n1 = 2.0 * n2 * bb + n1 * a + n2 * (a + 2.0 * b.beta_x) +
           0.5 * b.emrt * (f1 * d0 + f0 * d1) - b.ert * b.dl2 * n2 * (n1 + n2);
}

// F such that dP0/dt + F = 0 (and the N0 analogue); no P0/N0 dependence.
void const_rhs(const Brackets& b, double p1, double n1, double p2, double n2,
               double& f_p0, double& f_n0) {
    const KSet& k = b.k;
    const double bb = k.k9 * (p1 + p2) + k.k10 * (n1 + n2) + k.k12;
    const double c0v = k.k5 * (p1 + p2) + k.k6 * (n1 + n2) + k.k8 - b.c0;
    const double d0 = k.k13 * (p1 + p2) - b.gp * k.k2 * (n1 + n2) + k.k15;
    const double f0 = k.k16 * (p1 + p2) + b.lever_k2 * (n1 + n2) + k.k18;
    const double sp = p1 + p2;
    const double sn = n1 + n2;
    f_p0 = sp * bb + 0.5 * b.emrt * c0v * d0 - 0.25 * b.ert * b.dl2 * sp * sp;
    f_n0 = sn * bb + 0.5 * b.emrt * f0 * d0 - 0.25 * b.ert * b.dl2 * sn * sn;
}

// Reversed-time quadratic system: dm/dtau = g(tau, m) with the coefficient
// sets evaluated at physical time t_end - tau.
void reversed_quad_rhs(const ModelParams& params, double t_end, double tau,
                       double m1, double m2, double& g1, double& g2) {
    const PhiPsiSet c = phi_psi(params, t_end - tau);
    g1 = c.phi1 * m1 * m1 + c.phi2 * m2 * m2 + c.phi3 * m1 * m2 + c.phi4 * m1 +
         c.phi5 * m2 + c.phi6;
    g2 = c.psi1 * m1 * m1 + c.psi2 * m2 * m2 + c.psi3 * m1 * m2 + c.psi4 * m1 +
         c.psi5 * m2 + c.psi6;
}

struct Pair {
    double a, b;
};

Pair rk4_reversed_step(const ModelParams& params, double t_end, double tau,
                       double h, Pair m) {
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    reversed_quad_rhs(params, t_end, tau, m.a, m.b, k1a, k1b);
    reversed_quad_rhs(params, t_end, tau + 0.5 * h, m.a + 0.5 * h * k1a,
                      m.b + 0.5 * h * k1b, k2a, k2b);
    reversed_quad_rhs(params, t_end, tau + 0.5 * h, m.a + 0.5 * h * k2a,
                      m.b + 0.5 * h * k2b, k3a, k3b);
    reversed_quad_rhs(params, t_end, tau + h, m.a + h * k3a, m.b + h * k3b, k4a,
                      k4b);
    return {m.a + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
            m.b + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)};
}

bool pair_ok(Pair m, double threshold) {
    return std::isfinite(m.a) && std::isfinite(m.b) && std::abs(m.a) <= threshold &&
           std::abs(m.b) <= threshold;
}

// Cubic Hermite midpoint from endpoint values and derivatives.
double hermite_mid(double y0, double y1, double d0, double d1, double h) {
    return 0.5 * (y0 + y1) + 0.125 * h * (d0 - d1);
}

void check_mesh_match(const TimeMesh& mesh, std::size_t n_values, const char* what) {
    if (n_values != static_cast<std::size_t>(mesh.node_count()))
        throw std::invalid_argument(std::string(what) + ": trajectory/mesh size mismatch");
}

} // namespace

QuadraticStage solve_p2n2(const ModelParams& params, const TimeMesh& mesh,
                          const RiccatiOptions& opts) {
    params.validate();
    mesh.validate();
    const int n = mesh.n_steps;
    const double h = mesh.step();
    const double t_end = mesh.t_end;

    QuadraticStage out;
    out.mesh = mesh;
    out.p2.assign(n + 1, kNaN);
    out.n2.assign(n + 1, kNaN);

    Pair m{0.0, 0.0};
    out.p2[n] = 0.0; // reversed origin is the terminal node in physical time
    out.n2[n] = 0.0;

    for (int k = 0; k < n; ++k) {
        const double tau = mesh.node(k);
        const Pair next = rk4_reversed_step(params, t_end, tau, h, m);
        if (!pair_ok(next, opts.blowup_threshold)) {
            // Refine the blow-up location within the final step.
            double lo = 0.0, hi = h;
            for (int iter = 0; iter < 60; ++iter) {
                const double s = 0.5 * (lo + hi);
                if (pair_ok(rk4_reversed_step(params, t_end, tau, s, m), opts.blowup_threshold))
                    lo = s;
                else
                    hi = s;
            }
            out.existence_ok = false;
            out.eta = tau + lo;
            return out;
        }
        m = next;
        out.p2[n - (k + 1)] = m.a;
        out.n2[n - (k + 1)] = m.b;
    }
    out.existence_ok = true;
    out.eta = t_end;
    return out;
}

QuadraticStage solve_p2n2_direct(const ModelParams& params, const TimeMesh& mesh,
                                 const RiccatiOptions& opts) {
    params.validate();
    mesh.validate();
    const int n = mesh.n_steps;
    const double h = mesh.step();

    QuadraticStage out;
    out.mesh = mesh;
    out.p2.assign(n + 1, kNaN);
    out.n2.assign(n + 1, kNaN);
    out.p2[n] = 0.0;
    out.n2[n] = 0.0;

    auto rhs = [&](double t, Pair y, double& da, double& db) {
        const Brackets b = brackets_at(params, t);
        double f1, f2;
        quad_rhs(b, y.a, y.b, f1, f2);
        da = -f1;
        db = -f2;
    };

    Pair y{0.0, 0.0};
    for (int k = n; k > 0; --k) {
        const double t1 = mesh.node(k);
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs(t1, y, k1a, k1b);
        rhs(t1 - 0.5 * h, {y.a - 0.5 * h * k1a, y.b - 0.5 * h * k1b}, k2a, k2b);
        rhs(t1 - 0.5 * h, {y.a - 0.5 * h * k2a, y.b - 0.5 * h * k2b}, k3a, k3b);
        rhs(t1 - h, {y.a - h * k3a, y.b - h * k3b}, k4a, k4b);
        y = {y.a - h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
             y.b - h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)};
        if (!pair_ok(y, opts.blowup_threshold)) {
            out.existence_ok = false;
            out.eta = mesh.t_end - t1; // coarse: last safe backward horizon
            return out;
        }
        out.p2[k - 1] = y.a;
        out.n2[k - 1] = y.b;
    }
    out.existence_ok = true;
    out.eta = mesh.t_end;
    return out;
}

LinearStage solve_p1n1(const ModelParams& params, const TimeMesh& mesh,
                       const QuadraticStage& quad) {
    params.validate();
    mesh.validate();
    if (!(quad.mesh == mesh))
        throw std::invalid_argument("solve_p1n1: quadratic stage solved on a different mesh");
    if (!quad.existence_ok)
        throw std::invalid_argument("solve_p1n1: quadratic stage did not reach t = 0");
    check_mesh_match(mesh, quad.p2.size(), "solve_p1n1");

    const int n = mesh.n_steps;
    const double h = mesh.step();

    // Node derivatives of the quadratic stage, then Hermite midpoints.
    std::vector<double> p2d(n + 1), n2d(n + 1), p2m(n), n2m(n);
    for (int k = 0; k <= n; ++k) {
        const Brackets b = brackets_at(params, mesh.node(k));
        double f1, f2;
        quad_rhs(b, quad.p2[k], quad.n2[k], f1, f2);
        p2d[k] = -f1;
        n2d[k] = -f2;
    }
    for (int k = 0; k < n; ++k) {
        p2m[k] = hermite_mid(quad.p2[k], quad.p2[k + 1], p2d[k], p2d[k + 1], h);
        n2m[k] = hermite_mid(quad.n2[k], quad.n2[k + 1], n2d[k], n2d[k + 1], h);
    }

    LinearStage out;
    out.p1.assign(n + 1, 0.0);
    out.n1.assign(n + 1, 0.0);

    Pair y{0.0, 0.0};
    for (int k = n; k > 0; --k) {
        const double t1 = mesh.node(k);
        const double t0 = mesh.node(k - 1);
        const Brackets b1 = brackets_at(params, t1);
        const Brackets bm = brackets_at(params, t1 - 0.5 * h);
        const Brackets b0 = brackets_at(params, t0);
        const double p2_1 = quad.p2[k], n2_1 = quad.n2[k];
        const double p2_m = p2m[k - 1], n2_m = n2m[k - 1];
        const double p2_0 = quad.p2[k - 1], n2_0 = quad.n2[k - 1];

        double f1, f2;
        lin_rhs(b1, y.a, y.b, p2_1, n2_1, f1, f2);
        const double k1a = -f1, k1b = -f2;
        lin_rhs(bm, y.a - 0.5 * h * k1a, y.b - 0.5 * h * k1b, p2_m, n2_m, f1, f2);
        const double k2a = -f1, k2b = -f2;
        lin_rhs(bm, y.a - 0.5 * h * k2a, y.b - 0.5 * h * k2b, p2_m, n2_m, f1, f2);
        const double k3a = -f1, k3b = -f2;
        lin_rhs(b0, y.a - h * k3a, y.b - h * k3b, p2_0, n2_0, f1, f2);
        const double k4a = -f1, k4b = -f2;

        y = {y.a - h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
             y.b - h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)};
        out.p1[k - 1] = y.a;
        out.n1[k - 1] = y.b;
    }
    return out;
}

ConstantStage solve_p0n0(const ModelParams& params, const TimeMesh& mesh,
                         const QuadraticStage& quad, const LinearStage& lin) {
    params.validate();
    mesh.validate();
    if (!(quad.mesh == mesh))
        throw std::invalid_argument("solve_p0n0: quadratic stage solved on a different mesh");
    if (!quad.existence_ok)
        throw std::invalid_argument("solve_p0n0: quadratic stage did not reach t = 0");
    check_mesh_match(mesh, quad.p2.size(), "solve_p0n0");
    check_mesh_match(mesh, lin.p1.size(), "solve_p0n0");

    const int n = mesh.n_steps;
    const double h = mesh.step();

    std::vector<double> p2d(n + 1), n2d(n + 1), p1d(n + 1), n1d(n + 1);
    for (int k = 0; k <= n; ++k) {
        const Brackets b = brackets_at(params, mesh.node(k));
        double f1, f2;
        quad_rhs(b, quad.p2[k], quad.n2[k], f1, f2);
        p2d[k] = -f1;
        n2d[k] = -f2;
        lin_rhs(b, lin.p1[k], lin.n1[k], quad.p2[k], quad.n2[k], f1, f2);
        p1d[k] = -f1;
        n1d[k] = -f2;
    }

    ConstantStage out;
    out.p0.assign(n + 1, 0.0);
    out.n0.assign(n + 1, 0.0);

    Pair y{0.0, 0.0};
    for (int k = n; k > 0; --k) {
        const double t1 = mesh.node(k);
        const double t0 = mesh.node(k - 1);
        const Brackets b1 = brackets_at(params, t1);
        const Brackets bm = brackets_at(params, t1 - 0.5 * h);
        const Brackets b0 = brackets_at(params, t0);
        const int i = k - 1;
        const double p2_m = hermite_mid(quad.p2[i], quad.p2[k], p2d[i], p2d[k], h);
        const double n2_m = hermite_mid(quad.n2[i], quad.n2[k], n2d[i], n2d[k], h);
        const double p1_m = hermite_mid(lin.p1[i], lin.p1[k], p1d[i], p1d[k], h);
        const double n1_m = hermite_mid(lin.n1[i], lin.n1[k], n1d[i], n1d[k], h);

        double f1, f2;
        const_rhs(b1, lin.p1[k], lin.n1[k], quad.p2[k], quad.n2[k], f1, f2);
        const double k1a = -f1, k1b = -f2;
        const_rhs(bm, p1_m, n1_m, p2_m, n2_m, f1, f2);
        const double k2a = -f1, k2b = -f2; // no P0/N0 dependence: k3 == k2
        const double k3a = k2a, k3b = k2b;
        const_rhs(b0, lin.p1[i], lin.n1[i], quad.p2[i], quad.n2[i], f1, f2);
        const double k4a = -f1, k4b = -f2;

        y = {y.a - h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
             y.b - h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)};
        out.p0[i] = y.a;
        out.n0[i] = y.b;
    }
    return out;
}

RiccatiSolution solve_riccati(const ModelParams& params, const TimeMesh& mesh,
                              const RiccatiOptions& opts) {
    QuadraticStage quad = solve_p2n2(params, mesh, opts);
    RiccatiSolution sol;
    sol.mesh = mesh;
    sol.existence_ok = quad.existence_ok;
    sol.eta = quad.eta;
    sol.p2 = std::move(quad.p2);
    sol.n2 = std::move(quad.n2);
    const std::size_t n_nodes = static_cast<std::size_t>(mesh.node_count());
    if (!sol.existence_ok) {
        sol.p1.assign(n_nodes, kNaN);
        sol.n1.assign(n_nodes, kNaN);
        sol.p0.assign(n_nodes, kNaN);
        sol.n0.assign(n_nodes, kNaN);
        return sol;
    }
    QuadraticStage quad_view;
    quad_view.mesh = mesh;
    quad_view.p2 = sol.p2;
    quad_view.n2 = sol.n2;
    quad_view.existence_ok = true;
    quad_view.eta = sol.eta;
    LinearStage lin = solve_p1n1(params, mesh, quad_view);
    ConstantStage cons = solve_p0n0(params, mesh, quad_view, lin);
    sol.p1 = std::move(lin.p1);
    sol.n1 = std::move(lin.n1);
    sol.p0 = std::move(cons.p0);
    sol.n0 = std::move(cons.n0);
    return sol;
}

double RiccatiResidual::sup_all() const {
    return std::max({sup_p2, sup_p1, sup_p0, sup_n2, sup_n1, sup_n0});
}

RiccatiResidual riccati_residual(const ModelParams& params,
                                 const RiccatiSolution& s) {
    params.validate();
    s.mesh.validate();
    const int n = s.mesh.n_steps;
    const double h = s.mesh.step();
    check_mesh_match(s.mesh, s.p2.size(), "riccati_residual");

    RiccatiResidual res;
    for (auto* v : {&res.p2, &res.p1, &res.p0, &res.n2, &res.n1, &res.n0})
        v->assign(n + 1, kNaN);

    auto central = [h](const std::vector<double>& y, int k) {
        return (y[k + 1] - y[k - 1]) / (2.0 * h);
    };

    for (int k = 1; k < n; ++k) {
        const Brackets b = brackets_at(params, s.mesh.node(k));
        double f_p2, f_n2, f_p1, f_n1, f_p0, f_n0;
        quad_rhs(b, s.p2[k], s.n2[k], f_p2, f_n2);
        lin_rhs(b, s.p1[k], s.n1[k], s.p2[k], s.n2[k], f_p1, f_n1);
        const_rhs(b, s.p1[k], s.n1[k], s.p2[k], s.n2[k], f_p0, f_n0);
        res.p2[k] = central(s.p2, k) + f_p2;
        res.n2[k] = central(s.n2, k) + f_n2;
        res.p1[k] = central(s.p1, k) + f_p1;
        res.n1[k] = central(s.n1, k) + f_n1;
        res.p0[k] = central(s.p0, k) + f_p0;
        res.n0[k] = central(s.n0, k) + f_n0;
        res.sup_p2 = std::max(res.sup_p2, std::abs(res.p2[k]));
        res.sup_n2 = std::max(res.sup_n2, std::abs(res.n2[k]));
        res.sup_p1 = std::max(res.sup_p1, std::abs(res.p1[k]));
        res.sup_n1 = std::max(res.sup_n1, std::abs(res.n1[k]));
        res.sup_p0 = std::max(res.sup_p0, std::abs(res.p0[k]));
        res.sup_n0 = std::max(res.sup_n0, std::abs(res.n0[k]));
    }
    return res;
}

HjbResidual hjb_residual(const ModelParams& params, const RiccatiSolution& s,
                         const std::vector<double>& t_grid,
                         const std::vector<double>& x_grid) {
    params.validate();
    s.mesh.validate();
    check_mesh_match(s.mesh, s.p2.size(), "hjb_residual");
    const int n = s.mesh.n_steps;
    const double h = s.mesh.step();

    HjbResidual out;
    out.x = x_grid;
    out.t.reserve(t_grid.size());
    out.seller.reserve(t_grid.size());
    out.buyer.reserve(t_grid.size());

    for (double t_req : t_grid) {
        int k = static_cast<int>(std::lround(t_req / h));
        k = std::clamp(k, 1, n - 1); // central differences need both neighbours
        const double t = s.mesh.node(k);
        const Brackets b = brackets_at(params, t);
        const KSet& K = b.k;
        const double dp2 = (s.p2[k + 1] - s.p2[k - 1]) / (2.0 * h);
        const double dp1 = (s.p1[k + 1] - s.p1[k - 1]) / (2.0 * h);
        const double dp0 = (s.p0[k + 1] - s.p0[k - 1]) / (2.0 * h);
        const double dn2 = (s.n2[k + 1] - s.n2[k - 1]) / (2.0 * h);
        const double dn1 = (s.n1[k + 1] - s.n1[k - 1]) / (2.0 * h);
        const double dn0 = (s.n0[k + 1] - s.n0[k - 1]) / (2.0 * h);

        std::vector<double> row_s(x_grid.size()), row_b(x_grid.size());
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            const double x = x_grid[j];
            const double vs_t = dp2 * x * x + dp1 * x + dp0;
            const double vb_t = dn2 * x * x + dn1 * x + dn0;
            const double ys = 2.0 * s.p2[k] * x + s.p1[k];
            const double yb = 2.0 * s.n2[k] * x + s.n1[k];
            const double as = 2.0 * s.p2[k];
            const double ab = 2.0 * s.n2[k];

            const double drift = K.k9 * ys + K.k10 * yb + 0.5 * K.k9 * as +
                                 0.5 * K.k10 * ab + K.k11 * x + K.k12;
            const double diff_arg = drift + 2.0 * params.beta_x * x;
            const double wholesale_net = K.k5 * ys + K.k6 * yb + 0.5 * K.k5 * as +
                                         0.5 * K.k6 * ab + K.k7 * x + K.k8 - b.c0;
            const double demand2 = K.k13 * ys - b.gp * K.k2 * yb + 0.5 * K.k13 * as -
                                   0.5 * b.gp * K.k2 * ab + K.k14 * x + K.k15;
            const double margin = K.k16 * ys + b.lever_k2 * yb + 0.5 * K.k16 * as +
                                  0.5 * b.lever_k2 * ab + K.k17 * x + K.k18;
            const double quart = b.ert * b.dl2 / 16.0;

            row_s[j] = vs_t + ys * drift + 0.5 * as * diff_arg +
                       0.5 * b.emrt * wholesale_net * demand2 -
                       quart * (2.0 * ys + as) * (2.0 * ys + as);
            row_b[j] = vb_t + yb * drift + 0.5 * ab * diff_arg +
                       0.5 * b.emrt * margin * demand2 -
                       quart * (2.0 * yb + ab) * (2.0 * yb + ab);
            out.sup_seller = std::max(out.sup_seller, std::abs(row_s[j]));
            out.sup_buyer = std::max(out.sup_buyer, std::abs(row_b[j]));
        }
        out.t.push_back(t);
        out.seller.push_back(std::move(row_s));
        out.buyer.push_back(std::move(row_b));
    }
    return out;
}

void write_riccati_csv(std::ostream& os, const RiccatiSolution& s) {
    os << "t,P2,P1,P0,N2,N1,N0\n";
    for (int k = 0; k < s.mesh.node_count(); ++k) {
        os << format_g17(s.mesh.node(k)) << ',' << format_g17(s.p2[k]) << ','
           << format_g17(s.p1[k]) << ',' << format_g17(s.p0[k]) << ','
           << format_g17(s.n2[k]) << ',' << format_g17(s.n1[k]) << ','
           << format_g17(s.n0[k]) << '\n';
    }
}

RiccatiSolution read_riccati_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line))
        throw std::runtime_error("riccati csv: empty input");
    ++line_no;
    if (line != "t,P2,P1,P0,N2,N1,N0")
        throw std::runtime_error("riccati csv line 1: unexpected header");

    RiccatiSolution s;
    std::vector<double> t;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw std::runtime_error("riccati csv line " + std::to_string(line_no) +
                                     ": expected 7 fields");
        t.push_back(parse_csv_double(fields[0], line_no));
        s.p2.push_back(parse_csv_double(fields[1], line_no));
        s.p1.push_back(parse_csv_double(fields[2], line_no));
        s.p0.push_back(parse_csv_double(fields[3], line_no));
        s.n2.push_back(parse_csv_double(fields[4], line_no));
        s.n1.push_back(parse_csv_double(fields[5], line_no));
        s.n0.push_back(parse_csv_double(fields[6], line_no));
    }
    if (t.size() < 11)
        throw std::runtime_error("riccati csv: fewer than 11 rows");
    s.mesh.t_end = t.back();
    s.mesh.n_steps = static_cast<int>(t.size()) - 1;
    s.mesh.validate();
    const double h = s.mesh.step();
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (std::abs(t[k] - s.mesh.node(static_cast<int>(k))) > 1e-9 * (1.0 + s.mesh.t_end))
            throw std::runtime_error("riccati csv line " + std::to_string(k + 2) +
                                     ": non-uniform time column (step " +
                                     std::to_string(h) + ")");
    }
    s.existence_ok = true;
    s.eta = s.mesh.t_end;
    for (double v : s.p2)
        if (!std::isfinite(v)) s.existence_ok = false;
    return s;
}

} // namespace mlsg

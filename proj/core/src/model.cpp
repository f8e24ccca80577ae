#include "mlsg/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mlsg {

namespace {

void require(bool cond, const char* message) {
    if (!cond) throw std::invalid_argument(message);
}

void check_curve(const TimeCurve& curve, double horizon, const char* name) {
    if (curve.knots().size() < 2)
        throw std::invalid_argument(std::string("ModelParams: ") + name +
                                    " curve is empty");
    if (curve.front_time() != 0.0 || curve.back_time() != horizon)
        throw std::invalid_argument(std::string("ModelParams: ") + name +
                                    " curve must span [0, horizon]");
    if (!curve.positive_everywhere())
        throw std::invalid_argument(std::string("ModelParams: ") + name +
                                    " must be strictly positive");
}

void check_time(const ModelParams& params, double t) {
    const double slack = 1e-12 * (1.0 + params.horizon);
    if (!(t >= -slack && t <= params.horizon + slack))
        throw std::domain_error("time outside [0, horizon]");
}

} // namespace

void ModelParams::validate() const {
    require(horizon > 0.0, "ModelParams: horizon must be > 0");
    check_curve(beta_p, horizon, "beta_p");
    check_curve(beta_w, horizon, "beta_w");
    check_curve(delta, horizon, "delta");
    require(beta_x > 0.0, "ModelParams: beta_x must be > 0");
    require(gamma_p > 0.0, "ModelParams: gamma_p must be > 0");
    require(gamma_w > 0.0, "ModelParams: gamma_w must be > 0");
    // gamma_x = 0 is admitted: it only ever multiplies, and the degenerate
    // state-independent game it induces is a useful exact test case.
    require(gamma_x >= 0.0, "ModelParams: gamma_x must be >= 0");
    require(alpha > 0.0, "ModelParams: alpha must be > 0");
    require(c0 >= 0.0, "ModelParams: c0 must be >= 0");
    require(r >= 0.0, "ModelParams: r must be >= 0");
    require(gamma_p * (2.0 * gamma_w + gamma_p) > 0.0,
            "ModelParams: gamma_p (2 gamma_w + gamma_p) must be > 0");
}

ModelParams baseline_params() {
    ModelParams p;
    p.horizon = 1.0;
    p.beta_p = TimeCurve::constant(0.1, 0.0, p.horizon);
    p.beta_w = TimeCurve::constant(0.2, 0.0, p.horizon);
    p.delta = TimeCurve::constant(0.1, 0.0, p.horizon);
    p.beta_x = 0.1;
    p.gamma_p = 0.1;
    p.gamma_w = 1e-4;
    p.gamma_x = 0.1;
    p.alpha = 1.0;
    p.c0 = 1.0;
    p.r = 0.05;
    return p;
}

KSet k_constants(const ModelParams& params, double t) {
    check_time(params, t);
    const double ert = std::exp(params.r * t);
    const double bp = params.beta_p(t);
    const double bw = params.beta_w(t);
    const double dl = params.delta(t);
    const double gp = params.gamma_p;
    const double gw = params.gamma_w;
    const double gx = params.gamma_x;
    const double den = gp * (2.0 * gw + gp);

    KSet k{};
    k.k1 = -ert * gw * bw / den;
    k.k2 = ert * (2.0 * gw * bp - bw * gp) / den;
    k.k3 = (gw + gp) * gx / den;
    k.k4 = ((gw + gp) * params.alpha - params.c0 * gw * gw) / den;
    k.k5 = (ert * bw - gp * k.k1) / (2.0 * gw);
    k.k6 = -gp * k.k2 / (2.0 * gw);
    k.k7 = (gx - gp * k.k3) / (2.0 * gw);
    k.k8 = (params.alpha + params.c0 * gw - gp * k.k4) / (2.0 * gw);
    k.k9 = bp * k.k1 - gp * k.k1 * bw / (2.0 * gw) + ert * bw * bw / (2.0 * gw) +
           ert * dl * dl / 2.0;
    k.k10 = bp * k.k2 - gp * k.k2 * bw / (2.0 * gw) + ert * dl * dl / 2.0;
    k.k11 = bp * k.k3 - gp * k.k3 * bw / (2.0 * gw) + gx * bw / (2.0 * gw) -
            params.beta_x;
    k.k12 = bp * k.k4 - gp * k.k4 * bw / (2.0 * gw) +
            bw * (params.alpha + params.c0 * gw) / (2.0 * gw);
    k.k13 = -gp * k.k1 - ert * bw;
    k.k14 = gx - gp * k.k3;
    k.k15 = params.alpha - params.c0 * gw - gp * k.k4;
    const double lever = 1.0 + gp / (2.0 * gw);
    k.k16 = lever * k.k1 - ert * bw / (2.0 * gw);
    k.k17 = lever * k.k3 - gx / (2.0 * gw);
    k.k18 = lever * k.k4 - (params.alpha + params.c0 * gw) / (2.0 * gw);
    return k;
}

PhiPsiSet phi_psi(const ModelParams& params, double t) {
    const KSet k = k_constants(params, t);
    const double ert = std::exp(params.r * t);
    const double emrt = std::exp(-params.r * t);
    const double dl = params.delta(t);
    const double dl2 = dl * dl;
    const double gp = params.gamma_p;
    const double lever_k2 = (1.0 + gp / (2.0 * params.gamma_w)) * k.k2;

    PhiPsiSet c{};
    c.phi1 = 4.0 * k.k9 + 2.0 * emrt * k.k5 * k.k13 - ert * dl2;
    c.phi2 = -2.0 * emrt * gp * k.k2 * k.k6;
    c.phi3 = 4.0 * k.k10 - 2.0 * emrt * gp * k.k2 * k.k5 + 2.0 * emrt * k.k6 * k.k13;
    c.phi4 = 2.0 * k.k11 + emrt * k.k5 * k.k14 + emrt * k.k7 * k.k13;
    c.phi5 = emrt * k.k6 * k.k14 - emrt * gp * k.k2 * k.k7;
    c.phi6 = 0.5 * emrt * k.k7 * k.k14;
    c.psi1 = 2.0 * emrt * k.k13 * k.k16;
    c.psi2 = 4.0 * k.k10 - 2.0 * emrt * gp * k.k2 * lever_k2 - ert * dl2;
    c.psi3 = 4.0 * k.k9 - 2.0 * emrt * gp * k.k2 * k.k16 + 2.0 * emrt * lever_k2 * k.k13;
    c.psi4 = emrt * k.k14 * k.k16 + emrt * k.k13 * k.k17;
    c.psi5 = 2.0 * k.k11 + emrt * lever_k2 * k.k14 - emrt * gp * k.k2 * k.k17;
    c.psi6 = 0.5 * emrt * k.k14 * k.k17;
    return c;
}

ConcavityDiagnostics concavity_diagnostics(const ModelParams& params, double t) {
    check_time(params, t);
    const double emrt = std::exp(-params.r * t);
    ConcavityDiagnostics d{};
    d.seller_wholesale = -2.0 * emrt * params.gamma_w;
    d.seller_innovation = -2.0 * emrt;
    // After substituting the wholesale response, the retail-price quadratic
    // picks up the response slope -gamma_p / (2 gamma_w).
    d.buyer_retail = -emrt * params.gamma_p * (1.0 + params.gamma_p / (2.0 * params.gamma_w));
    d.buyer_innovation = -2.0 * emrt;
    d.all_strictly_negative = d.seller_wholesale < 0.0 && d.seller_innovation < 0.0 &&
                              d.buyer_retail < 0.0 && d.buyer_innovation < 0.0;
    return d;
}

} // namespace mlsg

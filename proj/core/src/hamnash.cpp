#include "mlsg/hamnash.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

// Numeric reproduction of the two-layer static Nash construction at the
// Hamiltonian level. Each Hamiltonian is exactly quadratic in each own
// control, so the best response is the parabola vertex; the vertex is read
// off three-point finite-difference probes of the literal Hamiltonian
// evaluation, which keeps this path independent of the closed-form
// coefficient algebra it is used to cross-check.

namespace mlsg {

namespace {

void check_point(const ModelParams& params, const HamiltonianPoint& pt) {
    params.validate();
    const double slack = 1e-12 * (1.0 + params.horizon);
    if (pt.t < -slack || pt.t > params.horizon + slack)
        throw std::domain_error("HamiltonianPoint: t outside [0, horizon]");
}

double quad_vertex(const std::function<double(double)>& f, double center,
                   double probe) {
    // The objective is exactly quadratic, so any probe width is unbiased;
    // widening it with the iterate keeps the curvature difference well above
    // rounding when the vertex sits at large control values.
    const double h = std::max(probe, std::abs(center) / 16.0);
    const double f0 = f(center);
    const double fp = f(center + h);
    const double fm = f(center - h);
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * f0 + fm) / (h * h);
    if (!(d2 < 0.0))
        throw std::runtime_error(
            "best response: objective is not strictly concave in the control");
    return center - d1 / d2;
}

} // namespace

HamiltonianPair hamiltonian_values(const ModelParams& params,
                                   const HamiltonianPoint& pt, double i_s,
                                   double w, double p, double i_b) {
    check_point(params, pt);
    const double bp = params.beta_p(pt.t);
    const double bw = params.beta_w(pt.t);
    const double dl = params.delta(pt.t);
    const double emrt = std::exp(-params.r * pt.t);

    const double drift = bp * p + bw * w - params.beta_x * pt.x + dl * (i_s + i_b);
    const double diff_arg = bp * p + bw * w + params.beta_x * pt.x + dl * (i_s + i_b);
    const double demand = params.alpha - params.gamma_p * p - params.gamma_w * w +
                          params.gamma_x * pt.x;

    HamiltonianPair h;
    h.h_s = pt.y1 * drift + 0.5 * diff_arg * pt.a1 +
            emrt * ((w - params.c0) * demand - i_s * i_s);
    h.h_b = pt.y2 * drift + 0.5 * diff_arg * pt.a2 +
            emrt * ((p - w) * demand - i_b * i_b);
    return h;
}

FollowerResult follower_nash_numeric(const ModelParams& params,
                                     const HamiltonianPoint& pt, double i_s,
                                     double p, const NashOptions& opts) {
    check_point(params, pt);
    FollowerResult res;
    double w = 0.0, i_b = 0.0;
    double damp = 1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double w_best = quad_vertex(
            [&](double cand) {
                return hamiltonian_values(params, pt, i_s, cand, p, i_b).h_s;
            },
            w, opts.probe);
        const double ib_best = quad_vertex(
            [&](double cand) {
                return hamiltonian_values(params, pt, i_s, w, p, cand).h_b;
            },
            i_b, opts.probe);
        const double w_next = w + damp * (w_best - w);
        const double ib_next = i_b + damp * (ib_best - i_b);
        const double err = std::max(std::abs(w_next - w), std::abs(ib_next - i_b));
        const double scale = 1.0 + std::abs(w_next) + std::abs(ib_next);
        res.errors.push_back(err);
        w = w_next;
        i_b = ib_next;
        ++res.iterations;
        if (err <= opts.tolerance * scale) {
            res.w = w;
            res.i_b = i_b;
            return res;
        }
        if (res.errors.size() >= 2 && err > res.errors[res.errors.size() - 2])
            damp = 0.5; // oscillation guard
    }
    throw std::runtime_error("follower_nash_numeric: no convergence within iteration cap");
}

LeaderResult leader_nash_numeric(const ModelParams& params,
                                 const HamiltonianPoint& pt,
                                 const NashOptions& opts, double i_s_init,
                                 double p_init) {
    check_point(params, pt);
    LeaderResult res;
    double i_s = i_s_init, p = p_init;
    double damp = 1.0;

    const auto seller_value = [&](double i_s_cand, double p_fixed) {
        const FollowerResult f = follower_nash_numeric(params, pt, i_s_cand, p_fixed, opts);
        return hamiltonian_values(params, pt, i_s_cand, f.w, p_fixed, f.i_b).h_s;
    };
    const auto buyer_value = [&](double p_cand, double i_s_fixed) {
        const FollowerResult f = follower_nash_numeric(params, pt, i_s_fixed, p_cand, opts);
        return hamiltonian_values(params, pt, i_s_fixed, f.w, p_cand, f.i_b).h_b;
    };

    for (int it = 0; it < opts.max_iterations; ++it) {
        const double is_best =
            quad_vertex([&](double cand) { return seller_value(cand, p); }, i_s, opts.probe);
        const double p_best =
            quad_vertex([&](double cand) { return buyer_value(cand, i_s); }, p, opts.probe);
        const double is_next = i_s + damp * (is_best - i_s);
        const double p_next = p + damp * (p_best - p);
        const double err = std::max(std::abs(is_next - i_s), std::abs(p_next - p));
        const double scale = 1.0 + std::abs(is_next) + std::abs(p_next);
        res.errors.push_back(err);
        i_s = is_next;
        p = p_next;
        ++res.iterations;
        if (err <= opts.tolerance * scale) {
            res.i_s = i_s;
            res.p = p;
            const FollowerResult f = follower_nash_numeric(params, pt, i_s, p, opts);
            res.w = f.w;
            res.i_b = f.i_b;
            for (std::size_t i = 2; i < res.errors.size(); ++i)
                if (res.errors[i] > res.errors[i - 1]) res.monotone_after_two = false;
            return res;
        }
        if (res.errors.size() >= 2 && err > res.errors[res.errors.size() - 2])
            damp = 0.5;
    }
    throw std::runtime_error("leader_nash_numeric: no convergence within iteration cap");
}

namespace gamma_maps {

double wholesale(const ModelParams& params, const HamiltonianPoint& pt, double p) {
    const double ert = std::exp(params.r * pt.t);
    const double bw = params.beta_w(pt.t);
    return (ert * (bw * pt.y1 + 0.5 * bw * pt.a1) + params.alpha -
            params.gamma_p * p + params.gamma_x * pt.x + params.c0 * params.gamma_w) /
           (2.0 * params.gamma_w);
}

double buyer_innovation(const ModelParams& params, const HamiltonianPoint& pt) {
    return std::exp(params.r * pt.t) * params.delta(pt.t) * (2.0 * pt.y2 + pt.a2) / 4.0;
}

double seller_innovation(const ModelParams& params, const HamiltonianPoint& pt) {
    return std::exp(params.r * pt.t) * params.delta(pt.t) * (2.0 * pt.y1 + pt.a1) / 4.0;
}

double retail(const ModelParams& params, const HamiltonianPoint& pt) {
    const KSet k = k_constants(params, pt.t);
    return k.k1 * pt.y1 + 0.5 * k.k1 * pt.a1 + k.k2 * pt.y2 + 0.5 * k.k2 * pt.a2 +
           k.k3 * pt.x + k.k4;
}

double wholesale_composed(const ModelParams& params, const HamiltonianPoint& pt) {
    const KSet k = k_constants(params, pt.t);
    return k.k5 * pt.y1 + 0.5 * k.k5 * pt.a1 + k.k6 * pt.y2 + 0.5 * k.k6 * pt.a2 +
           k.k7 * pt.x + k.k8;
}

double buyer_innovation_composed(const ModelParams& params,
                                 const HamiltonianPoint& pt) {
    const double ert_dl = std::exp(params.r * pt.t) * params.delta(pt.t);
    return 0.5 * ert_dl * pt.y2 + 0.25 * ert_dl * pt.a2;
}

} // namespace gamma_maps

} // namespace mlsg

#include "mlsg/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mlsg/csv.hpp"

namespace mlsg {

namespace {

struct MeshLookup {
    int lo;
    double u; // interpolation weight toward lo+1
};

MeshLookup locate(const TimeMesh& mesh, double t) {
    const double slack = 1e-12 * (1.0 + mesh.t_end);
    if (t < -slack || t > mesh.t_end + slack)
        throw std::domain_error("strategy evaluation outside [0, t_end]");
    const double pos = std::clamp(t / mesh.step(), 0.0, double(mesh.n_steps));
    int lo = static_cast<int>(pos);
    if (lo >= mesh.n_steps) lo = mesh.n_steps - 1;
    return {lo, pos - lo};
}

double lerp(const std::vector<double>& y, const MeshLookup& at) {
    return y[at.lo] + at.u * (y[at.lo + 1] - y[at.lo]);
}

} // namespace

StrategyCoefficients strategy_coefficients(const ModelParams& params,
                                           const RiccatiSolution& s) {
    params.validate();
    if (!s.existence_ok)
        throw std::invalid_argument("strategy_coefficients: solution is truncated (blow-up)");
    const int nodes = s.mesh.node_count();
    if (s.p2.size() != static_cast<std::size_t>(nodes) || s.p1.size() != s.p2.size() ||
        s.n2.size() != s.p2.size() || s.n1.size() != s.p2.size())
        throw std::invalid_argument("strategy_coefficients: incomplete solution");

    StrategyCoefficients c;
    c.mesh = s.mesh;
    for (auto* v : {&c.w_x, &c.w_0, &c.p_x, &c.p_0, &c.i_sx, &c.i_s0, &c.i_bx, &c.i_b0})
        v->resize(nodes);

    for (int k = 0; k < nodes; ++k) {
        const double t = s.mesh.node(k);
        const KSet K = k_constants(params, t);
        const double ert_dl = std::exp(params.r * t) * params.delta(t);
        const double sp = s.p1[k] + s.p2[k];
        const double sn = s.n1[k] + s.n2[k];
        c.w_x[k] = 2.0 * K.k5 * s.p2[k] + 2.0 * K.k6 * s.n2[k] + K.k7;
        c.w_0[k] = K.k5 * sp + K.k6 * sn + K.k8;
        c.p_x[k] = 2.0 * K.k1 * s.p2[k] + 2.0 * K.k2 * s.n2[k] + K.k3;
        c.p_0[k] = K.k1 * sp + K.k2 * sn + K.k4;
        c.i_sx[k] = ert_dl * s.p2[k];
        c.i_s0[k] = 0.5 * ert_dl * sp;
        c.i_bx[k] = ert_dl * s.n2[k];
        c.i_b0[k] = 0.5 * ert_dl * sn;
    }
    return c;
}

Controls evaluate_strategies_unclamped(const StrategyCoefficients& c, double t,
                                       double x) {
    const MeshLookup at = locate(c.mesh, t);
    Controls out;
    out.w = lerp(c.w_x, at) * x + lerp(c.w_0, at);
    out.i_s = lerp(c.i_sx, at) * x + lerp(c.i_s0, at);
    out.p = lerp(c.p_x, at) * x + lerp(c.p_0, at);
    out.i_b = lerp(c.i_bx, at) * x + lerp(c.i_b0, at);
    return out;
}

Controls evaluate_strategies(const StrategyCoefficients& c, double t, double x) {
    Controls out = evaluate_strategies_unclamped(c, t, x);
    out.w = std::max(out.w, 0.0);
    out.i_s = std::max(out.i_s, 0.0);
    out.p = std::max(out.p, 0.0);
    out.i_b = std::max(out.i_b, 0.0);
    return out;
}

ValuePair value_functions(const RiccatiSolution& s, double t, double x) {
    const MeshLookup at = locate(s.mesh, t);
    ValuePair v;
    v.v_s = lerp(s.p2, at) * x * x + lerp(s.p1, at) * x + lerp(s.p0, at);
    v.v_b = lerp(s.n2, at) * x * x + lerp(s.n1, at) * x + lerp(s.n0, at);
    return v;
}

void write_strategy_csv(std::ostream& os, const StrategyCoefficients& c) {
    os << "t,w_x,w_0,p_x,p_0,I_sx,I_s0,I_bx,I_b0\n";
    for (int k = 0; k < c.mesh.node_count(); ++k) {
        os << format_g17(c.mesh.node(k)) << ',' << format_g17(c.w_x[k]) << ','
           << format_g17(c.w_0[k]) << ',' << format_g17(c.p_x[k]) << ','
           << format_g17(c.p_0[k]) << ',' << format_g17(c.i_sx[k]) << ','
           << format_g17(c.i_s0[k]) << ',' << format_g17(c.i_bx[k]) << ','
           << format_g17(c.i_b0[k]) << '\n';
    }
}

} // namespace mlsg

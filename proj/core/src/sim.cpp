#include "mlsg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "mlsg/csv.hpp"

namespace mlsg {

namespace {

// --- deterministic per-path noise ---------------------------------------
//
// Each path owns an mt19937_64 stream seeded from (seed, path index) via a
// stateless splitmix mix, so results do not depend on how paths are split
// across workers. Gaussians come from a hand-rolled Box-Muller transform:
// std::normal_distribution is implementation-defined and would break the
// byte-stability contract of the artifacts.

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t path) {
    return mix64(mix64(seed) ^ mix64(path * 0x9e3779b97f4a7c15ULL + 1));
}

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mag * std::cos(ang);
    }

private:
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

int worker_count(std::int64_t n_paths) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("MLSG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return static_cast<int>(std::min<std::int64_t>(hw, std::max<std::int64_t>(n_paths, 1)));
}

// Per-step constants shared by all paths: interpolated strategy
// coefficients, curve values and discount factors at the left endpoints.
struct StepTable {
    std::vector<double> w_x, w_0, is_x, is_0, p_x, p_0, ib_x, ib_0;
    std::vector<double> resp_ax, resp_b; // wholesale response vs played retail price
    std::vector<double> bp, bw, dl, emrt, t;
    double dt = 0.0, sqrt_dt = 0.0;
};

double lerp_at(const StrategyCoefficients& c, const std::vector<double>& y, double t) {
    const double pos = std::clamp(t / c.mesh.step(), 0.0, double(c.mesh.n_steps));
    int lo = static_cast<int>(pos);
    if (lo >= c.mesh.n_steps) lo = c.mesh.n_steps - 1;
    return y[lo] + (pos - lo) * (y[lo + 1] - y[lo]);
}

struct EngineSetup {
    const ModelParams* params = nullptr;
    StepTable table;
    std::optional<Perturbation> pert;
    bool wholesale_responds = false; // seller re-solves w against the played p
    double resp_p_slope = 0.0;       // gamma_p / (2 gamma_w)
    SimConfig cfg;
};

StepTable build_table(const ModelParams& params, const StrategyCoefficients& coeffs,
                      int n_steps, const std::vector<double>* resp_ax_nodes,
                      const std::vector<double>* resp_b_nodes) {
    StepTable tb;
    const double t_end = coeffs.mesh.t_end;
    tb.dt = t_end / n_steps;
    tb.sqrt_dt = std::sqrt(tb.dt);
    const int n = n_steps;
    auto reserve = [&](std::vector<double>& v) { v.resize(n); };
    for (auto* v : {&tb.w_x, &tb.w_0, &tb.is_x, &tb.is_0, &tb.p_x, &tb.p_0, &tb.ib_x,
                    &tb.ib_0, &tb.bp, &tb.bw, &tb.dl, &tb.emrt, &tb.t})
        reserve(*v);
    if (resp_ax_nodes) {
        reserve(tb.resp_ax);
        reserve(tb.resp_b);
    }
    for (int k = 0; k < n; ++k) {
        const double t = t_end * (static_cast<double>(k) / n);
        tb.t[k] = t;
        tb.w_x[k] = lerp_at(coeffs, coeffs.w_x, t);
        tb.w_0[k] = lerp_at(coeffs, coeffs.w_0, t);
        tb.is_x[k] = lerp_at(coeffs, coeffs.i_sx, t);
        tb.is_0[k] = lerp_at(coeffs, coeffs.i_s0, t);
        tb.p_x[k] = lerp_at(coeffs, coeffs.p_x, t);
        tb.p_0[k] = lerp_at(coeffs, coeffs.p_0, t);
        tb.ib_x[k] = lerp_at(coeffs, coeffs.i_bx, t);
        tb.ib_0[k] = lerp_at(coeffs, coeffs.i_b0, t);
        tb.bp[k] = params.beta_p(t);
        tb.bw[k] = params.beta_w(t);
        tb.dl[k] = params.delta(t);
        tb.emrt[k] = std::exp(-params.r * t);
        if (resp_ax_nodes) {
            tb.resp_ax[k] = lerp_at(coeffs, *resp_ax_nodes, t);
            tb.resp_b[k] = lerp_at(coeffs, *resp_b_nodes, t);
        }
    }
    return tb;
}

struct StepControls {
    double w, i_s, p, i_b, demand;
};

StepControls controls_for_step(const EngineSetup& e, int k, double x) {
    const StepTable& tb = e.table;
    double w = tb.w_x[k] * x + tb.w_0[k];
    double i_s = tb.is_x[k] * x + tb.is_0[k];
    double p = tb.p_x[k] * x + tb.p_0[k];
    double i_b = tb.ib_x[k] * x + tb.ib_0[k];

    if (e.pert) {
        const Perturbation& q = *e.pert;
        const bool seller = q.player == Perturbation::Player::seller;
        const bool hit_leader =
            q.target == Perturbation::Target::leader || q.target == Perturbation::Target::pair;
        const bool hit_follower =
            q.target == Perturbation::Target::follower || q.target == Perturbation::Target::pair;
        if (seller) {
            if (hit_leader) i_s = q.factor * i_s + q.offset;
            if (hit_follower) w = q.factor * w + q.offset;
        } else {
            if (hit_leader) p = q.factor * p + q.offset;
            if (hit_follower) i_b = q.factor * i_b + q.offset;
        }
    }
    p = std::max(p, 0.0);
    if (e.wholesale_responds)
        w = tb.resp_ax[k] * x + tb.resp_b[k] - e.resp_p_slope * p;
    w = std::max(w, 0.0);
    i_s = std::max(i_s, 0.0);
    i_b = std::max(i_b, 0.0);

    const ModelParams& m = *e.params;
    const double demand = m.alpha - m.gamma_p * p - m.gamma_w * w + m.gamma_x * x;
    return {w, i_s, p, i_b, demand};
}

struct RawSim {
    std::vector<double> j_s, j_b; // per path; NaN when excluded
    std::int64_t clamped_steps = 0;
    std::int64_t negative_steps = 0;
    std::int64_t excluded = 0;
};

RawSim run_engine(const EngineSetup& e, std::vector<PathRecord>* records,
                  int max_records) {
    const SimConfig& cfg = e.cfg;
    const ModelParams& m = *e.params;
    const StepTable& tb = e.table;
    const int n_steps = cfg.n_steps;
    const std::int64_t n_paths = cfg.n_paths;

    RawSim raw;
    raw.j_s.assign(static_cast<std::size_t>(n_paths), 0.0);
    raw.j_b.assign(static_cast<std::size_t>(n_paths), 0.0);

    const std::int64_t n_rec =
        records ? std::min<std::int64_t>(n_paths, max_records) : 0;
    if (records) records->assign(static_cast<std::size_t>(n_rec), PathRecord{});

    const int workers = worker_count(n_paths);
    std::vector<std::int64_t> clamped(workers, 0), negative(workers, 0), excluded(workers, 0);

    auto run_range = [&](int widx, std::int64_t begin, std::int64_t end) {
        for (std::int64_t pi = begin; pi < end; ++pi) {
            GaussianStream rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(pi)));
            PathRecord* rec = (pi < n_rec) ? &(*records)[static_cast<std::size_t>(pi)] : nullptr;
            double x = cfg.x0;
            double js = 0.0, jb = 0.0;
            bool bad = false;
            for (int k = 0; k < n_steps; ++k) {
                const StepControls c = controls_for_step(e, k, x);
                if (rec) {
                    rec->t.push_back(tb.t[k]);
                    rec->x.push_back(x);
                    rec->w.push_back(c.w);
                    rec->i_s.push_back(c.i_s);
                    rec->p.push_back(c.p);
                    rec->i_b.push_back(c.i_b);
                    rec->d.push_back(c.demand);
                }
                if (x < 0.0) ++negative[widx];
                js += tb.emrt[k] * ((c.w - m.c0) * c.demand - c.i_s * c.i_s) * tb.dt;
                jb += tb.emrt[k] * ((c.p - c.w) * c.demand - c.i_b * c.i_b) * tb.dt;
                const double drift = tb.bp[k] * c.p + tb.bw[k] * c.w - m.beta_x * x +
                                     tb.dl[k] * (c.i_s + c.i_b);
                double diff_arg = drift + 2.0 * m.beta_x * x;
                if (diff_arg < 0.0) {
                    ++clamped[widx];
                    diff_arg = 0.0;
                }
                const double z = rng.next(); // always consumed: keeps streams aligned
                x += drift * tb.dt + cfg.sigma_scale * std::sqrt(diff_arg) * tb.sqrt_dt * z;
                if (!std::isfinite(x)) {
                    bad = true;
                    break;
                }
            }
            if (bad || !std::isfinite(js) || !std::isfinite(jb)) {
                ++excluded[widx];
                raw.j_s[static_cast<std::size_t>(pi)] = std::numeric_limits<double>::quiet_NaN();
                raw.j_b[static_cast<std::size_t>(pi)] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            raw.j_s[static_cast<std::size_t>(pi)] = js;
            raw.j_b[static_cast<std::size_t>(pi)] = jb;
        }
    };

    if (workers == 1) {
        run_range(0, 0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const std::int64_t chunk = (n_paths + workers - 1) / workers;
        for (int widx = 0; widx < workers; ++widx) {
            const std::int64_t begin = widx * chunk;
            const std::int64_t end = std::min<std::int64_t>(begin + chunk, n_paths);
            if (begin >= end) break;
            pool.emplace_back(run_range, widx, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    for (int widx = 0; widx < workers; ++widx) {
        raw.clamped_steps += clamped[widx];
        raw.negative_steps += negative[widx];
        raw.excluded += excluded[widx];
    }
    return raw;
}

SimResult summarize(const RawSim& raw, const SimConfig& cfg) {
    const std::int64_t n_paths = cfg.n_paths;
    if (raw.excluded * 100 > n_paths)
        throw std::runtime_error("simulate: more than 1% of paths hit a non-finite state (" +
                                 std::to_string(raw.excluded) + " of " +
                                 std::to_string(n_paths) + ")");
    const std::int64_t n_eff = n_paths - raw.excluded;
    double sum_s = 0.0, sum_b = 0.0;
    for (std::int64_t i = 0; i < n_paths; ++i) {
        if (!std::isfinite(raw.j_s[static_cast<std::size_t>(i)])) continue;
        sum_s += raw.j_s[static_cast<std::size_t>(i)];
        sum_b += raw.j_b[static_cast<std::size_t>(i)];
    }
    SimResult res;
    res.config = cfg;
    res.excluded_paths = raw.excluded;
    res.j_s_mean = sum_s / static_cast<double>(n_eff);
    res.j_b_mean = sum_b / static_cast<double>(n_eff);
    double ss_s = 0.0, ss_b = 0.0;
    for (std::int64_t i = 0; i < n_paths; ++i) {
        if (!std::isfinite(raw.j_s[static_cast<std::size_t>(i)])) continue;
        const double ds = raw.j_s[static_cast<std::size_t>(i)] - res.j_s_mean;
        const double db = raw.j_b[static_cast<std::size_t>(i)] - res.j_b_mean;
        ss_s += ds * ds;
        ss_b += db * db;
    }
    if (n_eff > 1) {
        res.j_s_se = std::sqrt(ss_s / (static_cast<double>(n_eff) * (n_eff - 1)));
        res.j_b_se = std::sqrt(ss_b / (static_cast<double>(n_eff) * (n_eff - 1)));
    }
    const double pairs = static_cast<double>(n_eff) * cfg.n_steps;
    res.clamp_fraction = pairs > 0 ? raw.clamped_steps / pairs : 0.0;
    res.negative_x_fraction = pairs > 0 ? raw.negative_steps / pairs : 0.0;
    return res;
}

EngineSetup make_setup(const ModelParams& params, const StrategyCoefficients& coeffs,
                       const SimConfig& cfg) {
    params.validate();
    cfg.validate();
    if (coeffs.mesh.t_end != params.horizon)
        throw std::invalid_argument("simulate: coefficients do not span [0, horizon]");
    EngineSetup e;
    e.params = &params;
    e.cfg = cfg;
    e.table = build_table(params, coeffs, cfg.n_steps, nullptr, nullptr);
    e.pert = cfg.perturbation;
    return e;
}

} // namespace

void SimConfig::validate() const {
    if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths must be >= 1");
    if (n_steps < 10) throw std::invalid_argument("SimConfig: n_steps must be >= 10");
    if (!(sigma_scale >= 0.0 && sigma_scale <= 1.0))
        throw std::invalid_argument("SimConfig: sigma_scale must be in [0, 1]");
    if (!std::isfinite(x0)) throw std::invalid_argument("SimConfig: x0 must be finite");
}

SimResult simulate(const ModelParams& params, const StrategyCoefficients& coeffs,
                   const SimConfig& cfg) {
    EngineSetup e = make_setup(params, coeffs, cfg);
    return summarize(run_engine(e, nullptr, 0), cfg);
}

SimResult simulate_recording(const ModelParams& params,
                             const StrategyCoefficients& coeffs,
                             const SimConfig& cfg, std::vector<PathRecord>& records,
                             int max_records) {
    EngineSetup e = make_setup(params, coeffs, cfg);
    return summarize(run_engine(e, &records, max_records), cfg);
}

DeviationReport deviation_test(const ModelParams& params,
                               const RiccatiSolution& solution,
                               const SimConfig& cfg,
                               const std::vector<double>& factors) {
    params.validate();
    cfg.validate();
    const StrategyCoefficients coeffs = strategy_coefficients(params, solution);

    // Wholesale response against an arbitrary played retail price:
    //   w(t, x, p) = ax(t) x + b(t) - (gamma_p / (2 gamma_w)) p,
    // which reproduces the equilibrium wholesale trajectory when p is the
    // equilibrium retail price.
    const int nodes = solution.mesh.node_count();
    std::vector<double> resp_ax(nodes), resp_b(nodes);
    for (int k = 0; k < nodes; ++k) {
        const double t = solution.mesh.node(k);
        const double ert_bw = std::exp(params.r * t) * params.beta_w(t);
        resp_ax[k] = (ert_bw * 2.0 * solution.p2[k] + params.gamma_x) / (2.0 * params.gamma_w);
        resp_b[k] = (ert_bw * (solution.p1[k] + solution.p2[k]) + params.alpha +
                     params.c0 * params.gamma_w) /
                    (2.0 * params.gamma_w);
    }
    const double resp_p_slope = params.gamma_p / (2.0 * params.gamma_w);

    DeviationReport report;
    for (const auto player : {Perturbation::Player::seller, Perturbation::Player::buyer}) {
        const bool respond = player == Perturbation::Player::buyer;
        EngineSetup e;
        e.params = &params;
        e.cfg = cfg;
        e.cfg.perturbation.reset();
        e.table = build_table(params, coeffs, cfg.n_steps, respond ? &resp_ax : nullptr,
                              respond ? &resp_b : nullptr);
        e.wholesale_responds = respond;
        e.resp_p_slope = resp_p_slope;

        e.pert = Perturbation{player, Perturbation::Target::pair, 1.0, 0.0};
        e.cfg.perturbation = e.pert;
        const RawSim base = run_engine(e, nullptr, 0);
        const SimResult base_sum = summarize(base, e.cfg);
        const double base_mean =
            player == Perturbation::Player::seller ? base_sum.j_s_mean : base_sum.j_b_mean;

        for (double f : factors) {
            e.pert = Perturbation{player, Perturbation::Target::pair, f, 0.0};
            e.cfg.perturbation = e.pert;
            const RawSim dev = run_engine(e, nullptr, 0);

            // Paired statistics over paths where both runs are valid.
            const auto& own_base =
                player == Perturbation::Player::seller ? base.j_s : base.j_b;
            const auto& own_dev = player == Perturbation::Player::seller ? dev.j_s : dev.j_b;
            std::int64_t n_ok = 0;
            double sum_d = 0.0;
            for (std::size_t i = 0; i < own_base.size(); ++i) {
                if (!std::isfinite(own_base[i]) || !std::isfinite(own_dev[i])) continue;
                sum_d += own_dev[i] - own_base[i];
                ++n_ok;
            }
            DeviationEntry entry;
            entry.player = player;
            entry.factor = f;
            entry.equilibrium_mean = base_mean;
            entry.delta_mean = n_ok > 0 ? sum_d / static_cast<double>(n_ok) : 0.0;
            double ss = 0.0;
            for (std::size_t i = 0; i < own_base.size(); ++i) {
                if (!std::isfinite(own_base[i]) || !std::isfinite(own_dev[i])) continue;
                const double d = own_dev[i] - own_base[i] - entry.delta_mean;
                ss += d * d;
            }
            entry.paired_se =
                n_ok > 1 ? std::sqrt(ss / (static_cast<double>(n_ok) * (n_ok - 1))) : 0.0;
            entry.improves = entry.delta_mean > 3.0 * entry.paired_se;
            if (entry.improves) report.pass = false;
            report.entries.push_back(entry);
        }
    }
    return report;
}

void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& records) {
    os << "path,t,x,w,I_s,p,I_b,D\n";
    for (std::size_t pi = 0; pi < records.size(); ++pi) {
        const PathRecord& r = records[pi];
        for (std::size_t k = 0; k < r.t.size(); ++k) {
            os << pi << ',' << format_g17(r.t[k]) << ',' << format_g17(r.x[k]) << ','
               << format_g17(r.w[k]) << ',' << format_g17(r.i_s[k]) << ','
               << format_g17(r.p[k]) << ',' << format_g17(r.i_b[k]) << ','
               << format_g17(r.d[k]) << '\n';
        }
    }
}

} // namespace mlsg

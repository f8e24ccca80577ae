#include "mlsg/json_io.hpp"

#include <stdexcept>
#include <string>

namespace mlsg {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument(std::string("config: missing or non-numeric '") +
                                    key + "'");
    return j.at(key).get<double>();
}

TimeCurve curve_from_json(const json& j, const char* key, double horizon) {
    if (!j.contains(key))
        throw std::invalid_argument(std::string("config: missing curve '") + key + "'");
    const json& c = j.at(key);
    if (c.is_number())
        return TimeCurve::constant(c.get<double>(), 0.0, horizon);
    if (!c.is_array() || c.size() < 2)
        throw std::invalid_argument(std::string("config: curve '") + key +
                                    "' must be a scalar or an array of [t, value] pairs");
    std::vector<std::pair<double, double>> knots;
    knots.reserve(c.size());
    for (const auto& item : c) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() ||
            !item[1].is_number())
            throw std::invalid_argument(std::string("config: curve '") + key +
                                        "' entries must be [t, value] pairs");
        knots.emplace_back(item[0].get<double>(), item[1].get<double>());
    }
    return TimeCurve(std::move(knots));
}

json curve_to_json(const TimeCurve& curve) {
    json out = json::array();
    for (const auto& [t, v] : curve.knots()) out.push_back(json::array({t, v}));
    return out;
}

} // namespace

ModelParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: model must be an object");
    ModelParams p;
    p.horizon = require_number(j, "horizon");
    p.beta_p = curve_from_json(j, "beta_p", p.horizon);
    p.beta_w = curve_from_json(j, "beta_w", p.horizon);
    p.delta = curve_from_json(j, "delta", p.horizon);
    p.beta_x = require_number(j, "beta_x");
    p.gamma_p = require_number(j, "gamma_p");
    p.gamma_w = require_number(j, "gamma_w");
    p.gamma_x = require_number(j, "gamma_x");
    p.alpha = require_number(j, "alpha");
    p.c0 = require_number(j, "c0");
    p.r = require_number(j, "r");
    p.validate();
    return p;
}

nlohmann::json params_to_json(const ModelParams& p) {
    return nlohmann::json{{"beta_p", curve_to_json(p.beta_p)},
                          {"beta_w", curve_to_json(p.beta_w)},
                          {"delta", curve_to_json(p.delta)},
                          {"beta_x", p.beta_x},
                          {"gamma_p", p.gamma_p},
                          {"gamma_w", p.gamma_w},
                          {"gamma_x", p.gamma_x},
                          {"alpha", p.alpha},
                          {"c0", p.c0},
                          {"r", p.r},
                          {"horizon", p.horizon}};
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: sim must be an object");
    SimConfig cfg;
    cfg.n_paths = static_cast<std::int64_t>(require_number(j, "n_paths"));
    cfg.n_steps = static_cast<int>(require_number(j, "n_steps"));
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.x0 = require_number(j, "x0");
    if (j.contains("sigma_scale")) cfg.sigma_scale = j.at("sigma_scale").get<double>();
    if (j.contains("perturbation") && !j.at("perturbation").is_null()) {
        const json& q = j.at("perturbation");
        Perturbation pert;
        const std::string player = q.value("player", "seller");
        if (player == "seller")
            pert.player = Perturbation::Player::seller;
        else if (player == "buyer")
            pert.player = Perturbation::Player::buyer;
        else
            throw std::invalid_argument("config: perturbation.player must be seller|buyer");
        const std::string target = q.value("target", "pair");
        if (target == "leader")
            pert.target = Perturbation::Target::leader;
        else if (target == "follower")
            pert.target = Perturbation::Target::follower;
        else if (target == "pair")
            pert.target = Perturbation::Target::pair;
        else
            throw std::invalid_argument(
                "config: perturbation.target must be leader|follower|pair");
        pert.factor = q.value("factor", 1.0);
        pert.offset = q.value("offset", 0.0);
        cfg.perturbation = pert;
    }
    cfg.validate();
    return cfg;
}

nlohmann::json sim_result_to_json(const SimResult& r) {
    nlohmann::json cfg{{"n_paths", r.config.n_paths}, {"n_steps", r.config.n_steps},
                       {"seed", r.config.seed},       {"x0", r.config.x0},
                       {"sigma_scale", r.config.sigma_scale}};
    if (r.config.perturbation) {
        const Perturbation& q = *r.config.perturbation;
        cfg["perturbation"] = {
            {"player", q.player == Perturbation::Player::seller ? "seller" : "buyer"},
            {"target", q.target == Perturbation::Target::leader    ? "leader"
                       : q.target == Perturbation::Target::follower ? "follower"
                                                                     : "pair"},
            {"factor", q.factor},
            {"offset", q.offset}};
    }
    return nlohmann::json{{"j_s_mean", r.j_s_mean},
                          {"j_s_se", r.j_s_se},
                          {"j_b_mean", r.j_b_mean},
                          {"j_b_se", r.j_b_se},
                          {"clamp_fraction", r.clamp_fraction},
                          {"negative_x_fraction", r.negative_x_fraction},
                          {"excluded_paths", r.excluded_paths},
                          {"config", cfg}};
}

} // namespace mlsg

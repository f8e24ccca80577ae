#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace mlsg {

/// Piecewise-linear scalar curve on [front_time(), back_time()].
///
/// Knots are (t, value) pairs with strictly increasing t. Evaluation between
/// knots interpolates linearly; evaluation outside the knot range throws.
/// Constant coefficients are represented as 2-point tables so that every
/// curve carries its own domain.
class TimeCurve {
public:
    TimeCurve() = default;

    explicit TimeCurve(std::vector<std::pair<double, double>> knots)
        : knots_(std::move(knots)) {
        if (knots_.size() < 2)
            throw std::invalid_argument("TimeCurve: need at least 2 knots");
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (!(knots_[i].first > knots_[i - 1].first))
                throw std::invalid_argument("TimeCurve: knot times must be strictly increasing");
        }
    }

    static TimeCurve constant(double value, double t0, double t1) {
        return TimeCurve({{t0, value}, {t1, value}});
    }

    double front_time() const { return knots_.front().first; }
    double back_time() const { return knots_.back().first; }

    double operator()(double t) const {
        if (knots_.empty())
            throw std::logic_error("TimeCurve: empty curve");
        // Tolerate endpoint round-off from mesh arithmetic.
        const double span = back_time() - front_time();
        const double slack = 1e-12 * (1.0 + span);
        if (t < front_time() - slack || t > back_time() + slack)
            throw std::domain_error("TimeCurve: evaluation outside curve domain");
        if (t <= front_time()) return knots_.front().second;
        if (t >= back_time()) return knots_.back().second;
        std::size_t hi = 1;
        while (knots_[hi].first < t) ++hi;
        const auto& [ta, va] = knots_[hi - 1];
        const auto& [tb, vb] = knots_[hi];
        const double u = (t - ta) / (tb - ta);
        return va + u * (vb - va);
    }

    bool positive_everywhere() const {
        for (const auto& [t, v] : knots_)
            if (!(v > 0.0)) return false;
        return true;
    }

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

private:
    std::vector<std::pair<double, double>> knots_;
};

} // namespace mlsg

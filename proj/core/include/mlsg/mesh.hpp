#pragma once

#include <stdexcept>

namespace mlsg {

/// Uniform time mesh on [0, t_end] with n_steps intervals.
struct TimeMesh {
    double t_end = 1.0;
    int n_steps = 10000;

    void validate() const {
        if (!(t_end > 0.0))
            throw std::invalid_argument("TimeMesh: t_end must be > 0");
        if (n_steps < 10)
            throw std::invalid_argument("TimeMesh: n_steps must be >= 10");
    }

    double step() const { return t_end / n_steps; }
    int node_count() const { return n_steps + 1; }

    /// Node k as an exact fraction of t_end, so node(n_steps) == t_end.
    double node(int k) const { return t_end * (static_cast<double>(k) / n_steps); }

    bool operator==(const TimeMesh& other) const {
        return t_end == other.t_end && n_steps == other.n_steps;
    }
};

} // namespace mlsg

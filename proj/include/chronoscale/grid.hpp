#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chronoscale/timescale.hpp"

namespace chronoscale {

struct GridNode {
    double t = 0.0;
    double sigma = 0.0;
    double mu = 0.0;
    double weight = 0.0;  // composite Δ-quadrature weight over the whole window
};

/// Ordered sampling of a time scale. Continuous segments are sampled
/// uniformly at the requested density; every segment endpoint and isolated
/// point is a node, so scattered contributions are never interpolated.
class TimeGrid {
public:
    TimeGrid(const TimeScale& ts, int steps_per_unit);

    const TimeScale& timescale() const noexcept { return ts_; }
    std::span<const GridNode> nodes() const noexcept { return nodes_; }
    const GridNode& operator[](std::size_t i) const noexcept { return nodes_[i]; }
    std::size_t size() const noexcept { return nodes_.size(); }
    int steps_per_unit() const noexcept { return steps_per_unit_; }
    double mu_sup() const noexcept { return mu_sup_; }

    double t(std::size_t i) const noexcept { return nodes_[i].t; }
    bool right_scattered(std::size_t i) const noexcept { return nodes_[i].mu > 0.0; }
    /// Length of the Δ-interval [t_i, t_{i+1}); μ at scattered nodes.
    double step(std::size_t i) const noexcept { return nodes_[i + 1].t - nodes_[i].t; }

    std::optional<std::size_t> find(double t) const noexcept;
    /// Throws NotANode when t is not a node.
    std::size_t index_of(double t) const;

    /// Σ weights.
    double delta_length() const noexcept;

private:
    TimeScale ts_;
    int steps_per_unit_;
    double mu_sup_ = 0.0;
    std::vector<GridNode> nodes_;
};

inline TimeGrid make_grid(const TimeScale& ts, int steps_per_unit) {
    return TimeGrid(ts, steps_per_unit);
}

}  // namespace chronoscale

#include "chronoscale/grid.hpp"

#include <algorithm>
#include <cmath>

#include "chronoscale/error.hpp"

namespace chronoscale {

TimeGrid::TimeGrid(const TimeScale& ts, int steps_per_unit)
    : ts_(ts), steps_per_unit_(steps_per_unit) {
    if (steps_per_unit < 1) throw Error(ErrorCode::BadParams, "steps_per_unit must be >= 1");

    const auto segs = ts_.segments();
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const auto& seg = segs[s];
        if (seg.isolated()) {
            nodes_.push_back({seg.lo, seg.lo, 0.0, 0.0});
        } else {
            const double len = seg.length();
            const auto m = std::max<long long>(
                1, static_cast<long long>(std::ceil(len * steps_per_unit - 1e-9)));
            for (long long j = 0; j < m; ++j) {
                const double t = seg.lo + len * static_cast<double>(j) / static_cast<double>(m);
                nodes_.push_back({t, t, 0.0, 0.0});
            }
            nodes_.push_back({seg.hi, seg.hi, 0.0, 0.0});
        }
        if (s + 1 < segs.size()) {
            auto& last = nodes_.back();
            last.sigma = segs[s + 1].lo;
            last.mu = last.sigma - last.t;
            mu_sup_ = std::max(mu_sup_, last.mu);
        }
    }

    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
        if (nodes_[k].mu > 0.0) {
            nodes_[k].weight += nodes_[k].mu;
        } else {
            const double half = 0.5 * (nodes_[k + 1].t - nodes_[k].t);
            nodes_[k].weight += half;
            nodes_[k + 1].weight += half;
        }
    }
}

std::optional<std::size_t> TimeGrid::find(double t) const noexcept {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - kMembershipTol,
                               [](const GridNode& n, double v) { return n.t < v; });
    if (it == nodes_.end() || std::abs(it->t - t) > kMembershipTol) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t TimeGrid::index_of(double t) const {
    if (auto i = find(t)) return *i;
    throw Error(ErrorCode::NotANode, "t = " + std::to_string(t) + " is not a grid node");
}

double TimeGrid::delta_length() const noexcept {
    double total = 0.0;
    for (const auto& n : nodes_) total += n.weight;
    return total;
}

}  // namespace chronoscale

#include "chronoscale/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "chronoscale/error.hpp"

namespace chronoscale {

GridFunction::GridFunction(std::shared_ptr<const TimeGrid> grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw Error(ErrorCode::GridMismatch, "null grid");
    if (static_cast<std::size_t>(values_.cols()) != grid_->size()) {
        throw Error(ErrorCode::GridMismatch, "value count does not match node count");
    }
    if (values_.rows() < 1) throw Error(ErrorCode::GridMismatch, "dimension must be >= 1");
}

GridFunction GridFunction::sample(std::shared_ptr<const TimeGrid> grid, std::size_t dim,
                                  const std::function<Eigen::VectorXd(double)>& fn) {
    Eigen::MatrixXd v(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i) {
        v.col(static_cast<Eigen::Index>(i)) = fn(grid->t(i));
    }
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::scalar(std::shared_ptr<const TimeGrid> grid,
                                  const std::function<double(double)>& fn) {
    Eigen::MatrixXd v(1, static_cast<Eigen::Index>(grid->size()));
    for (std::size_t i = 0; i < grid->size(); ++i) v(0, static_cast<Eigen::Index>(i)) = fn(grid->t(i));
    return GridFunction(std::move(grid), std::move(v));
}

Eigen::VectorXd delta_integral(const TimeGrid& grid, const Eigen::MatrixXd& values,
                               std::size_t ia, std::size_t ib) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(values.rows());
    for (std::size_t k = ia; k < ib; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        if (grid.right_scattered(k)) {
            acc += grid[k].mu * values.col(kk);
        } else {
            acc += (0.5 * grid.step(k)) * (values.col(kk) + values.col(kk + 1));
        }
    }
    return acc;
}

Eigen::VectorXd delta_integral(const GridFunction& f, double a, double b) {
    const auto& grid = f.grid();
    const auto ia = grid.index_of(a);
    const auto ib = grid.index_of(b);
    if (ia > ib) return -delta_integral(grid, f.values(), ib, ia);
    return delta_integral(grid, f.values(), ia, ib);
}

Eigen::VectorXd interpolate(const GridFunction& f, double t) {
    const auto& grid = f.grid();
    if (auto i = grid.find(t)) return f.values().col(static_cast<Eigen::Index>(*i));
    const auto nodes = grid.nodes();
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                               [](double v, const GridNode& n) { return v < n.t; });
    if (it == nodes.begin() || it == nodes.end()) {
        throw Error(ErrorCode::NotInTimeScale, "t = " + std::to_string(t) + " outside the grid");
    }
    const auto k = static_cast<std::size_t>(it - nodes.begin()) - 1;
    if (grid.right_scattered(k)) {
        throw Error(ErrorCode::NotInTimeScale, "t = " + std::to_string(t) + " lies in a gap");
    }
    const double w = (t - grid.t(k)) / grid.step(k);
    const auto kk = static_cast<Eigen::Index>(k);
    return (1.0 - w) * f.values().col(kk) + w * f.values().col(kk + 1);
}

std::vector<double> cumulative_delta_integral(const TimeGrid& grid, const std::vector<double>& values) {
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double piece = grid.right_scattered(k)
                                 ? grid[k].mu * values[k]
                                 : 0.5 * grid.step(k) * (values[k] + values[k + 1]);
        out[k + 1] = out[k] + piece;
    }
    return out;
}

double cylinder(double z, double h) {
    if (h == 0.0) return z;
    const double arg = 1.0 + z * h;
    if (!(arg > 0.0)) {
        throw Error(ErrorCode::NonRegressive, "1 + z*h = " + std::to_string(arg) + " <= 0");
    }
    return std::log1p(z * h) / h;
}

double circle_minus(double alpha, double mu) {
    const double denom = 1.0 + mu * alpha;
    if (denom == 0.0) throw Error(ErrorCode::NonRegressive, "1 + mu*alpha = 0");
    return -alpha / denom;
}

double circle_plus(double alpha, double beta, double mu) {
    return alpha + beta + mu * alpha * beta;
}

std::vector<double> exp_exponent_table(const GridFunction& p) {
    const auto& grid = p.grid();
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double piece = grid.right_scattered(k)
                                 ? grid[k].mu * cylinder(p.scalar_at(k), grid[k].mu)
                                 : 0.5 * grid.step(k) * (p.scalar_at(k) + p.scalar_at(k + 1));
        out[k + 1] = out[k] + piece;
    }
    return out;
}

std::vector<double> ominus_exponent_table(double alpha, const TimeGrid& grid) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::BadParams, "exp_ominus requires alpha > 0");
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        // ⊖α is −α on continuous pieces; its value at a scattered node only
        // enters through that node's own μ-term.
        const double piece = grid.right_scattered(k) ? -std::log1p(grid[k].mu * alpha) : -alpha * grid.step(k);
        out[k + 1] = out[k] + piece;
    }
    return out;
}

double exp_fn(const GridFunction& p, double t, double s) {
    const auto& grid = p.grid();
    const auto it = grid.index_of(t);
    const auto is = grid.index_of(s);
    if (it == is) return 1.0;
    const auto lo = std::min(it, is);
    const auto hi = std::max(it, is);
    double exponent = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
        if (grid.right_scattered(k)) {
            exponent += grid[k].mu * cylinder(p.scalar_at(k), grid[k].mu);
        } else {
            exponent += 0.5 * grid.step(k) * (p.scalar_at(k) + p.scalar_at(k + 1));
        }
    }
    return std::exp(it >= is ? exponent : -exponent);
}

double exp_ominus(double alpha, double t, double s, const TimeGrid& grid) {
    const auto table = ominus_exponent_table(alpha, grid);
    const auto it = grid.index_of(t);
    const auto is = grid.index_of(s);
    if (it == is) return 1.0;
    return std::exp(table[it] - table[is]);
}

double exp_ominus(double alpha, double t, double s, const TimeScale& ts) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::BadParams, "exp_ominus requires alpha > 0");
    if (!ts.contains(t) || !ts.contains(s)) {
        throw Error(ErrorCode::NotInTimeScale, "exp_ominus arguments must lie in the time scale");
    }
    if (t < s) return 1.0 / exp_ominus(alpha, s, t, ts);
    double continuous = 0.0;
    double log_scattered = 0.0;
    const auto segs = ts.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& seg = segs[i];
        const double l = std::max(seg.lo, s);
        const double h = std::min(seg.hi, t);
        if (h > l) continuous += h - l;
        if (i + 1 < segs.size() && seg.hi >= s - kMembershipTol && seg.hi < t - kMembershipTol) {
            log_scattered += std::log1p((segs[i + 1].lo - seg.hi) * alpha);
        }
    }
    return std::exp(-alpha * continuous - log_scattered);
}

Eigen::VectorXd delta_derivative(const GridFunction& f, double t) {
    const auto& grid = f.grid();
    const auto i = grid.index_of(t);
    if (i + 1 >= grid.size()) throw Error(ErrorCode::AtRightEdge, "no forward node at t = S");
    const auto ii = static_cast<Eigen::Index>(i);
    return (f.values().col(ii + 1) - f.values().col(ii)) / grid.step(i);
}

}  // namespace chronoscale

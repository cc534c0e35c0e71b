#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "chronoscale/grid.hpp"

namespace chronoscale {

/// Vector-valued samples on a grid: column i is the value at node i.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const TimeGrid> grid, Eigen::MatrixXd values);

    static GridFunction sample(std::shared_ptr<const TimeGrid> grid, std::size_t dim,
                               const std::function<Eigen::VectorXd(double)>& fn);
    static GridFunction scalar(std::shared_ptr<const TimeGrid> grid,
                               const std::function<double(double)>& fn);

    const TimeGrid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const TimeGrid>& grid_ptr() const noexcept { return grid_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    Eigen::MatrixXd& values() noexcept { return values_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    auto at(std::size_t i) const { return values_.col(static_cast<Eigen::Index>(i)); }
    double scalar_at(std::size_t i) const { return values_(0, static_cast<Eigen::Index>(i)); }

private:
    std::shared_ptr<const TimeGrid> grid_;
    Eigen::MatrixXd values_;
};

using Trajectory = GridFunction;

/// Δ-integral over node indices [ia, ib]: composite trapezoid on continuous
/// pieces plus μ(t)·f(t) at right-scattered nodes. Columns of `values` are
/// node samples.
Eigen::VectorXd delta_integral(const TimeGrid& grid, const Eigen::MatrixXd& values,
                               std::size_t ia, std::size_t ib);
Eigen::VectorXd delta_integral(const GridFunction& f, double a, double b);

/// Value at an arbitrary point of the time scale: exact at nodes, linear
/// between the nodes of a continuous piece. Throws NotInTimeScale in gaps.
Eigen::VectorXd interpolate(const GridFunction& f, double t);

/// Cumulative ∫_{s0}^{t_i} of a scalar sample vector, same quadrature.
std::vector<double> cumulative_delta_integral(const TimeGrid& grid, const std::vector<double>& values);

/// ξ_h(z) = log(1 + zh)/h, identity at h = 0. Real branch only.
double cylinder(double z, double h);

/// ⊖α = −α/(1 + μα).
double circle_minus(double alpha, double mu);
/// α ⊕ β = α + β + μαβ.
double circle_plus(double alpha, double beta, double mu);

/// e_p(t, s) = exp(∫_s^t ξ_{μ(τ)}(p(τ)) Δτ) for scalar p.
double exp_fn(const GridFunction& p, double t, double s);

/// Cumulative exponent table L_i with e_p(t_i, t_j) = exp(L_i − L_j).
std::vector<double> exp_exponent_table(const GridFunction& p);

/// Cumulative exponent table of e_{⊖α}: e_{⊖α}(t_i, t_j) = exp(L_i − L_j).
/// Continuous pieces contribute −α·step, scattered nodes −log(1 + μα).
std::vector<double> ominus_exponent_table(double alpha, const TimeGrid& grid);
/// e_{⊖α}(t, s) on grid nodes.
double exp_ominus(double alpha, double t, double s, const TimeGrid& grid);

/// e_{⊖α}(t, s) for arbitrary points of the time scale, from its segment
/// structure. Agrees with the grid version at nodes.
double exp_ominus(double alpha, double t, double s, const TimeScale& ts);

/// f^Δ(t): (f(σ(t)) − f(t))/μ(t) at scattered nodes, forward difference to
/// the next node at right-dense ones.
Eigen::VectorXd delta_derivative(const GridFunction& f, double t);

}  // namespace chronoscale

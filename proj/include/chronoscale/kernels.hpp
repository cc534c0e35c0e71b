#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "chronoscale/grid.hpp"
#include "chronoscale/semigroup.hpp"

// Per-node quadrature kernels behind one mild-operator sweep. Every output
// node is independent, so each kernel comes as a serial reference and an
// OpenMP version. Both sum each node's contributions in the same order and
// must agree bit for bit.
namespace chronoscale::kernels {

/// out = H(s, t, y).
using PairEval = std::function<void(double s, double t, std::span<const double> y, std::span<double> out)>;

enum class MildQuadrature {
    DeltaSum,   // Σ_{t_k < s} (t_{k+1} − t_k)·T(s − σ(t_k))·F_k
    Trapezoid,  // trapezoid on continuous pieces, μ·T(s − σ)·F at scattered nodes
};

const char* to_string(MildQuadrature q) noexcept;
MildQuadrature quadrature_from_string(const std::string& name);

/// T(t_i − t_j) for all node pairs j ≤ i, stored as indices into a list of
/// distinct propagators. Entries come from an EvolutionCache, so they are the
/// same matrices a cache lookup returns.
class PropagatorTable {
public:
    /// Builds the pair index when it fits in `max_bytes`; otherwise lookups
    /// fall back to the cache.
    PropagatorTable(const TimeGrid& grid, const EvolutionCache& cache,
                    std::size_t max_bytes = std::size_t{256} << 20);

    const Eigen::MatrixXd& at(std::size_t i, std::size_t j) const;
    bool indexed() const noexcept { return !pair_index_.empty(); }
    std::size_t distinct() const noexcept { return mats_.size(); }

private:
    const TimeGrid* grid_;
    const EvolutionCache* cache_;
    std::vector<Eigen::MatrixXd> mats_;
    std::vector<std::uint32_t> pair_index_;  // row-packed lower triangle
};

/// z(:, i) = ∫_{t_0}^{t_i} H(t_i, τ, y(τ)) Δτ for every node i.
Eigen::MatrixXd inner_integrals_serial(const TimeGrid& grid, const PairEval& h, const Eigen::MatrixXd& y);
Eigen::MatrixXd inner_integrals_parallel(const TimeGrid& grid, const PairEval& h, const Eigen::MatrixXd& y);

/// W(:, i) = T(t_i − t_0)·y0 + quadrature of T(t_i − σ(t))·F(t) over [t_0, t_i].
/// `forcing` holds F at every node.
Eigen::MatrixXd mild_sweep_serial(const TimeGrid& grid, const EvolutionCache& cache,
                                  const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing,
                                  MildQuadrature rule);
Eigen::MatrixXd mild_sweep_parallel(const TimeGrid& grid, const PropagatorTable& table,
                                    const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing,
                                    MildQuadrature rule);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace chronoscale::kernels

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <shared_mutex>
#include <unordered_map>

#include "chronoscale/grid.hpp"

namespace chronoscale {

/// Constant generator matrix A of the evolution family T(t) = exp(tA).
class Generator {
public:
    explicit Generator(Eigen::MatrixXd a);

    const Eigen::MatrixXd& matrix() const noexcept { return a_; }
    Eigen::Index n() const noexcept { return a_.rows(); }

    /// max Re λ(A).
    double spectral_abscissa() const;
    /// True when A + Aᵀ is negative semidefinite, i.e. T is a contraction.
    bool dissipative() const;

private:
    Eigen::MatrixXd a_;
};

/// T(dt) = exp(dt·A) by scaling and squaring around a degree-13 Padé
/// approximant. Throws Overflow when the result is not finite.
Eigen::MatrixXd evolve(const Generator& g, double dt);

/// Largest singular value by power iteration on MᵀM.
double spectral_norm(const Eigen::MatrixXd& m, double tol = 1e-10);

struct StabilityCert {
    double M = 1.0;
    double alpha = 0.0;
    double max_violation = 0.0;
    int verified_steps_per_unit = 0;
    std::size_t pairs_checked = 0;
};

inline constexpr double kDefaultAlphaSafety = 0.9;

/// α = safety·(−abscissa), M = max ‖T(t − t₀)‖₂ / e_{⊖α}(t, t₀) over sampled
/// node pairs, clamped to ≥ 1. Throws NotStable for abscissa ≥ 0.
StabilityCert estimate_stability(const Generator& g, const TimeGrid& grid,
                                 double safety = kDefaultAlphaSafety);

/// Largest ‖T(t − t₀)‖₂ − M·e_{⊖α}(t, t₀) over node pairs of `grid`.
double stability_violation(const StabilityCert& cert, const Generator& g, const TimeGrid& grid);

/// Memo of T(dt) keyed on dt quantized to 2⁻⁴⁰. Values are computed at the
/// quantized dt, so a lookup is independent of insertion order. Safe for
/// concurrent readers and writers.
class EvolutionCache {
public:
    explicit EvolutionCache(Generator g) : g_(std::move(g)) {}

    static std::int64_t key(double dt);
    static double dt_of(std::int64_t key);

    const Generator& generator() const noexcept { return g_; }
    const Eigen::MatrixXd& get(double dt) const;
    std::size_t size() const;

private:
    Generator g_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<std::int64_t, Eigen::MatrixXd> cache_;
};

}  // namespace chronoscale

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chronoscale/calculus.hpp"
#include "chronoscale/expr.hpp"
#include "chronoscale/kernels.hpp"
#include "chronoscale/semigroup.hpp"
#include "chronoscale/timescale.hpp"

namespace chronoscale {

using kernels::MildQuadrature;

/// y^Δ(s) = A y(s) + F(s, y(s), ∫_{s0}^{s} H(s, τ, y(τ)) Δτ),  y(s0) = y0.
struct ProblemSpec {
    Generator generator{Eigen::MatrixXd::Zero(1, 1)};
    expr::VectorExpr F;  // over (s, x[·], z[·])
    expr::VectorExpr H;  // over (s, t, y[·])
    TimeScale timescale = TimeScale::reals(0.0, 1.0);
    int steps_per_unit = 16;
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
    std::optional<double> lipschitz_F;
    std::optional<double> lipschitz_H;
    std::optional<double> truncation_T;
    double tol = 1e-8;
    int max_iter = 200;
    MildQuadrature quadrature = MildQuadrature::DeltaSum;
    std::uint64_t seed = 42;
    int lipschitz_samples = 10000;
    bool parallel = true;
    /// Second argument of the eominus() intrinsic; s0 when unset.
    std::optional<double> exp_origin;

    double s0() const { return timescale.s0(); }
    double S() const { return timescale.S(); }
    std::size_t dim() const { return static_cast<std::size_t>(y0.size()); }

    /// Throws BadParams on dimension or tolerance mismatches.
    void validate() const;
};

/// The mild-solution operator
///   W(y)(s) = T(s − s0) y0 + ∫_{s0}^{s} T(s − σ(t)) F(t, y(t), z(t)) Δt,
///   z(t)    = ∫_{s0}^{t} H(t, τ, y(τ)) Δτ,
/// discretized on the spec's grid. Owns the grid and the propagator cache.
class MildOperator {
public:
    explicit MildOperator(const ProblemSpec& spec);
    MildOperator(const MildOperator&) = delete;
    MildOperator& operator=(const MildOperator&) = delete;

    const ProblemSpec& spec() const noexcept { return spec_; }
    const TimeGrid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const TimeGrid>& grid_ptr() const noexcept { return grid_; }
    const EvolutionCache& propagators() const noexcept { return cache_; }

    Trajectory constant(const Eigen::VectorXd& value) const;

    /// z at every node.
    Eigen::MatrixXd inner_integrals(const Eigen::MatrixXd& y) const;
    /// F(t_k, y_k, z_k) at every node.
    Eigen::MatrixXd forcing(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) const;
    /// F(s, x, z) at one point.
    Eigen::VectorXd eval_F(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& z) const;
    Eigen::VectorXd eval_H(double s, double t, const Eigen::VectorXd& y) const;

    Eigen::MatrixXd apply(const Eigen::MatrixXd& y) const;
    /// W₁ (reads only F(t, 0, z₀)) and W₂ = W − W₁.
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split(const Eigen::MatrixXd& y) const;

    /// Sweep with explicit forcing values and initial term.
    Eigen::MatrixXd sweep(const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing) const;

private:
    expr::Bindings bindings() const;

    ProblemSpec spec_;
    std::shared_ptr<const TimeGrid> grid_;
    EvolutionCache cache_;
    std::unique_ptr<kernels::PropagatorTable> table_;
    expr::TimeScaleContext ts_context_;
};

struct HypothesisResult {
    std::string name;
    bool satisfied = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string note;
};

struct HypothesisReport {
    std::vector<HypothesisResult> results;  // H1..H4 in order
    std::optional<StabilityCert> stability;
    double lipschitz_F = 0.0;
    double lipschitz_H = 0.0;
    bool lipschitz_F_sampled = false;
    bool lipschitz_H_sampled = false;
    double M_F = 0.0;
    double ball_radius_k = 0.0;
    /// M(S − s0)L_F*(1 + L_H*(S − s0)): the H4 left side and the contraction
    /// factor q it certifies.
    double q = 0.0;
    /// M·L_F*(1 + L_H*(S − s0)): the same bound without the (S − s0) factor.
    double q_without_span = 0.0;

    bool all_satisfied() const;
    const HypothesisResult& get(const std::string& name) const;
};

/// H4 left-hand side M(S − s0)L_F*(1 + L_H*(S − s0)).
double h4_lhs(double M, double span, double lipschitz_F, double lipschitz_H);

struct SolverReport {
    Trajectory trajectory;
    Eigen::MatrixXd z;  // inner integral of the fixed point
    int iterations = 0;
    std::vector<double> step_norms;
    double contraction_ratio_observed = 0.0;
    double contraction_ratio_theoretical = 0.0;
    HypothesisReport hypotheses;
    double residual = 0.0;
    double ball_radius_k = 0.0;
    bool converged = false;
};

/// z(t) = ∫_{s0}^{t} H(t, τ, y(τ)) Δτ at one node.
Eigen::VectorXd inner_integral(const ProblemSpec& spec, const Trajectory& y, double t);
Trajectory apply_W(const ProblemSpec& spec, const Trajectory& y);
std::pair<Trajectory, Trajectory> split_W(const ProblemSpec& spec, const Trajectory& y);

/// Sup-norm over nodes and components.
double sup_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// y_{k+1} = W(y_k) from the constant y0 trajectory (or `initial`) until
/// ‖y_k − W(y_k)‖_sup ≤ tol. Throws NoConvergence after max_iter updates.
SolverReport picard_solve(const ProblemSpec& spec);
/// Iteration only; `hypotheses` (may be null) fills the theoretical fields.
SolverReport picard_solve(const MildOperator& op, const HypothesisReport* hypotheses,
                          const std::optional<Eigen::MatrixXd>& initial = std::nullopt);

/// Sampled lower bound of L_F over random nodes and pairs in a ball.
double estimate_lipschitz_F(const ProblemSpec& spec, int samples, double radius);
double estimate_lipschitz_F(const MildOperator& op, int samples, double radius, std::uint64_t seed);
double estimate_lipschitz_H(const MildOperator& op, int samples, double radius, std::uint64_t seed);
/// Sampled lower bound of sup ‖F(s, 0, Ψ)‖ for Ψ in a ball.
double estimate_MF(const ProblemSpec& spec, int samples, double radius);
double estimate_MF(const MildOperator& op, int samples, double radius, std::uint64_t seed);

HypothesisReport check_hypotheses(const ProblemSpec& spec);
HypothesisReport check_hypotheses(const MildOperator& op);

struct GronwallReport {
    std::size_t nodes_checked = 0;
    double premise_max_violation = 0.0;
    double conclusion_a_max_violation = 0.0;
    double conclusion_b_max_violation = 0.0;
    bool conclusion_a_holds = false;
    bool conclusion_b_holds = false;
    bool f_identically_zero = false;
    bool y_identically_zero = false;
};

inline constexpr double kGronwallTol = 1e-9;

/// Checks the premise y ≤ f + ∫_a^s h(t)[y(t) + ∫_a^t g y Δτ] Δt on 𝕋^k ∩ [a, S]
/// and, when it holds, the two bounds
///   (a) y ≤ f·[1 + ∫_a^s h(t) e_{h+g}(t, a) Δt],   (b) y ≤ f·e_{h+g}(s, a).
/// Throws PremiseViolated or NotNondecreasing.
GronwallReport gronwall_check(const GridFunction& y, const GridFunction& f, const GridFunction& g,
                              const GridFunction& h, double a);

struct UniquenessReport {
    std::vector<std::optional<Trajectory>> fixed_points;
    std::vector<std::string> failures;  // per guess, empty when converged
    double max_distance = 0.0;
};

UniquenessReport uniqueness_probe(const ProblemSpec& spec, const std::vector<Trajectory>& guesses);

struct TruncatedSolution {
    Trajectory trajectory;  // nodes of [s0, S]
    double lower_limit = 0.0;
    double error_bound = 0.0;
    int iterations = 0;
};

/// y(s) = ∫_{L}^{s} T(s − σ(t)) F(t, y(t), ∫_{L}^{t} H Δτ) Δt with L = s0 minus
/// whole periods covering truncation_T, solved on the extended time scale.
TruncatedSolution solve_truncated_line(const ProblemSpec& spec, double truncation_T);

struct DifferentialResidual {
    double right_dense_max = 0.0;  // O(step) on continuous pieces
    double scattered_max = 0.0;    // includes the ‖((e^{μA} − I)/μ − A)y‖ gap term
    std::vector<double> per_node;  // every node but the last
};

/// ‖y^Δ − Ay − F(s, y, z)‖ at every node but the last.
DifferentialResidual differential_residual(const MildOperator& op, const Eigen::MatrixXd& y);

}  // namespace chronoscale

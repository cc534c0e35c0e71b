#include "chronoscale/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "chronoscale/error.hpp"

namespace chronoscale {

namespace {

// Strips the code prefix and offset suffix so the message can be re-raised
// with evaluation coordinates attached.
std::string bare_message(const DomainError& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(ErrorCode::DomainError)) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    const std::string suffix = " at offset " + std::to_string(e.offset());
    if (msg.size() >= suffix.size() && msg.compare(msg.size() - suffix.size(), suffix.size(), suffix) == 0) {
        msg.erase(msg.size() - suffix.size());
    }
    return msg;
}

}  // namespace


void ProblemSpec::validate() const {
    const auto n = dim();
    if (n < 1) throw Error(ErrorCode::BadParams, "state dimension must be >= 1");
    if (static_cast<std::size_t>(generator.n()) != n) {
        throw Error(ErrorCode::BadParams, "generator dimension does not match y0");
    }
    if (F.size() != n) throw Error(ErrorCode::BadParams, "F must have one component per state dimension");
    if (H.size() != n) throw Error(ErrorCode::BadParams, "H must have one component per state dimension");
    if (!(tol > 0.0)) throw Error(ErrorCode::BadParams, "tol must be > 0");
    if (max_iter < 1) throw Error(ErrorCode::BadParams, "max_iter must be >= 1");
    if (steps_per_unit < 1) throw Error(ErrorCode::BadParams, "steps_per_unit must be >= 1");
    if (!y0.allFinite()) throw Error(ErrorCode::BadParams, "y0 must be finite");
}

MildOperator::MildOperator(const ProblemSpec& spec)
    : spec_(spec),
      grid_(std::make_shared<const TimeGrid>(spec.timescale, spec.steps_per_unit)),
      cache_(spec.generator) {
    spec_.validate();
    ts_context_.ts = &spec_.timescale;
    ts_context_.origin = spec_.exp_origin.value_or(spec_.s0());
    if (spec_.parallel) table_ = std::make_unique<kernels::PropagatorTable>(*grid_, cache_);
}

expr::Bindings MildOperator::bindings() const {
    expr::Bindings b;
    b.timescale = &ts_context_;
    return b;
}

Trajectory MildOperator::constant(const Eigen::VectorXd& value) const {
    return Trajectory(grid_, value.replicate(1, static_cast<Eigen::Index>(grid_->size())));
}

Eigen::VectorXd MildOperator::eval_F(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& z) const {
    const auto n = spec_.dim();
    auto b = bindings();
    b.scalars[0] = s;
    b.vectors[0] = std::span<const double>(x.data(), n);
    b.vectors[1] = std::span<const double>(z.data(), n);
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    spec_.F.eval(b, std::span<double>(out.data(), n));
    return out;
}

Eigen::VectorXd MildOperator::eval_H(double s, double t, const Eigen::VectorXd& y) const {
    const auto n = spec_.dim();
    auto b = bindings();
    b.scalars[0] = s;
    b.scalars[1] = t;
    b.vectors[0] = std::span<const double>(y.data(), n);
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    spec_.H.eval(b, std::span<double>(out.data(), n));
    return out;
}

Eigen::MatrixXd MildOperator::inner_integrals(const Eigen::MatrixXd& y) const {
    const auto base = bindings();
    const kernels::PairEval h = [this, base](double s, double t, std::span<const double> yv,
                                             std::span<double> out) {
        auto b = base;
        b.scalars[0] = s;
        b.scalars[1] = t;
        b.vectors[0] = yv;
        try {
            spec_.H.eval(b, out);
        } catch (const DomainError& e) {
            throw DomainError(e.offset(), bare_message(e) + " in H(s = " + std::to_string(s) +
                                              ", tau = " + std::to_string(t) + ")");
        }
    };
    return spec_.parallel ? kernels::inner_integrals_parallel(*grid_, h, y)
                          : kernels::inner_integrals_serial(*grid_, h, y);
}

Eigen::MatrixXd MildOperator::forcing(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z) const {
    const auto n = spec_.dim();
    Eigen::MatrixXd out(y.rows(), y.cols());
    auto b = bindings();
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
        b.scalars[0] = grid_->t(static_cast<std::size_t>(k));
        b.vectors[0] = std::span<const double>(y.col(k).data(), n);
        b.vectors[1] = std::span<const double>(z.col(k).data(), n);
        try {
            spec_.F.eval(b, std::span<double>(out.col(k).data(), n));
        } catch (const DomainError& e) {
            throw DomainError(e.offset(), bare_message(e) + " in F(s = " + std::to_string(b.scalars[0]) + ")");
        }
    }
    return out;
}

Eigen::MatrixXd MildOperator::sweep(const Eigen::VectorXd& y0, const Eigen::MatrixXd& forcing) const {
    if (table_) return kernels::mild_sweep_parallel(*grid_, *table_, y0, forcing, spec_.quadrature);
    return kernels::mild_sweep_serial(*grid_, cache_, y0, forcing, spec_.quadrature);
}

Eigen::MatrixXd MildOperator::apply(const Eigen::MatrixXd& y) const {
    const Eigen::MatrixXd z = inner_integrals(y);
    return sweep(spec_.y0, forcing(y, z));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> MildOperator::split(const Eigen::MatrixXd& y) const {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(y.rows(), y.cols());
    const Eigen::MatrixXd f0 = forcing(zero, inner_integrals(zero));
    const Eigen::MatrixXd fy = forcing(y, inner_integrals(y));
    Eigen::MatrixXd w1 = sweep(spec_.y0, f0);
    Eigen::MatrixXd w2 = sweep(Eigen::VectorXd::Zero(y.rows()), fy - f0);
    return {std::move(w1), std::move(w2)};
}

namespace {

void require_same_grid(const MildOperator& op, const Trajectory& y) {
    if (y.size() != op.grid().size() || y.dim() != op.spec().dim()) {
        throw Error(ErrorCode::GridMismatch, "trajectory does not live on the problem grid");
    }
}

}  // namespace

Eigen::VectorXd inner_integral(const ProblemSpec& spec, const Trajectory& y, double t) {
    ProblemSpec serial = spec;
    serial.parallel = false;
    MildOperator op(serial);
    require_same_grid(op, y);
    const auto i = op.grid().index_of(t);
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(spec.dim()), static_cast<Eigen::Index>(i + 1));
    for (std::size_t k = 0; k <= i; ++k) {
        samples.col(static_cast<Eigen::Index>(k)) =
            op.eval_H(op.grid().t(i), op.grid().t(k), y.values().col(static_cast<Eigen::Index>(k)));
    }
    return delta_integral(op.grid(), samples, 0, i);
}

Trajectory apply_W(const ProblemSpec& spec, const Trajectory& y) {
    MildOperator op(spec);
    require_same_grid(op, y);
    return Trajectory(op.grid_ptr(), op.apply(y.values()));
}

std::pair<Trajectory, Trajectory> split_W(const ProblemSpec& spec, const Trajectory& y) {
    MildOperator op(spec);
    require_same_grid(op, y);
    auto [w1, w2] = op.split(y.values());
    return {Trajectory(op.grid_ptr(), std::move(w1)), Trajectory(op.grid_ptr(), std::move(w2))};
}

double sup_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

SolverReport picard_solve(const MildOperator& op, const HypothesisReport* hypotheses,
                          const std::optional<Eigen::MatrixXd>& initial) {
    const auto& spec = op.spec();
    Eigen::MatrixXd y = initial ? *initial : op.constant(spec.y0).values();
    if (y.rows() != static_cast<Eigen::Index>(spec.dim()) || y.cols() != static_cast<Eigen::Index>(op.grid().size())) {
        throw Error(ErrorCode::GridMismatch, "initial guess does not live on the problem grid");
    }

    SolverReport report{Trajectory(op.grid_ptr(), y), Eigen::MatrixXd(), 0, {}, 0.0, 0.0, {}, 0.0, 0.0, false};
    if (hypotheses) {
        report.hypotheses = *hypotheses;
        report.contraction_ratio_theoretical = hypotheses->q;
        report.ball_radius_k = hypotheses->ball_radius_k;
    }

    for (int k = 0; k <= spec.max_iter; ++k) {
        Eigen::MatrixXd next = op.apply(y);
        const double step = sup_distance(next, y);
        if (!std::isfinite(step)) {
            report.step_norms.push_back(step);
            throw NoConvergence(report.step_norms, "iteration diverged at step " + std::to_string(k));
        }
        report.step_norms.push_back(step);
        if (step <= spec.tol) {
            report.converged = true;
            report.iterations = k;
            report.residual = step;
            break;
        }
        y = std::move(next);
    }
    if (!report.converged) {
        throw NoConvergence(report.step_norms,
                            "no fixed point within " + std::to_string(spec.max_iter) + " iterations");
    }

    // Ratios whose denominator is at round-off level carry no information.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, y.cwiseAbs().maxCoeff());
    double ratio = 0.0;
    for (std::size_t k = 1; k < report.step_norms.size(); ++k) {
        if (report.step_norms[k - 1] > floor) ratio = std::max(ratio, report.step_norms[k] / report.step_norms[k - 1]);
    }
    report.contraction_ratio_observed = ratio;
    report.trajectory = Trajectory(op.grid_ptr(), y);
    report.z = op.inner_integrals(y);
    return report;
}

SolverReport picard_solve(const ProblemSpec& spec) {
    MildOperator op(spec);
    const auto hyp = check_hypotheses(op);
    return picard_solve(op, &hyp);
}

namespace {

Eigen::VectorXd random_in_ball(std::mt19937_64& rng, Eigen::Index dim, double radius) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
    const double nv = v.norm();
    if (nv == 0.0) return Eigen::VectorXd::Zero(dim);
    return v * (radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / nv);
}

Eigen::VectorXd random_direction(std::mt19937_64& rng, Eigen::Index dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    do {
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
    } while (v.norm() == 0.0);
    return v.normalized();
}

// Perturbation sizes spread log-uniformly over six decades below the radius,
// so both the local slope and the chord slope are probed.
double random_separation(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> decades(0.0, 6.0);
    return std::max(radius, 1e-300) * std::pow(10.0, -decades(rng));
}

}  // namespace

double estimate_lipschitz_F(const MildOperator& op, int samples, double radius, std::uint64_t seed) {
    if (samples < 100) throw Error(ErrorCode::BadParams, "lipschitz sampling needs >= 100 samples");
    std::mt19937_64 rng(seed);
    const auto n = static_cast<Eigen::Index>(op.spec().dim());
    std::uniform_int_distribution<std::size_t> node(0, op.grid().size() - 1);
    std::uniform_int_distribution<int> mode(0, 2);
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = op.grid().t(node(rng));
        const Eigen::VectorXd x1 = random_in_ball(rng, n, radius);
        const Eigen::VectorXd z1 = random_in_ball(rng, n, radius);
        Eigen::VectorXd x2 = x1;
        Eigen::VectorXd z2 = z1;
        const int m = mode(rng);  // 0: move x only, 1: z only, 2: both
        if (m != 1) x2 += random_separation(rng, radius) * random_direction(rng, n);
        if (m != 0) z2 += random_separation(rng, radius) * random_direction(rng, n);
        const double denom = (x1 - x2).norm() + (z1 - z2).norm();
        if (denom == 0.0) continue;  // degenerate pair
        const double num = (op.eval_F(s, x1, z1) - op.eval_F(s, x2, z2)).norm();
        best = std::max(best, num / denom);
    }
    return best;
}

double estimate_lipschitz_F(const ProblemSpec& spec, int samples, double radius) {
    ProblemSpec serial = spec;
    serial.parallel = false;
    MildOperator op(serial);
    return estimate_lipschitz_F(op, samples, radius, spec.seed);
}

double estimate_lipschitz_H(const MildOperator& op, int samples, double radius, std::uint64_t seed) {
    if (samples < 100) throw Error(ErrorCode::BadParams, "lipschitz sampling needs >= 100 samples");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const auto n = static_cast<Eigen::Index>(op.spec().dim());
    std::uniform_int_distribution<std::size_t> node(0, op.grid().size() - 1);
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        auto a = node(rng);
        auto b = node(rng);
        if (a < b) std::swap(a, b);
        const double s = op.grid().t(a);
        const double t = op.grid().t(b);
        const Eigen::VectorXd y1 = random_in_ball(rng, n, radius);
        const Eigen::VectorXd y2 = y1 + random_separation(rng, radius) * random_direction(rng, n);
        const double denom = (y1 - y2).norm();
        if (denom == 0.0) continue;
        best = std::max(best, (op.eval_H(s, t, y1) - op.eval_H(s, t, y2)).norm() / denom);
    }
    return best;
}

double estimate_MF(const MildOperator& op, int samples, double radius, std::uint64_t seed) {
    if (samples < 100) throw Error(ErrorCode::BadParams, "M_F sampling needs >= 100 samples");
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    const auto n = static_cast<Eigen::Index>(op.spec().dim());
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    double best = 0.0;
    for (std::size_t k = 0; k < op.grid().size(); ++k) {
        best = std::max(best, op.eval_F(op.grid().t(k), zero, zero).norm());
    }
    std::uniform_int_distribution<std::size_t> node(0, op.grid().size() - 1);
    for (int i = 0; i < samples; ++i) {
        const double s = op.grid().t(node(rng));
        best = std::max(best, op.eval_F(s, zero, random_in_ball(rng, n, radius)).norm());
    }
    return best;
}

double estimate_MF(const ProblemSpec& spec, int samples, double radius) {
    ProblemSpec serial = spec;
    serial.parallel = false;
    MildOperator op(serial);
    return estimate_MF(op, samples, radius, spec.seed);
}

double h4_lhs(double M, double span, double lipschitz_F, double lipschitz_H) {
    return M * span * lipschitz_F * (1.0 + lipschitz_H * span);
}

bool HypothesisReport::all_satisfied() const {
    return std::all_of(results.begin(), results.end(), [](const HypothesisResult& r) { return r.satisfied; });
}

const HypothesisResult& HypothesisReport::get(const std::string& name) const {
    for (const auto& r : results) {
        if (r.name == name) return r;
    }
    throw Error(ErrorCode::BadParams, "no hypothesis named " + name);
}

HypothesisReport check_hypotheses(const MildOperator& op) {
    const auto& spec = op.spec();
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double span = spec.S() - spec.s0();
    const int samples = spec.lipschitz_samples;

    HypothesisReport rep;

    HypothesisResult h3{"H3", false, spec.generator.spectral_abscissa(), 0.0, ""};
    try {
        rep.stability = estimate_stability(spec.generator, op.grid());
        h3.satisfied = true;
        h3.note = "exponentially stable: M = " + std::to_string(rep.stability->M) +
                  ", alpha = " + std::to_string(rep.stability->alpha);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotStable) throw;
        h3.note = "generator is not exponentially stable";
    }
    const double M = rep.stability ? rep.stability->M : nan;
    const double m_for_radius = rep.stability ? M : 1.0;

    // M_F at Ψ = 0 seeds the radius of the Ψ ball used for the full estimate.
    const double y0_norm = spec.y0.norm();
    const double mf0 = estimate_MF(op, 100, 0.0, spec.seed);
    const double k0 = 2.0 * m_for_radius * (y0_norm + mf0);
    rep.M_F = estimate_MF(op, samples, k0, spec.seed);
    rep.ball_radius_k = 2.0 * M * (y0_norm + rep.M_F);
    const double radius = 2.0 * m_for_radius * (y0_norm + rep.M_F);

    rep.lipschitz_F_sampled = !spec.lipschitz_F.has_value();
    rep.lipschitz_F = spec.lipschitz_F ? *spec.lipschitz_F : estimate_lipschitz_F(op, samples, radius, spec.seed);
    rep.lipschitz_H_sampled = !spec.lipschitz_H.has_value();
    rep.lipschitz_H = spec.lipschitz_H ? *spec.lipschitz_H : estimate_lipschitz_H(op, samples, radius, spec.seed);

    const auto source = [](bool sampled) {
        return sampled ? std::string("sampled estimate (lower bound of the true constant)")
                       : std::string("provided");
    };
    rep.results.push_back({"H1", std::isfinite(rep.lipschitz_F) && rep.lipschitz_F >= 0.0, rep.lipschitz_F, inf,
                           source(rep.lipschitz_F_sampled)});
    rep.results.push_back({"H2", std::isfinite(rep.lipschitz_H) && rep.lipschitz_H >= 0.0, rep.lipschitz_H, inf,
                           source(rep.lipschitz_H_sampled)});
    rep.results.push_back(h3);

    rep.q = h4_lhs(M, span, rep.lipschitz_F, rep.lipschitz_H);
    rep.q_without_span = M * rep.lipschitz_F * (1.0 + rep.lipschitz_H * span);
    HypothesisResult h4{"H4", h3.satisfied && rep.q < 1.0, rep.q, 1.0, ""};
    if (!h3.satisfied) {
        h4.note = "undefined without a stability certificate";
    } else if (rep.lipschitz_F_sampled || rep.lipschitz_H_sampled) {
        h4.note = "uses sampled Lipschitz estimates; may under-approximate";
    } else {
        h4.note = "uses provided Lipschitz constants";
    }
    rep.results.push_back(h4);
    return rep;
}

HypothesisReport check_hypotheses(const ProblemSpec& spec) {
    MildOperator op(spec);
    return check_hypotheses(op);
}

GronwallReport gronwall_check(const GridFunction& y, const GridFunction& f, const GridFunction& g,
                              const GridFunction& h, double a) {
    const auto& grid = y.grid();
    for (const GridFunction* fn : {&f, &g, &h}) {
        if (fn->size() != grid.size() || fn->dim() != 1) {
            throw Error(ErrorCode::GridMismatch, "gronwall inputs must be scalar functions on one grid");
        }
    }
    if (y.dim() != 1) throw Error(ErrorCode::GridMismatch, "y must be scalar");
    const auto ia = grid.index_of(a);
    const auto count = grid.size();

    for (std::size_t k = ia; k < count; ++k) {
        if (g.scalar_at(k) < 0.0 || h.scalar_at(k) < 0.0) {
            throw Error(ErrorCode::BadParams, "g and h must be nonnegative");
        }
        if (k > ia && f.scalar_at(k) < f.scalar_at(k - 1) - kGronwallTol * std::max(1.0, std::abs(f.scalar_at(k - 1)))) {
            throw Error(ErrorCode::NotNondecreasing, "f decreases at t = " + std::to_string(grid.t(k)));
        }
    }

    // Work on the sub-grid [a, S] through index offsets.
    const auto slice = [&](const std::function<double(std::size_t)>& fn) {
        std::vector<double> v(count, 0.0);
        for (std::size_t k = ia; k < count; ++k) v[k] = fn(k);
        return v;
    };
    const auto cumulative_from_a = [&](const std::vector<double>& v) {
        std::vector<double> out(count, 0.0);
        for (std::size_t k = ia; k + 1 < count; ++k) {
            const double piece = grid.right_scattered(k) ? grid[k].mu * v[k] : 0.5 * grid.step(k) * (v[k] + v[k + 1]);
            out[k + 1] = out[k] + piece;
        }
        return out;
    };

    const auto gy = cumulative_from_a(slice([&](std::size_t k) { return g.scalar_at(k) * y.scalar_at(k); }));
    const auto premise_integrand = slice([&](std::size_t k) { return h.scalar_at(k) * (y.scalar_at(k) + gy[k]); });
    const auto premise_integral = cumulative_from_a(premise_integrand);

    // e_{h+g}(t_k, a) = exp(exponent[k]). The cylinder transform only acts at
    // scattered nodes; continuous pieces integrate h + g itself.
    std::vector<double> exponent(count, 0.0);
    for (std::size_t k = ia; k + 1 < count; ++k) {
        const double p = h.scalar_at(k) + g.scalar_at(k);
        const double piece = grid.right_scattered(k)
                                 ? grid[k].mu * cylinder(p, grid[k].mu)
                                 : 0.5 * grid.step(k) * (p + h.scalar_at(k + 1) + g.scalar_at(k + 1));
        exponent[k + 1] = exponent[k] + piece;
    }
    const auto bound_a_integral =
        cumulative_from_a(slice([&](std::size_t k) { return h.scalar_at(k) * std::exp(exponent[k]); }));

    GronwallReport rep;
    std::vector<double> violated;
    bool f_zero = true;
    bool y_zero = true;
    double worst_premise = 0.0;
    double worst_a = -std::numeric_limits<double>::infinity();
    double worst_b = -std::numeric_limits<double>::infinity();
    for (std::size_t k = ia; k < count; ++k) {
        const double t = grid.t(k);
        if (!grid.timescale().in_tk(t)) continue;
        ++rep.nodes_checked;
        const double yk = y.scalar_at(k);
        const double fk = f.scalar_at(k);
        f_zero = f_zero && fk == 0.0;
        y_zero = y_zero && yk == 0.0;

        const double rhs = fk + premise_integral[k];
        const double excess = yk - rhs;
        worst_premise = std::max(worst_premise, excess);
        if (excess > kGronwallTol * std::max(1.0, std::abs(rhs))) violated.push_back(t);

        const double bound_a = fk * (1.0 + bound_a_integral[k]);
        const double bound_b = fk * std::exp(exponent[k]);
        worst_a = std::max(worst_a, (yk - bound_a) / std::max(1.0, std::abs(bound_a)));
        worst_b = std::max(worst_b, (yk - bound_b) / std::max(1.0, std::abs(bound_b)));
    }
    if (!violated.empty()) {
        throw PremiseViolated(violated, "premise fails at " + std::to_string(violated.size()) + " node(s)");
    }
    rep.premise_max_violation = worst_premise;
    rep.conclusion_a_max_violation = std::max(0.0, worst_a);
    rep.conclusion_b_max_violation = std::max(0.0, worst_b);
    rep.conclusion_a_holds = rep.conclusion_a_max_violation <= kGronwallTol;
    rep.conclusion_b_holds = rep.conclusion_b_max_violation <= kGronwallTol;
    rep.f_identically_zero = f_zero;
    rep.y_identically_zero = y_zero;
    return rep;
}

UniquenessReport uniqueness_probe(const ProblemSpec& spec, const std::vector<Trajectory>& guesses) {
    MildOperator op(spec);
    UniquenessReport rep;
    for (const auto& guess : guesses) {
        require_same_grid(op, guess);
        try {
            auto r = picard_solve(op, nullptr, guess.values());
            rep.fixed_points.emplace_back(std::move(r.trajectory));
            rep.failures.emplace_back();
        } catch (const NoConvergence& e) {
            rep.fixed_points.emplace_back(std::nullopt);
            rep.failures.emplace_back(e.what());
        }
    }
    for (std::size_t i = 0; i < rep.fixed_points.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.fixed_points.size(); ++j) {
            if (rep.fixed_points[i] && rep.fixed_points[j]) {
                rep.max_distance = std::max(
                    rep.max_distance, sup_distance(rep.fixed_points[i]->values(), rep.fixed_points[j]->values()));
            }
        }
    }
    return rep;
}

TruncatedSolution solve_truncated_line(const ProblemSpec& spec, double truncation_T) {
    if (!(truncation_T > 0.0)) throw Error(ErrorCode::BadParams, "truncation_T must be > 0");
    const auto period = spec.timescale.period();
    if (!period) throw Error(ErrorCode::NotTranslationInvariant, "leftward extension needs a period");

    const TimeGrid base_grid(spec.timescale, spec.steps_per_unit);
    const auto cert = estimate_stability(spec.generator, base_grid);

    const auto whole = static_cast<long long>(std::ceil(truncation_T / *period - 1e-12));
    const double lower = spec.s0() - static_cast<double>(whole) * *period;

    ProblemSpec ext = spec;
    ext.timescale = spec.timescale.rewindow(lower, spec.S());
    ext.y0 = Eigen::VectorXd::Zero(spec.y0.size());
    ext.exp_origin = spec.exp_origin.value_or(spec.s0());
    MildOperator op(ext);
    const auto report = picard_solve(op, nullptr);

    auto base = std::make_shared<const TimeGrid>(spec.timescale, spec.steps_per_unit);
    Eigen::MatrixXd values(spec.y0.size(), static_cast<Eigen::Index>(base->size()));
    for (std::size_t i = 0; i < base->size(); ++i) {
        values.col(static_cast<Eigen::Index>(i)) = interpolate(report.trajectory, base->t(i));
    }

    const double k0 = 2.0 * cert.M * estimate_MF(op, 100, 0.0, spec.seed);
    const double mf = estimate_MF(op, spec.lipschitz_samples, k0, spec.seed);
    TruncatedSolution out{Trajectory(base, std::move(values)), lower, 0.0, report.iterations};
    out.error_bound = cert.M * mf * (1.0 + op.grid().mu_sup() * cert.alpha) / cert.alpha *
                      exp_ominus(cert.alpha, spec.s0(), lower, ext.timescale);
    return out;
}

DifferentialResidual differential_residual(const MildOperator& op, const Eigen::MatrixXd& y) {
    const auto& grid = op.grid();
    const Eigen::MatrixXd z = op.inner_integrals(y);
    const Eigen::MatrixXd f = op.forcing(y, z);
    const auto& a = op.spec().generator.matrix();
    DifferentialResidual out;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd deriv = (y.col(kk + 1) - y.col(kk)) / grid.step(k);
        const double r = (deriv - a * y.col(kk) - f.col(kk)).norm();
        out.per_node.push_back(r);
        if (grid.right_scattered(k)) {
            out.scattered_max = std::max(out.scattered_max, r);
        } else {
            out.right_dense_max = std::max(out.right_dense_max, r);
        }
    }
    return out;
}

}  // namespace chronoscale

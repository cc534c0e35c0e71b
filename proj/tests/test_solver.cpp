#include <doctest.h>

#include <cmath>
#include <random>

#include "chronoscale/error.hpp"
#include "chronoscale/solver.hpp"
#include "solver_fixtures.hpp"

using namespace chronoscale;
using namespace fixtures;

namespace {

Trajectory constant_on(const ProblemSpec& spec, double v) {
    MildOperator op(spec);
    return op.constant(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(spec.dim()), v));
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("inner integral examples") {
    {
        const auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"0"}, {"0"}, vec1(1));
        CHECK(inner_integral(spec, constant_on(spec, 3), 1.0)(0) == 0.0);
    }
    {
        const auto spec = make_spec(TimeScale::integers(0, 5), scalar(-1), {"0"}, {"1"}, vec1(1));
        CHECK(inner_integral(spec, constant_on(spec, 0), 3.0)(0) == 3.0);
        CHECK(inner_integral(spec, constant_on(spec, 0), 0.0)(0) == 0.0);
    }
    {
        const auto spec = make_spec(TimeScale::pab(1, 1, 0, 3), scalar(-1), {"0"}, {"y[0]"}, vec1(1), 8);
        CHECK(inner_integral(spec, constant_on(spec, 1), 3.0)(0) == doctest::Approx(3.0).epsilon(1e-14));
    }
}

TEST_CASE("inner integral matches the operator's batch computation") {
    auto spec = example_spec(8);
    MildOperator op(spec);
    const auto y = constant_on(spec, 0.7);
    const Eigen::MatrixXd z = op.inner_integrals(y.values());
    for (std::size_t i = 0; i < op.grid().size(); i += 5) {
        CHECK(inner_integral(spec, y, op.grid().t(i))(0) == doctest::Approx(z(0, static_cast<Eigen::Index>(i))).epsilon(1e-13));
    }
}

TEST_CASE("W closed forms") {
    SUBCASE("homogeneous") {
        const auto spec = make_spec(TimeScale::pab(1, 1, 0, 3), scalar(-1), {"0"}, {"y[0]"}, vec1(2), 8);
        const auto w = apply_W(spec, constant_on(spec, 5));
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(w.scalar_at(i) == doctest::Approx(2 * std::exp(-w.grid().t(i))).epsilon(1e-14));
        }
        CHECK(w.scalar_at(0) == 2.0);
    }
    SUBCASE("constant forcing without generator") {
        const auto spec = make_spec(TimeScale::reals(0, 2), scalar(0), {"0.5"}, {"0"}, vec1(1), 8);
        const auto w = apply_W(spec, constant_on(spec, 0));
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(w.scalar_at(i) == doctest::Approx(1 + 0.5 * w.grid().t(i)).epsilon(1e-14));
        }
    }
    SUBCASE("sum of mu on the integers") {
        const auto spec = make_spec(TimeScale::integers(0, 3), scalar(0), {"1"}, {"0"}, vec1(0), 1);
        CHECK(apply_W(spec, constant_on(spec, 0)).scalar_at(3) == 3.0);
    }
}

TEST_CASE("split identity") {
    SUBCASE("zero trajectory leaves W2 empty") {
        const auto spec = example_spec(8);
        const auto [w1, w2] = split_W(spec, constant_on(spec, 0));
        CHECK(w2.values().cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("W1 never reads y") {
        const auto spec = make_spec(TimeScale::pab(1, 1, 0, 3), scalar(-1), {"0.3*x[0] - 0.2*z[0] + cos(s)"},
                                    {"y[0]*t"}, vec1(1), 8);
        const auto a = split_W(spec, constant_on(spec, 0.1)).first;
        const auto b = split_W(spec, constant_on(spec, 4.0)).first;
        CHECK(a.values() == b.values());
    }
    SUBCASE("random specs") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> d(0.0, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            Eigen::MatrixXd a(2, 2);
            a << -1 + 0.2 * d(rng), 0.3 * d(rng), 0.3 * d(rng), -1 + 0.2 * d(rng);
            const auto ts = rep % 3 == 0 ? TimeScale::reals(0, 2)
                                         : rep % 3 == 1 ? TimeScale::pab(0.5, 0.5, 0, 3) : TimeScale::integers(0, 6);
            auto spec = make_spec(ts, a, {"0.2*sin(x[0]) + 0.1*z[1] + cos(s)", "0.1*x[1]*z[0]"},
                                  {"cos(y[0]) + s*t", "y[1] - y[0]"}, Eigen::Vector2d(d(rng), d(rng)), 8);
            spec.parallel = rep % 2 == 0;
            MildOperator op(spec);
            Eigen::MatrixXd y(2, static_cast<Eigen::Index>(op.grid().size()));
            for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = d(rng);
            const auto [w1, w2] = op.split(y);
            CHECK(((w1 + w2) - op.apply(y)).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    SUBCASE("example spec") {
        const auto spec = example_spec(16);
        const auto y = constant_on(spec, 0.4);
        const auto [w1, w2] = split_W(spec, y);
        CHECK(((w1.values() + w2.values()) - apply_W(spec, y).values()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("picard converges in one iteration for homogeneous problems") {
    auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"0"}, {"0"}, vec1(1.5), 16);
    const auto rep = picard_solve(spec);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.residual == 0.0);
    for (std::size_t i = 0; i < rep.trajectory.size(); ++i) {
        CHECK(rep.trajectory.scalar_at(i) == doctest::Approx(1.5 * std::exp(-rep.trajectory.grid().t(i))).epsilon(1e-14));
    }
}

TEST_CASE("example problem: residual, contraction and ball invariance") {
    auto spec = example_spec(32);
    const auto rep = picard_solve(spec);
    CHECK(rep.converged);
    CHECK(rep.residual <= spec.tol);
    CHECK(rep.iterations <= spec.max_iter);
    CHECK(rep.hypotheses.get("H4").satisfied);
    CHECK(rep.contraction_ratio_theoretical == doctest::Approx(0.105));
    CHECK(rep.contraction_ratio_observed <= rep.contraction_ratio_theoretical + 0.05);
    for (std::size_t k = 1; k < rep.step_norms.size(); ++k) {
        if (rep.step_norms[k - 1] > 1e-13) CHECK(rep.step_norms[k] / rep.step_norms[k - 1] <= rep.contraction_ratio_theoretical + 0.05);
    }
    // Residual re-measured independently.
    CHECK(sup_distance(apply_W(spec, rep.trajectory).values(), rep.trajectory.values()) <= spec.tol);

    // W maps the ball of radius k into itself.
    const double k = rep.ball_radius_k;
    CHECK(k == doctest::Approx(2 * 1.0 * (1.0 + rep.hypotheses.M_F)));
    MildOperator op(spec);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int probe = 0; probe < 20; ++probe) {
        Eigen::MatrixXd y(1, static_cast<Eigen::Index>(op.grid().size()));
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = k * u(rng);
        CHECK(op.apply(y).cwiseAbs().maxCoeff() <= k);
    }
}

TEST_CASE("no convergence carries the step history") {
    auto spec = reals_linear_spec(16);
    spec.max_iter = 2;
    spec.tol = 1e-15;
    try {
        (void)picard_solve(spec);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK(e.step_norms().size() == 3);
    }
}

TEST_CASE("expression failures name the evaluation point") {
    auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"log(x[0] - 5)"}, {"0"}, vec1(1), 4);
    try {
        (void)apply_W(spec, constant_on(spec, 1));
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("F(s = 0") != std::string::npos);
    }
    auto kernel = make_spec(TimeScale::reals(0, 1), scalar(-1), {"z[0]"}, {"1/(s - t)"}, vec1(1), 4);
    try {
        (void)apply_W(kernel, constant_on(kernel, 1));
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("tau =") != std::string::npos);
    }
}

TEST_CASE("lipschitz estimates") {
    const auto ts = TimeScale::reals(0, 1);
    CHECK(estimate_lipschitz_F(make_spec(ts, scalar(-1), {"x[0]"}, {"0"}, vec1(1)), 2000, 3.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
    const double c = 0.7;
    const double est = estimate_lipschitz_F(make_spec(ts, scalar(-1), {"0.7*sin(x[0])"}, {"0"}, vec1(1)), 10000, 3.0);
    CHECK(est <= c + 1e-12);
    CHECK(est >= 0.99 * c);
    CHECK(estimate_lipschitz_F(make_spec(ts, scalar(-1), {"4"}, {"0"}, vec1(1)), 500, 3.0) == 0.0);
    CHECK_THROWS_AS(estimate_lipschitz_F(make_spec(ts, scalar(-1), {"4"}, {"0"}, vec1(1)), 10, 3.0), Error);
}

TEST_CASE("M_F estimates") {
    const auto ts = TimeScale::reals(0, 1);
    CHECK(estimate_MF(make_spec(ts, scalar(-1), {"0"}, {"0"}, vec1(1)), 500, 5.0) == 0.0);
    const double mf = estimate_MF(make_spec(ts, scalar(-1), {"sin(z[0])"}, {"0"}, vec1(1)), 10000, 5.0);
    CHECK(mf <= 1.0);
    CHECK(mf >= 0.999);
    // The decaying term dominates at s0.
    const double ex = estimate_MF(example_spec(8), 1000, 4.0);
    CHECK(ex >= 1.0);
    CHECK(ex <= 1.0 + 0.005 * 4.0 + 1e-12);
}

TEST_CASE("hypothesis checks") {
    SUBCASE("example") {
        const auto rep = check_hypotheses(example_spec(16));
        CHECK(rep.all_satisfied());
        CHECK(rep.stability->M == 1.0);
        CHECK(rep.get("H4").lhs == doctest::Approx(3 * 0.005 * 7).epsilon(1e-14));
        CHECK(rep.q_without_span == doctest::Approx(0.005 * 7).epsilon(1e-14));
    }
    SUBCASE("zero Lipschitz constant") {
        auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"cos(s)"}, {"y[0]"}, vec1(1));
        spec.lipschitz_F = 0.0;
        spec.lipschitz_H = 3.0;
        const auto rep = check_hypotheses(spec);
        CHECK(rep.get("H4").lhs == 0.0);
        CHECK(rep.get("H4").satisfied);
    }
    SUBCASE("boundary is not satisfied") {
        auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"x[0]"}, {"0"}, vec1(1));
        spec.lipschitz_F = 1.0;
        spec.lipschitz_H = 0.0;
        const auto rep = check_hypotheses(spec);
        CHECK(rep.stability->M == 1.0);
        CHECK(rep.get("H4").lhs == 1.0);
        CHECK_FALSE(rep.get("H4").satisfied);
    }
    SUBCASE("unstable generator fails H3 without throwing") {
        auto spec = make_spec(TimeScale::reals(0, 1), scalar(1), {"0"}, {"0"}, vec1(1));
        const auto rep = check_hypotheses(spec);
        CHECK_FALSE(rep.get("H3").satisfied);
        CHECK_FALSE(rep.get("H4").satisfied);
        CHECK_FALSE(rep.all_satisfied());
    }
    SUBCASE("sampled constants are flagged") {
        auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"0.1*sin(x[0])"}, {"cos(y[0])"}, vec1(1));
        spec.lipschitz_samples = 2000;
        const auto rep = check_hypotheses(spec);
        CHECK(rep.lipschitz_F_sampled);
        CHECK(rep.lipschitz_H_sampled);
        CHECK(rep.lipschitz_F <= 0.1 + 1e-12);
        CHECK(rep.lipschitz_H <= 1.0 + 1e-12);
        CHECK(rep.get("H1").note.find("sampled") != std::string::npos);
    }
}

TEST_CASE("uniqueness probe") {
    SUBCASE("example spec from three guesses") {
        auto spec = example_spec(16);
        MildOperator op(spec);
        const std::vector<Trajectory> guesses{op.constant(vec1(1)), op.constant(vec1(0)), op.constant(vec1(2))};
        const auto rep = uniqueness_probe(spec, guesses);
        for (const auto& fp : rep.fixed_points) CHECK(fp.has_value());
        CHECK(rep.max_distance <= 2 * spec.tol);
    }
    SUBCASE("homogeneous problem") {
        auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"0"}, {"0"}, vec1(1), 8);
        MildOperator op(spec);
        const auto rep = uniqueness_probe(spec, {op.constant(vec1(1)), op.constant(vec1(-3))});
        CHECK(rep.max_distance == 0.0);
    }
    SUBCASE("divergent guesses are reported per guess") {
        auto spec = reals_linear_spec(8);
        spec.max_iter = 1;
        spec.tol = 1e-15;
        MildOperator op(spec);
        const auto rep = uniqueness_probe(spec, {op.constant(vec1(1)), op.constant(vec1(0))});
        CHECK_FALSE(rep.fixed_points[0].has_value());
        CHECK_FALSE(rep.failures[0].empty());
    }
}

TEST_CASE("gronwall: trivial equality case") {
    auto g = std::make_shared<const TimeGrid>(TimeScale::pab(1, 1, 0, 5), 8);
    const auto one = GridFunction::scalar(g, [](double) { return 1.0; });
    const auto zero = GridFunction::scalar(g, [](double) { return 0.0; });
    const auto rep = gronwall_check(one, one, zero, zero, 0.0);
    CHECK(rep.conclusion_a_holds);
    CHECK(rep.conclusion_b_holds);
    CHECK(rep.premise_max_violation == 0.0);
}

TEST_CASE("gronwall: saturating sequence on the integers") {
    auto g = std::make_shared<const TimeGrid>(TimeScale::integers(0, 20), 1);
    const auto y = GridFunction::scalar(g, [](double s) { return std::pow(2.0, s); });
    const auto one = GridFunction::scalar(g, [](double) { return 1.0; });
    const auto zero = GridFunction::scalar(g, [](double) { return 0.0; });
    const auto rep = gronwall_check(y, one, zero, one, 0.0);
    CHECK(rep.conclusion_b_holds);
    CHECK(rep.conclusion_a_holds);
    CHECK(rep.nodes_checked == 20);  // the left-scattered maximum is not in T^k
}

TEST_CASE("gronwall: zero forcing forces zero") {
    auto g = std::make_shared<const TimeGrid>(TimeScale::pab(1, 1, 0, 5), 8);
    const auto zero = GridFunction::scalar(g, [](double) { return 0.0; });
    const auto h = GridFunction::scalar(g, [](double s) { return 1.0 + 0.5 * std::sin(s); });
    const auto rep = gronwall_check(zero, zero, h, h, 0.0);
    CHECK(rep.f_identically_zero);
    CHECK(rep.y_identically_zero);
    // Any positive y breaks the premise when f ≡ 0.
    const auto bump = GridFunction::scalar(g, [](double s) { return s > 2 ? 1e-3 : 0.0; });
    CHECK_THROWS_AS(gronwall_check(bump, zero, h, h, 0.0), PremiseViolated);
}

TEST_CASE("gronwall: input validation") {
    auto g = std::make_shared<const TimeGrid>(TimeScale::integers(0, 5), 1);
    const auto dec = GridFunction::scalar(g, [](double s) { return 5 - s; });
    const auto zero = GridFunction::scalar(g, [](double) { return 0.0; });
    try {
        (void)gronwall_check(zero, dec, zero, zero, 0.0);
        FAIL("expected NotNondecreasing");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotNondecreasing);
    }
    const auto big = GridFunction::scalar(g, [](double) { return 3.0; });
    const auto one = GridFunction::scalar(g, [](double) { return 1.0; });
    try {
        (void)gronwall_check(big, one, zero, zero, 0.0);
        FAIL("expected PremiseViolated");
    } catch (const PremiseViolated& e) {
        CHECK(e.nodes().size() == 5);
    }
}

TEST_CASE("truncated line") {
    SUBCASE("homogeneous problem gives zero") {
        auto spec = make_spec(TimeScale::pab(1, 1, 0, 3), scalar(-1), {"0"}, {"0"}, vec1(1), 8);
        const auto sol = solve_truncated_line(spec, 4.0);
        CHECK(sol.trajectory.values().cwiseAbs().maxCoeff() == 0.0);
        CHECK(sol.lower_limit == doctest::Approx(-4.0));
    }
    SUBCASE("constant forcing on the reals tends to the constant") {
        auto spec = make_spec(TimeScale::reals(0, 1), scalar(-1), {"0.5"}, {"0"}, vec1(0), 64);
        spec.quadrature = MildQuadrature::Trapezoid;
        const auto sol = solve_truncated_line(spec, 20.0);
        for (std::size_t i = 0; i < sol.trajectory.size(); ++i) {
            const double s = sol.trajectory.grid().t(i);
            const double exact_truncated = 0.5 * (1 - std::exp(-(s + 20)));
            CHECK(sol.trajectory.scalar_at(i) == doctest::Approx(exact_truncated).epsilon(1e-4));
            CHECK(std::abs(sol.trajectory.scalar_at(i) - 0.5) <= sol.error_bound + 1e-4);
        }
    }
    SUBCASE("doubling the truncation stays within the bound") {
        auto spec = make_spec(TimeScale::pab(1, 1, 0, 3), scalar(-1), {"0.1*sin(x[0]) + cos(s)"}, {"0"}, vec1(0), 8);
        const auto a = solve_truncated_line(spec, 6.0);
        const auto b = solve_truncated_line(spec, 12.0);
        CHECK(sup_distance(a.trajectory.values(), b.trajectory.values()) <= a.error_bound);
        CHECK(b.error_bound < a.error_bound);
    }
    SUBCASE("non-invariant time scales are rejected") {
        auto spec = make_spec(TimeScale::explicit_set({{0, 1}, {1.5, 3}}), scalar(-1), {"1"}, {"0"}, vec1(0), 8);
        try {
            (void)solve_truncated_line(spec, 2.0);
            FAIL("expected NotTranslationInvariant");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotTranslationInvariant);
        }
    }
}

TEST_CASE("differential residual shrinks with the step on the reals") {
    double prev = 0.0;
    for (int spu : {32, 64, 128}) {
        auto spec = reals_linear_spec(spu);
        MildOperator op(spec);
        const auto rep = picard_solve(op, nullptr);
        const auto r = differential_residual(op, rep.trajectory.values());
        CHECK(r.scattered_max == 0.0);
        if (prev > 0.0) CHECK(r.right_dense_max <= 0.65 * prev);
        prev = r.right_dense_max;
    }
}

TEST_CASE("spec validation") {
    auto spec = example_spec(8);
    spec.y0 = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = example_spec(8);
    spec.tol = 0.0;
    CHECK_THROWS_AS(spec.validate(), Error);
}

}  // TEST_SUITE

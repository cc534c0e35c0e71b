#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "chronoscale/kernels.hpp"

using namespace chronoscale;
using namespace chronoscale::kernels;

namespace {

Eigen::MatrixXd random_values(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
    return m;
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a.data()[i], &b.data()[i], sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel kernels agree bit for bit") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd a(2, 2);
    a << -1.0, 0.4, -0.3, -0.7;
    const EvolutionCache cache{Generator(a)};
    const PairEval h = [](double s, double t, std::span<const double> y, std::span<double> out) {
        out[0] = std::sin(s) * std::cos(t) + y[0] * y[1];
        out[1] = std::exp(-(s - t)) * y[1];
    };
    for (const auto& ts : {TimeScale::reals(0, 2), TimeScale::pab(1, 0.5, 0, 5), TimeScale::integers(0, 12),
                           TimeScale::hstep(0.25, 0, 4)}) {
        const TimeGrid grid(ts, 24);
        const PropagatorTable table(grid, cache);
        const PropagatorTable fallback(grid, cache, 0);
        CHECK(table.indexed());
        CHECK_FALSE(fallback.indexed());
        const auto n = static_cast<Eigen::Index>(grid.size());
        const Eigen::MatrixXd y = random_values(rng, 2, n);
        const Eigen::MatrixXd f = random_values(rng, 2, n);
        const Eigen::VectorXd y0 = Eigen::Vector2d(0.5, -1.0);

        CHECK(bitwise_equal(inner_integrals_serial(grid, h, y), inner_integrals_parallel(grid, h, y)));
        for (auto rule : {MildQuadrature::DeltaSum, MildQuadrature::Trapezoid}) {
            const Eigen::MatrixXd ref = mild_sweep_serial(grid, cache, y0, f, rule);
            CHECK(bitwise_equal(ref, mild_sweep_parallel(grid, table, y0, f, rule)));
            CHECK(bitwise_equal(ref, mild_sweep_parallel(grid, fallback, y0, f, rule)));
        }
    }
}

TEST_CASE("sweep closed forms") {
    const EvolutionCache zero{Generator(Eigen::MatrixXd::Zero(1, 1))};
    // A = 0, F ≡ 1 on the integers: W(3) = Σ μ·1 = 3.
    const TimeGrid z(TimeScale::integers(0, 3), 1);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, 4);
    const auto wz = mild_sweep_serial(z, zero, Eigen::VectorXd::Zero(1), ones, MildQuadrature::DeltaSum);
    CHECK(wz(0, 3) == 3.0);

    // A = 0, F ≡ c on the reals: y0 + c·(s − s0) under both rules.
    const TimeGrid r(TimeScale::reals(0, 2), 8);
    const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(r.size()), 0.75);
    for (auto rule : {MildQuadrature::DeltaSum, MildQuadrature::Trapezoid}) {
        const auto w = mild_sweep_serial(r, zero, Eigen::VectorXd::Constant(1, 2.0), c, rule);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(w(0, static_cast<Eigen::Index>(i)) == doctest::Approx(2.0 + 0.75 * r.t(i)).epsilon(1e-14));
        }
    }
}

TEST_CASE("quadrature names round-trip") {
    for (auto rule : {MildQuadrature::DeltaSum, MildQuadrature::Trapezoid}) {
        CHECK(quadrature_from_string(to_string(rule)) == rule);
    }
    CHECK_THROWS(quadrature_from_string("simpson"));
}

TEST_CASE("exceptions thrown inside the parallel region reach the caller") {
    const TimeGrid grid(TimeScale::reals(0, 1), 64);
    const PairEval bad = [](double s, double, std::span<const double>, std::span<double> out) {
        if (s > 0.5) throw std::runtime_error("boom");
        out[0] = 0.0;
    };
    CHECK_THROWS_WITH(inner_integrals_parallel(grid, bad, Eigen::MatrixXd::Zero(1, 65)), "boom");
}

}  // TEST_SUITE

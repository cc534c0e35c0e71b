#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chronoscale/automorphy.hpp"
#include "chronoscale/error.hpp"

using namespace chronoscale;

namespace {

std::shared_ptr<const TimeGrid> grid_of(const TimeScale& ts, int spu) {
    return std::make_shared<const TimeGrid>(ts, spu);
}

}  // namespace

TEST_SUITE("automorphy") {

TEST_CASE("periodic functions are consistent") {
    const auto ts = TimeScale::pab(1, 1, 0, 11);
    const auto f = GridFunction::scalar(grid_of(ts, 16), [](double s) { return std::sin(std::numbers::pi * s); });
    const auto d = aa_diagnose(f, ts, 4);
    CHECK(d.forward_error <= 1e-9);
    CHECK(d.backward_error <= 1e-9);
    CHECK(d.verdict == AAVerdict::ConsistentWithAA);
    CHECK(d.heuristic);
    CHECK(d.shifts_used.size() == 4);
    CHECK(d.cauchy_profile.size() == 4);
}

TEST_CASE("linear drift violates") {
    const auto ts = TimeScale::integers(0, 30);
    const auto f = GridFunction::scalar(grid_of(ts, 1), [](double s) { return s; });
    const auto d = aa_diagnose(f, ts, 5);
    CHECK(d.verdict == AAVerdict::ViolatesAA);
    CHECK(d.backward_error == doctest::Approx(5.0));
}

TEST_CASE("verdict never improves with more shifts") {
    const auto ts = TimeScale::reals(0, 12, 1.0);
    const auto g = grid_of(ts, 8);
    const auto f = GridFunction::scalar(g, [](double s) { return std::sin(s) + 0.001 * s; });
    int worst = 0;
    for (int n = 3; n <= 10; ++n) {
        const auto verdict = aa_diagnose(f, ts, n).verdict;
        const int rank = verdict == AAVerdict::ViolatesAA ? 2 : verdict == AAVerdict::Inconclusive ? 1 : 0;
        CHECK(rank >= worst);
        worst = std::max(worst, rank);
    }
}

TEST_CASE("window and time scale preconditions") {
    const auto short_ts = TimeScale::pab(1, 1, 0, 5);
    const auto f = GridFunction::scalar(grid_of(short_ts, 4), [](double) { return 1.0; });
    try {
        (void)aa_diagnose(f, short_ts, 5);
        FAIL("expected WindowTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WindowTooShort);
    }
    const auto irregular = TimeScale::explicit_set({{0, 1}, {1.2, 2}, {4, 9}});
    const auto h = GridFunction::scalar(grid_of(irregular, 4), [](double) { return 1.0; });
    try {
        (void)aa_diagnose(h, irregular, 3);
        FAIL("expected NotTranslationInvariant");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotTranslationInvariant);
    }
}

TEST_CASE("asymptotic part of the example decays") {
    const auto ts = TimeScale::pab(1, 1, 0, 40);
    const auto g = grid_of(ts, 16);
    const auto principal = GridFunction::scalar(g, [](double s) { return std::sin(std::numbers::pi * s); });
    const auto f = GridFunction::scalar(g, [&](double s) {
        return std::sin(std::numbers::pi * s) + 1.0 * exp_ominus(1.0, s, 0.0, ts);
    });
    const auto d = aaa_diagnose(f, ts, principal);
    CHECK(d.decay_consistent);
    CHECK(d.tail_sup.front().second == doctest::Approx(1.0));
    for (std::size_t k = 1; k < d.tail_sup.size(); ++k) CHECK(d.tail_sup[k].first > d.tail_sup[k - 1].first);
}

TEST_CASE("aaa edge cases") {
    const auto ts = TimeScale::integers(0, 20);
    const auto g = grid_of(ts, 1);
    const auto f = GridFunction::scalar(g, [](double s) { return std::cos(s); });
    const auto self = aaa_diagnose(f, ts, f);
    for (const auto& [start, sup] : self.tail_sup) CHECK(sup == 0.0);
    CHECK(self.decay_consistent);

    const auto shifted = GridFunction::scalar(g, [](double s) { return std::cos(s) - 1.0; });
    CHECK_FALSE(aaa_diagnose(f, ts, shifted).decay_consistent);

    const auto other = GridFunction::scalar(grid_of(TimeScale::integers(0, 19), 1), [](double) { return 0.0; });
    try {
        (void)aaa_diagnose(f, ts, other);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridMismatch);
    }
}

TEST_CASE("bi-almost automorphic kernels") {
    const double two_pi = 2 * std::numbers::pi;
    const auto ts = TimeScale::reals(0, 4 * two_pi, two_pi);
    const auto g = grid_of(ts, 8);
    const auto y = GridFunction::scalar(g, [](double s) { return std::cos(3 * s); });
    const auto env = expr::Env::kernel(1);

    const auto example = expr::VectorExpr::parse({"sin(s)*cos(t)+sin(y[0])+cos(y[0])"}, env);
    const auto d = bi_aa_diagnose(example, ts, y, 3);
    CHECK(d.forward_error <= 1e-9);
    CHECK(d.backward_error <= 1e-9);
    CHECK(d.verdict == AAVerdict::ConsistentWithAA);

    const auto diff = bi_aa_diagnose(expr::VectorExpr::parse({"s - t"}, env), ts, y, 3);
    // Invariant up to the rounding of (s + τ) − (t + τ).
    CHECK(diff.forward_error <= 1e-12);
    CHECK(diff.backward_error <= 1e-12);

    const auto sum = bi_aa_diagnose(expr::VectorExpr::parse({"s + t"}, env), ts, y, 3);
    CHECK(sum.verdict == AAVerdict::ViolatesAA);
    CHECK(sum.backward_error == doctest::Approx(6 * two_pi));
}

TEST_CASE("verdict names") {
    CHECK(std::string(to_string(AAVerdict::ConsistentWithAA)) == "ConsistentWithAA");
    CHECK(std::string(to_string(AAVerdict::ViolatesAA)) == "ViolatesAA");
}

}  // TEST_SUITE

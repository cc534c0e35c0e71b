#include "chronoscale/automorphy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "chronoscale/error.hpp"

namespace chronoscale {

const char* to_string(AAVerdict v) noexcept {
    switch (v) {
        case AAVerdict::ConsistentWithAA: return "ConsistentWithAA";
        case AAVerdict::Inconclusive: return "Inconclusive";
        case AAVerdict::ViolatesAA: return "ViolatesAA";
    }
    return "?";
}

namespace {

constexpr int kMinShifts = 3;
constexpr std::size_t kMaxSquareSide = 64;

std::vector<double> usable_shifts(const TimeScale& ts, int num_shifts) {
    if (num_shifts < 1) throw Error(ErrorCode::BadParams, "num_shifts must be >= 1");
    auto shifts = translation_set(ts);
    if (!ts.period_consistent()) {
        throw Error(ErrorCode::NotTranslationInvariant, "shifting by the period leaves the time scale");
    }
    if (shifts.size() > static_cast<std::size_t>(num_shifts)) shifts.resize(static_cast<std::size_t>(num_shifts));
    if (shifts.size() < static_cast<std::size_t>(kMinShifts)) {
        throw Error(ErrorCode::WindowTooShort, "window holds " + std::to_string(shifts.size()) +
                                                   " period shift(s); at least 3 are needed");
    }
    return shifts;
}

AAVerdict classify(double statistic, const AAThresholds& th) {
    if (!(statistic <= th.violates)) return AAVerdict::ViolatesAA;  // NaN lands here too
    if (statistic <= th.consistent) return AAVerdict::ConsistentWithAA;
    return AAVerdict::Inconclusive;
}

// gap(a, b) returns sup ‖f(· + a) − f(· + b)‖ over the overlap where both
// shifts stay in the window. Each pair is measured on its own overlap, so
// adding shifts can only add terms to the verdict statistic.
AADiagnostic assemble(const std::vector<double>& shifts, const std::function<double(double, double)>& gap,
                      const AAThresholds& th) {
    AADiagnostic d;
    d.shifts_used = shifts;
    std::vector<double> taus{0.0};
    taus.insert(taus.end(), shifts.begin(), shifts.end());
    for (std::size_t n = 0; n + 1 < taus.size(); ++n) d.cauchy_profile.push_back(gap(taus[n + 1], taus[n]));
    d.forward_error = d.cauchy_profile.back();
    for (std::size_t n = 1; n < taus.size(); ++n) d.backward_error = std::max(d.backward_error, gap(taus[n], 0.0));

    double statistic = std::max(d.forward_error, d.backward_error);
    for (double c : d.cauchy_profile) statistic = std::max(statistic, c);
    d.verdict = classify(statistic, th);
    return d;
}

std::vector<std::size_t> overlap_nodes(const TimeGrid& grid, double max_shift) {
    std::vector<std::size_t> out;
    const double limit = grid.timescale().S() - max_shift + kMembershipTol;
    for (std::size_t i = 0; i < grid.size() && grid.t(i) <= limit; ++i) out.push_back(i);
    return out;
}

std::vector<std::size_t> subsample(const std::vector<std::size_t>& idx, std::size_t max_count) {
    if (idx.size() <= max_count) return idx;
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < max_count; ++k) {
        out.push_back(idx[k * (idx.size() - 1) / (max_count - 1)]);
    }
    return out;
}

}  // namespace

AADiagnostic aa_diagnose(const GridFunction& f, const TimeScale& ts, int num_shifts, const AAThresholds& th) {
    const auto shifts = usable_shifts(ts, num_shifts);
    const auto& grid = f.grid();
    const auto gap = [&](double a, double b) {
        double worst = 0.0;
        for (std::size_t i : overlap_nodes(grid, std::max(a, b))) {
            const double s = grid.t(i);
            worst = std::max(worst, (interpolate(f, s + a) - interpolate(f, s + b)).norm());
        }
        return worst;
    };
    return assemble(shifts, gap, th);
}

AAADiagnostic aaa_diagnose(const GridFunction& f, const TimeScale& ts, const GridFunction& principal) {
    const auto& grid = f.grid();
    const auto& other = principal.grid();
    bool same = f.size() == principal.size() && f.dim() == principal.dim();
    for (std::size_t i = 0; same && i < grid.size(); ++i) same = grid.t(i) == other.t(i);
    if (!same) throw Error(ErrorCode::GridMismatch, "f and the principal estimate do not share a grid");
    const auto period = ts.period();
    if (!period) throw Error(ErrorCode::NotTranslationInvariant, "tail windows need a period");

    AAADiagnostic d;
    const Eigen::MatrixXd phi = f.values() - principal.values();
    const double s0 = grid.t(0);
    std::size_t i = 0;
    for (long long w = 0; i < grid.size(); ++w) {
        const double start = s0 + static_cast<double>(w) * *period;
        const double end = start + *period;
        double worst = 0.0;
        bool any = false;
        for (; i < grid.size() && grid.t(i) < end - kMembershipTol; ++i) {
            worst = std::max(worst, phi.col(static_cast<Eigen::Index>(i)).norm());
            any = true;
        }
        if (any) d.tail_sup.emplace_back(start, worst);
    }

    const double first = d.tail_sup.front().second;
    const double last = d.tail_sup.back().second;
    bool monotone = true;
    for (std::size_t k = 1; k < d.tail_sup.size(); ++k) {
        monotone = monotone && d.tail_sup[k].second <= 1.1 * d.tail_sup[k - 1].second;
    }
    d.decay_consistent = monotone && last <= 0.5 * first && last < 1e-3;
    return d;
}

AADiagnostic bi_aa_diagnose(const expr::VectorExpr& H, const TimeScale& ts, const GridFunction& y_sample,
                            int num_shifts, const AAThresholds& th) {
    const auto shifts = usable_shifts(ts, num_shifts);
    const auto& grid = y_sample.grid();
    const auto n = H.size();
    if (y_sample.dim() != n) throw Error(ErrorCode::GridMismatch, "y_sample dimension does not match H");

    const expr::TimeScaleContext context{&ts, ts.s0()};
    const auto gap = [&](double a, double b) {
        const auto idx = subsample(overlap_nodes(grid, std::max(a, b)), kMaxSquareSide);
        Eigen::VectorXd ha(static_cast<Eigen::Index>(n));
        Eigen::VectorXd hb(static_cast<Eigen::Index>(n));
        expr::Bindings bind;
        bind.timescale = &context;
        double worst = 0.0;
        for (std::size_t it : idx) {
            const double t = grid.t(it);
            const Eigen::VectorXd y = y_sample.at(it);
            bind.vectors[0] = std::span<const double>(y.data(), n);
            for (std::size_t is : idx) {
                const double s = grid.t(is);
                bind.scalars = {s + a, t + a};
                H.eval(bind, std::span<double>(ha.data(), n));
                bind.scalars = {s + b, t + b};
                H.eval(bind, std::span<double>(hb.data(), n));
                worst = std::max(worst, (ha - hb).norm());
            }
        }
        return worst;
    };
    return assemble(shifts, gap, th);
}

}  // namespace chronoscale

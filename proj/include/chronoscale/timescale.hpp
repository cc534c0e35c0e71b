#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chronoscale {

/// Absolute tolerance for membership and node matching.
inline constexpr double kMembershipTol = 1e-10;

enum class Family { Reals, Integers, HStep, Pab, Explicit };

const char* to_string(Family family) noexcept;
Family family_from_string(const std::string& name);

/// Closed interval [lo, hi]; lo == hi is an isolated point.
struct Segment {
    double lo = 0.0;
    double hi = 0.0;

    bool isolated() const noexcept { return lo == hi; }
    double length() const noexcept { return hi - lo; }
};

struct FamilyParams {
    double a = 0.0;  // Pab interval length
    double b = 0.0;  // Pab gap length
    double h = 0.0;  // HStep spacing
    std::optional<double> period;    // Reals/Integers only; others derive it
    std::vector<Segment> segments;   // Explicit only
};

/// A bounded time scale stored extensionally as ordered disjoint closed
/// segments. Immutable once built.
class TimeScale {
public:
    static TimeScale build(Family family, const FamilyParams& params, double s0, double S);

    static TimeScale reals(double s0, double S, double period = 1.0);
    static TimeScale integers(double s0, double S);
    static TimeScale hstep(double h, double s0, double S);
    static TimeScale pab(double a, double b, double s0, double S);
    static TimeScale explicit_set(std::vector<Segment> segments);

    Family family() const noexcept { return family_; }
    const FamilyParams& params() const noexcept { return params_; }
    std::span<const Segment> segments() const noexcept { return segments_; }
    double s0() const noexcept { return segments_.front().lo; }
    double S() const noexcept { return segments_.back().hi; }
    std::optional<double> period() const noexcept { return period_; }

    bool contains(double t) const noexcept;

    /// Forward jump σ(t); σ(S) = S.
    double sigma(double t) const;
    /// Graininess μ(t) = σ(t) − t.
    double mu(double t) const;
    /// Membership in 𝕋^k: everything except a left-scattered maximum.
    bool in_tk(double t) const;

    /// Δ-measure of [lo, hi] ∩ 𝕋 counted as a half-open Δ-interval [lo, hi):
    /// continuous lengths plus μ at right-scattered points.
    double delta_length(double lo, double hi) const;
    double delta_length() const { return delta_length(s0(), S()); }

    /// Checks that shifting by the period maps the window into itself.
    bool period_consistent() const;

    /// Same family and parameters on a different window.
    TimeScale rewindow(double s0, double S) const;

private:
    TimeScale(Family family, FamilyParams params, std::vector<Segment> segments,
              std::optional<double> period);

    /// Index of the segment containing t, or npos.
    std::size_t locate(double t) const noexcept;

    Family family_;
    FamilyParams params_;
    std::vector<Segment> segments_;
    std::optional<double> period_;
};

/// {k·period : k = 1..floor((S − s0)/period)}.
std::vector<double> translation_set(const TimeScale& ts);

}  // namespace chronoscale

#include "chronoscale/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chronoscale/error.hpp"

namespace chronoscale {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

void require_window(double s0, double S) {
    if (!std::isfinite(s0) || !std::isfinite(S) || !(s0 < S)) {
        throw Error(ErrorCode::BadParams, "window requires finite s0 < S");
    }
}

// Clip [lo, hi] to [s0, S]; snaps endpoints that sit within tolerance.
std::optional<Segment> clip(double lo, double hi, double s0, double S) {
    double l = std::max(lo, s0);
    double h = std::min(hi, S);
    if (std::abs(l - h) <= kMembershipTol) h = l;
    if (l > h) return std::nullopt;
    return Segment{l, h};
}

}  // namespace

const char* to_string(Family family) noexcept {
    switch (family) {
        case Family::Reals: return "reals";
        case Family::Integers: return "integers";
        case Family::HStep: return "hstep";
        case Family::Pab: return "pab";
        case Family::Explicit: return "explicit";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "reals") return Family::Reals;
    if (name == "integers") return Family::Integers;
    if (name == "hstep") return Family::HStep;
    if (name == "pab") return Family::Pab;
    if (name == "explicit") return Family::Explicit;
    throw Error(ErrorCode::BadParams, "unknown time scale family '" + name + "'");
}

TimeScale::TimeScale(Family family, FamilyParams params, std::vector<Segment> segments,
                     std::optional<double> period)
    : family_(family), params_(std::move(params)), segments_(std::move(segments)),
      period_(period) {}

TimeScale TimeScale::build(Family family, const FamilyParams& params, double s0, double S) {
    require_window(s0, S);
    std::vector<Segment> segs;
    std::optional<double> period;

    switch (family) {
        case Family::Reals: {
            segs.push_back({s0, S});
            period = params.period.value_or(1.0);
            if (!(*period > 0.0)) throw Error(ErrorCode::BadParams, "period must be positive");
            break;
        }
        case Family::Integers: {
            const auto first = static_cast<long long>(std::ceil(s0 - kMembershipTol));
            const auto last = static_cast<long long>(std::floor(S + kMembershipTol));
            for (long long k = first; k <= last; ++k) {
                const auto t = static_cast<double>(k);
                segs.push_back({t, t});
            }
            period = params.period.value_or(1.0);
            if (!(*period > 0.0) || *period != std::round(*period)) {
                throw Error(ErrorCode::BadParams, "integer time scale period must be a positive integer");
            }
            break;
        }
        case Family::HStep: {
            if (!(params.h > 0.0)) throw Error(ErrorCode::BadParams, "hstep requires h > 0");
            const auto first = static_cast<long long>(std::ceil(s0 / params.h - kMembershipTol));
            const auto last = static_cast<long long>(std::floor(S / params.h + kMembershipTol));
            for (long long k = first; k <= last; ++k) {
                const double t = static_cast<double>(k) * params.h;
                segs.push_back({t, t});
            }
            period = params.h;
            break;
        }
        case Family::Pab: {
            if (!(params.a > 0.0) || !(params.b > 0.0)) {
                throw Error(ErrorCode::BadParams, "pab requires a > 0 and b > 0");
            }
            const double p = params.a + params.b;
            const auto first = static_cast<long long>(std::floor(s0 / p));
            const auto last = static_cast<long long>(std::floor(S / p + kMembershipTol));
            for (long long k = first; k <= last; ++k) {
                const double lo = static_cast<double>(k) * p;
                if (auto seg = clip(lo, lo + params.a, s0, S)) segs.push_back(*seg);
            }
            period = p;
            break;
        }
        case Family::Explicit: {
            auto sorted = params.segments;
            for (const auto& seg : sorted) {
                if (!std::isfinite(seg.lo) || !std::isfinite(seg.hi) || seg.lo > seg.hi) {
                    throw Error(ErrorCode::BadParams, "explicit segment must satisfy lo <= hi");
                }
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
            for (std::size_t i = 1; i < sorted.size(); ++i) {
                if (sorted[i].lo <= sorted[i - 1].hi) {
                    throw Error(ErrorCode::BadParams, "explicit segments must be disjoint");
                }
            }
            for (const auto& seg : sorted) {
                if (auto c = clip(seg.lo, seg.hi, s0, S)) segs.push_back(*c);
            }
            break;
        }
    }

    if (segs.empty()) throw Error(ErrorCode::EmptyWindow, "window contains no point of the time scale");
    FamilyParams stored = params;
    if (family != Family::Explicit) stored.segments.clear();
    return TimeScale(family, std::move(stored), std::move(segs), period);
}

TimeScale TimeScale::reals(double s0, double S, double period) {
    FamilyParams p;
    p.period = period;
    return build(Family::Reals, p, s0, S);
}

TimeScale TimeScale::integers(double s0, double S) {
    return build(Family::Integers, {}, s0, S);
}

TimeScale TimeScale::hstep(double h, double s0, double S) {
    FamilyParams p;
    p.h = h;
    return build(Family::HStep, p, s0, S);
}

TimeScale TimeScale::pab(double a, double b, double s0, double S) {
    FamilyParams p;
    p.a = a;
    p.b = b;
    return build(Family::Pab, p, s0, S);
}

TimeScale TimeScale::explicit_set(std::vector<Segment> segments) {
    if (segments.empty()) throw Error(ErrorCode::EmptyWindow, "no segments given");
    double lo = segments.front().lo;
    double hi = segments.front().hi;
    for (const auto& s : segments) {
        lo = std::min(lo, s.lo);
        hi = std::max(hi, s.hi);
    }
    FamilyParams p;
    p.segments = std::move(segments);
    if (lo == hi) {
        // A single point; build() requires s0 < S so assemble directly.
        return TimeScale(Family::Explicit, p, {Segment{lo, lo}}, std::nullopt);
    }
    return build(Family::Explicit, p, lo, hi);
}

TimeScale TimeScale::rewindow(double s0, double S) const {
    return build(family_, params_, s0, S);
}

std::size_t TimeScale::locate(double t) const noexcept {
    // First segment whose hi is not left of t.
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                               [](const Segment& s, double v) { return s.hi + kMembershipTol < v; });
    if (it == segments_.end()) return npos;
    if (t < it->lo - kMembershipTol) return npos;
    return static_cast<std::size_t>(it - segments_.begin());
}

bool TimeScale::contains(double t) const noexcept {
    return locate(t) != npos;
}

double TimeScale::sigma(double t) const {
    const auto i = locate(t);
    if (i == npos) throw Error(ErrorCode::NotInTimeScale, "t = " + std::to_string(t));
    const auto& seg = segments_[i];
    if (!seg.isolated() && t < seg.hi - kMembershipTol) return t;
    if (i + 1 == segments_.size()) return seg.hi;
    return segments_[i + 1].lo;
}

double TimeScale::mu(double t) const {
    const double s = sigma(t);
    const auto i = locate(t);
    const auto& seg = segments_[i];
    // Snap t to the segment edge when it sits at one, so μ is exactly the gap.
    const double base = (s != t && std::abs(t - seg.hi) <= kMembershipTol) ? seg.hi : t;
    return std::max(0.0, s - base);
}

bool TimeScale::in_tk(double t) const {
    if (!contains(t)) return false;
    const auto& last = segments_.back();
    const bool left_scattered_max = last.isolated() && segments_.size() > 1;
    return !(left_scattered_max && std::abs(t - last.hi) <= kMembershipTol);
}

double TimeScale::delta_length(double lo, double hi) const {
    if (hi < lo) return -delta_length(hi, lo);
    double total = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& seg = segments_[i];
        const double l = std::max(seg.lo, lo);
        const double h = std::min(seg.hi, hi);
        if (h > l) total += h - l;
        const bool right_scattered = i + 1 < segments_.size();
        if (right_scattered && seg.hi >= lo - kMembershipTol && seg.hi < hi - kMembershipTol) {
            total += segments_[i + 1].lo - seg.hi;
        }
    }
    return total;
}

bool TimeScale::period_consistent() const {
    if (!period_) return false;
    const double p = *period_;
    if (p > S() - s0()) return true;  // nothing to check on this window
    for (const auto& seg : segments_) {
        const double lo = seg.lo + p;
        const double hi = std::min(seg.hi + p, S());
        if (lo > S() + kMembershipTol) break;
        // Every point of [lo, hi] must lie in a single segment of the window.
        const auto i = locate(lo);
        if (i == npos) return false;
        if (segments_[i].hi < hi - kMembershipTol) return false;
    }
    return true;
}

std::vector<double> translation_set(const TimeScale& ts) {
    const auto period = ts.period();
    if (!period) {
        throw Error(ErrorCode::NotTranslationInvariant, "time scale has no translation period");
    }
    const auto count = static_cast<long long>(std::floor((ts.S() - ts.s0()) / *period + kMembershipTol));
    std::vector<double> shifts;
    shifts.reserve(static_cast<std::size_t>(std::max(0LL, count)));
    for (long long k = 1; k <= count; ++k) shifts.push_back(static_cast<double>(k) * *period);
    return shifts;
}

}  // namespace chronoscale

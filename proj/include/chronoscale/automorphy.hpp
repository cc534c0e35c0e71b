#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chronoscale/calculus.hpp"
#include "chronoscale/expr.hpp"
#include "chronoscale/timescale.hpp"

// Finite-window diagnostics for almost automorphic behavior. None of these
// functions prove membership; they run falsifiable tests along the shift
// sequence τ_n = n·period and report the gaps they observe.
namespace chronoscale {

enum class AAVerdict { ConsistentWithAA, Inconclusive, ViolatesAA };

const char* to_string(AAVerdict v) noexcept;

struct AAThresholds {
    double consistent = 1e-6;
    double violates = 1e-2;
};

inline constexpr const char* kHeuristicNote = "heuristic, finite-window";

struct AADiagnostic {
    std::vector<double> shifts_used;
    /// sup ‖f(s + τ_{N−1}) − f̄(s)‖ with f̄ the copy shifted by τ_N.
    double forward_error = 0.0;
    /// max_n sup ‖f(s + τ_n) − f(s)‖, i.e. how far back-shifting f̄ lands from f.
    double backward_error = 0.0;
    /// Entry n is sup ‖f(s + τ_{n+1}) − f(s + τ_n)‖ over that pair's overlap.
    std::vector<double> cauchy_profile;
    AAVerdict verdict = AAVerdict::Inconclusive;
    bool heuristic = true;
    std::string note = kHeuristicNote;
};

struct AAADiagnostic {
    std::vector<std::pair<double, double>> tail_sup;  // (window start, sup ‖φ̂‖)
    bool decay_consistent = false;
    bool heuristic = true;
    std::string note = kHeuristicNote;
};

/// Requires at least 3 shifts that fit in the window; `num_shifts` beyond
/// what fits is clamped. Throws NotTranslationInvariant or WindowTooShort.
AADiagnostic aa_diagnose(const GridFunction& f, const TimeScale& ts, int num_shifts,
                         const AAThresholds& thresholds = {});

/// φ̂ = f − principal over consecutive windows one period wide. Throws
/// GridMismatch when the two functions do not share nodes.
AAADiagnostic aaa_diagnose(const GridFunction& f, const TimeScale& ts, const GridFunction& principal);

/// Diagonal shifts (s, t) → (s + τ_n, t + τ_n) of H(s, t, y) with y taken from
/// y_sample(t) and held fixed, on a node square subsampled to at most 64×64.
AADiagnostic bi_aa_diagnose(const expr::VectorExpr& H, const TimeScale& ts, const GridFunction& y_sample,
                            int num_shifts, const AAThresholds& thresholds = {});

}  // namespace chronoscale

#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "chronoscale/automorphy.hpp"
#include "chronoscale/solver.hpp"

namespace chronoscale {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Header `t,sigma,mu,y0..y{n-1},z0..z{n-1}`, one row per node.
void write_trajectory_csv(std::ostream& out, const Trajectory& y, const Eigen::MatrixXd& z);

// Non-finite numbers serialize as null.
nlohmann::json to_json(const HypothesisReport& rep);
nlohmann::json to_json(const SolverReport& rep);
nlohmann::json to_json(const AADiagnostic& d);
nlohmann::json to_json(const AAADiagnostic& d);
nlohmann::json to_json(const DifferentialResidual& r);

/// Fixed-width table of {hypothesis, lhs, rhs, satisfied}.
void print_hypothesis_table(std::ostream& out, const HypothesisReport& rep);

}  // namespace chronoscale

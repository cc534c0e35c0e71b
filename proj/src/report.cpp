#include "chronoscale/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace chronoscale {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& y, const Eigen::MatrixXd& z) {
    const auto n = y.dim();
    out << "t,sigma,mu";
    for (std::size_t c = 0; c < n; ++c) out << ",y" << c;
    for (std::size_t c = 0; c < n; ++c) out << ",z" << c;
    out << '\n';
    const auto& grid = y.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        out << format_double(grid[i].t) << ',' << format_double(grid[i].sigma) << ',' << format_double(grid[i].mu);
        for (std::size_t c = 0; c < n; ++c) out << ',' << format_double(y.values()(static_cast<Eigen::Index>(c), col));
        for (std::size_t c = 0; c < n; ++c) out << ',' << format_double(z(static_cast<Eigen::Index>(c), col));
        out << '\n';
    }
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(num(x));
    return arr;
}

}  // namespace

json to_json(const HypothesisReport& rep) {
    json results = json::array();
    for (const auto& r : rep.results) {
        results.push_back({{"name", r.name}, {"satisfied", r.satisfied}, {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)},
                           {"note", r.note}});
    }
    json stability = nullptr;
    if (rep.stability) {
        stability = {{"M", num(rep.stability->M)},
                     {"alpha", num(rep.stability->alpha)},
                     {"max_violation", num(rep.stability->max_violation)},
                     {"pairs_checked", rep.stability->pairs_checked}};
    }
    return {{"results", results},
            {"all_satisfied", rep.all_satisfied()},
            {"stability", stability},
            {"lipschitz_F", num(rep.lipschitz_F)},
            {"lipschitz_F_sampled", rep.lipschitz_F_sampled},
            {"lipschitz_H", num(rep.lipschitz_H)},
            {"lipschitz_H_sampled", rep.lipschitz_H_sampled},
            {"M_F", num(rep.M_F)},
            {"ball_radius_k", num(rep.ball_radius_k)},
            {"q", num(rep.q)},
            {"q_without_span", num(rep.q_without_span)}};
}

json to_json(const SolverReport& rep) {
    const auto& grid = rep.trajectory.grid();
    json t = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) t.push_back(num(grid.t(i)));
    const auto rows = [](const Eigen::MatrixXd& m) {
        json out = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
            out.push_back(row);
        }
        return out;
    };
    json hyp_results = json::array();
    for (const auto& r : rep.hypotheses.results) {
        hyp_results.push_back({{"name", r.name}, {"satisfied", r.satisfied}, {"lhs", num(r.lhs)},
                               {"rhs", num(r.rhs)}});
    }
    return {{"converged", rep.converged},
            {"iterations", rep.iterations},
            {"step_norms", nums(rep.step_norms)},
            {"contraction_ratio_observed", num(rep.contraction_ratio_observed)},
            {"contraction_ratio_theoretical", num(rep.contraction_ratio_theoretical)},
            {"hypothesis_results", hyp_results},
            {"hypotheses", to_json(rep.hypotheses)},
            {"residual", num(rep.residual)},
            {"ball_radius_k", num(rep.ball_radius_k)},
            {"trajectory", {{"t", t}, {"y", rows(rep.trajectory.values())}, {"z", rows(rep.z)}}}};
}

json to_json(const AADiagnostic& d) {
    return {{"kind", "aa"},
            {"shifts_used", nums(d.shifts_used)},
            {"forward_error", num(d.forward_error)},
            {"backward_error", num(d.backward_error)},
            {"cauchy_profile", nums(d.cauchy_profile)},
            {"verdict", to_string(d.verdict)},
            {"heuristic", d.heuristic},
            {"note", d.note}};
}

json to_json(const AAADiagnostic& d) {
    json tails = json::array();
    for (const auto& [start, sup] : d.tail_sup) tails.push_back({{"window_start", num(start)}, {"sup", num(sup)}});
    return {{"kind", "aaa"},
            {"tail_sup", tails},
            {"decay_consistent", d.decay_consistent},
            {"heuristic", d.heuristic},
            {"note", d.note}};
}

json to_json(const DifferentialResidual& r) {
    return {{"right_dense_max", num(r.right_dense_max)}, {"scattered_max", num(r.scattered_max)}};
}

void print_hypothesis_table(std::ostream& out, const HypothesisReport& rep) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-24s %-24s %s\n", "hypothesis", "lhs", "rhs", "satisfied");
    out << line;
    for (const auto& r : rep.results) {
        std::snprintf(line, sizeof line, "%-10s %-24s %-24s %s\n", r.name.c_str(), format_double(r.lhs).c_str(),
                      format_double(r.rhs).c_str(), r.satisfied ? "yes" : "no");
        out << line;
    }
}

}  // namespace chronoscale

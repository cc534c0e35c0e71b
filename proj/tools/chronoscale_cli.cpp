#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "chronoscale/automorphy.hpp"
#include "chronoscale/config.hpp"
#include "chronoscale/error.hpp"
#include "chronoscale/report.hpp"
#include "chronoscale/solver.hpp"

namespace fs = std::filesystem;
using namespace chronoscale;
using nlohmann::json;

namespace {

enum Exit : int {
    kOk = 0,
    kConfig = 1,
    kNoConvergence = 2,
    kHypothesis = 3,
    kViolates = 4,
    kInconclusive = 5,
};

struct Common {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

void log(const Common& c, const std::string& msg) {
    if (c.verbose) std::cerr << "[chronoscale] " << msg << '\n';
}

Config load(const Common& c) {
    if (c.config.empty()) throw ConfigError("", "--config is required");
    Config cfg = load_config(c.config);
    if (c.seed) cfg.spec.seed = *c.seed;
    return cfg;
}

fs::path resolve(const Common& c, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : fs::path(c.out_dir) / path;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("", "cannot write " + path.string());
    out << content;
}

json problem_json(const ProblemSpec& spec) {
    return {{"family", to_string(spec.timescale.family())},
            {"s0", spec.s0()},
            {"S", spec.S()},
            {"steps_per_unit", spec.steps_per_unit},
            {"dim", spec.dim()},
            {"tol", spec.tol},
            {"max_iter", spec.max_iter},
            {"quadrature", kernels::to_string(spec.quadrature)},
            {"seed", spec.seed}};
}

int cmd_solve(const Common& c) {
    const Config cfg = load(c);
    const ProblemSpec& spec = cfg.spec;
    MildOperator op(spec);
    log(c, "grid has " + std::to_string(op.grid().size()) + " nodes");
    const HypothesisReport hyp = check_hypotheses(op);
    log(c, "hypotheses checked, H4 lhs = " + format_double(hyp.q));

    json doc = {{"schema", kConfigSchema}, {"problem", problem_json(spec)}};
    int code = kOk;
    try {
        const SolverReport rep = picard_solve(op, &hyp);
        log(c, "converged after " + std::to_string(rep.iterations) + " iterations");
        doc.update(to_json(rep));
        doc["differential_residual"] = to_json(differential_residual(op, rep.trajectory.values()));

        std::ostringstream csv;
        write_trajectory_csv(csv, rep.trajectory, rep.z);
        write_file(resolve(c, cfg.output.trajectory_csv), csv.str());
    } catch (const NoConvergence& e) {
        std::cerr << e.what() << '\n';
        SolverReport failed{op.constant(spec.y0), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.dim()),
                                                                         static_cast<Eigen::Index>(op.grid().size())),
                            static_cast<int>(e.step_norms().size()), e.step_norms(), 0.0, hyp.q, hyp, 0.0,
                            hyp.ball_radius_k, false};
        failed.residual = e.step_norms().empty() ? 0.0 : e.step_norms().back();
        doc.update(to_json(failed));
        doc.erase("trajectory");
        doc["trajectory"] = nullptr;
        code = kNoConvergence;
    }
    write_file(resolve(c, cfg.output.report_json), doc.dump(2) + "\n");
    return code;
}

int cmd_check(const Common& c) {
    const Config cfg = load(c);
    MildOperator op(cfg.spec);
    const HypothesisReport hyp = check_hypotheses(op);
    print_hypothesis_table(std::cout, hyp);
    if (c.verbose) std::cout << to_json(hyp).dump(2) << '\n';
    return hyp.all_satisfied() ? kOk : kHypothesis;
}

struct ExpfunArgs {
    std::string family = "reals";
    double a = 1.0;
    double b = 1.0;
    double h = 1.0;
    double alpha = 1.0;
    double s0 = 0.0;
    double S = 10.0;
    int steps = 16;
};

int cmd_expfun(const ExpfunArgs& args) {
    if (!(args.alpha > 0.0)) throw Error(ErrorCode::BadParams, "alpha must be > 0");
    FamilyParams params;
    params.a = args.a;
    params.b = args.b;
    params.h = args.h;
    const TimeScale ts = TimeScale::build(family_from_string(args.family), params, args.s0, args.S);
    const TimeGrid grid(ts, args.steps);
    std::cout << "t,e_ominus_alpha\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.t(i);
        std::cout << format_double(t) << ',' << format_double(exp_ominus(args.alpha, t, ts.s0(), ts)) << '\n';
    }
    return kOk;
}

int verdict_exit(AAVerdict v) {
    switch (v) {
        case AAVerdict::ConsistentWithAA: return kOk;
        case AAVerdict::ViolatesAA: return kViolates;
        case AAVerdict::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

int cmd_diagnose(const Common& c, const std::string& target, std::optional<int> shifts_flag) {
    Config cfg = load(c);
    ProblemSpec spec = cfg.spec;
    if (cfg.diagnostics.window_end) {
        spec.timescale = spec.timescale.rewindow(spec.s0(), *cfg.diagnostics.window_end);
    }
    const int shifts = shifts_flag.value_or(cfg.diagnostics.shifts);
    // Diagnostics need a shift period before any work is done.
    if (!spec.timescale.period() || !spec.timescale.period_consistent()) {
        throw Error(ErrorCode::NotTranslationInvariant, "diagnostics need a translation-invariant time scale");
    }

    json doc = {{"schema", kConfigSchema}, {"target", target}};
    AADiagnostic diag;
    if (target == "F") {
        ProblemSpec serial = spec;
        serial.parallel = false;
        MildOperator op(serial);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.dim()));
        const auto f = GridFunction::sample(op.grid_ptr(), spec.dim(),
                                            [&](double s) { return op.eval_F(s, zero, zero); });
        doc["sampled"] = "F(s, 0, 0)";
        diag = aa_diagnose(f, spec.timescale, shifts);
    } else if (target == "H") {
        auto grid = std::make_shared<const TimeGrid>(spec.timescale, spec.steps_per_unit);
        const Trajectory y(grid, spec.y0.replicate(1, static_cast<Eigen::Index>(grid->size())));
        doc["sampled"] = "H(s, t, y0)";
        diag = bi_aa_diagnose(spec.H, spec.timescale, y, shifts);
    } else {
        const double T = spec.truncation_T.value_or(10.0);
        const TruncatedSolution sol = solve_truncated_line(spec, T);
        log(c, "truncated solve finished after " + std::to_string(sol.iterations) + " iterations");
        doc["truncation"] = {{"T", T}, {"lower_limit", sol.lower_limit}, {"error_bound", sol.error_bound}};
        diag = aa_diagnose(sol.trajectory, spec.timescale, shifts);
    }
    doc["diagnostic"] = to_json(diag);
    std::cout << doc.dump(2) << '\n';
    return verdict_exit(diag.verdict);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integro-dynamic equations on time scales: mild solutions, hypothesis checks, diagnostics"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--config", common.config, "Path to a chronoscale/v1 JSON config");
    app.add_option("--out-dir", common.out_dir, "Directory for relative output paths")->capture_default_str();
    app.add_option("--seed", common.seed, "Override the sampling seed");
    app.add_flag("--verbose", common.verbose, "Progress messages on stderr");

    auto* solve = app.add_subcommand("solve", "Picard solve; writes trajectory CSV and report JSON");
    auto* check = app.add_subcommand("check", "Check hypotheses H1-H4 only");
    auto* expfun = app.add_subcommand("expfun", "Tabulate e_{(-)alpha}(t, s0) as CSV");
    auto* diagnose = app.add_subcommand("diagnose", "Automorphy diagnostics as JSON");
    for (auto* sub : {solve, check, expfun, diagnose}) sub->fallthrough();

    ExpfunArgs ex;
    expfun->add_option("--family", ex.family, "reals|integers|hstep|pab")->capture_default_str();
    expfun->add_option("--a", ex.a, "pab interval length")->capture_default_str();
    expfun->add_option("--b", ex.b, "pab gap length")->capture_default_str();
    expfun->add_option("--spacing", ex.h, "hstep spacing h")->capture_default_str();
    expfun->add_option("--alpha", ex.alpha, "alpha > 0")->capture_default_str();
    expfun->add_option("--s0", ex.s0, "window start")->capture_default_str();
    expfun->add_option("--S", ex.S, "window end")->capture_default_str();
    expfun->add_option("--steps", ex.steps, "steps per unit on continuous pieces")->capture_default_str();

    std::string target = "solution";
    std::optional<int> shifts;
    diagnose->add_option("--target", target, "F|H|solution")
        ->check(CLI::IsMember({"F", "H", "solution"}))
        ->capture_default_str();
    diagnose->add_option("--shifts", shifts, "Number of period shifts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*solve) return cmd_solve(common);
        if (*check) return cmd_check(common);
        if (*expfun) return cmd_expfun(ex);
        return cmd_diagnose(common, target, shifts);
    } catch (const ConfigError& e) {
        std::cerr << "config error at \"" << e.pointer() << "\": " << e.what() << '\n';
        return kConfig;
    } catch (const NoConvergence& e) {
        std::cerr << e.what() << '\n';
        return kNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kConfig;
    }
}

#include "chronoscale/config.hpp"

#include <cmath>
#include <fstream>

#include "chronoscale/error.hpp"

namespace chronoscale {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base + "/" + key; }

const json& member(const json& obj, const std::string& base, const std::string& key) {
    if (!obj.is_object()) throw ConfigError(base, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(base, key), "required member is missing");
    return *it;
}

const json* optional_member(const json& obj, const std::string& base, const std::string& key) {
    if (!obj.is_object()) throw ConfigError(base, "expected an object");
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& ptr) {
    if (!v.is_number()) throw ConfigError(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(ptr, "expected a finite number");
    return d;
}

int integer(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) throw ConfigError(ptr, "expected an integer");
    return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& ptr) {
    if (!v.is_array()) throw ConfigError(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], join(ptr, std::to_string(i))));
    return out;
}

std::string text(const json& v, const std::string& ptr) {
    if (!v.is_string()) throw ConfigError(ptr, "expected a string");
    return v.get<std::string>();
}

std::optional<double> optional_number(const json& obj, const std::string& base, const std::string& key) {
    const json* v = optional_member(obj, base, key);
    if (!v) return std::nullopt;
    return number(*v, join(base, key));
}

TimeScale parse_timescale(const json& ts, int& steps_per_unit) {
    const std::string base = "/timescale";
    Family family;
    try {
        family = family_from_string(text(member(ts, base, "family"), "/timescale/family"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("/timescale/family", e.what());
    }
    FamilyParams params;
    const auto need = [&](const char* key) { return number(member(ts, base, key), join(base, key)); };
    if (family == Family::Pab) {
        params.a = need("a");
        params.b = need("b");
    } else if (family == Family::HStep) {
        params.h = need("h");
    } else if (family == Family::Explicit) {
        const json& segs = member(ts, base, "segments");
        if (!segs.is_array()) throw ConfigError("/timescale/segments", "expected an array of [lo, hi] pairs");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto ptr = "/timescale/segments/" + std::to_string(i);
            const auto pair = numbers(segs[i], ptr);
            if (pair.size() != 2) throw ConfigError(ptr, "expected [lo, hi]");
            params.segments.push_back({pair[0], pair[1]});
        }
    }
    params.period = optional_number(ts, base, "period");
    const double s0 = need("s0");
    const double S = need("S");
    steps_per_unit = integer(member(ts, base, "steps_per_unit"), "/timescale/steps_per_unit");
    if (steps_per_unit < 1) throw ConfigError("/timescale/steps_per_unit", "must be >= 1");
    try {
        return TimeScale::build(family, params, s0, S);
    } catch (const Error& e) {
        throw ConfigError(base, e.what());
    }
}

expr::VectorExpr parse_components(const json& doc, const std::string& key, const expr::Env& env, std::size_t n) {
    const std::string base = "/" + key;
    const json& comps = member(member(doc, "", key), base, "components");
    const std::string ptr = base + "/components";
    if (!comps.is_array()) throw ConfigError(ptr, "expected an array of expression strings");
    if (comps.size() != n) {
        throw ConfigError(ptr, "expected " + std::to_string(n) + " components, found " + std::to_string(comps.size()));
    }
    std::vector<expr::Expr> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto p = join(ptr, std::to_string(i));
        try {
            out.push_back(expr::parse(text(comps[i], p), env));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(p, e.what());
        }
    }
    return expr::VectorExpr(std::move(out));
}

}  // namespace

Config parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "expected a JSON object");
    const auto schema = text(member(doc, "", "schema"), "/schema");
    if (schema != kConfigSchema) {
        throw ConfigError("/schema", "unsupported schema \"" + schema + "\", expected \"" + kConfigSchema + "\"");
    }

    Config cfg;
    ProblemSpec& spec = cfg.spec;
    spec.timescale = parse_timescale(member(doc, "", "timescale"), spec.steps_per_unit);

    const json& gen = member(doc, "", "generator");
    const int n = integer(member(gen, "/generator", "n"), "/generator/n");
    if (n < 1) throw ConfigError("/generator/n", "must be >= 1");
    const auto entries = numbers(member(gen, "/generator", "matrix"), "/generator/matrix");
    if (entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw ConfigError("/generator/matrix", "expected n*n = " + std::to_string(n * n) + " entries");
    }
    Eigen::MatrixXd a(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) a(r, c) = entries[static_cast<std::size_t>(r * n + c)];
    }
    spec.generator = Generator(a);

    const auto y0 = numbers(member(member(doc, "", "initial"), "/initial", "y0"), "/initial/y0");
    if (y0.size() != static_cast<std::size_t>(n)) {
        throw ConfigError("/initial/y0", "expected " + std::to_string(n) + " entries to match the generator");
    }
    spec.y0 = Eigen::Map<const Eigen::VectorXd>(y0.data(), n);

    const auto dim = static_cast<std::size_t>(n);
    spec.F = parse_components(doc, "F", expr::Env::forcing(dim), dim);
    spec.H = parse_components(doc, "H", expr::Env::kernel(dim), dim);

    if (const json* solver = optional_member(doc, "", "solver")) {
        const std::string base = "/solver";
        if (auto v = optional_number(*solver, base, "tol")) {
            if (!(*v > 0.0)) throw ConfigError("/solver/tol", "must be > 0");
            spec.tol = *v;
        }
        if (const json* v = optional_member(*solver, base, "max_iter")) {
            spec.max_iter = integer(*v, "/solver/max_iter");
            if (spec.max_iter < 1) throw ConfigError("/solver/max_iter", "must be >= 1");
        }
        spec.lipschitz_F = optional_number(*solver, base, "lipschitz_F");
        spec.lipschitz_H = optional_number(*solver, base, "lipschitz_H");
        if (spec.lipschitz_F && *spec.lipschitz_F < 0.0) throw ConfigError("/solver/lipschitz_F", "must be >= 0");
        if (spec.lipschitz_H && *spec.lipschitz_H < 0.0) throw ConfigError("/solver/lipschitz_H", "must be >= 0");
        spec.truncation_T = optional_number(*solver, base, "truncation_T");
        if (spec.truncation_T && !(*spec.truncation_T > 0.0)) {
            throw ConfigError("/solver/truncation_T", "must be > 0");
        }
        if (const json* v = optional_member(*solver, base, "quadrature")) {
            try {
                spec.quadrature = kernels::quadrature_from_string(text(*v, "/solver/quadrature"));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError("/solver/quadrature", e.what());
            }
        }
        if (const json* v = optional_member(*solver, base, "seed")) {
            if (!v->is_number_unsigned()) throw ConfigError("/solver/seed", "expected a nonnegative integer");
            spec.seed = v->get<std::uint64_t>();
        }
        if (const json* v = optional_member(*solver, base, "lipschitz_samples")) {
            spec.lipschitz_samples = integer(*v, "/solver/lipschitz_samples");
            if (spec.lipschitz_samples < 100) throw ConfigError("/solver/lipschitz_samples", "must be >= 100");
        }
        if (const json* v = optional_member(*solver, base, "parallel")) {
            if (!v->is_boolean()) throw ConfigError("/solver/parallel", "expected a boolean");
            spec.parallel = v->get<bool>();
        }
    }

    if (const json* out = optional_member(doc, "", "output")) {
        if (const json* v = optional_member(*out, "/output", "trajectory_csv")) {
            cfg.output.trajectory_csv = text(*v, "/output/trajectory_csv");
        }
        if (const json* v = optional_member(*out, "/output", "report_json")) {
            cfg.output.report_json = text(*v, "/output/report_json");
        }
    }

    if (const json* diag = optional_member(doc, "", "diagnostics")) {
        cfg.diagnostics.window_end = optional_number(*diag, "/diagnostics", "window_end");
        if (cfg.diagnostics.window_end && !(*cfg.diagnostics.window_end > spec.s0())) {
            throw ConfigError("/diagnostics/window_end", "must exceed s0");
        }
        if (const json* v = optional_member(*diag, "/diagnostics", "shifts")) {
            cfg.diagnostics.shifts = integer(*v, "/diagnostics/shifts");
            if (cfg.diagnostics.shifts < 1) throw ConfigError("/diagnostics/shifts", "must be >= 1");
        }
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

}  // namespace chronoscale

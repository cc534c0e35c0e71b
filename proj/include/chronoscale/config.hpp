#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "chronoscale/solver.hpp"

namespace chronoscale {

inline constexpr const char* kConfigSchema = "chronoscale/v1";

struct OutputPaths {
    std::string trajectory_csv = "trajectory.csv";
    std::string report_json = "report.json";
};

struct DiagnosticsOptions {
    std::optional<double> window_end;  // rewindow the time scale to [s0, window_end]
    int shifts = 5;
};

struct Config {
    ProblemSpec spec;
    OutputPaths output;
    DiagnosticsOptions diagnostics;
};

/// Validates a "chronoscale/v1" document. Every failure is a ConfigError
/// whose pointer names the offending member ("/initial/y0").
Config parse_config(const nlohmann::json& doc);
/// Reads and parses a file; unreadable files and JSON syntax errors report
/// the pointer "" (document root).
Config load_config(const std::filesystem::path& path);

}  // namespace chronoscale

#pragma once

#include <map>
#include <string>
#include <vector>

#include "sbl/boundary.hpp"
#include "sbl/config.hpp"
#include "sbl/entropy.hpp"
#include "sbl/walk.hpp"

namespace sbl {

inline constexpr const char* kVersion = "0.1.0";

struct CheckResult {
    std::string name;
    std::string status; // pass | fail | flagged | skipped
    std::string detail;
};

struct RunManifest {
    ExperimentConfig config;
    std::string version = kVersion;
    std::string started_at; // wall clock; the only nondeterministic field
    double wall_seconds = 0.0;
    std::map<std::string, std::string> files;  // emitted file -> sha256
    std::map<std::string, std::string> values; // scalar summaries
    std::map<std::string, std::string> verdicts;
    std::vector<CheckResult> checks;

    bool ok() const;
    std::string to_json() const;
};

// --- plumbing ---------------------------------------------------------------

std::string sha256_hex(const std::string& bytes);

// Writes via a temp file + rename so readers never observe partial content.
void write_file_atomic(const std::string& path, const std::string& content);

std::string series_csv(const EntropySeries& s);
std::string cylinder_csv(const std::vector<HittingOracle::Row>& rows, const Alphabet& alphabet);
// Per-k slope samples: x=k, y=value/k, err=err/k.
std::string slope_plot_csv(const EntropySeries& s);
std::string svg_line_chart(const EntropySeries& s, const std::string& title);

// --- drivers ----------------------------------------------------------------

// Builds the configured measure, computes series / boundary tables / stopping
// statistics, runs the built-in consistency checks, and writes everything
// (CSVs + manifest.json) under the output directory.
RunManifest run_experiment(const ExperimentConfig& cfg);

// Self-contained invariant suite over stock measures; independent of the
// config except for seed/out. `inject_fault` ("lambda-table") deliberately
// corrupts one internal table to prove the checks can fail.
RunManifest verify_suite(const ExperimentConfig& cfg, const std::string& inject_fault = "");

std::string resolve_out_dir(const ExperimentConfig& cfg);

} // namespace sbl

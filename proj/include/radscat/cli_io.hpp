#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "radscat/scenarios.hpp"

namespace radscat {

// Line-oriented config: "[section]" headers and "key = value" lines, '#'
// starts a comment. Sections: [run], [data.F0], [data.G0], [grid], [params],
// [acceptance]. Data sections take repeated "mode = l m <profile>" lines.
// Unknown sections or keys, duplicates and out-of-range values raise
// ConfigError carrying the line number.
RunSpec parse_config(const std::string& text);
RunSpec load_config(const std::string& path);

// Canonical form: fixed section and key order, every key present, numbers at
// 17 significant digits. parse_config(canonical_config(s)) echoes to the same text.
std::string canonical_config(const RunSpec& spec);

// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(const std::string& text);

// Column order: t, energy_w1, energy_w0, norm_conf_plus, norm_1_s_surrogate,
// flux_* (sorted), identity_residual, sup_envelope, then any other keys sorted.
// Keys absent from a report are left empty.
std::vector<std::string> series_columns(const std::vector<FunctionalReport>& reports);
void write_series_csv(const std::vector<FunctionalReport>& reports, const std::string& path);
std::vector<FunctionalReport> read_series_csv(const std::string& path);

// Build metadata reported next to every result.
nlohmann::json environment_block(int threads);

// Summary of a finished (or failed) run. config may be empty when parsing failed.
nlohmann::json summary_json(const ScenarioReport& rep, const std::string& config, int threads);
void write_summary_json(const nlohmann::json& j, const std::string& path);

// gnuplot script for log-log decay plots of the bundle's series.csv with a
// target-slope guide per claimed exponent. Paths are relative to the bundle.
std::string plot_script(const ScenarioReport& rep, const std::vector<std::string>& columns);

// Writes summary.json, series.csv and plots/decay.gp into dir (created).
void write_bundle(const std::string& dir, const ScenarioReport& rep, const std::string& config, int threads);

// Exit codes of the command line tool.
enum ExitCode { kExitPass = 0, kExitFailures = 1, kExitConfig = 2, kExitRuntime = 3 };
int exit_code_for(const ScenarioReport& rep);

// Output directory: explicit flag, else $RADSCAT_OUT_DIR, else radscat_out/<scenario>.
std::string resolve_output_dir(const std::string& flag, const std::string& scenario);

}  // namespace radscat

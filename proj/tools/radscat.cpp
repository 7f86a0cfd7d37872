// radscat command line: one subcommand per scenario, results as a bundle
// (summary.json, series.csv, plots/decay.gp) in the output directory.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "radscat/cli_io.hpp"
#include "radscat/error.hpp"

using namespace radscat;

namespace {

const char* const kScenarios[][2] = {
    {"validate", "free-wave oracle gate (runs without a config)"},
    {"homogeneous", "homogeneous scattering from radiation data F0"},
    {"tlimit", "Cauchy property of the backward solutions as T grows"},
    {"weaknull", "weak-null system: psi and phi = w + varphi01 + phi01"},
    {"nullradial", "spherically symmetric model with a classical null form"},
    {"backscatter", "backscatter kernels: oracle, envelopes, remainder"},
    {"audit", "bulk sign, Hardy and weighted Klainerman-Sobolev batteries"},
    {"convergence", "exact-solution and identity residual orders"},
};

void print_report(const ScenarioReport& rep) {
  for (auto& e : rep.exponents)
    std::printf("%s  %-22s %-11s fitted %+.4f  target %+.4f  tol %.3g  window [%.3g, %.3g]\n",
                e.pass ? "PASS" : "FAIL", e.name.c_str(), e.kind.c_str(), e.fitted, e.target, e.tol, e.fit.t_lo,
                e.fit.t_hi);
  for (auto& c : rep.checks)
    std::printf("%s  %-32s %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(),
                c.limit);
  if (rep.status != "ok")
    std::printf("ERROR at stage %s: %s\n", rep.error_stage.c_str(), rep.error_message.c_str());
}

// summary.json is written even when the run never started
void error_bundle(const std::string& dir, const std::string& scenario, const std::string& stage,
                  const std::string& message, const std::string& config, int threads) {
  ScenarioReport rep;
  rep.scenario = scenario;
  rep.status = "error";
  rep.error_stage = stage;
  rep.error_message = message;
  try {
    write_bundle(dir, rep, config, threads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "radscat: %s\n", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radscat: scattering constructions for wave equations from radiation data"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_flag;
  int threads = -1;
  long long seed = -1;
  bool quiet = false;
  app.add_option("--config", config_path, "scenario config file (required except for validate)");
  app.add_option("--out", out_flag, "output directory (default $RADSCAT_OUT_DIR, else radscat_out/<scenario>)");
  app.add_option("--threads", threads, "worker threads; results do not depend on it")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "seed for randomized sampling")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "print nothing on success");
  for (auto& s : kScenarios) app.add_subcommand(s[0], s[1]);
  RunSpec defaults;
  defaults.scenario = "homogeneous";
  app.footer("Config defaults (canonical form, every key optional except scenario):\n\n" +
             canonical_config(defaults) +
             "\nExit codes: 0 all acceptance items pass, 1 completed with failures, 2 configuration error, "
             "3 runtime error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string scenario = app.get_subcommands().front()->get_name();
  const std::string out = resolve_output_dir(out_flag, scenario);

  RunSpec spec;
  std::string canonical;
  try {
    if (config_path.empty()) {
      if (scenario != "validate") throw ConfigError("--config is required for '" + scenario + "'");
      spec.scenario = "validate";
    } else {
      spec = load_config(config_path);
      if (spec.scenario != scenario)
        throw ConfigError("config declares scenario '" + spec.scenario + "' but the subcommand is '" + scenario + "'");
    }
    if (threads >= 0) spec.threads = threads;
    if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
    canonical = canonical_config(spec);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "radscat: configuration error: %s\n", e.what());
    if (config_path.empty())
      std::fprintf(stderr, "%s", app.get_formatter()->make_help(&app, app.get_name(), CLI::AppFormatMode::Normal).c_str());
    error_bundle(out, scenario, "config", e.what(), "", spec.threads);
    return kExitConfig;
  }

  ScenarioReport rep;
  try {
    rep = run_scenario(spec);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "radscat: configuration error: %s\n", e.what());
    error_bundle(out, scenario, "config", e.what(), canonical, spec.threads);
    return kExitConfig;
  } catch (const std::exception& e) {
    rep.scenario = scenario;
    rep.status = "error";
    rep.error_stage = "runtime";
    rep.error_message = e.what();
  }
  try {
    write_bundle(out, rep, canonical, spec.threads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "radscat: %s\n", e.what());
    return kExitRuntime;
  }
  const int code = exit_code_for(rep);
  if (!quiet || code != kExitPass) {
    print_report(rep);
    std::printf("%s: %s (bundle in %s)\n", scenario.c_str(),
                code == kExitPass ? "all pass" : code == kExitFailures ? "completed with failures" : "error",
                out.c_str());
  }
  return code;
}

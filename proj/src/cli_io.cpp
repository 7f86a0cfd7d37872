#include "radscat/cli_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "radscat/error.hpp"

namespace radscat {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(x))
    throw ConfigError(key + ": expected a finite number, got '" + t + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ConfigError(key + ": expected an integer, got '" + t + "'");
  return x;
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
  return out;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunSpec&, const std::string&)> set;
  std::function<std::string(const RunSpec&)> get;
};

Field real(const char* sec, const char* key, double RunSpec::*m) {
  return {sec, key, [=](RunSpec& s, const std::string& v) { s.*m = parse_real(key, v); },
          [=](const RunSpec& s) { return fmt(s.*m); }};
}

Field integer(const char* sec, const char* key, int RunSpec::*m) {
  return {sec, key,
          [=](RunSpec& s, const std::string& v) {
            const long long x = parse_int(key, v);
            if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(std::string(key) + ": integer out of range");
            s.*m = static_cast<int>(x);
          },
          [=](const RunSpec& s) { return std::to_string(s.*m); }};
}

Field list(const char* sec, const char* key, std::vector<double> RunSpec::*m) {
  return {sec, key, [=](RunSpec& s, const std::string& v) { s.*m = parse_reals(key, v); },
          [=](const RunSpec& s) { return fmt_list(s.*m); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"run", "scenario", [](RunSpec& s, const std::string& v) { s.scenario = trim(v); },
       [](const RunSpec& s) { return s.scenario; }},
      real("run", "T", &RunSpec::T),
      real("run", "t0", &RunSpec::t0),
      list("run", "T_list", &RunSpec::T_list),
      integer("run", "n_records", &RunSpec::n_records),
      integer("run", "threads", &RunSpec::threads),
      {"run", "seed",
       [](RunSpec& s, const std::string& v) {
         const long long x = parse_int("seed", v);
         if (x < 0) throw ConfigError("seed must be nonnegative");
         s.seed = static_cast<std::uint64_t>(x);
       },
       [](const RunSpec& s) { return std::to_string(s.seed); }},
      real("run", "check_T", &RunSpec::check_T),
      real("run", "check_t0", &RunSpec::check_t0),
      real("run", "check_t", &RunSpec::check_t),
      list("run", "check_radii", &RunSpec::check_radii),
      real("run", "envelope_t_lo", &RunSpec::envelope_t_lo),
      real("run", "envelope_t_hi", &RunSpec::envelope_t_hi),
      real("run", "sweep_offset", &RunSpec::sweep_offset),
      list("run", "sweep_radii", &RunSpec::sweep_radii),
      real("grid", "h", &RunSpec::h),
      real("grid", "dt_factor", &RunSpec::dt_factor),
      integer("grid", "L_max", &RunSpec::L_max),
      real("grid", "check_h", &RunSpec::check_h),
      real("params", "gamma", &RunSpec::gamma),
      real("params", "s", &RunSpec::s),
      real("params", "M", &RunSpec::M),
      real("params", "mu", &RunSpec::mu),
      real("params", "a", &RunSpec::a),
      real("params", "delta", &RunSpec::delta),
      real("params", "amplitude_scale", &RunSpec::amplitude_scale),
      real("acceptance", "exponent_tol", &RunSpec::exponent_tol),
      real("acceptance", "order_target", &RunSpec::order_target),
      real("acceptance", "order_tol", &RunSpec::order_tol),
      real("acceptance", "order_min", &RunSpec::order_min),
      real("acceptance", "nonincrease_tol", &RunSpec::nonincrease_tol),
      real("acceptance", "tlimit_ratio", &RunSpec::tlimit_ratio),
      real("acceptance", "envelope_ratio", &RunSpec::envelope_ratio),
      real("acceptance", "crosscheck_tol", &RunSpec::crosscheck_tol),
      real("acceptance", "scaling_tol", &RunSpec::scaling_tol),
      real("acceptance", "oracle_tol", &RunSpec::oracle_tol),
      real("acceptance", "backscatter_bound", &RunSpec::backscatter_bound),
      real("acceptance", "backscatter_ratio", &RunSpec::backscatter_ratio),
      real("acceptance", "remainder_bound", &RunSpec::remainder_bound),
      real("acceptance", "bulk_slack", &RunSpec::bulk_slack),
      real("acceptance", "drift_ratio", &RunSpec::drift_ratio),
      real("acceptance", "hardy_budget", &RunSpec::hardy_budget),
  };
  return f;
}

const char* const kSections[] = {"run", "data.F0", "data.G0", "grid", "params", "acceptance"};

struct ModeLine {
  int l, m;
  std::string profile;
  int line;
};

// "l m <profile>" -> (l, m, profile text)
ModeLine parse_mode(const std::string& v, int line) {
  std::istringstream is(v);
  std::string ls, ms;
  if (!(is >> ls >> ms)) throw ConfigError("mode: expected 'l m <profile>'", line);
  ModeLine ml;
  try {
    ml.l = static_cast<int>(parse_int("mode l", ls));
    ml.m = static_cast<int>(parse_int("mode m", ms));
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), line);
  }
  std::getline(is, ml.profile);
  ml.profile = trim(ml.profile);
  if (ml.profile.empty()) throw ConfigError("mode: missing profile descriptor", line);
  ml.line = line;
  return ml;
}

RadiationField build_field(const std::vector<ModeLine>& modes, const RunSpec& spec, std::vector<std::string>& text,
                           const std::string& name) {
  RadiationField F(spec.L_max, spec.gamma);
  text.clear();
  for (auto& ml : modes) {
    if (ml.l < 0 || ml.l > spec.L_max || std::abs(ml.m) > ml.l)
      throw ConfigError(name + " mode (" + std::to_string(ml.l) + "," + std::to_string(ml.m) +
                            ") must satisfy 0 <= l <= L_max = " + std::to_string(spec.L_max) + " and |m| <= l",
                        ml.line);
    ProfilePtr p;
    try {
      p = make_profile(parse_profile_spec(ml.profile), spec.gamma);
    } catch (const DomainError& e) {
      throw ConfigError(name + ": " + e.what(), ml.line);
    }
    F.set_mode(ml.l, ml.m, p);
    text.push_back(std::to_string(ml.l) + " " + std::to_string(ml.m) + " " + p->describe());
  }
  return F;
}

}  // namespace

RunSpec parse_config(const std::string& text) {
  RunSpec spec;
  std::map<std::string, int> seen;  // "section.key" -> line
  std::map<std::string, std::vector<ModeLine>> modes;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
        throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + s + "'", line);
    const std::string key = trim(s.substr(0, eq)), val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (section.empty()) throw ConfigError("key '" + key + "' appears before any [section]", line);

    if (section == "data.F0" || section == "data.G0") {
      if (key != "mode") throw ConfigError("unknown key '" + key + "' in [" + section + "] (expected mode)", line);
      auto ml = parse_mode(val, line);
      for (auto& prev : modes[section])
        if (prev.l == ml.l && prev.m == ml.m)
          throw ConfigError("duplicate mode (" + std::to_string(ml.l) + "," + std::to_string(ml.m) + ") in [" +
                                section + "] at lines " + std::to_string(prev.line) + " and " + std::to_string(line),
                            line);
      modes[section].push_back(ml);
      continue;
    }

    const Field* f = nullptr;
    for (auto& cand : fields())
      if (section == cand.section && key == cand.key) f = &cand;
    if (!f) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
    const std::string id = section + "." + key;
    if (auto it = seen.find(id); it != seen.end())
      throw ConfigError("duplicate key '" + key + "' in [" + section + "] at lines " + std::to_string(it->second) +
                            " and " + std::to_string(line),
                        line);
    seen[id] = line;
    try {
      f->set(spec, val);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line);
    }
  }

  if (!seen.count("run.scenario")) throw ConfigError("missing required key 'scenario' in [run]");
  // range checks first so that gamma is sound before profiles are built
  auto line_of = [&](const std::string& msg) {
    const std::string first = msg.substr(0, msg.find(' '));
    for (auto& [id, ln] : seen)
      if (id.substr(id.find('.') + 1) == first) return ln;
    return 0;
  };
  if (!(spec.gamma > 0.5 && spec.gamma < 1.0))
    throw ConfigError("gamma must satisfy 1/2 < gamma < 1", line_of("gamma"));
  if (spec.L_max < 0 || spec.L_max > 16) throw ConfigError("L_max must satisfy 0 <= L_max <= 16", line_of("L_max"));
  spec.F0 = build_field(modes["data.F0"], spec, spec.F0_text, "F0");
  spec.G0 = build_field(modes["data.G0"], spec, spec.G0_text, "G0");
  try {
    validate_run_spec(spec);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), line_of(e.what()));
  }
  static const std::set<std::string> known{"validate",    "homogeneous", "tlimit", "weaknull",
                                           "nullradial", "backscatter", "audit",  "convergence"};
  if (!known.count(spec.scenario))
    throw ConfigError("scenario must be one of validate, homogeneous, tlimit, weaknull, nullradial, backscatter, "
                      "audit, convergence (got '" + spec.scenario + "')",
                      line_of("scenario"));
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const RunSpec& spec) {
  std::ostringstream os;
  bool first = true;
  for (const char* sec : kSections) {
    if (!first) os << "\n";
    first = false;
    os << "[" << sec << "]\n";
    const std::string s = sec;
    if (s == "data.F0" || s == "data.G0") {
      for (auto& m : (s == "data.F0" ? spec.F0_text : spec.G0_text)) os << "mode = " << m << "\n";
      continue;
    }
    for (auto& f : fields())
      if (s == f.section) os << f.key << " = " << f.get(spec) << "\n";
  }
  return os.str();
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ------------------------------------------------------------------- series

std::vector<std::string> series_columns(const std::vector<FunctionalReport>& reports) {
  static const char* const head[] = {"energy_w1", "energy_w0", "norm_conf_plus", "norm_1_s_surrogate"};
  static const char* const tail[] = {"identity_residual", "sup_envelope"};
  std::set<std::string> flux, extra;
  for (auto& r : reports)
    for (auto& [k, v] : r.values) {
      if (k.rfind("flux", 0) == 0)
        flux.insert(k);
      else
        extra.insert(k);
    }
  std::vector<std::string> cols{"t"};
  for (auto* c : head) cols.push_back(c);
  cols.insert(cols.end(), flux.begin(), flux.end());
  for (auto* c : tail) cols.push_back(c);
  for (auto& k : extra)
    if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  return cols;
}

void write_series_csv(const std::vector<FunctionalReport>& reports, const std::string& path) {
  const auto cols = series_columns(reports);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (auto& r : reports) {
    out << fmt(r.t);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      out << ",";
      if (auto it = r.values.find(cols[i]); it != r.values.end()) out << fmt(it->second);
    }
    out << "\n";
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<FunctionalReport> read_series_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!s.empty() && s.back() == ',') out.push_back("");
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "': missing header");
  const auto cols = split(line);
  if (cols.empty() || cols[0] != "t") throw Error("'" + path + "': first column must be t");
  std::vector<FunctionalReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols.size()) throw Error("'" + path + "': ragged row");
    FunctionalReport r;
    r.t = std::strtod(cells[0].c_str(), nullptr);
    for (std::size_t i = 1; i < cols.size(); ++i)
      if (!cells[i].empty()) r.values[cols[i]] = std::strtod(cells[i].c_str(), nullptr);
    out.push_back(std::move(r));
  }
  return out;
}

// ------------------------------------------------------------------ summary

nlohmann::json environment_block(int threads) {
  nlohmann::json e;
  e["version"] = "radscat 1.0.0";
#if defined(__clang__)
  e["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  e["compiler"] = std::string("gcc ") + __VERSION__;
#else
  e["compiler"] = "unknown";
#endif
  e["cxx_standard"] = static_cast<long>(__cplusplus);
#ifdef NDEBUG
  e["build"] = "release";
#else
  e["build"] = "debug";
#endif
  e["threads"] = threads;
  e["hardware_threads"] = std::thread::hardware_concurrency();
  return e;
}

namespace {

// JSON has no inf or nan; such values go out as strings.
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

nlohmann::json summary_json(const ScenarioReport& rep, const std::string& config, int threads) {
  nlohmann::json j;
  j["scenario"] = rep.scenario;
  j["status"] = rep.status;
  if (rep.status != "ok") j["error"] = {{"stage", rep.error_stage}, {"message", rep.error_message}};
  j["all_pass"] = rep.all_pass();
  j["exponents"] = nlohmann::json::array();
  for (auto& e : rep.exponents)
    j["exponents"].push_back({{"name", e.name},
                              {"kind", e.kind},
                              {"fitted", number(e.fitted)},
                              {"target", e.target},
                              {"tol", e.tol},
                              {"pass", e.pass},
                              {"window", {number(e.fit.t_lo), number(e.fit.t_hi)}},
                              {"samples", e.fit.samples},
                              {"r_squared", number(e.fit.r_squared)}});
  j["checks"] = nlohmann::json::array();
  for (auto& c : rep.checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", number(c.value)},
                           {"relation", c.relation},
                           {"limit", c.limit},
                           {"pass", c.pass}});
  j["provenance"] = rep.provenance;
  j["config"] = config;
  j["config_hash"] = config_hash(config);
  j["environment"] = environment_block(threads);
  return j;
}

void write_summary_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed for '" + path + "'");
}

// ------------------------------------------------------------------- plots

namespace {

std::string series_for(const std::string& exponent) {
  if (exponent == "energy") return "energy_norm";
  if (exponent == "conformal_norm" || exponent == "w_conformal_norm") return "norm_conf_plus";
  return exponent;
}

}  // namespace

std::string plot_script(const ScenarioReport& rep, const std::vector<std::string>& columns) {
  std::ostringstream os;
  os << "# run from the bundle directory: gnuplot plots/decay.gp\n"
     << "set datafile separator ','\n"
     << "set datafile missing ''\n"
     << "set logscale xy\n"
     << "set xlabel 't'\n"
     << "set key outside right\n"
     << "set terminal pngcairo size 900,600\n";
  int n = 0;
  for (auto& e : rep.exponents) {
    const std::string col = series_for(e.name);
    if (std::find(columns.begin(), columns.end(), col) == columns.end()) continue;
    if (!(e.fit.amplitude > 0.0) || !std::isfinite(e.fit.amplitude)) continue;
    ++n;
    os << "\nset output 'plots/" << e.name << ".png'\n"
       << "set title '" << rep.scenario << ": " << e.name << " (target slope " << fmt(e.target) << ")'\n"
       << "guide_" << n << "(x) = " << fmt(e.fit.amplitude) << " * x**(" << fmt(e.target) << ")\n"
       << "plot 'series.csv' using 1:(column('" << col << "')) with linespoints title '" << col << "', \\\n"
       << "     [" << fmt(e.fit.t_lo) << ":" << fmt(e.fit.t_hi) << "] guide_" << n << "(x) with lines dt 2 title "
       << "'t^" << fmt(e.target) << "'\n";
  }
  if (n == 0) {
    // no claimed exponent: plot every positive column on one chart
    os << "\nset output 'plots/series.png'\nplot ";
    bool first = true;
    for (std::size_t i = 1; i < columns.size(); ++i) {
      os << (first ? "" : ", \\\n     ") << "'series.csv' using 1:(column('" << columns[i]
         << "')) with linespoints title '" << columns[i] << "'";
      first = false;
    }
    if (first) os << "'series.csv' using 1:1 notitle";
    os << "\n";
  }
  return os.str();
}

void write_bundle(const std::string& dir, const ScenarioReport& rep, const std::string& config, int threads) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "plots", ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  write_summary_json(summary_json(rep, config, threads), (fs::path(dir) / "summary.json").string());
  write_series_csv(rep.series, (fs::path(dir) / "series.csv").string());
  std::ofstream gp(fs::path(dir) / "plots" / "decay.gp", std::ios::binary);
  if (!gp) throw Error("cannot write plot script in '" + dir + "'");
  gp << plot_script(rep, series_columns(rep.series));
}

int exit_code_for(const ScenarioReport& rep) {
  if (rep.status != "ok") return kExitRuntime;
  return rep.all_pass() ? kExitPass : kExitFailures;
}

std::string resolve_output_dir(const std::string& flag, const std::string& scenario) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RADSCAT_OUT_DIR"); env && *env) return env;
  return (fs::path("radscat_out") / scenario).string();
}

}  // namespace radscat

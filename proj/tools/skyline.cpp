// skyline: tables and validation reports for the city-skyline visibility model.

#include "skyline/skyline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

using namespace skyline;
using analytic::kHalfPi;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitValidation = 1;
constexpr int kGrid = 512;

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Run configuration: config file first, flags override.

const std::vector<std::string> kKeys{"lambda", "mu",  "shape", "model", "h",      "ris",
                                     "x",      "height", "H",  "nu",    "n",      "seed",
                                     "format", "out", "strict", "table", "workers"};

struct RunConfig {
  double lambda = 1.0, mu = 1.0, shape = 1.0;
  std::optional<ModelKind> model;
  double h = 0.0;
  std::optional<ris::RisMode> ris_mode;
  std::optional<double> x, height, H, nu;
  std::optional<std::size_t> n;
  std::uint64_t seed = 7;
  std::string format = "csv";
  std::string out;
  bool strict = false;
  std::string table;
  unsigned workers = 0;

  EnvParams env() const { return EnvParams(lambda, mu, shape); }
};

std::map<std::string, std::string> read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw usage_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw usage_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

double to_double(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(d)) {
    throw usage_error(key + ": not a finite number: '" + v + "'");
  }
  return d;
}

std::uint64_t to_uint(const std::string &key, const std::string &v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw usage_error(key + ": not a non-negative integer: '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception &) {
    throw usage_error(key + ": out of range: '" + v + "'");
  }
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw usage_error(key + ": expected true or false, got '" + v + "'");
}

RunConfig build_config(const std::map<std::string, std::string> &kv) {
  RunConfig c;
  for (const auto &[k, v] : kv) {
    if (k == "lambda") c.lambda = to_double(k, v);
    else if (k == "mu") c.mu = to_double(k, v);
    else if (k == "shape") c.shape = to_double(k, v);
    else if (k == "h") c.h = to_double(k, v);
    else if (k == "x") c.x = to_double(k, v);
    else if (k == "height") c.height = to_double(k, v);
    else if (k == "H") c.H = to_double(k, v);
    else if (k == "nu") c.nu = to_double(k, v);
    else if (k == "n") c.n = to_uint(k, v);
    else if (k == "seed") c.seed = to_uint(k, v);
    else if (k == "workers") c.workers = static_cast<unsigned>(to_uint(k, v));
    else if (k == "out") c.out = v;
    else if (k == "table") c.table = v;
    else if (k == "strict") c.strict = to_bool(k, v);
    else if (k == "model") {
      c.model = parse_model(v);
      if (!c.model) throw usage_error("model: expected mm|md|dm|weibull, got '" + v + "'");
    } else if (k == "ris") {
      if (v == "trans") c.ris_mode = ris::RisMode::TRANSMISSIVE;
      else if (v == "refl") c.ris_mode = ris::RisMode::REFLECTIVE;
      else throw usage_error("ris: expected trans|refl, got '" + v + "'");
    } else if (k == "format") {
      if (v != "csv" && v != "json") throw usage_error("format: expected csv|json, got '" + v + "'");
      c.format = v;
    }
  }
  try {
    (void)c.env();
  } catch (const parameter_error &e) {
    throw usage_error(e.what());
  }
  if (c.h < 0.0) throw usage_error("h: observer height must be non-negative");
  if (c.height && *c.height <= 0.0) throw usage_error("height: must be positive");
  if (c.H && *c.H <= 0.0) throw usage_error("H: must be positive");
  if (c.nu && *c.nu <= 0.0) throw usage_error("nu: must be positive");
  if (c.n && *c.n == 0) throw usage_error("n: must be positive");
  return c;
}

// ---------------------------------------------------------------------------
// Tables.

using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_csv(std::ostream &os, const Table &t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto &row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "");
      if (const auto *d = std::get_if<double>(&row[i])) os << format_double(*d);
      else os << std::get<std::string>(row[i]);
    }
    os << '\n';
  }
}

void write_json(std::ostream &os, const Table &t) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto &row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (const auto *d = std::get_if<double>(&row[i])) {
        if (std::isfinite(*d)) obj[t.columns[i]] = *d;
        else obj[t.columns[i]] = format_double(*d);
      } else {
        obj[t.columns[i]] = std::get<std::string>(row[i]);
      }
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json doc;
  doc["table"] = t.name;
  doc["rows"] = std::move(rows);
  os << doc.dump(1) << '\n';
}

void emit(const RunConfig &c, const Table &t) {
  std::ofstream file;
  std::ostream *os = &std::cout;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw usage_error("cannot write '" + c.out + "'");
    os = &file;
  }
  if (c.format == "json") write_json(*os, t);
  else write_csv(*os, t);
}

std::string pick_table(const RunConfig &c, const std::vector<std::string> &names) {
  if (c.table.empty()) return names.front();
  if (std::find(names.begin(), names.end(), c.table) == names.end()) {
    std::string all;
    for (const auto &n : names) all += (all.empty() ? "" : "|") + n;
    throw usage_error("table: expected " + all + ", got '" + c.table + "'");
  }
  return c.table;
}

std::vector<double> angle_grid() {
  std::vector<double> g(kGrid);
  for (int i = 0; i < kGrid; ++i) g[i] = (kHalfPi - 1e-6) * i / (kGrid - 1);
  return g;
}

std::string mode_name(ris::RisMode m) { return m == ris::RisMode::TRANSMISSIVE ? "trans" : "refl"; }

// ---------------------------------------------------------------------------
// Commands.

Table cmd_angles(const RunConfig &c) {
  const EnvParams p = c.env();
  struct Entry {
    std::string name;
    AngleDistribution dist;
    validate::AngleTarget target;
  };
  std::vector<Entry> entries;
  for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM, ModelKind::WEIBULL}) {
    if (c.model && *c.model != m) continue;
    entries.push_back({std::string(to_string(m)), AngleDistribution::ground(p, m), {m, 0.0}});
  }
  if (c.h > 0.0) {
    entries.push_back({"elevated", AngleDistribution::elevated(p, c.h), {ModelKind::MM, c.h}});
  }
  Table t{"angles", {"variant", "phi", "cdf_theta", "pdf_theta", "cdf_psi"}, {}};
  if (c.n) t.columns.push_back("ecdf_theta_mc");
  const auto grid = angle_grid();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto &d = entries[e].dist;
    std::optional<stats::EmpiricalCdf> ecdf;
    if (c.n) {
      ecdf.emplace(validate::simulate_theta(p, entries[e].target, *c.n, derive_seed(c.seed, e),
                                            c.workers));
    }
    for (double phi : grid) {
      std::vector<Cell> row{entries[e].name, phi, d.cdf(phi), d.pdf(phi),
                            1.0 - d.cdf(kHalfPi - phi)};
      if (ecdf) row.push_back((*ecdf)(phi));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cmd_means(const RunConfig &c) {
  Table t{"means",
          {"rho", "E_theta_mm", "E_theta_md", "E_theta_dm", "E_theta_weibull", "E_psi_mm",
           "E_psi_md", "E_psi_dm", "E_psi_weibull"},
          {}};
  if (c.h > 0.0) {
    t.columns.push_back("E_theta_elevated");
    t.columns.push_back("E_psi_elevated");
  }
  // Every mean depends on the environment through rho alone (mu h for the
  // elevated observer), so mu is fixed at 1 and h is read as mu h.
  for (int i = 1; i <= 60; ++i) {
    const double rho = 0.05 * i;
    const EnvParams p(rho, 1.0, c.shape);
    std::vector<Cell> row{rho};
    std::vector<double> means;
    for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM, ModelKind::WEIBULL}) {
      means.push_back(analytic::mean_theta(p, m));
    }
    for (double m : means) row.push_back(m);
    for (double m : means) row.push_back(kHalfPi - m);
    if (c.h > 0.0) {
      const double m = analytic::mean_theta(p, ModelKind::MM, c.h);
      row.push_back(m);
      row.push_back(kHalfPi - m);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table cmd_joint(const RunConfig &c) {
  const EnvParams p = c.env();
  const auto means = analytic::blocking_means(p);
  Table t{"joint", {"axis", "value", "density"}, {}};
  const double h_hi = 5.0 * means.height, x_hi = 5.0 * means.distance;
  // Both densities are defined on the open half-line.
  for (int i = 1; i <= kGrid; ++i) {
    const double h = h_hi * i / kGrid;
    t.rows.push_back({std::string("h"), h, analytic::marginal_h(p, h)});
  }
  for (int i = 1; i <= kGrid; ++i) {
    const double x = x_hi * i / kGrid;
    t.rows.push_back({std::string("x"), x, analytic::marginal_x(p, x)});
  }
  return t;
}

Table ris_cdf_table(const RunConfig &c) {
  const EnvParams p = c.env();
  std::vector<std::pair<double, double>> points;
  if (c.x || c.height) {
    if (!c.x || !c.height) throw usage_error("ris: --x and --height go together");
    points.emplace_back(std::abs(*c.x), *c.height);
  } else {
    points = {{1.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}};
  }
  std::vector<ris::RisMode> modes{ris::RisMode::TRANSMISSIVE, ris::RisMode::REFLECTIVE};
  if (c.ris_mode) modes = {*c.ris_mode};
  Table t{"cdf", {"mode", "x", "height", "phi", "cdf", "pdf", "mean"}, {}};
  const auto grid = angle_grid();
  for (auto mode : modes) {
    for (auto [x, h] : points) {
      const auto d = mode == ris::RisMode::TRANSMISSIVE ? trans_angle_distribution(p, x, h)
                                                        : refl_angle_distribution(p, -x, h);
      const double mean = d.mean();
      for (double phi : grid) {
        t.rows.push_back({mode_name(mode), d.x(), h, phi, d.cdf(phi), d.pdf(phi), mean});
      }
    }
  }
  return t;
}

Table ris_gain_table(const RunConfig &c, bool &warned) {
  const std::size_t n = c.n.value_or(20000);
  Table t{"gains",
          {"rho", "gamma1_T", "gamma1_R", "gamma2_T", "gamma2_R", "gamma1_T_quad",
           "gamma1_R_quad", "gamma1_T_se", "gamma1_R_se", "n"},
          {}};
  for (int i = 1; i <= 10; ++i) {
    const double rho = 0.2 * i;
    const EnvParams p = EnvParams::from_rho(rho);
    const auto g = ris::coupled_gains_mc(p, n, derive_seed(c.seed, i), c.workers);
    warned = warned || g.transmissive.small_sample_warning || g.reflective.small_sample_warning;
    const auto qt = ris::angular_gains(p, ris::RisMode::TRANSMISSIVE, ris::GainMethod::quadrature());
    const auto qr = ris::angular_gains(p, ris::RisMode::REFLECTIVE, ris::GainMethod::quadrature());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({rho, g.transmissive.gamma1, g.reflective.gamma1,
                      g.transmissive.gamma2.value_or(nan), g.reflective.gamma2.value_or(nan),
                      qt.gamma1, qr.gamma1, g.transmissive.gamma1_stderr,
                      g.reflective.gamma1_stderr, static_cast<double>(n)});
  }
  return t;
}

Table coverage_table3() {
  Table t{"table3",
          {"case", "lambda", "mu", "E_theta", "E_theta_T", "E_theta_R", "E_l_HAP", "E_l_sat",
           "E_L", "tau_HAP", "tau_sat"},
          {}};
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto &r : coverage::case_study(true)) {
    t.rows.push_back({r.name, r.lambda, r.mu, r.e_theta, r.e_theta_t, r.e_theta_r, r.e_l_hap,
                      r.e_l_sat, inf, r.tau_hap, r.tau_sat});
  }
  return t;
}

Table coverage_tau_curve(const RunConfig &c, bool user_env) {
  Table t{"tau_curve", {"case", "rho", "H_nu", "tau"}, {}};
  std::vector<std::pair<std::string, EnvParams>> envs;
  if (user_env) {
    envs.emplace_back("custom", c.env());
  } else {
    for (const auto &cc : coverage::kCityCases) envs.emplace_back(cc.name, EnvParams(cc.lambda, cc.mu));
  }
  for (const auto &[name, p] : envs) {
    for (int i = 0; i < 241; ++i) {
      const double hn = std::pow(10.0, -4.0 + 0.025 * i);
      t.rows.push_back({name, p.rho(), hn, coverage::tau_unconditional({p, hn, 1.0})});
    }
  }
  return t;
}

Table coverage_scenario(const RunConfig &c) {
  if (!c.H || !c.nu) throw usage_error("coverage: table 'scenario' needs --H and --nu");
  const coverage::CoverageScenario sc(c.env(), *c.H, *c.nu);
  return {"scenario",
          {"lambda", "mu", "H", "nu", "E_l", "E_L", "tau"},
          {{c.lambda, c.mu, *c.H, *c.nu, coverage::mean_l(sc),
            std::numeric_limits<double>::infinity(), coverage::tau_unconditional(sc)}}};
}

Table cmd_threegpp(const RunConfig &c) {
  Table t{"threegpp", {"rho", "zeta", "p_los"}, {}};
  for (double rho : {0.05, 0.35, 0.57}) {
    const EnvParams p = EnvParams::from_rho(rho);
    for (int i = 1; i <= kGrid; ++i) {
      const double zeta = (kHalfPi - 1e-6) * i / kGrid;
      t.rows.push_back({rho, zeta, analytic::los_probability(p, c.h, zeta)});
    }
  }
  return t;
}

std::vector<validate::ValidationReport> cmd_validate(const RunConfig &c) {
  const EnvParams p = c.env();
  const std::size_t n = c.n.value_or(100000);
  const unsigned w = c.workers;
  const double alpha = validate::kDefaultAlpha;
  std::uint64_t k = 0;
  auto seed = [&] { return derive_seed(c.seed, k++); };
  std::vector<validate::ValidationReport> out;
  for (auto m : {ModelKind::MM, ModelKind::MD, ModelKind::DM, ModelKind::WEIBULL}) {
    if (c.model && *c.model != m) continue;
    out.push_back(validate::validate_angle(p, {m, 0.0}, n, seed(), alpha, w));
  }
  out.push_back(validate::validate_angle(p, {ModelKind::MM, c.h > 0.0 ? c.h : 1.0 / p.mu()}, n,
                                         seed(), alpha, w));
  out.push_back(validate::validate_joint(p, n, seed(), alpha, 20, w));
  const double x = std::abs(c.x.value_or(2.0 / p.lambda()));
  const double h = c.height.value_or(2.0 / p.mu());
  out.push_back(validate::validate_blocking_index(p, x, h, n, seed(), alpha, w));
  out.push_back(validate::validate_ris(p, ris::RisCondition::transmissive(x, h), n, seed(), alpha, w));
  out.push_back(validate::validate_ris(p, ris::RisCondition::reflective(-x, h), n, seed(), alpha, w));
  const coverage::CoverageScenario sc(p, c.H.value_or(1.0 / p.mu()), c.nu.value_or(p.lambda()));
  out.push_back(validate::validate_tau(sc, n, seed(), {}, alpha, w));
  validate::TauOptions cond;
  cond.blocker = std::pair{x, h};
  out.push_back(validate::validate_tau(sc, n, seed(), cond, alpha, w));
  return out;
}

void emit_reports(const RunConfig &c, const std::vector<validate::ValidationReport> &reports) {
  if (c.format == "json") {
    std::ofstream file;
    std::ostream *os = &std::cout;
    if (!c.out.empty()) {
      file.open(c.out);
      if (!file) throw usage_error("cannot write '" + c.out + "'");
      os = &file;
    }
    for (const auto &r : reports) validate::write_json_line(*os, r);
    return;
  }
  Table t{"validate",
          {"target", "test", "n", "replications", "statistic", "p_value", "alpha", "pass", "seed",
           "mc_estimate", "std_error", "expected"},
          {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto &r : reports) {
    t.rows.push_back({r.target, r.test, static_cast<double>(r.n),
                      static_cast<double>(r.replications), r.statistic, r.p_value, r.alpha,
                      std::string(r.pass ? "true" : "false"), std::to_string(r.seed),
                      r.mc_estimate.value_or(nan), r.std_error.value_or(nan),
                      r.expected.value_or(nan)});
  }
  emit(c, t);
}

int run(const std::string &command, const RunConfig &c, bool user_env) {
  if (command == "angles") emit(c, cmd_angles(c));
  else if (command == "means") emit(c, cmd_means(c));
  else if (command == "joint") emit(c, cmd_joint(c));
  else if (command == "threegpp") emit(c, cmd_threegpp(c));
  else if (command == "ris") {
    if (pick_table(c, {"cdf", "gains"}) == "cdf") {
      emit(c, ris_cdf_table(c));
    } else {
      bool warned = false;
      emit(c, ris_gain_table(c, warned));
      if (warned) {
        std::cerr << "skyline: warning: gains estimated from fewer than 1e5 samples\n";
        if (c.strict) return kExitValidation;
      }
    }
  } else if (command == "coverage") {
    const auto which = pick_table(c, {"table3", "tau_curve", "scenario"});
    if (which == "table3") emit(c, coverage_table3());
    else if (which == "tau_curve") emit(c, coverage_tau_curve(c, user_env));
    else emit(c, coverage_scenario(c));
  } else if (command == "validate") {
    const auto reports = cmd_validate(c);
    emit_reports(c, reports);
    int failed = 0;
    for (const auto &r : reports) {
      if (!r.pass) {
        ++failed;
        std::cerr << "skyline: " << validate::summary_line(r) << '\n';
      }
    }
    if (failed && c.strict) {
      std::cerr << "skyline: " << failed << " validation check(s) failed\n";
      return kExitValidation;
    }
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sky-visibility statistics of a stochastic-geometry city model"};
  app.require_subcommand(1, 1);
  app.set_help_flag("--help", "print this help");
  std::string config_path;
  std::map<std::string, std::string> flags;
  bool strict_flag = false;
  app.add_option("--config", config_path, "flat key = value file; flags override it");
  std::map<std::string, std::string> help{
      {"lambda", "building density (1/m)"},
      {"mu", "height rate (1/m)"},
      {"shape", "Weibull height shape"},
      {"model", "mm|md|dm|weibull"},
      {"h", "observer height"},
      {"ris", "trans|refl"},
      {"x", "blocker distance"},
      {"height", "blocker height"},
      {"H", "aerial altitude above the blocker"},
      {"nu", "aerial node density (1/m)"},
      {"n", "Monte Carlo sample count"},
      {"seed", "master seed"},
      {"format", "csv|json"},
      {"out", "output path (default stdout)"},
      {"table", "which table of a multi-table command"},
      {"workers", "threads (0 = all cores)"}};
  for (const auto &[key, text] : help) {
    app.add_option("--" + key, flags[key], text)->allow_extra_args(false);
  }
  app.add_flag("--strict", strict_flag, "nonzero exit on any validation failure");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"angles", "cdf/pdf of the blockage angle over a grid"},
      {"means", "mean angles versus rho"},
      {"joint", "marginals of the blocking building"},
      {"ris", "RIS angle laws (table cdf) and gains (table gains)"},
      {"coverage", "connectivity: table3, tau_curve or scenario"},
      {"threegpp", "LOS probability versus elevation"},
      {"validate", "Monte Carlo validation suite"}};
  for (const auto &[name, text] : commands) app.add_subcommand(name, text)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = read_config_file(config_path);
    for (const auto &[key, value] : flags) {
      if (app.count("--" + key)) kv[key] = value;
    }
    if (strict_flag) kv["strict"] = "true";
    const bool user_env = kv.count("lambda") || kv.count("mu");
    const RunConfig c = build_config(kv);
    return run(app.get_subcommands().front()->get_name(), c, user_env);
  } catch (const usage_error &e) {
    std::cerr << "skyline: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const parameter_error &e) {
    std::cerr << "skyline: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "skyline: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

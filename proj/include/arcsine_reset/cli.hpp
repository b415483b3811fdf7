#pragma once

// Command-line front end. `run` is the whole program; tools/ only wraps it in main().
//
// Subcommands: pdf, moments, simulate, validate, fit-mr.
// Exit codes: 0 success, 2 usage, 3 numeric convergence, 4 validation failure,
// 5 fit failure.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "analysis.hpp"
#include "errors.hpp"
#include "laws.hpp"
#include "sampling.hpp"

namespace arcsine_reset::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConvergence = 3,
  kValidationFailed = 4,
  kFitFailed = 5,
};

/// Environment variable overriding the simulation step budget (n * n_steps).
inline constexpr const char* kStepBudgetEnv = "ARCSINE_RESET_STEP_BUDGET";

/// Locale-independent rendering with 17 significant digits.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Reads nested JSON objects as CLI11 config items; an object key naming a
/// subcommand scopes its members to that subcommand.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_configurable() && !opt->get_lnames().empty() && (default_also || opt->count() > 0)) {
        j[opt->get_lnames().front()] = opt->results();
      }
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(j, "", {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& name) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("unsupported value for config key " + name);
  }

  static void collect(const nlohmann::json& j, const std::string& name, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
      if (!name.empty()) parents.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) collect(*it, it.key(), parents, out);
      return;
    }
    CLI::ConfigItem item;
    item.name = name;
    item.parents = parents;
    if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(scalar(v, name));
    } else {
      item.inputs.push_back(scalar(j, name));
    }
    out.push_back(std::move(item));
  }
};

namespace detail {

struct Output {
  std::string format = "csv";
  std::string path;
};

inline void add_output_options(CLI::App* cmd, Output& o, const std::string& default_format = "csv") {
  o.format = default_format;
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cmd->add_option("--out", o.path, "Output file (default stdout)");
}

// Writes `text` to the configured destination; returns false when the file cannot be opened.
inline bool emit(const Output& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return true;
  }
  std::ofstream file(o.path, std::ios::binary);
  if (!file) return false;
  file << text;
  return static_cast<bool>(file);
}

inline std::uint64_t step_budget_from_env() {
  const char* raw = std::getenv(kStepBudgetEnv);
  if (raw == nullptr || *raw == '\0') return kDefaultStepBudget;
  std::uint64_t value = 0;
  const std::string_view s(raw);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || value == 0) {
    throw DomainError(std::string(kStepBudgetEnv) + " must be a positive integer");
  }
  return value;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

// ---------------------------------------------------------------------------

struct PdfArgs {
  std::string law = "T";
  double r = 0.0;
  unsigned k = 0;
  std::vector<double> t;
  std::size_t grid = 0;
  Output output;
};

inline std::string cmd_pdf(const PdfArgs& a) {
  std::vector<double> ts = a.t;
  for (std::size_t i = 0; i < a.grid; ++i) ts.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(a.grid));
  require(!ts.empty(), "pdf: give at least one --t value or --grid N");
  for (double t : ts) require(t > 0.0 && t < 1.0, "pdf: every t must lie in (0, 1)");
  require(a.r >= 0.0, "pdf: --r must be >= 0");
  const ResetModel model(a.r);
  std::vector<double> dens;
  for (double t : ts) {
    if (a.law == "T") {
      dens.push_back(laws::pdf_T(t, model));
    } else if (a.law == "L") {
      dens.push_back(laws::pdf_L(t, model));
    } else {
      dens.push_back(laws::pdf_T_given_k(t, a.k));
    }
  }
  if (a.output.format == "json") {
    nlohmann::json j{{"law", a.law}, {"r", a.r}, {"rows", nlohmann::json::array()}};
    if (a.law == "Tk") j["k"] = a.k;
    for (std::size_t i = 0; i < ts.size(); ++i) j["rows"].push_back({{"t", ts[i]}, {"density", dens[i]}});
    return j.dump(2) + "\n";
  }
  std::string s = "t,density\n";
  for (std::size_t i = 0; i < ts.size(); ++i) s += format_double(ts[i]) + "," + format_double(dens[i]) + "\n";
  return s;
}

struct MomentsArgs {
  std::string law = "T";
  std::vector<double> r;
  std::vector<unsigned> orders;
  Output output;
};

inline std::string cmd_moments(const MomentsArgs& a) {
  require(!a.r.empty(), "moments: give at least one --r");
  require(!a.orders.empty(), "moments: give at least one --order");
  for (double r : a.r) require(r >= 0.0, "moments: --r must be >= 0");
  if (a.law == "L") {
    for (unsigned n : a.orders) require(n >= 1, "moments: raw moments of L need --order >= 1");
  }
  struct Row {
    double r;
    unsigned order;
    double value;
  };
  std::vector<Row> rows;
  for (double r : a.r) {
    const ResetModel model(r);
    for (unsigned j : a.orders) {
      const double v = a.law == "T" ? laws::central_moment_T(j, model) : laws::raw_moment_L(j, model);
      rows.push_back({r, j, v});
    }
  }
  if (a.output.format == "json") {
    nlohmann::json j{{"law", a.law},
                     {"kind", a.law == "T" ? "central" : "raw"},
                     {"rows", nlohmann::json::array()}};
    for (const Row& row : rows) j["rows"].push_back({{"r", row.r}, {"order", row.order}, {"value", row.value}});
    return j.dump(2) + "\n";
  }
  std::string s = "r,order,value\n";
  for (const Row& row : rows) {
    s += format_double(row.r) + "," + std::to_string(row.order) + "," + format_double(row.value) + "\n";
  }
  return s;
}

struct SimulateArgs {
  std::string functional = "all";
  double r = 0.0;
  std::size_t n = 1000;
  double dt = 1e-4;
  std::uint64_t seed = 1;
  std::string method = "path";
  unsigned workers = 0;
  Output output;
};

inline SampleEnsemble simulate_ensemble(const SimulateArgs& a) {
  require(a.n >= 1, "simulate: --n must be >= 1");
  require(a.r >= 0.0, "simulate: --r must be >= 0");
  require(!(a.method == "composition" && a.functional == "M"),
          "simulate: the composition method has no sampler for the argmax time M");
  const ResetModel model(a.r);
  EnsembleOptions opts;
  opts.workers = a.workers;
  opts.step_budget = step_budget_from_env();
  if (a.method == "composition") return run_composition_ensemble(model, a.n, a.seed, opts);
  return run_ensemble(model, PathGrid(a.dt), a.n, a.seed, opts);
}

inline std::string ensemble_text(const SimulateArgs& a, const SampleEnsemble& ens) {
  const bool path = ens.method == SamplingMethod::path;
  std::vector<std::string> cols;
  if (a.functional == "all") {
    cols = path ? std::vector<std::string>{"T", "L", "M"} : std::vector<std::string>{"T", "L"};
  } else {
    cols = {a.functional};
  }
  auto value = [](const TrajectoryFunctionals& s, const std::string& c) {
    if (c == "T") return s.t_occupation;
    if (c == "L") return s.t_last_zero;
    return s.t_argmax;
  };
  if (a.output.format == "json") {
    nlohmann::json j{{"r", a.r},
                     {"n", a.n},
                     {"seed", a.seed},
                     {"method", a.method},
                     {"samples", nlohmann::json::array()}};
    if (path) j["dt"] = a.dt;
    for (std::size_t i = 0; i < ens.samples.size(); ++i) {
      nlohmann::json row{{"index", i}};
      for (const auto& c : cols) row[c] = value(ens.samples[i], c);
      row["k"] = ens.samples[i].reset_count;
      j["samples"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
  }
  std::string s = "index";
  for (const auto& c : cols) s += "," + c;
  s += ",k\n";
  for (std::size_t i = 0; i < ens.samples.size(); ++i) {
    s += std::to_string(i);
    for (const auto& c : cols) s += "," + format_double(value(ens.samples[i], c));
    s += "," + std::to_string(ens.samples[i].reset_count) + "\n";
  }
  return s;
}

struct ValidateArgs {
  std::vector<double> r;
  std::size_t n = 10000;
  double dt = 1e-4;
  std::uint64_t seed = 1;
  std::vector<unsigned> orders{2, 4, 6};
  double eps_threshold = 5e-2;
  double ks_threshold = 0.02;
  bool skip_composition = false;
  unsigned workers = 0;
  Output output;
};

struct ValidationRow {
  std::string check;   // "moment" or "ks"
  double r = 0.0;
  std::string method;  // "path" or "composition"
  std::string law;     // "T" or "L"
  std::optional<unsigned> order;
  std::optional<double> theoretical;
  std::optional<double> empirical;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool pass = true;
};

inline ValidationReport run_validation(const ValidateArgs& a) {
  require(!a.r.empty(), "validate: give at least one --r");
  require(a.n >= 2, "validate: --n must be >= 2");
  for (double r : a.r) require(r >= 0.0, "validate: --r must be >= 0");
  for (unsigned j : a.orders) require(j % 2 == 0 && j > 0, "validate: moment orders must be positive and even");
  EnsembleOptions opts;
  opts.workers = a.workers;
  opts.step_budget = step_budget_from_env();
  const PathGrid grid(a.dt);
  ValidationReport rep;
  auto add = [&rep](ValidationRow row) {
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  };
  for (double r : a.r) {
    const ResetModel model(r);
    const auto cdf_T = laws::tabulated_cdf_T(model);
    const auto cdf_L = laws::tabulated_cdf_L(model);
    const SampleEnsemble path = run_ensemble(model, grid, a.n, a.seed, opts);
    const std::vector<double> occupation = column(path, Functional::occupation);
    const analysis::MomentInput input{model, occupation, a.dt};
    for (const auto& m : analysis::relative_error_table(std::span(&input, 1), a.orders)) {
      add({"moment", r, "path", "T", m.order, m.theoretical, m.empirical, m.relative_error, a.eps_threshold,
           m.relative_error <= a.eps_threshold});
    }
    std::vector<std::pair<std::string, const SampleEnsemble*>> sources{{"path", &path}};
    SampleEnsemble comp;
    if (!a.skip_composition) {
      comp = run_composition_ensemble(model, a.n, a.seed, opts);
      sources.emplace_back("composition", &comp);
    }
    for (const auto& [method, ens] : sources) {
      const double d_T = analysis::ks_statistic(column(*ens, Functional::occupation), cdf_T);
      const double d_L = analysis::ks_statistic(column(*ens, Functional::last_zero), cdf_L);
      add({"ks", r, method, "T", std::nullopt, std::nullopt, std::nullopt, d_T, a.ks_threshold, d_T < a.ks_threshold});
      add({"ks", r, method, "L", std::nullopt, std::nullopt, std::nullopt, d_L, a.ks_threshold, d_L < a.ks_threshold});
    }
  }
  return rep;
}

inline std::string validation_text(const ValidateArgs& a, const ValidationReport& rep) {
  if (a.output.format == "json") {
    nlohmann::json j{{"config", {{"n", a.n}, {"dt", a.dt}, {"seed", a.seed}, {"r", a.r}}},
                     {"pass", rep.pass},
                     {"rows", nlohmann::json::array()}};
    for (const auto& row : rep.rows) {
      nlohmann::json o{{"check", row.check},         {"r", row.r},
                       {"method", row.method},       {"law", row.law},
                       {"statistic", row.statistic}, {"threshold", row.threshold},
                       {"pass", row.pass}};
      if (row.order) o["order"] = *row.order;
      if (row.theoretical) o["theoretical"] = *row.theoretical;
      if (row.empirical) o["empirical"] = *row.empirical;
      j["rows"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
  }
  std::string s = "# n=" + std::to_string(a.n) + " dt=" + format_double(a.dt) + " seed=" + std::to_string(a.seed) + "\n";
  s += "check,r,method,law,order,theoretical,empirical,statistic,threshold,pass\n";
  for (const auto& row : rep.rows) {
    s += row.check + "," + format_double(row.r) + "," + row.method + "," + row.law + ",";
    s += (row.order ? std::to_string(*row.order) : "") + ",";
    s += (row.theoretical ? format_double(*row.theoretical) : "") + ",";
    s += (row.empirical ? format_double(*row.empirical) : "") + ",";
    s += format_double(row.statistic) + "," + format_double(row.threshold) + "," + (row.pass ? "1" : "0") + "\n";
  }
  return s;
}

struct FitArgs {
  std::vector<double> r_grid;
  std::size_t grid_points = 16;
  double r_min = 0.2;
  double r_max = 50.0;
  std::size_t n = 100000;
  double dt = 1e-4;
  std::uint64_t seed = 1;
  std::string input;
  bool synthetic = false;
  unsigned workers = 0;
  std::size_t max_iterations = optim::SimplexOptions{}.max_iterations;
  Output output;
};

inline std::vector<analysis::FitPoint> read_fit_points(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "fit-mr: cannot open --input " + path);
  std::vector<analysis::FitPoint> pts;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("r,", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    require(comma != std::string::npos, "fit-mr: --input rows must be 'r,mean'");
    analysis::FitPoint p;
    const auto r1 = std::from_chars(line.data(), line.data() + comma, p.rate);
    const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), p.mean);
    require(r1.ec == std::errc{} && r2.ec == std::errc{}, "fit-mr: unparsable row '" + line + "'");
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<analysis::FitPoint> fit_points(const FitArgs& a) {
  if (!a.input.empty()) return read_fit_points(a.input);
  std::vector<double> grid = a.r_grid;
  if (grid.empty()) {
    require(a.grid_points >= analysis::kMinFitPoints, "fit-mr: needs at least 8 grid points");
    require(a.r_min > 0.0 && a.r_max > a.r_min, "fit-mr: need 0 < --r-min < --r-max");
    grid = analysis::geometric_grid(a.r_min, a.r_max, a.grid_points);
  }
  require(grid.size() >= analysis::kMinFitPoints, "fit-mr: needs at least 8 grid points");
  for (double r : grid) require(r > 0.0, "fit-mr: grid rates must be positive");
  std::vector<analysis::FitPoint> pts;
  if (a.synthetic) {
    for (double r : grid) pts.push_back({r, analysis::mean_M_model(r, analysis::kReferenceFitParams)});
    return pts;
  }
  require(a.n >= 2, "fit-mr: --n must be >= 2");
  EnsembleOptions opts;
  opts.workers = a.workers;
  opts.step_budget = step_budget_from_env();
  const PathGrid path_grid(a.dt);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Each grid point gets its own master seed so the points are independent.
    const SampleEnsemble ens = run_ensemble(ResetModel(grid[i]), path_grid, a.n, mix64(a.seed + i), opts);
    const auto m = column(ens, Functional::argmax);
    double sum = 0.0;
    for (double x : m) sum += x;
    pts.push_back({grid[i], sum / static_cast<double>(m.size())});
  }
  return pts;
}

inline std::string fit_text(const FitArgs& a, const std::vector<analysis::FitPoint>& pts,
                            const analysis::FitResult& fit, const analysis::CurvePeak& peak) {
  if (a.output.format == "csv") {
    std::string s = "a,b,c,d,residual_norm,peak_r,peak_value\n";
    s += format_double(fit.params.a) + "," + format_double(fit.params.b) + "," + format_double(fit.params.c) + "," +
         format_double(fit.params.d) + "," + format_double(fit.residual_norm) + "," + format_double(peak.rate) + "," +
         format_double(peak.value) + "\n";
    return s;
  }
  nlohmann::json j{{"a", fit.params.a},
                   {"b", fit.params.b},
                   {"c", fit.params.c},
                   {"d", fit.params.d},
                   {"residual_norm", fit.residual_norm},
                   {"peak_r", peak.rate},
                   {"peak_value", peak.value},
                   {"points", nlohmann::json::array()}};
  for (const auto& p : pts) j["points"].push_back({{"r", p.rate}, {"mean", p.mean}});
  return j.dump(2) + "\n";
}

}  // namespace detail

/// Runs the command line; `out` receives results when no --out is given, `err` diagnostics.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Brownian motion with Poissonian resetting: arcsine-law analogues"};
  app.name("arcsine_reset");
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the flags; explicit flags take precedence");

  detail::PdfArgs pdf;
  auto* pdf_cmd = app.add_subcommand("pdf", "Evaluate a density on a grid of t values");
  pdf_cmd->add_option("--law", pdf.law, "T, L or Tk (T given k resets)")
      ->check(CLI::IsMember({"T", "L", "Tk"}))
      ->capture_default_str();
  pdf_cmd->add_option("--r", pdf.r, "Resetting rate")->capture_default_str();
  pdf_cmd->add_option("--k", pdf.k, "Reset count for --law Tk")->capture_default_str();
  pdf_cmd->add_option("--t", pdf.t, "Evaluation points in (0, 1)");
  pdf_cmd->add_option("--grid", pdf.grid, "Add N midpoints (i + 1/2)/N");
  detail::add_output_options(pdf_cmd, pdf.output);

  detail::MomentsArgs mom;
  auto* mom_cmd = app.add_subcommand("moments", "Central moments of T_r or raw moments of L_r");
  mom_cmd->add_option("--law", mom.law, "T (central moments) or L (raw moments)")
      ->check(CLI::IsMember({"T", "L"}))
      ->capture_default_str();
  mom_cmd->add_option("--r", mom.r, "Resetting rates")->required();
  mom_cmd->add_option("--order", mom.orders, "Moment orders")->required();
  detail::add_output_options(mom_cmd, mom.output);

  detail::SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample an ensemble of trajectory functionals");
  sim_cmd->add_option("--functional", sim.functional, "T, L, M or all")
      ->check(CLI::IsMember({"T", "L", "M", "all"}))
      ->capture_default_str();
  sim_cmd->add_option("--r", sim.r, "Resetting rate")->required();
  sim_cmd->add_option("--n", sim.n, "Number of trajectories")->capture_default_str();
  sim_cmd->add_option("--dt", sim.dt, "Time step of the path grid")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--method", sim.method, "path or composition")
      ->check(CLI::IsMember({"path", "composition"}))
      ->capture_default_str();
  sim_cmd->add_option("--workers", sim.workers, "Worker threads (0 = hardware)")->capture_default_str();
  detail::add_output_options(sim_cmd, sim.output);

  detail::ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Moment and goodness-of-fit validation report");
  val_cmd->add_option("--r", val.r, "Resetting rates")->required();
  val_cmd->add_option("--n", val.n, "Trajectories per rate")->capture_default_str();
  val_cmd->add_option("--dt", val.dt, "Time step of the path grid")->capture_default_str();
  val_cmd->add_option("--seed", val.seed, "Master seed")->capture_default_str();
  val_cmd->add_option("--order", val.orders, "Even central-moment orders")->capture_default_str();
  val_cmd->add_option("--eps-threshold", val.eps_threshold, "Max relative moment error")->capture_default_str();
  val_cmd->add_option("--ks-threshold", val.ks_threshold, "Max KS distance")->capture_default_str();
  val_cmd->add_flag("--skip-composition", val.skip_composition, "Only check path samples");
  val_cmd->add_option("--workers", val.workers, "Worker threads (0 = hardware)")->capture_default_str();
  detail::add_output_options(val_cmd, val.output);

  detail::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-mr", "Fit the mean argmax-time curve");
  fit_cmd->add_option("--r-grid", fit.r_grid, "Explicit rates (overrides the geometric grid)");
  fit_cmd->add_option("--grid-points", fit.grid_points, "Geometric grid size")->capture_default_str();
  fit_cmd->add_option("--r-min", fit.r_min, "Smallest grid rate")->capture_default_str();
  fit_cmd->add_option("--r-max", fit.r_max, "Largest grid rate")->capture_default_str();
  fit_cmd->add_option("--n", fit.n, "Trajectories per rate")->capture_default_str();
  fit_cmd->add_option("--dt", fit.dt, "Time step of the path grid")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Master seed")->capture_default_str();
  fit_cmd->add_option("--input", fit.input, "CSV of 'r,mean' points instead of simulating");
  fit_cmd->add_flag("--synthetic", fit.synthetic, "Noiseless points from the reference parameters");
  fit_cmd->add_option("--workers", fit.workers, "Worker threads (0 = hardware)")->capture_default_str();
  fit_cmd->add_option("--max-iterations", fit.max_iterations, "Simplex iteration cap per start")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  detail::add_output_options(fit_cmd, fit.output, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto write = [&](const detail::Output& o, const std::string& text) {
    if (!detail::emit(o, text, out)) {
      err << "error: cannot write " << o.path << "\n";
      return static_cast<int>(kUsage);
    }
    return static_cast<int>(kOk);
  };

  try {
    if (*pdf_cmd) return write(pdf.output, detail::cmd_pdf(pdf));
    if (*mom_cmd) return write(mom.output, detail::cmd_moments(mom));
    if (*sim_cmd) return write(sim.output, detail::ensemble_text(sim, detail::simulate_ensemble(sim)));
    if (*val_cmd) {
      const auto rep = detail::run_validation(val);
      const int code = write(val.output, detail::validation_text(val, rep));
      if (code != kOk) return code;
      if (!rep.pass) {
        err << "validation failed: at least one threshold exceeded\n";
        return kValidationFailed;
      }
      return kOk;
    }
    if (*fit_cmd) {
      const auto pts = detail::fit_points(fit);
      if (pts.size() < analysis::kMinFitPoints) {
        err << "error: fit-mr needs at least 8 points\n";
        return kUsage;
      }
      optim::SimplexOptions simplex;
      simplex.max_iterations = fit.max_iterations;
      const auto result = analysis::fit_mean_M(pts, simplex);
      const auto peak = analysis::fitted_peak(result.params);
      return write(fit.output, detail::fit_text(fit, pts, result, peak));
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << " (raise " << kStepBudgetEnv << " to allow it)\n";
    return kUsage;
  } catch (const ConvergenceFailure& e) {
    err << "numeric error: " << e.what() << "\n";
    return kConvergence;
  } catch (const FitDiverged& e) {
    err << "fit error: " << e.what() << "\n";
    return kFitFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    // Keep the exit status inside the documented set.
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace arcsine_reset::cli

#include "cli.hpp"

#include "fodgmm/dgp.hpp"
#include "fodgmm/error.hpp"
#include "fodgmm/panel.hpp"
#include "fodgmm/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fodgmm::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

bool has_format(const RunConfig& c, const std::string& f) {
  return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return file;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

/// "1-18,25" style lists; "all" selects 1..36.
std::vector<int> parse_design_list(const std::string& text) {
  if (text == "all") {
    std::vector<int> all(36);
    for (int i = 0; i < 36; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    return all;
  }
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoi(item));
      } else {
        const int lo = std::stoi(item.substr(0, dash));
        const int hi = std::stoi(item.substr(dash + 1));
        if (hi < lo) invalid("bad design range " + item);
        for (int d = lo; d <= hi; ++d) out.push_back(d);
      }
    } catch (const std::logic_error&) {
      invalid("bad design list entry '" + item + "'");
    }
  }
  return out;
}

void apply_overrides(DesignConfig& cfg, const std::map<std::string, double>& overrides) {
  for (const auto& [key, value] : overrides) {
    if (key == "beta1") cfg.beta1 = value;
    else if (key == "beta2") cfg.beta2 = value;
    else if (key == "rho") cfg.rho = value;
    else if (key == "phi1") cfg.phi1 = value;
    else if (key == "kappa1") cfg.kappa1 = value;
    else if (key == "sigma_v") cfg.sigma_v = value;
    else if (key == "sigma_eta") cfg.sigma_eta = value;
    else if (key == "burn_in") cfg.burn_in = static_cast<int>(value);
    else if (key == "filtered_phi") cfg.filtered_phi = value != 0.0;
    else invalid("unknown design parameter '" + key + "'");
  }
}

void write_error(std::ostream& err, std::string_view code, const std::string& message,
                 std::optional<int> period, int status) {
  ordered_json doc;
  doc["error"] = code;
  doc["message"] = message;
  if (period) doc["period"] = *period;
  doc["exit_code"] = status;
  err << doc.dump() << '\n';
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Estimate: return "estimate";
    case Mode::Simulate: return "simulate";
    case Mode::Tables: return "tables";
    case Mode::Sweep: return "sweep";
    case Mode::Generate: return "generate";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : {Mode::Estimate, Mode::Simulate, Mode::Tables, Mode::Sweep, Mode::Generate}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

void validate(const RunConfig& c) {
  if (c.reps < 1) invalid("reps must be at least 1");
  if (c.designs.empty()) invalid("no designs selected");
  for (int d : c.designs) {
    if (d < 1 || d > 36) invalid("design id " + std::to_string(d) + " outside 1..36");
  }
  if (c.T.empty() || c.n.empty()) invalid("T and n lists must be non-empty");
  for (Index t : c.T) {
    if (t < 2) invalid("T must be at least 2");
  }
  for (Index n : c.n) {
    if (n < 1) invalid("n must be positive");
  }
  for (double l : c.levels) {
    if (!(l > 0.0 && l < 1.0)) invalid("confidence levels must lie in (0, 1)");
  }
  if (c.levels.empty()) invalid("at least one confidence level is required");
  if (!parse_estimator(c.estimator)) invalid("unknown estimator '" + c.estimator + "'");
  if (c.estimators.empty()) invalid("no estimators selected");
  for (const auto& e : c.estimators) {
    if (!parse_estimator(e)) invalid("unknown estimator '" + e + "'");
  }
  resolve_plan(c);
  resolve_layout(c);
  for (const auto& f : c.formats) {
    if (f != "csv" && f != "json" && f != "text") invalid("unknown output format '" + f + "'");
  }
  if (c.mode == Mode::Estimate && c.input.empty()) invalid("estimate mode needs --input");
  if (c.mode == Mode::Sweep && c.alphas.empty()) invalid("sweep mode needs alphas");
  for (double a : c.alphas) {
    if (!(a >= 0.0)) invalid("alphas must be non-negative");
  }
  DesignConfig probe;
  apply_overrides(probe, c.overrides);
}

RunConfig config_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) invalid("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "mode") {
        auto m = parse_mode(value.get<std::string>());
        if (!m) invalid("unknown mode '" + value.get<std::string>() + "'");
        c.mode = *m;
      } else if (key == "input") c.input = value.get<std::string>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<unsigned>();
      else if (key == "reps") c.reps = value.get<Index>();
      else if (key == "designs") {
        c.designs = value.is_string() ? parse_design_list(value.get<std::string>())
                                      : value.get<std::vector<int>>();
      } else if (key == "T") c.T = value.get<std::vector<Index>>();
      else if (key == "n") c.n = value.get<std::vector<Index>>();
      else if (key == "estimators") c.estimators = value.get<std::vector<std::string>>();
      else if (key == "estimator") c.estimator = value.get<std::string>();
      else if (key == "plan") c.plan = value.get<std::string>();
      else if (key == "alpha") {
        if (value.is_null()) c.alpha.reset();
        else c.alpha = value.get<double>();
      } else if (key == "levels") c.levels = value.get<std::vector<double>>();
      else if (key == "layout") c.layout = value.get<std::string>();
      else if (key == "overrides") c.overrides = value.get<std::map<std::string, double>>();
      else if (key == "alphas") c.alphas = value.get<std::vector<double>>();
      else if (key == "efficient_T") c.efficient_T = value.get<std::vector<Index>>();
      else if (key == "formats") c.formats = value.get<std::vector<std::string>>();
      else invalid("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("config has a field of the wrong type: ") + e.what());
  }
  return c;
}

std::string config_to_json(const RunConfig& c) {
  ordered_json doc;
  doc["mode"] = to_string(c.mode);
  doc["input"] = c.input;
  doc["out"] = c.out;
  doc["seed"] = c.seed;
  doc["threads"] = c.threads;
  doc["reps"] = c.reps;
  doc["designs"] = c.designs;
  doc["T"] = c.T;
  doc["n"] = c.n;
  doc["estimators"] = c.estimators;
  doc["estimator"] = c.estimator;
  doc["plan"] = c.plan;
  doc["alpha"] = c.alpha ? ordered_json(*c.alpha) : ordered_json(nullptr);
  doc["levels"] = c.levels;
  doc["layout"] = c.layout;
  doc["overrides"] = c.overrides;
  doc["alphas"] = c.alphas;
  doc["efficient_T"] = c.efficient_T;
  doc["formats"] = c.formats;
  return doc.dump(2);
}

InstrumentPlan resolve_plan(const RunConfig& c) {
  if (c.alpha) return InstrumentPlan::power_law(*c.alpha, 5);
  auto plan = parse_plan(c.plan);
  if (!plan) invalid("unknown instrument plan '" + c.plan + "'");
  return *plan;
}

ModelLayout resolve_layout(const RunConfig& c) {
  if (c.layout == "dynamic") return ModelLayout::lag_plus_regressor();
  if (c.layout.size() > 2 && c.layout.rfind("ar", 0) == 0) {
    try {
      return ModelLayout::autoregressive(std::stoi(c.layout.substr(2)));
    } catch (const std::logic_error&) {
    }
  }
  invalid("unknown layout '" + c.layout + "' (use dynamic or ar<p>)");
}

std::vector<DesignConfig> resolve_designs(const RunConfig& c) {
  std::vector<DesignConfig> out;
  for (Index T : c.T) {
    for (Index n : c.n) {
      for (int id : c.designs) {
        DesignConfig cfg = catalog_design(id, n, T);
        apply_overrides(cfg, c.overrides);
        cfg.validate();
        out.push_back(cfg);
      }
    }
  }
  return out;
}

std::vector<EstimatorSpec> resolve_estimators(const RunConfig& c) {
  const InstrumentPlan plan = resolve_plan(c);
  std::vector<EstimatorSpec> out;
  for (const auto& name : c.estimators) {
    const auto tag = parse_estimator(name);
    if (!tag) invalid("unknown estimator '" + name + "'");
    out.push_back({*tag, plan});
  }
  return out;
}

ExperimentSpec resolve_experiment(const RunConfig& c) {
  ExperimentSpec spec;
  spec.designs = resolve_designs(c);
  spec.estimators = resolve_estimators(c);
  spec.layout = resolve_layout(c);
  spec.reps = c.reps;
  spec.levels = c.levels;
  spec.seed = c.seed;
  spec.threads = c.threads;
  spec.validate();
  return spec;
}

std::string output_dir(const RunConfig& c, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("FODGMM_OUT_DIR"); env && *env) return env;
  if (!c.out.empty()) return c.out;
  return "fodgmm-out";
}

int cmd_estimate(const RunConfig& c, std::ostream& out) {
  validate(c);
  const PanelDataset panel = load_panel(c.input);
  const auto problems = fodgmm::validate(panel);
  if (!problems.empty()) throw Error(ErrorCode::ParseError, problems.front().message);
  const ModelLayout layout = resolve_layout(c);
  const EstimatorTag tag = *parse_estimator(c.estimator);
  GmmFit fit;
  switch (tag) {
    case EstimatorTag::FOD: fit = fit_fod(panel, resolve_plan(c), layout); break;
    case EstimatorTag::FD: fit = fit_fd(panel, resolve_plan(c), layout); break;
    case EstimatorTag::Efficient: fit = fit_efficient(panel, layout); break;
  }
  if (c.out.empty()) {
    write_fit_json(fit, layout, c.levels, out);
    return 0;
  }
  const fs::path dir = prepare_dir(c.out);
  auto json = open_output(dir / "fit.json");
  write_fit_json(fit, layout, c.levels, json);
  auto text = open_output(dir / "fit.txt");
  write_fit_text(fit, layout, c.levels, text);
  write_fit_text(fit, layout, c.levels, out);
  return 0;
}

namespace {

void write_summary_files(const McSummary& summary, const RunConfig& c, const fs::path& dir) {
  if (has_format(c, "csv")) {
    auto csv = open_output(dir / "summary.csv");
    write_summary_csv(summary, csv);
  }
  if (has_format(c, "json")) {
    auto json = open_output(dir / "summary.json");
    write_summary_json(summary, json);
  }
}

Index count_infeasible(const McSummary& s) {
  return static_cast<Index>(std::count_if(s.cells.begin(), s.cells.end(),
                                          [](const CellSummary& cell) { return cell.infeasible; }));
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  validate(c);
  const McSummary summary = run(resolve_experiment(c));
  const fs::path dir = prepare_dir(c.out.empty() ? "fodgmm-out" : c.out);
  write_summary_files(summary, c, dir);
  out << "cells: " << summary.cells.size() << "  infeasible: " << count_infeasible(summary)
      << "  output: " << dir.string() << '\n';
  return 0;
}

int cmd_tables(const RunConfig& c, std::ostream& out) {
  validate(c);
  ExperimentSpec spec = resolve_experiment(c);
  // The all-instrument estimator runs only at the configured T values.
  std::vector<EstimatorSpec> others;
  bool want_efficient = false;
  for (const auto& e : spec.estimators) {
    if (e.tag == EstimatorTag::Efficient) want_efficient = true;
    else others.push_back(e);
  }
  McSummary summary;
  summary.levels = spec.levels;
  for (Index T : c.T) {
    ExperimentSpec part = spec;
    part.designs.clear();
    for (const auto& d : spec.designs) {
      if (d.T == T) part.designs.push_back(d);
    }
    part.estimators = others;
    const bool efficient_here =
        want_efficient && std::find(c.efficient_T.begin(), c.efficient_T.end(), T) != c.efficient_T.end();
    if (efficient_here) part.estimators.insert(part.estimators.begin(), {EstimatorTag::Efficient, {}});
    if (part.estimators.empty()) continue;
    McSummary chunk = run(part);
    for (auto& cell : chunk.cells) summary.cells.push_back(std::move(cell));
  }

  const fs::path dir = prepare_dir(c.out.empty() ? "fodgmm-out" : c.out);
  write_summary_files(summary, c, dir);
  const Index K = resolve_layout(c).size();
  const double level = std::find(c.levels.begin(), c.levels.end(), 0.95) != c.levels.end()
                           ? 0.95
                           : c.levels.front();
  for (Index k = 0; k < K; ++k) {
    for (auto [lo, hi] : {std::pair{1, 18}, std::pair{19, 36}}) {
      const bool any = std::any_of(c.designs.begin(), c.designs.end(),
                                   [lo = lo, hi = hi](int d) { return d >= lo && d <= hi; });
      if (!any) continue;
      auto file = open_output(dir / ("coverage_beta" + std::to_string(k + 1) + "_designs" +
                                     std::to_string(lo) + "-" + std::to_string(hi) + ".csv"));
      write_coverage_table(summary, k, level, lo, hi, file);
    }
  }
  Index series = 0;
  for (Index T : c.T) {
    if (!summary.find(c.designs.front(), EstimatorTag::Efficient, T)) continue;
    bool feasible = false;
    for (const auto& cell : summary.cells) {
      if (cell.T == T && cell.estimator.tag == EstimatorTag::Efficient && !cell.infeasible) {
        feasible = true;
      }
    }
    if (!feasible) continue;
    for (Index k = 0; k < K; ++k) {
      auto file = open_output(dir / ("ratio_beta" + std::to_string(k + 1) + "_T" +
                                     std::to_string(T) + ".csv"));
      write_ratio_series(summary, k, T, file);
      ++series;
    }
  }
  out << "cells: " << summary.cells.size() << "  ratio series: " << series
      << "  output: " << dir.string() << '\n';
  return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  validate(c);
  DesignConfig base = catalog_design(c.designs.front(), c.n.front(), c.T.front());
  apply_overrides(base, c.overrides);
  base.design_id.reset();
  const auto rows = theta_sweep(base, c.alphas, c.n, c.T, c.reps, c.seed, c.threads,
                                resolve_layout(c));
  const fs::path dir = prepare_dir(c.out.empty() ? "fodgmm-out" : c.out);
  auto file = open_output(dir / "sweep.csv");
  write_sweep_csv(rows, file);
  write_sweep_csv(rows, out);
  return 0;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  validate(c);
  DesignConfig cfg = catalog_design(c.designs.front(), c.n.front(), c.T.front());
  apply_overrides(cfg, c.overrides);
  const SimulatedPanel sim = generate(cfg, c.seed, 0);
  if (c.out.empty()) {
    write_panel(sim.panel, out);
    return 0;
  }
  const fs::path dir = prepare_dir(c.out);
  write_panel(sim.panel, dir / "panel.csv");
  out << "wrote " << (dir / "panel.csv").string() << '\n';
  return 0;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic panel GMM estimation and Monte Carlo experiments"};
  app.set_version_flag("--version", "fodgmm 0.1.0");

  std::string mode_text;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<Index> reps;
  std::optional<std::string> designs;
  std::vector<Index> T;
  std::vector<Index> n;
  std::vector<std::string> estimators;
  std::optional<std::string> plan;
  std::optional<double> alpha;
  std::optional<unsigned> threads;
  std::optional<std::string> out_dir;
  std::optional<std::string> input;
  std::optional<std::string> estimator;
  std::vector<double> levels;
  std::optional<std::string> layout;
  std::vector<double> alphas;
  std::vector<std::string> sets;
  std::vector<std::string> formats;

  app.add_option("--mode", mode_text, "estimate | simulate | tables | sweep | generate");
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--reps", reps, "Replications per cell");
  app.add_option("--designs", designs, "Design ids, e.g. 5 or 1-18,25 or all");
  app.add_option("--T", T, "Time dimensions")->delimiter(',');
  app.add_option("--n", n, "Cross-section sizes")->delimiter(',');
  app.add_option("--estimators", estimators, "fod, fd, efficient")->delimiter(',');
  app.add_option("--plan", plan, "limited | all | powerlaw:<alpha>[:<base>[:<cap>]]");
  app.add_option("--alpha", alpha, "Power-law exponent; overrides --plan");
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--input", input, "Panel CSV for estimate mode");
  app.add_option("--estimator", estimator, "Estimator for estimate mode");
  app.add_option("--levels", levels, "Confidence levels")->delimiter(',');
  app.add_option("--layout", layout, "dynamic | ar<p>");
  app.add_option("--alphas", alphas, "Sweep exponents")->delimiter(',');
  app.add_option("--set", sets, "Design parameter override key=value");
  app.add_option("--formats", formats, "csv, json")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForHelp*>(&e) || dynamic_cast<const CLI::CallForAllHelp*>(&e)
                  ? app.help()
                  : std::string(e.what()) + "\n");
      return 0;
    }
    const int status = exit_code(ErrorCode::InvalidConfig);
    write_error(err, to_string(ErrorCode::InvalidConfig), e.what(), std::nullopt, status);
    return status;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw Error(ErrorCode::IoError, "cannot read config " + config_path);
      std::stringstream buf;
      buf << file.rdbuf();
      c = config_from_json(buf.str());
    }
    if (!mode_text.empty()) {
      auto m = parse_mode(mode_text);
      if (!m) invalid("unknown mode '" + mode_text + "'");
      c.mode = *m;
    }
    if (seed) c.seed = *seed;
    if (reps) c.reps = *reps;
    if (designs) c.designs = parse_design_list(*designs);
    if (!T.empty()) c.T = T;
    if (!n.empty()) c.n = n;
    if (!estimators.empty()) c.estimators = estimators;
    if (plan) {
      c.plan = *plan;
      c.alpha.reset();
    }
    if (alpha) c.alpha = *alpha;
    if (threads) c.threads = *threads;
    if (input) c.input = *input;
    if (estimator) c.estimator = *estimator;
    if (!levels.empty()) c.levels = levels;
    if (layout) c.layout = *layout;
    if (!alphas.empty()) c.alphas = alphas;
    if (!formats.empty()) c.formats = formats;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) invalid("--set expects key=value, got '" + s + "'");
      try {
        c.overrides[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
      } catch (const std::logic_error&) {
        invalid("--set value for '" + s.substr(0, eq) + "' is not a number");
      }
    }
    const bool dir_given = out_dir || std::getenv("FODGMM_OUT_DIR") || !c.out.empty();
    if (c.mode != Mode::Estimate && c.mode != Mode::Generate) {
      c.out = output_dir(c, out_dir);
    } else if (dir_given) {
      c.out = output_dir(c, out_dir);
    }

    switch (c.mode) {
      case Mode::Estimate: return cmd_estimate(c, out);
      case Mode::Simulate: return cmd_simulate(c, out);
      case Mode::Tables: return cmd_tables(c, out);
      case Mode::Sweep: return cmd_sweep(c, out);
      case Mode::Generate: return cmd_generate(c, out);
    }
    return 0;
  } catch (const Error& e) {
    const int status = exit_code(e.code());
    write_error(err, to_string(e.code()), e.detail(), e.period(), status);
    return status;
  } catch (const std::exception& e) {
    write_error(err, "InternalError", e.what(), std::nullopt, 1);
    return 1;
  }
}

}  // namespace fodgmm::cli

// darkbright: config-driven scenario runner for the two-qubit waveguide
// thermometry toolkit.  One subcommand per scenario; artifacts land in the
// configured output directory together with a run.json manifest.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "darkbright/config.hpp"
#include "darkbright/io.hpp"
#include "darkbright/thermometry.hpp"

#ifndef DARKBRIGHT_VERSION
#define DARKBRIGHT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace darkbright;
using nlohmann::json;

namespace {

/// Collects artifact bytes and commits them in one pass at the end of a run,
/// so a failed scenario leaves no partial outputs behind.
class ArtifactSink {
 public:
  explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {}

  void add_text(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  void add_csv(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    add_text(name, csv_text(header, rows));
  }

  void add_json(const std::string& name, const json& j) {
    add_text(name, j.dump(2) + "\n");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
  }

  void commit() {
    fs::create_directories(dir_);
    std::vector<fs::path> written;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path p = dir_ / name;
        write_text_atomic(p, content);
        written.push_back(p);
      }
    } catch (...) {
      for (const auto& p : written) {
        std::error_code ec;
        fs::remove(p, ec);
      }
      throw;
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

TransmissionModel make_model(const ScenarioConfig& c) {
  if (c.single_qubit)
    return TransmissionModel(c.device.q1, c.device.gamma_glob_mhz,
                             c.device.gamma_loc1_mhz, c.layout, c.policy);
  return TransmissionModel(c.device, c.layout, c.policy);
}

std::vector<PowerPoint> read_power_points(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int pc = table.column("power_mw");
  const int tc = table.column("abs_t");
  std::vector<PowerPoint> points;
  for (const auto& row : table.rows)
    points.push_back({row[pc], row[tc]});
  return points;
}

json fit_report_json(const FitReport& report) {
  json j;
  j["params"] = report.params;
  json bounds = json::object();
  for (const auto& [name, b] : report.bounds) bounds[name] = {b[0], b[1]};
  j["bounds"] = bounds;
  j["residual_norm"] = report.residual_norm;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["warnings"] = report.warnings;
  return j;
}

struct RunOutcome {
  int exit_code = 0;
  json extra;  // scenario block merged into run.json
};

RunOutcome run_levels(const ScenarioConfig& c, const TransmissionModel& model,
                      ArtifactSink& sink) {
  std::vector<std::vector<double>> rows;
  const auto& lines = model.spectrum().transitions;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto& t = lines[i];
    rows.push_back({double(i), t.freq_ghz, double(t.from_state),
                    double(t.to_state), double(t.from_manifold),
                    double(t.to_manifold), t.dipole,
                    t.prohibited ? 1.0 : 0.0});
  }
  sink.add_csv("levels.csv",
               {"index", "freq_ghz", "from_state", "to_state", "from_manifold",
                "to_manifold", "dipole", "prohibited"},
               rows);
  RunOutcome out;
  out.extra = {{"transition_count", lines.size()}};
  return out;
}

RunOutcome run_steady(const ScenarioConfig& c, const TransmissionModel& model,
                      ArtifactSink& sink) {
  const double f = c.steady_probe_ghz > 0.0
                       ? c.steady_probe_ghz
                       : model.resolve(c.transition).freq_ghz;
  const DriveSpec drive = model.probe(f, c.probe_a_in());
  const SteadyStateReport rep = model.steady(drive, c.temps);
  const complexd t =
      transmission_amplitude(rep.rho, model.space(), model.gamma_glob_mhz(), drive);

  json j;
  j["probe_ghz"] = f;
  j["a_in"] = c.probe_a_in();
  j["re_t"] = t.real();
  j["im_t"] = t.imag();
  j["abs_t"] = std::abs(t);
  j["residual"] = rep.residual;
  j["branch"] = rep.branch;
  j["degenerate"] = rep.degenerate;
  json pops = json::array();
  const auto& ls = model.spectrum();
  for (int i = 0; i < rep.rho.rows(); ++i)
    pops.push_back({{"state", i},
                    {"energy_ghz", ls.energies_ghz(i)},
                    {"population", rep.rho(i, i).real()}});
  j["populations"] = pops;
  sink.add_json("steady.json", j);
  return {};
}

RunOutcome run_probe_sweep(const ScenarioConfig& c,
                           const TransmissionModel& model, ArtifactSink& sink) {
  const auto grid = c.probe.values();
  const double a_in = c.probe_a_in();
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(int(grid.size()), [&](int i) {
    const complexd t = model.transmission(grid[i], a_in, c.temps);
    rows[i] = {grid[i], t.real(), t.imag(), std::abs(t)};
  });
  sink.add_csv("trace.csv", {"probe_ghz", "re_t", "im_t", "abs_t"}, rows);
  return {};
}

RunOutcome run_temp_curve(const ScenarioConfig& c,
                          const TransmissionModel& model, ArtifactSink& sink) {
  const TemperatureCurve curve = temperature_curve(
      model, c.transition, c.swept, c.temp.values(), c.other_k, c.probe_a_in());
  std::vector<std::vector<double>> rows;
  for (const auto& p : curve.points) rows.push_back({p.temperature_k, p.abs_t});
  sink.add_csv("curve.csv", {"temperature_k", "abs_t"}, rows);
  RunOutcome out;
  out.extra = {{"probe_ghz", curve.line.freq_ghz},
               {"swept", to_string(curve.swept)},
               {"other_k", curve.other_k}};
  return out;
}

RunOutcome run_diagram(const ScenarioConfig& c, const TransmissionModel& model,
                       ArtifactSink& sink) {
  const auto grid = c.temp.values();
  json families = json::array();
  for (size_t fi = 0; fi < c.family.size(); ++fi) {
    const BrightDarkDiagram d = bright_dark_diagram(model, c.swept, grid,
                                                    c.family[fi], c.probe_a_in());
    std::vector<std::vector<double>> rows;
    for (const auto& p : d.points)
      rows.push_back({p.sweep_value_k, p.t_00B_abs, p.t_DDp_abs});
    const std::string name = "diagram_" + std::to_string(fi) + ".csv";
    sink.add_csv(name, {"sweep_value_k", "t_00B_abs", "t_DDp_abs"}, rows);
    families.push_back({{"file", name},
                        {"other_k", c.family[fi]},
                        {"label", d.label},
                        {"f_bright_ghz", d.f_bright_ghz},
                        {"f_dark_ghz", d.f_dark_ghz}});
  }
  RunOutcome out;
  out.extra = {{"families", families}};
  return out;
}

RunOutcome run_fit_calibration(const ScenarioConfig& c,
                               const TransmissionModel& model,
                               ArtifactSink& sink) {
  const auto data = read_power_points(c.data_path);
  CalibrationSetup setup;
  setup.model = &model;
  setup.transition = c.transition;
  setup.heated = c.heated;
  setup.a_in = c.probe_a_in();
  setup.max_iterations = c.fit_max_iterations;
  const FitReport report = fit_calibration(data, setup);
  sink.add_json("fit.json", fit_report_json(report));
  RunOutcome out;
  out.exit_code = report.converged ? 0 : 4;
  out.extra = {{"data_points", data.size()}};
  return out;
}

RunOutcome run_fit_local(const ScenarioConfig& c, ArtifactSink& sink) {
  const auto data_q1 = read_power_points(c.data_q1_path);
  const auto data_q2 = read_power_points(c.data_q2_path);
  LocalFitSetup setup;
  setup.q1 = c.device.q1;
  setup.q2 = c.device.q2;
  setup.gamma_glob_mhz = c.device.gamma_glob_mhz;
  setup.k_ratio = c.device.k_ratio;
  setup.t_res_k = c.t_res_k;
  setup.alpha_glob_k_per_mw = c.alpha_glob_k_per_mw;
  setup.gamma_loc1_guess_mhz = c.gamma_loc1_guess_mhz;
  setup.policy = c.policy;
  setup.a_in = c.probe_a_in();
  setup.max_iterations = c.fit_max_iterations;
  const FitReport report = fit_local(data_q1, data_q2, setup);
  sink.add_json("fit.json", fit_report_json(report));
  RunOutcome out;
  out.exit_code = report.converged ? 0 : 4;
  out.extra = {{"data_points_q1", data_q1.size()},
               {"data_points_q2", data_q2.size()}};
  return out;
}

RunOutcome run_infer(const ScenarioConfig& c, const TransmissionModel& model,
                     ArtifactSink& sink) {
  const TemperatureInverter inverter(model, c.inverter);
  const InferenceResult r = inverter.invert(c.target_t00b, c.target_tddp);

  json j;
  j["status"] = to_string(r.status);
  j["t_glob_k"] = r.t_glob_k;
  j["t_loc_k"] = r.t_loc_k;
  j["residual"] = r.residual;
  j["basin_count"] = r.basin_count;
  j["nearest_pair"] = {r.nearest_pair[0], r.nearest_pair[1]};
  j["local_sensitivity"] = r.local_sensitivity;
  json cands = json::array();
  for (const auto& cand : r.candidates) cands.push_back({cand[0], cand[1]});
  j["candidates"] = cands;
  j["message"] = r.message;
  j["target"] = {{"t_00b", c.target_t00b}, {"t_ddp", c.target_tddp}};
  j["f_bright_ghz"] = inverter.f_bright_ghz();
  j["f_dark_ghz"] = inverter.f_dark_ghz();
  sink.add_json("infer.json", j);

  RunOutcome out;
  out.exit_code = r.status == InferenceStatus::ok ? 0 : 3;
  out.extra = {{"status", to_string(r.status)}};
  return out;
}

int run_scenario(const ScenarioConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  ArtifactSink sink(c.out_dir);

  RunOutcome outcome;
  long solves = 0, degenerate = 0;
  if (c.kind == ScenarioKind::fit_local) {
    // Builds its own per-qubit engines internally.
    outcome = run_fit_local(c, sink);
  } else {
    const TransmissionModel model = make_model(c);
    switch (c.kind) {
      case ScenarioKind::steady: outcome = run_steady(c, model, sink); break;
      case ScenarioKind::probe_sweep:
        outcome = run_probe_sweep(c, model, sink);
        break;
      case ScenarioKind::temp_curve:
        outcome = run_temp_curve(c, model, sink);
        break;
      case ScenarioKind::diagram: outcome = run_diagram(c, model, sink); break;
      case ScenarioKind::levels: outcome = run_levels(c, model, sink); break;
      case ScenarioKind::fit_calibration:
        outcome = run_fit_calibration(c, model, sink);
        break;
      case ScenarioKind::infer: outcome = run_infer(c, model, sink); break;
      case ScenarioKind::fit_local: break;  // handled above
    }
    solves = model.solve_count();
    degenerate = model.degenerate_count();
  }
  const auto t1 = std::chrono::steady_clock::now();

  json manifest;
  manifest["tool"] = "darkbright";
  manifest["version"] = DARKBRIGHT_VERSION;
  manifest["config"] = config_echo(c);
  manifest["scenario"] = to_string(c.kind);
  if (!outcome.extra.is_null()) manifest["result"] = outcome.extra;
  manifest["exit_code"] = outcome.exit_code;
  manifest["solver"] = {{"steady_solves", solves},
                        {"degenerate_solves", degenerate},
                        {"threads", max_threads()}};
  manifest["timings_ms"] = {
      {"compute",
       std::chrono::duration<double, std::milli>(t1 - t0).count()}};
  json artifacts = json::array();
  for (const auto& n : sink.names()) artifacts.push_back(n);
  artifacts.push_back("run.json");
  manifest["artifacts"] = artifacts;
  sink.add_json("run.json", manifest);

  sink.commit();
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-qubit waveguide thermometry simulator and inference tool"};
  app.set_version_flag("--version", std::string("darkbright ") + DARKBRIGHT_VERSION);
  app.require_subcommand(1);

  struct {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    int threads = 0;
  } args;

  const std::pair<ScenarioKind, const char*> scenarios[] = {
      {ScenarioKind::steady, "steady state and transmission at one probe point"},
      {ScenarioKind::probe_sweep, "transmission trace over a probe frequency grid"},
      {ScenarioKind::temp_curve, "|t| on one transition versus bath temperature"},
      {ScenarioKind::diagram, "bright-dark diagram, one curve per fixed-bath value"},
      {ScenarioKind::levels, "eigenlevel transition table with dipole weights"},
      {ScenarioKind::fit_calibration, "fit (T_res, alpha) to a power curve"},
      {ScenarioKind::fit_local, "fit (alpha_loc, gamma_loc1) to two power curves"},
      {ScenarioKind::infer, "invert a (|t_00B|, |t_DD'|) pair to temperatures"},
  };
  for (const auto& [kind, help] : scenarios) {
    CLI::App* sub = app.add_subcommand(to_string(kind), help);
    sub->add_option("--config", args.config,
                    "config file, sectioned key/value or .json");
    sub->add_option("--out", args.out, "output directory (overrides config)");
    sub->add_option("--set", args.overrides,
                    "override one setting, section.key=value (repeatable)");
    sub->add_option("--threads", args.threads, "cap worker threads");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ScenarioKind kind =
        parse_scenario_kind(app.get_subcommands().front()->get_name());
    ScenarioConfig config = load_scenario_config(kind, args.config, args.overrides);
    if (!args.out.empty()) config.out_dir = args.out;
    if (args.threads > 0) config.threads = args.threads;
    if (config.threads > 0)
      setenv("DARKBRIGHT_THREADS", std::to_string(config.threads).c_str(), 1);
    return run_scenario(config);
  } catch (const parse_error& e) {
    std::cerr << "darkbright: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "darkbright: " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << "darkbright: " << e.what() << "\n";
    return 2;
  } catch (const fit_error& e) {
    std::cerr << "darkbright: " << e.what() << "\n";
    return 4;
  } catch (const solver_error& e) {
    std::cerr << "darkbright: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "darkbright: " << e.what() << "\n";
    return 3;
  }
}

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "codesign/design.hpp"
#include "codesign/util.hpp"
#include "config.hpp"
#include "json.hpp"

namespace codesign::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_bytes(const std::string& bytes) { return fnv1a64(bytes); }

std::uint64_t hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitConfig, "missing input artifact: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return hash_bytes(buffer.str());
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kExitCompute, "cannot write " + path.string());
  out << content;
}

// Stage bookkeeping: a stage is a no-op when its manifest records the same
// key (config + inputs) and every listed output still exists.
class Stage {
 public:
  Stage(const fs::path& out_dir, std::string name, std::uint64_t key)
      : out_dir_(out_dir), name_(std::move(name)), key_(hex64(key)) {
    fs::create_directories(out_dir_);
  }

  void add_input(const std::string& label, std::uint64_t hash) {
    inputs_[label] = hex64(hash);
  }

  bool up_to_date() const {
    const auto path = manifest_path();
    std::ifstream in(path);
    if (!in) return false;
    json m;
    try {
      in >> m;
    } catch (...) {
      return false;
    }
    if (m.value("stage", "") != name_ || m.value("key", "") != key_) return false;
    if (m.value("inputs", json::object()) != json(inputs_)) return false;
    for (const auto& f : m.value("outputs", std::vector<std::string>{})) {
      if (!fs::exists(out_dir_ / f)) return false;
    }
    return true;
  }

  void emit(const std::string& filename, const std::string& content) {
    write_text(out_dir_ / filename, content);
    outputs_.push_back(filename);
  }

  void finish() {
    json m;
    m["stage"] = name_;
    m["key"] = key_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    write_text(manifest_path(), m.dump(2) + "\n");
  }


 private:
  fs::path manifest_path() const { return out_dir_ / (name_ + ".manifest.json"); }

  fs::path out_dir_;
  std::string name_;
  std::string key_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
};

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> parallel;
  std::optional<std::string> p;
  std::optional<std::string> pc;
  std::optional<int> n_c;
  std::optional<double> d_max;
  bool skip_tuning = false;
  std::optional<std::string> risk;
};

SizingParams parse_p_flag(const std::string& text) {
  SizingParams p;
  if (std::sscanf(text.c_str(), "%d,%d", &p.battery_units, &p.pv_units) != 2)
    throw CliError(kExitConfig, "--p expects 'battery_units,pv_units'");
  return p;
}

void parse_pc_flag(const std::string& text, ControllerParams& pc) {
  if (std::sscanf(text.c_str(), "%d,%d,%d", &pc.n_s, &pc.n_x, &pc.n_f) != 3)
    throw CliError(kExitConfig, "--pc expects 'n_s,n_x,n_f'");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
  } else {
    cfg.pipeline.sizing_lattice = PipelineConfig::default_sizing_lattice();
  }
  if (o.seed) {
    cfg.master_seed = *o.seed;
    cfg.pipeline.master_seed = *o.seed;
  }
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.parallel) {
    cfg.threads = *o.parallel;
    cfg.pipeline.threads = *o.parallel;
  }
  if (o.p) cfg.simulate.p = parse_p_flag(*o.p);
  if (o.pc) {
    parse_pc_flag(*o.pc, cfg.simulate.pc);
    parse_pc_flag(*o.pc, cfg.pipeline.pc_fixed);
  }
  if (o.n_c) cfg.pipeline.n_c_override = static_cast<std::size_t>(*o.n_c);
  if (o.d_max) cfg.pipeline.d_max = *o.d_max;
  if (o.skip_tuning) cfg.pipeline.skip_tuning = true;
  if (o.risk) {
    if (*o.risk == "mean")
      cfg.pipeline.measure.kind = RiskMeasure::kExpectation;
    else if (*o.risk == "max")
      cfg.pipeline.measure.kind = RiskMeasure::kWorstCase;
    else
      throw CliError(kExitConfig, "--risk must be 'mean' or 'max'");
  }
  if (cfg.threads < 1) throw CliError(kExitConfig, "--parallel must be at least 1");
  return cfg;
}

std::string series_csv(const ExogenousSeries& series) {
  std::ostringstream out;
  write_series_csv(series, out);
  return out.str();
}

std::uint64_t stage_key(const RunConfig& cfg, const std::string& stage) {
  return hash_bytes(cfg.canonical() + "|" + stage);
}

std::vector<SizingParams> corner_samples(const Lattice& lattice) {
  std::vector<SizingParams> samples;
  const int b_hi = static_cast<int>(lattice.dims[0].count()) - 1;
  const int pv_hi = static_cast<int>(lattice.dims[1].count()) - 1;
  const std::vector<LatticePoint> corners = {
      {0, 0}, {0, pv_hi}, {b_hi, 0}, {b_hi, pv_hi}, {b_hi / 2, pv_hi / 2}};
  for (const auto& c : corners) {
    const auto p = sizing_from_lattice(lattice, c);
    bool duplicate = false;
    for (const auto& s : samples)
      duplicate = duplicate || (s.battery_units == p.battery_units && s.pv_units == p.pv_units);
    if (!duplicate) samples.push_back(p);
  }
  return samples;
}

// ---- subcommands ---------------------------------------------------------

int cmd_synth(const RunConfig& cfg) {
  Stage stage(cfg.out_dir, "synth", stage_key(cfg, "synth"));
  if (stage.up_to_date()) {
    std::cout << "synth: up-to-date\n";
    return kExitOk;
  }
  const auto emit = [&](const DataSource& source) {
    const auto series = realize(source, cfg.master_seed);
    stage.emit(source.name + ".csv", series_csv(series));
    std::cout << "synth: " << source.name << ".csv (" << series.size() << " samples)\n";
  };
  emit(cfg.training);
  for (const auto& s : cfg.scenarios) emit(s);
  for (const auto& s : cfg.heldout) emit(s);
  stage.finish();
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
  Stage stage(cfg.out_dir, "simulate", stage_key(cfg, "simulate"));
  if (stage.up_to_date()) {
    std::cout << "simulate: up-to-date\n";
    return kExitOk;
  }
  const auto series = realize(cfg.training, cfg.master_seed);
  const auto model = PlantModel::make(cfg.building, cfg.assets);
  auto pc = cfg.simulate.pc;
  pc.validate();
  const SystemState x0{cfg.empc.comfort_lo_c, 0.0};
  const auto result = closed_loop(x0, series, cfg.simulate.p, pc, model, cfg.empc,
                                  cfg.simulate.span_hours);
  const auto grid = resample(series, pc.T_d_min());
  std::ostringstream traj;
  write_closed_loop_csv(result, grid, traj);
  stage.emit("trajectory.csv", traj.str());
  stage.finish();
  std::cout << "simulate: total_cost=" << result.total_cost()
            << " comfort_violation=" << result.comfort_violation_max_c
            << " soc_violation=" << result.soc_violation_max_kwh
            << " recovery_solves=" << result.recovery_solves << "\n";
  return kExitOk;
}

int cmd_tune(const RunConfig& cfg) {
  Stage stage(cfg.out_dir, "tune", stage_key(cfg, "tune"));
  if (stage.up_to_date()) {
    std::cout << "tune: up-to-date\n";
    return kExitOk;
  }
  const auto series = realize(cfg.training, cfg.master_seed);
  const auto model = PlantModel::make(cfg.building, cfg.assets);
  const auto& pipe = cfg.pipeline;

  TuneSetup setup;
  setup.pc_ref = pipe.pc_ref;
  setup.pc_ref.validate();
  setup.sim_hours = pipe.tune_window_hours - setup.pc_ref.horizon_hours();
  setup.p_samples = corner_samples(pipe.sizing_lattice);
  for (const auto& p : setup.p_samples)
    setup.x0_sets.push_back({SystemState{cfg.empc.comfort_lo_c, 0.0},
                             SystemState{cfg.empc.comfort_hi_c, p.battery_kwh()}});
  setup.epsilon = pipe.tune_epsilon;
  setup.delta_T_min = pipe.delta_T_min;
  setup.T_d_floor_min = pipe.T_d_floor_min;
  setup.n_f_lo = pipe.n_f_lo;
  setup.n_f_hi = pipe.n_f_hi;
  setup.threads = cfg.threads;

  ExogenousSeries window = series;
  const auto need = static_cast<std::size_t>(pipe.tune_window_hours / series.resolution_hours());
  if (need > series.size())
    throw CliError(kExitConfig, "tune: training series shorter than the tuning window");
  window.samples.resize(need);

  const auto result = tune(window, setup, model, cfg.empc);
  std::ostringstream csv;
  write_tuning_csv(result, csv);
  stage.emit("tuning.csv", csv.str());
  stage.finish();
  std::cout << "tune: pc_star=" << result.pc_star.label()
            << (result.epsilon_satisfied ? "" : " (epsilon unsatisfied, least-gap fallback)")
            << "\n";
  return kExitOk;
}

int cmd_subsample(const RunConfig& cfg) {
  Stage stage(cfg.out_dir, "subsample", stage_key(cfg, "subsample"));
  if (stage.up_to_date()) {
    std::cout << "subsample: up-to-date\n";
    return kExitOk;
  }
  const auto series = realize(cfg.training, cfg.master_seed);
  const auto model = PlantModel::make(cfg.building, cfg.assets);
  const auto econ = EconomicsSpec::from_assets(cfg.assets);
  auto pc = cfg.pipeline.pc_fixed;
  pc.validate();
  const SystemState x_hat{cfg.empc.comfort_lo_c, 0.0};
  const auto pad = static_cast<std::size_t>(
      std::llround(pc.horizon_hours() / series.resolution_hours()));
  const auto windows = windows_from_series(series, cfg.pipeline.sub_sim_hours, pad,
                                           cfg.pipeline.sub_stride_hours, x_hat);
  std::vector<ImportancePoint> points(windows.size());
  parallel_for(windows.size(), cfg.threads, [&](std::size_t h) {
    points[h] = importance_solve(windows[h], h, pc, cfg.pipeline.sizing_lattice, model, cfg.empc,
                                 econ, cfg.pipeline.search_budget);
  });
  std::ostringstream csv;
  write_points_csv(points, full_cluster_model(points.size()), csv);
  stage.emit("points.csv", csv.str());
  stage.finish();
  std::cout << "subsample: " << points.size() << " importance points\n";
  return kExitOk;
}

int cmd_cluster(const RunConfig& cfg) {
  const fs::path points_path = fs::path(cfg.out_dir) / "points.csv";
  Stage stage(cfg.out_dir, "cluster", stage_key(cfg, "cluster"));
  stage.add_input("points.csv", hash_file(points_path));
  if (stage.up_to_date()) {
    std::cout << "cluster: up-to-date\n";
    return kExitOk;
  }
  std::ifstream in(points_path);
  const auto points = load_points_csv(in);
  const auto seed = derive_seed(cfg.master_seed, "cluster");
  ClusterModel model;
  if (cfg.pipeline.n_c_override) {
    model = cluster_fixed(points, *cfg.pipeline.n_c_override, seed, ClusterMetric::kEuclidean,
                          cfg.pipeline.scaling_enabled);
  } else {
    model = select_representatives(points, cfg.pipeline.k_max, cfg.pipeline.d_max, seed,
                                   ClusterMetric::kEuclidean, cfg.pipeline.scaling_enabled);
  }
  std::ostringstream csv;
  write_points_csv(points, model, csv);
  stage.emit("clusters.csv", csv.str());

  if (cfg.cluster_diagnostics && points.size() >= 3) {
    const auto coords = scale_points(points, cfg.pipeline.scaling_enabled).first;
    const std::size_t hi = std::min(cfg.pipeline.k_max, points.size());
    const std::vector<std::uint64_t> seeds{seed, derive_seed(seed, "b"), derive_seed(seed, "c")};
    const auto rows = cluster_diagnostics(coords, 2, hi, seeds);
    std::ostringstream diag;
    write_diagnostics_csv(rows, diag);
    stage.emit("diagnostics.csv", diag.str());
  }
  stage.finish();
  std::cout << "cluster: n_c=" << model.n_c << "\n";
  return kExitOk;
}

int cmd_codesign(const RunConfig& cfg) {
  Stage stage(cfg.out_dir, "codesign", stage_key(cfg, "codesign"));
  if (stage.up_to_date()) {
    std::cout << "codesign: up-to-date\n";
    return kExitOk;
  }
  const auto training = realize(cfg.training, cfg.master_seed);
  std::vector<ExogenousSeries> heldout;
  for (const auto& s : cfg.heldout) heldout.push_back(realize(s, cfg.master_seed));
  const auto model = PlantModel::make(cfg.building, cfg.assets);

  CodesignOutcome outcome;
  try {
    outcome = run_codesign(training, heldout, cfg.pipeline, model, cfg.empc);
  } catch (const CodesignStageError& e) {
    // Keep whatever the run produced before the failing stage.
    if (!e.partial.points.empty()) {
      std::ostringstream csv;
      write_points_csv(e.partial.points, e.partial.clusters, csv);
      write_text(fs::path(cfg.out_dir) / "points.partial.csv", csv.str());
    }
    if (e.partial.tune_initial) {
      std::ostringstream csv;
      write_tuning_csv(*e.partial.tune_initial, csv);
      write_text(fs::path(cfg.out_dir) / "tuning_initial.partial.csv", csv.str());
    }
    throw CliError(kExitCompute, e.what());
  }

  std::ostringstream points_csv;
  write_points_csv(outcome.points, outcome.clusters, points_csv);
  stage.emit("points.csv", points_csv.str());

  std::ostringstream report_csv;
  write_design_report_csv({{"decomposed", outcome.report}}, report_csv);
  stage.emit("report.csv", report_csv.str());

  if (outcome.tune_initial) {
    std::ostringstream csv;
    write_tuning_csv(*outcome.tune_initial, csv);
    stage.emit("tuning_initial.csv", csv.str());
  }
  if (outcome.tune_final) {
    std::ostringstream csv;
    write_tuning_csv(*outcome.tune_final, csv);
    stage.emit("tuning_final.csv", csv.str());
  }
  if (!outcome.validation.rows.empty()) {
    std::ostringstream csv;
    write_validation_csv(outcome.validation, csv);
    stage.emit("validation.csv", csv.str());
  }
  stage.finish();

  // Wall-clock timings live outside the manifest so repeated runs stay
  // byte-identical.
  std::ostringstream timings;
  timings << "stage,seconds\n";
  for (const auto& [name, seconds] : outcome.stage_seconds)
    timings << name << ',' << seconds << '\n';
  write_text(fs::path(cfg.out_dir) / "timings.csv", timings.str());

  std::cout << "codesign: p_star=" << outcome.p_star.label()
            << " pc_star=" << outcome.pc_star.label()
            << " estimated=" << outcome.report.estimated_cost
            << " effective=" << outcome.report.effective_cost << "\n";
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, const Overrides& o) {
  Stage stage(cfg.out_dir, "validate", stage_key(cfg, "validate"));
  if (cfg.heldout.empty()) throw CliError(kExitConfig, "validate: no held-out data configured");

  SizingParams p_star;
  if (o.p) {
    p_star = parse_p_flag(*o.p);
  } else {
    const fs::path report_path = fs::path(cfg.out_dir) / "report.csv";
    std::ifstream in(report_path);
    if (!in) throw CliError(kExitConfig, "validate: give --p or run codesign first");
    std::string header, row;
    std::getline(in, header);
    if (!std::getline(in, row)) throw CliError(kExitConfig, "validate: empty report.csv");
    double battery = 0.0, pv_m2 = 0.0;
    if (std::sscanf(row.c_str(), "%*[^,],%lf,%lf", &battery, &pv_m2) != 2)
      throw CliError(kExitConfig, "validate: cannot parse report.csv");
    p_star.battery_units = static_cast<int>(std::llround(battery / kBatteryUnitKwh));
    p_star.pv_units = static_cast<int>(std::llround(pv_m2 / kPvUnitM2));
    stage.add_input("report.csv", hash_file(report_path));
  }
  if (stage.up_to_date()) {
    std::cout << "validate: up-to-date\n";
    return kExitOk;
  }

  const auto model = PlantModel::make(cfg.building, cfg.assets);
  const auto econ = EconomicsSpec::from_assets(cfg.assets);
  auto pc = cfg.pipeline.pc_fixed;
  pc.validate();
  const SystemState x_hat{cfg.empc.comfort_lo_c, 0.0};
  std::vector<ScenarioWindow> windows;
  for (const auto& s : cfg.heldout)
    windows.push_back(window_from_heldout(realize(s, cfg.master_seed), pc, x_hat));
  SolveOptions so;
  so.search_budget = cfg.pipeline.search_budget;
  so.threads = cfg.threads;
  const auto report = validate(p_star, windows, pc, cfg.pipeline.validation_threshold,
                               cfg.pipeline.sizing_lattice, model, cfg.empc, econ, so);
  std::ostringstream csv;
  write_validation_csv(report, csv);
  stage.emit("validation.csv", csv.str());
  stage.finish();
  int flagged = 0;
  for (const auto& row : report.rows) flagged += row.augment ? 1 : 0;
  std::cout << "validate: " << report.rows.size() << " windows, " << flagged
            << " above threshold\n";
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  const fs::path report_path = fs::path(cfg.out_dir) / "report.csv";
  std::ifstream in(report_path);
  if (!in) throw CliError(kExitConfig, "report: no report.csv in " + cfg.out_dir);
  std::cout << in.rdbuf();
  const fs::path timings = fs::path(cfg.out_dir) / "timings.csv";
  if (fs::exists(timings)) {
    std::ifstream t(timings);
    std::cout << t.rdbuf();
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Robust building co-design: EMPC sizing and tuning pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Overrides o;
  app.add_option("--config", o.config_path, "Run-config JSON file");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Master seed override");
  std::string out_value;
  auto* out_opt = app.add_option("--out", out_value, "Output directory override");
  int parallel_value = 1;
  auto* parallel_opt = app.add_option("--parallel", parallel_value, "Worker threads");
  std::string p_value;
  auto* p_opt = app.add_option("--p", p_value, "Sizing 'battery_units,pv_units'");
  std::string pc_value;
  auto* pc_opt = app.add_option("--pc", pc_value, "Controller 'n_s,n_x,n_f'");
  int nc_value = 0;
  auto* nc_opt = app.add_option("--n-c", nc_value, "Cluster count override");
  double dmax_value = 0.0;
  auto* dmax_opt = app.add_option("--d-max", dmax_value, "Cluster distance threshold");
  bool skip_tuning = false;
  app.add_flag("--skip-tuning", skip_tuning, "Use the configured fixed controller");
  std::string risk_value;
  auto* risk_opt = app.add_option("--risk", risk_value, "Risk measure: mean|max");

  auto* synth = app.add_subcommand("synth", "Generate the configured synthetic datasets");
  auto* simulate = app.add_subcommand("simulate", "One closed-loop run, trajectory CSV");
  auto* tune_cmd = app.add_subcommand("tune", "MPC tuning over the controller lattice");
  auto* subsample = app.add_subcommand("subsample", "Importance-score every subsample");
  auto* cluster = app.add_subcommand("cluster", "Cluster importance points (needs points.csv)");
  auto* codesign_cmd = app.add_subcommand("codesign", "Full decomposed co-design pipeline");
  auto* validate_cmd = app.add_subcommand("validate", "Evaluate a design on held-out data");
  auto* report = app.add_subcommand("report", "Print the stored design report");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*seed_opt) o.seed = seed_value;
    if (*out_opt) o.out_dir = out_value;
    if (*parallel_opt) o.parallel = parallel_value;
    if (*p_opt) o.p = p_value;
    if (*pc_opt) o.pc = pc_value;
    if (*nc_opt) o.n_c = nc_value;
    if (*dmax_opt) o.d_max = dmax_value;
    o.skip_tuning = skip_tuning;
    if (*risk_opt) o.risk = risk_value;

    const auto cfg = resolve_config(o);
    if (synth->parsed()) return cmd_synth(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (tune_cmd->parsed()) return cmd_tune(cfg);
    if (subsample->parsed()) return cmd_subsample(cfg);
    if (cluster->parsed()) return cmd_cluster(cfg);
    if (codesign_cmd->parsed()) return cmd_codesign(cfg);
    if (validate_cmd->parsed()) return cmd_validate(cfg, o);
    if (report->parsed()) return cmd_report(cfg);
    return kExitConfig;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}

}  // namespace codesign::cli

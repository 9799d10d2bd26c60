#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "codesign/util.hpp"
#include "json.hpp"

namespace codesign::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
}

void expect_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) bad(path, "unknown key '" + key + "'");
  }
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) bad(path, "expected a boolean");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

void parse_triple(const json& j, ControllerParams& pc, const std::string& path) {
  if (!j.is_array() || j.size() != 3) bad(path, "expected [n_s, n_x, n_f]");
  pc.n_s = integer(j[0], path);
  pc.n_x = integer(j[1], path);
  pc.n_f = integer(j[2], path);
}

void parse_synth(const json& j, SynthConfig& cfg, const std::string& path) {
  expect_object(j, path);
  expect_keys(j,
              {"span_hours", "resolution_min", "origin", "temp_mean", "temp_annual_amp",
               "temp_diurnal_amp", "temp_noise", "irradiance_peak", "irradiance_seasonal_amp",
               "daylight_start", "daylight_end", "irradiance_noise", "price_mean", "price_spread",
               "price_block_min", "price_floor", "price_noise_weight", "carbon_mean",
               "carbon_amp", "season_phase_hours"},
              path);
  if (j.contains("span_hours")) cfg.span_hours = num(j["span_hours"], path + ".span_hours");
  if (j.contains("resolution_min"))
    cfg.resolution_min = num(j["resolution_min"], path + ".resolution_min");
  if (j.contains("origin")) cfg.origin = text(j["origin"], path + ".origin");
  if (j.contains("temp_mean")) cfg.temp_mean_c = num(j["temp_mean"], path + ".temp_mean");
  if (j.contains("temp_annual_amp"))
    cfg.temp_annual_amp_c = num(j["temp_annual_amp"], path + ".temp_annual_amp");
  if (j.contains("temp_diurnal_amp"))
    cfg.temp_diurnal_amp_c = num(j["temp_diurnal_amp"], path + ".temp_diurnal_amp");
  if (j.contains("temp_noise")) cfg.temp_noise_c = num(j["temp_noise"], path + ".temp_noise");
  if (j.contains("irradiance_peak"))
    cfg.irradiance_peak_w_m2 = num(j["irradiance_peak"], path + ".irradiance_peak");
  if (j.contains("irradiance_seasonal_amp"))
    cfg.irradiance_seasonal_amp = num(j["irradiance_seasonal_amp"], path);
  if (j.contains("daylight_start"))
    cfg.daylight_start_hour = num(j["daylight_start"], path + ".daylight_start");
  if (j.contains("daylight_end"))
    cfg.daylight_end_hour = num(j["daylight_end"], path + ".daylight_end");
  if (j.contains("irradiance_noise"))
    cfg.irradiance_noise = num(j["irradiance_noise"], path + ".irradiance_noise");
  if (j.contains("price_mean")) cfg.price_mean = num(j["price_mean"], path + ".price_mean");
  if (j.contains("price_spread"))
    cfg.price_spread = num(j["price_spread"], path + ".price_spread");
  if (j.contains("price_block_min"))
    cfg.price_block_min = num(j["price_block_min"], path + ".price_block_min");
  if (j.contains("price_floor")) cfg.price_floor = num(j["price_floor"], path + ".price_floor");
  if (j.contains("price_noise_weight"))
    cfg.price_noise_weight = num(j["price_noise_weight"], path + ".price_noise_weight");
  if (j.contains("carbon_mean")) cfg.carbon_mean = num(j["carbon_mean"], path + ".carbon_mean");
  if (j.contains("carbon_amp")) cfg.carbon_amp = num(j["carbon_amp"], path + ".carbon_amp");
  if (j.contains("season_phase_hours"))
    cfg.season_phase_hours = num(j["season_phase_hours"], path + ".season_phase_hours");
}

void parse_source(const json& j, DataSource& source, const std::string& path) {
  expect_object(j, path);
  expect_keys(j, {"kind", "path", "name", "resolution_min", "synth"}, path);
  if (j.contains("kind")) source.kind = text(j["kind"], path + ".kind");
  if (source.kind != "synth" && source.kind != "csv")
    bad(path + ".kind", "must be 'synth' or 'csv'");
  if (j.contains("name")) source.name = text(j["name"], path + ".name");
  if (source.kind == "csv") {
    if (!j.contains("path")) bad(path, "csv source requires 'path'");
    source.path = text(j["path"], path + ".path");
    if (j.contains("resolution_min"))
      source.synth.resolution_min = num(j["resolution_min"], path + ".resolution_min");
  }
  if (j.contains("synth")) parse_synth(j["synth"], source.synth, path + ".synth");
  source.synth.origin = source.name;
}

void parse_building(const json& j, BuildingParams& b, const std::string& path) {
  expect_object(j, path);
  expect_keys(j,
              {"u_value", "wall_area", "air_density", "volume", "air_heat_capacity",
               "air_changes", "thermal_mass", "floor_area", "hp_elec_max", "cp_elec_max",
               "hp_capacity"},
              path);
  if (j.contains("u_value")) b.u_value_w_m2k = num(j["u_value"], path);
  if (j.contains("wall_area")) b.wall_area_m2 = num(j["wall_area"], path);
  if (j.contains("air_density")) b.air_density_kg_m3 = num(j["air_density"], path);
  if (j.contains("volume")) b.volume_m3 = num(j["volume"], path);
  if (j.contains("air_heat_capacity")) b.air_heat_capacity_kj_kgk = num(j["air_heat_capacity"], path);
  if (j.contains("air_changes")) b.air_changes_per_h = num(j["air_changes"], path);
  if (j.contains("thermal_mass")) b.thermal_mass_kj_k = num(j["thermal_mass"], path);
  if (j.contains("floor_area")) b.floor_area_m2 = num(j["floor_area"], path);
  if (j.contains("hp_elec_max")) b.heat_pump_elec_max_kw = num(j["hp_elec_max"], path);
  if (j.contains("cp_elec_max")) b.cool_pump_elec_max_kw = num(j["cp_elec_max"], path);
  if (j.contains("hp_capacity")) b.heat_pump_capacity_kw = num(j["hp_capacity"], path);
}

void parse_assets(const json& j, AssetParams& a, const std::string& path) {
  expect_object(j, path);
  expect_keys(j,
              {"cop_slope", "cop_cool", "eta_charge", "eta_discharge", "discharge_hours",
               "buy_max", "sell_max", "soc_max", "theta1", "theta2", "theta3", "carbon_price",
               "battery_capex", "pv_capex", "battery_life", "pv_life", "interest"},
              path);
  if (j.contains("cop_slope")) a.cop_slope_per_c = num(j["cop_slope"], path);
  if (j.contains("cop_cool")) a.cop_cool = num(j["cop_cool"], path);
  if (j.contains("eta_charge")) a.eta_charge = num(j["eta_charge"], path);
  if (j.contains("eta_discharge")) a.eta_discharge = num(j["eta_discharge"], path);
  if (j.contains("discharge_hours")) a.discharge_hours = num(j["discharge_hours"], path);
  if (j.contains("buy_max")) a.buy_max_kw = num(j["buy_max"], path);
  if (j.contains("sell_max")) a.sell_max_kw = num(j["sell_max"], path);
  if (j.contains("soc_max")) a.soc_max_kwh = num(j["soc_max"], path);
  if (j.contains("theta1")) a.pv_theta1 = num(j["theta1"], path);
  if (j.contains("theta2")) a.pv_theta2_per_w_m2 = num(j["theta2"], path);
  if (j.contains("theta3")) a.pv_theta3_per_c = num(j["theta3"], path);
  if (j.contains("carbon_price")) a.carbon_price_per_kg = num(j["carbon_price"], path);
  if (j.contains("battery_capex")) a.battery_capex_per_kwh = num(j["battery_capex"], path);
  if (j.contains("pv_capex")) a.pv_capex_per_m2 = num(j["pv_capex"], path);
  if (j.contains("battery_life")) a.battery_life_years = num(j["battery_life"], path);
  if (j.contains("pv_life")) a.pv_life_years = num(j["pv_life"], path);
  if (j.contains("interest")) a.interest_rate = num(j["interest"], path);
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& context) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(context, std::string("JSON parse error: ") + e.what());
  }
  expect_object(root, context);
  expect_keys(root,
              {"data", "model", "empc", "controller", "sizing", "subsample", "cluster", "risk",
               "validation", "run", "simulate"},
              context);

  RunConfig cfg;
  cfg.training.name = "training";

  if (root.contains("data")) {
    const auto& data = root["data"];
    expect_object(data, "data");
    expect_keys(data, {"training", "scenarios", "heldout"}, "data");
    if (data.contains("training")) parse_source(data["training"], cfg.training, "data.training");
    if (data.contains("scenarios")) {
      if (!data["scenarios"].is_array()) bad("data.scenarios", "expected an array");
      std::size_t i = 0;
      for (const auto& item : data["scenarios"]) {
        DataSource source;
        source.name = "scenario-" + std::to_string(i);
        parse_source(item, source, "data.scenarios[" + std::to_string(i) + "]");
        cfg.scenarios.push_back(source);
        ++i;
      }
    }
    if (data.contains("heldout")) {
      if (!data["heldout"].is_array()) bad("data.heldout", "expected an array");
      std::size_t i = 0;
      for (const auto& item : data["heldout"]) {
        DataSource source;
        source.name = "heldout-" + std::to_string(i);
        parse_source(item, source, "data.heldout[" + std::to_string(i) + "]");
        cfg.heldout.push_back(source);
        ++i;
      }
    }
  }

  if (root.contains("model")) {
    const auto& model = root["model"];
    expect_object(model, "model");
    expect_keys(model, {"building", "assets"}, "model");
    if (model.contains("building")) parse_building(model["building"], cfg.building, "model.building");
    if (model.contains("assets")) parse_assets(model["assets"], cfg.assets, "model.assets");
  }

  if (root.contains("empc")) {
    const auto& empc = root["empc"];
    expect_object(empc, "empc");
    expect_keys(empc,
                {"comfort_lo", "comfort_hi", "soft_fallback", "slack_penalty",
                 "soc_terminal_floor"},
                "empc");
    if (empc.contains("comfort_lo")) cfg.empc.comfort_lo_c = num(empc["comfort_lo"], "empc");
    if (empc.contains("comfort_hi")) cfg.empc.comfort_hi_c = num(empc["comfort_hi"], "empc");
    if (empc.contains("soft_fallback"))
      cfg.empc.soft_comfort_fallback = boolean(empc["soft_fallback"], "empc");
    if (empc.contains("slack_penalty"))
      cfg.empc.slack_penalty_per_degch = num(empc["slack_penalty"], "empc");
    if (empc.contains("soc_terminal_floor") && !empc["soc_terminal_floor"].is_null())
      cfg.empc.soc_terminal_floor_kwh = num(empc["soc_terminal_floor"], "empc");
  }

  auto& pipe = cfg.pipeline;
  if (root.contains("controller")) {
    const auto& c = root["controller"];
    expect_object(c, "controller");
    expect_keys(c,
                {"delta_T_min", "T_d_floor_min", "n_f_lo", "n_f_hi", "epsilon",
                 "tune_window_hours", "skip_tuning", "pc_fixed", "pc_ref"},
                "controller");
    if (c.contains("delta_T_min")) pipe.delta_T_min = num(c["delta_T_min"], "controller");
    if (c.contains("T_d_floor_min")) pipe.T_d_floor_min = num(c["T_d_floor_min"], "controller");
    if (c.contains("n_f_lo")) pipe.n_f_lo = integer(c["n_f_lo"], "controller");
    if (c.contains("n_f_hi")) pipe.n_f_hi = integer(c["n_f_hi"], "controller");
    if (c.contains("epsilon")) pipe.tune_epsilon = num(c["epsilon"], "controller");
    if (c.contains("tune_window_hours"))
      pipe.tune_window_hours = num(c["tune_window_hours"], "controller");
    if (c.contains("skip_tuning")) pipe.skip_tuning = boolean(c["skip_tuning"], "controller");
    if (c.contains("pc_fixed")) parse_triple(c["pc_fixed"], pipe.pc_fixed, "controller.pc_fixed");
    if (c.contains("pc_ref")) parse_triple(c["pc_ref"], pipe.pc_ref, "controller.pc_ref");
  }
  pipe.pc_fixed.delta_T_min = pipe.delta_T_min;
  pipe.pc_fixed.T_d_floor_min = pipe.T_d_floor_min;
  pipe.pc_ref.delta_T_min = pipe.delta_T_min;
  pipe.pc_ref.T_d_floor_min = pipe.T_d_floor_min;

  if (root.contains("sizing")) {
    const auto& s = root["sizing"];
    expect_object(s, "sizing");
    expect_keys(s, {"battery_max_kwh", "battery_step_kwh", "pv_max_units", "pv_step_units",
                    "budget"},
                "sizing");
    double b_max = 60.0, b_step = 1.0;
    int pv_max = 53, pv_step = 1;
    if (s.contains("battery_max_kwh")) b_max = num(s["battery_max_kwh"], "sizing");
    if (s.contains("battery_step_kwh")) b_step = num(s["battery_step_kwh"], "sizing");
    if (s.contains("pv_max_units")) pv_max = integer(s["pv_max_units"], "sizing");
    if (s.contains("pv_step_units")) pv_step = integer(s["pv_step_units"], "sizing");
    pipe.sizing_lattice.dims.clear();
    pipe.sizing_lattice.dims.push_back({0.0, b_max, b_step});
    pipe.sizing_lattice.dims.push_back({0.0, pv_max * kPvUnitM2, pv_step * kPvUnitM2});
    if (s.contains("budget"))
      pipe.search_budget = static_cast<std::size_t>(integer(s["budget"], "sizing"));
  } else {
    pipe.sizing_lattice = PipelineConfig::default_sizing_lattice();
  }

  if (root.contains("subsample")) {
    const auto& s = root["subsample"];
    expect_object(s, "subsample");
    expect_keys(s, {"sim_hours", "stride_hours"}, "subsample");
    if (s.contains("sim_hours")) pipe.sub_sim_hours = num(s["sim_hours"], "subsample");
    if (s.contains("stride_hours")) pipe.sub_stride_hours = num(s["stride_hours"], "subsample");
  }

  if (root.contains("cluster")) {
    const auto& c = root["cluster"];
    expect_object(c, "cluster");
    expect_keys(c, {"k_max", "d_max", "n_c", "scaling", "diagnostics"}, "cluster");
    if (c.contains("k_max")) pipe.k_max = static_cast<std::size_t>(integer(c["k_max"], "cluster"));
    if (c.contains("d_max")) pipe.d_max = num(c["d_max"], "cluster");
    if (c.contains("n_c") && !c["n_c"].is_null())
      pipe.n_c_override = static_cast<std::size_t>(integer(c["n_c"], "cluster"));
    if (c.contains("scaling")) pipe.scaling_enabled = boolean(c["scaling"], "cluster");
    if (c.contains("diagnostics")) cfg.cluster_diagnostics = boolean(c["diagnostics"], "cluster");
  }

  if (root.contains("risk")) {
    const auto risk_name = text(root["risk"], "risk");
    if (risk_name == "mean")
      pipe.measure.kind = RiskMeasure::kExpectation;
    else if (risk_name == "max")
      pipe.measure.kind = RiskMeasure::kWorstCase;
    else
      bad("risk", "must be 'mean' or 'max'");
  }

  if (root.contains("validation")) {
    const auto& v = root["validation"];
    expect_object(v, "validation");
    expect_keys(v, {"threshold", "max_rounds"}, "validation");
    if (v.contains("threshold")) pipe.validation_threshold = num(v["threshold"], "validation");
    if (v.contains("max_rounds")) pipe.max_validation_rounds = integer(v["max_rounds"], "validation");
  }

  if (root.contains("run")) {
    const auto& r = root["run"];
    expect_object(r, "run");
    expect_keys(r, {"seed", "threads", "out_dir"}, "run");
    if (r.contains("seed")) cfg.master_seed = static_cast<std::uint64_t>(integer(r["seed"], "run"));
    if (r.contains("threads")) cfg.threads = integer(r["threads"], "run");
    if (r.contains("out_dir")) cfg.out_dir = text(r["out_dir"], "run");
  }

  if (root.contains("simulate")) {
    const auto& s = root["simulate"];
    expect_object(s, "simulate");
    expect_keys(s, {"span_hours", "p", "pc"}, "simulate");
    if (s.contains("span_hours")) cfg.simulate.span_hours = num(s["span_hours"], "simulate");
    if (s.contains("p")) {
      if (!s["p"].is_array() || s["p"].size() != 2) bad("simulate.p", "expected [battery, pv]");
      cfg.simulate.p.battery_units = integer(s["p"][0], "simulate.p");
      cfg.simulate.p.pv_units = integer(s["p"][1], "simulate.p");
    }
    if (s.contains("pc")) parse_triple(s["pc"], cfg.simulate.pc, "simulate.pc");
  }
  cfg.simulate.pc.delta_T_min = pipe.delta_T_min;
  cfg.simulate.pc.T_d_floor_min = pipe.T_d_floor_min;

  cfg.pipeline.threads = cfg.threads;
  cfg.pipeline.master_seed = cfg.master_seed;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

ExogenousSeries realize(const DataSource& source, std::uint64_t master_seed) {
  if (source.kind == "csv") return load_series(source.path, source.synth.resolution_min);
  return synthesize(source.synth, derive_seed(master_seed, "synth." + source.name));
}

namespace {

json synth_to_json(const SynthConfig& s) {
  json j;
  j["span_hours"] = s.span_hours;
  j["resolution_min"] = s.resolution_min;
  j["temp_mean"] = s.temp_mean_c;
  j["temp_annual_amp"] = s.temp_annual_amp_c;
  j["temp_diurnal_amp"] = s.temp_diurnal_amp_c;
  j["temp_noise"] = s.temp_noise_c;
  j["irradiance_peak"] = s.irradiance_peak_w_m2;
  j["irradiance_seasonal_amp"] = s.irradiance_seasonal_amp;
  j["daylight_start"] = s.daylight_start_hour;
  j["daylight_end"] = s.daylight_end_hour;
  j["irradiance_noise"] = s.irradiance_noise;
  j["price_mean"] = s.price_mean;
  j["price_spread"] = s.price_spread;
  j["price_block_min"] = s.price_block_min;
  j["price_floor"] = s.price_floor;
  j["price_noise_weight"] = s.price_noise_weight;
  j["carbon_mean"] = s.carbon_mean;
  j["carbon_amp"] = s.carbon_amp;
  j["season_phase_hours"] = s.season_phase_hours;
  return j;
}

json source_to_json(const DataSource& s) {
  json j;
  j["kind"] = s.kind;
  j["name"] = s.name;
  j["path"] = s.path;
  j["synth"] = synth_to_json(s.synth);
  return j;
}

}  // namespace

std::string RunConfig::canonical() const {
  json j;
  j["training"] = source_to_json(training);
  json arr = json::array();
  for (const auto& s : scenarios) arr.push_back(source_to_json(s));
  j["scenarios"] = arr;
  json held = json::array();
  for (const auto& s : heldout) held.push_back(source_to_json(s));
  j["heldout"] = held;

  j["building"] = {{"u_value", building.u_value_w_m2k},
                   {"wall_area", building.wall_area_m2},
                   {"air_density", building.air_density_kg_m3},
                   {"volume", building.volume_m3},
                   {"air_heat_capacity", building.air_heat_capacity_kj_kgk},
                   {"air_changes", building.air_changes_per_h},
                   {"thermal_mass", building.thermal_mass_kj_k},
                   {"floor_area", building.floor_area_m2},
                   {"hp_elec_max", building.heat_pump_elec_max_kw},
                   {"cp_elec_max", building.cool_pump_elec_max_kw},
                   {"hp_capacity", building.heat_pump_capacity_kw}};
  j["assets"] = {{"cop_slope", assets.cop_slope_per_c},
                 {"cop_cool", assets.cop_cool},
                 {"eta_charge", assets.eta_charge},
                 {"eta_discharge", assets.eta_discharge},
                 {"discharge_hours", assets.discharge_hours},
                 {"buy_max", assets.buy_max_kw},
                 {"sell_max", assets.sell_max_kw},
                 {"soc_max", assets.soc_max_kwh},
                 {"theta1", assets.pv_theta1},
                 {"theta2", assets.pv_theta2_per_w_m2},
                 {"theta3", assets.pv_theta3_per_c},
                 {"carbon_price", assets.carbon_price_per_kg},
                 {"battery_capex", assets.battery_capex_per_kwh},
                 {"pv_capex", assets.pv_capex_per_m2},
                 {"battery_life", assets.battery_life_years},
                 {"pv_life", assets.pv_life_years},
                 {"interest", assets.interest_rate}};
  j["empc"] = {{"comfort_lo", empc.comfort_lo_c},
               {"comfort_hi", empc.comfort_hi_c},
               {"soft_fallback", empc.soft_comfort_fallback},
               {"slack_penalty", empc.slack_penalty_per_degch},
               {"soc_terminal_floor",
                empc.soc_terminal_floor_kwh ? json(*empc.soc_terminal_floor_kwh) : json()}};
  j["controller"] = {{"delta_T_min", pipeline.delta_T_min},
                     {"T_d_floor_min", pipeline.T_d_floor_min},
                     {"n_f_lo", pipeline.n_f_lo},
                     {"n_f_hi", pipeline.n_f_hi},
                     {"epsilon", pipeline.tune_epsilon},
                     {"tune_window_hours", pipeline.tune_window_hours},
                     {"skip_tuning", pipeline.skip_tuning},
                     {"pc_fixed", {pipeline.pc_fixed.n_s, pipeline.pc_fixed.n_x, pipeline.pc_fixed.n_f}},
                     {"pc_ref", {pipeline.pc_ref.n_s, pipeline.pc_ref.n_x, pipeline.pc_ref.n_f}}};
  json dims = json::array();
  for (const auto& d : pipeline.sizing_lattice.dims)
    dims.push_back({{"lo", d.lo}, {"up", d.up}, {"step", d.step}});
  j["sizing"] = {{"lattice", dims}, {"budget", pipeline.search_budget}};
  j["subsample"] = {{"sim_hours", pipeline.sub_sim_hours},
                    {"stride_hours", pipeline.sub_stride_hours}};
  j["cluster"] = {{"k_max", pipeline.k_max},
                  {"d_max", pipeline.d_max},
                  {"n_c", pipeline.n_c_override ? json(*pipeline.n_c_override) : json()},
                  {"scaling", pipeline.scaling_enabled},
                  {"diagnostics", cluster_diagnostics}};
  j["risk"] = pipeline.measure.kind == RiskMeasure::kWorstCase ? "max" : "mean";
  j["validation"] = {{"threshold", pipeline.validation_threshold},
                     {"max_rounds", pipeline.max_validation_rounds}};
  j["seed"] = master_seed;
  j["simulate"] = {{"span_hours", simulate.span_hours},
                   {"p", {simulate.p.battery_units, simulate.p.pv_units}},
                   {"pc", {simulate.pc.n_s, simulate.pc.n_x, simulate.pc.n_f}}};
  return j.dump();
}

}  // namespace codesign::cli

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codesign/design.hpp"
#include "codesign/empc.hpp"
#include "codesign/timeseries.hpp"

namespace codesign::cli {

// One data source: either a CSV file or a synthetic generator block.
struct DataSource {
  std::string kind = "synth";  // "synth" | "csv"
  std::string path;            // csv only
  SynthConfig synth;
  std::string name = "series";
};

struct SimulateSpec {
  double span_hours = 24.0;
  SizingParams p{0, 0};
  ControllerParams pc;
};

// Parsed, schema-validated run configuration. Defaults reproduce the
// reference dwelling and asset tables.
struct RunConfig {
  DataSource training;
  std::vector<DataSource> scenarios;
  std::vector<DataSource> heldout;

  BuildingParams building;
  AssetParams assets;
  EmpcOptions empc;

  PipelineConfig pipeline;
  SimulateSpec simulate;
  bool cluster_diagnostics = false;

  std::string out_dir = "out";
  std::uint64_t master_seed = 0;
  int threads = 1;

  // Canonical serialisation used for content addressing: stable key order,
  // seed included, thread count excluded (it cannot change results).
  std::string canonical() const;
};

// Throws std::invalid_argument with a path-qualified message on schema
// violations (unknown keys, wrong types, bad values).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& context);

// Resolves a data source to a series (synthesising with a seed derived from
// the master seed and the source name).
ExogenousSeries realize(const DataSource& source, std::uint64_t master_seed);

}  // namespace codesign::cli

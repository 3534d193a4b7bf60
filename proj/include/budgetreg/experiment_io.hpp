#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "budgetreg/harness.hpp"

namespace budgetreg {

/// Parses a flat JSON experiment config. Unknown keys, wrong types and bad
/// values are collected and reported together in one std::invalid_argument.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);

/// Writes records.csv, curve_<algorithm>.csv and summary.json into dir.
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                              const std::filesystem::path& dir);

struct ModelRecord {
  Algorithm algorithm = Algorithm::aerr;
  Predictor predictor;
  std::uint64_t seed = 0;
  std::size_t attributes_observed = 0;
  double eta = 0.0;
};

nlohmann::json model_to_json(const ModelRecord& model);
ModelRecord model_from_json(const nlohmann::json& doc);

/// JSON text with a trailing newline.
std::string dump_json(const nlohmann::json& doc);

}  // namespace budgetreg

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavmec/trainer.hpp"

namespace uavmec {

/// A rejected configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::uint64_t episodes = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t eval_every = 0;  // 0: evaluate only after training
  int eval_episodes = 100;
  std::uint64_t checkpoint_every = 0;  // 0: checkpoint only after training
  std::string output_dir = "runs/default";
  int trace_episodes = 1;  // final-evaluation episodes dumped slot by slot
};

struct SweepConfig {
  std::string parameter;  // dotted path, e.g. "reward.omega"
  std::vector<nlohmann::json> values;
};

struct ExperimentConfig {
  TrainerConfig trainer;
  RunConfig run;
  std::optional<SweepConfig> sweep;
};

/// Parses and validates a config document. Missing keys take their defaults;
/// unknown keys, wrong types and invalid values raise ConfigError with the
/// offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config (every default spelled out). Parsing the result
/// gives back the same configuration.
nlohmann::json to_json(const ExperimentConfig& config);

/// The part of the resolved config a checkpoint must agree with: everything
/// except the run and sweep blocks.
nlohmann::json checkpoint_identity(const nlohmann::json& resolved);

/// Sets `path` (dotted keys) inside a config document, creating objects on
/// the way.
void set_dotted(nlohmann::json& doc, const std::string& path, const nlohmann::json& value);

/// 1-based line of the value at `pointer` in `text`, or 0 if absent.
int locate_line(const std::string& text, const nlohmann::json::json_pointer& pointer);

}  // namespace uavmec

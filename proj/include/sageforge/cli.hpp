#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sageforge/trainer.hpp"

namespace sageforge::cli {

// Parses the TOML subset used by config files: [table] headers, dotted keys,
// basic and literal strings, integers, floats, booleans, arrays of those and
// '#' comments. Throws ConfigError with a line number on anything else.
nlohmann::json parse_toml(std::string_view text);

// JSON when the path ends in .json, TOML otherwise.
nlohmann::json load_config_file(const std::string& path);

// Dataset and model paths of a training run.
struct TrainPaths {
  std::string corpus;     // Stage I source directory
  std::string pairs;      // Stage II pairs JSONL
  std::string tokenizer;  // tokenizer JSON
  std::string init;       // Stage II initial checkpoint
  Language language = Language::Python;
};

struct ResolvedTrainConfig {
  trainer::TrainConfig train;
  TrainPaths paths;

  nlohmann::ordered_json to_json() const;
};

// Flag overrides; unset fields fall through to the file, then to defaults.
struct TrainOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> batch_size;
  std::optional<double> base_lr;
  std::optional<std::string> corpus;
  std::optional<std::string> pairs;
  std::optional<std::string> tokenizer;
  std::optional<std::string> init;
  std::optional<std::string> out_dir;
};

// Merges defaults < file < flags. Recognized keys: top-level `seed`;
// [train] preset steps warmup_steps batch_size base_lr weight_decay clip_norm
// tau dropout checkpoint_every; [mask] scheme rate dobf_mix; [seq] max_len;
// [data] corpus pairs tokenizer init lang. Unknown keys and mistyped values
// throw ConfigError.
ResolvedTrainConfig resolve_train_config(trainer::Stage stage, const nlohmann::json& file,
                                         const TrainOverrides& flags);

// Runs the command line; returns the process exit code (0 ok, 1 usage or
// configuration error, 2 runtime error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sageforge::cli

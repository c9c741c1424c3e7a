#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hygiene/filter.hpp"
#include "hygiene/model.hpp"
#include "hygiene/synthgen.hpp"

namespace hygiene::cli {

/// Every knob the pipeline exposes. Resolution order: built-in defaults,
/// then the config file, then command-line flags.
struct PipelineConfig {
  std::string input = "hygiene_data";
  std::string out;  // empty until resolved per subcommand
  std::string labels;
  std::string values;
  std::string model_path;
  std::uint64_t seed = 0;
  std::size_t k = 5;
  double ratio = 0.8;
  BandSpec band = kDefaultBand;
  int filter_order = kDefaultFilterOrder;
  bool select_features = false;
  bool tune = true;
  std::size_t budget = 30;
  bool cv_all = false;
  std::size_t attempts = 10;
  std::string pair = "all";
  ModelSpec spec;
  GeneratorConfig synth;

  /// Throws InvalidConfig for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// (key, value) in a fixed order; values parse back through set().
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Flat `key = value` lines; blank lines and lines starting with '#' are
/// skipped. Throws ParseError naming the file and line.
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// "key = value" per line.
std::string config_text(const PipelineConfig& cfg, std::string_view prefix = "");

}  // namespace hygiene::cli

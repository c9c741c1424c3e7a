#include "config.hpp"

#include <fstream>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/text.hpp"

namespace hygiene::cli {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + std::string(value) + "' for " + std::string(key));
}

double real(std::string_view key, std::string_view value) {
  const auto v = text::parse_real(value);
  if (!v) bad_value(key, value);
  return *v;
}

long long integer(std::string_view key, std::string_view value, long long min) {
  const auto v = text::parse_int(value);
  if (!v || *v < min) bad_value(key, value);
  return *v;
}

std::size_t count(std::string_view key, std::string_view value, long long min = 0) {
  return static_cast<std::size_t>(integer(key, value, min));
}

bool boolean(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value);
}

std::string yes_no(bool b) { return b ? "true" : "false"; }
std::string num(double v) { return text::format_real(v); }

std::string list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void PipelineConfig::set(std::string_view key_in, std::string_view value_in) {
  const auto key = text::trim(key_in);
  const auto value = text::trim(value_in);
  if (key == "input") input = value;
  else if (key == "out") out = value;
  else if (key == "labels") labels = value;
  else if (key == "values") values = value;
  else if (key == "model_path") model_path = value;
  else if (key == "seed") {
    const auto v = text::parse_int(value);
    if (!v || *v < 0) bad_value(key, value);
    seed = static_cast<std::uint64_t>(*v);
  } else if (key == "k") k = count(key, value, 2);
  else if (key == "ratio") {
    ratio = real(key, value);
    if (!(ratio > 0.0 && ratio < 1.0)) bad_value(key, value);
  } else if (key == "band") {
    const auto parts = text::split(value, ',');
    if (parts.size() != 2) bad_value(key, value);
    band = {real(key, parts[0]), real(key, parts[1])};
    try {
      band.validate(kSampleRateHz);
    } catch (const Error&) {
      bad_value(key, value);
    }
  } else if (key == "filter_order") filter_order = static_cast<int>(integer(key, value, 1));
  else if (key == "select_features") select_features = boolean(key, value);
  else if (key == "tune") tune = boolean(key, value);
  else if (key == "budget") budget = count(key, value, 1);
  else if (key == "cv_all") cv_all = boolean(key, value);
  else if (key == "attempts") attempts = count(key, value, 1);
  else if (key == "pair") pair = value;
  else if (key == "model") {
    try {
      spec.family = family_from_tag(value);
    } catch (const Error&) {
      bad_value(key, value);
    }
  } else if (key == "svm.c") spec.svm.c = real(key, value);
  else if (key == "svm.gamma") spec.svm.gamma = real(key, value);
  else if (key == "svm.tolerance") spec.svm.tolerance = real(key, value);
  else if (key == "tree.max_depth") spec.tree.max_depth = count(key, value);
  else if (key == "tree.min_split") spec.tree.min_split = count(key, value, 2);
  else if (key == "forest.n_trees") spec.forest.n_trees = count(key, value, 1);
  else if (key == "forest.features_per_split") spec.forest.features_per_split = count(key, value);
  else if (key == "forest.bootstrap") spec.forest.bootstrap = boolean(key, value);
  else if (key == "gnb.var_smoothing") spec.gnb.var_smoothing = real(key, value);
  else if (key == "lr.l2") spec.logreg.l2 = real(key, value);
  else if (key == "lr.max_iter") spec.logreg.max_iter = count(key, value, 1);
  else if (key == "nn.hidden") {
    std::vector<std::size_t> widths;
    for (const auto part : text::split(value, ',')) widths.push_back(count(key, part, 1));
    if (widths.empty()) bad_value(key, value);
    spec.mlp.hidden = widths;
  } else if (key == "nn.learning_rate") spec.mlp.learning_rate = real(key, value);
  else if (key == "nn.batch_size") spec.mlp.batch_size = count(key, value, 1);
  else if (key == "nn.max_epochs") spec.mlp.max_epochs = count(key, value, 1);
  else if (key == "nn.min_delta") spec.mlp.min_delta = real(key, value);
  else if (key == "nn.patience") spec.mlp.patience = count(key, value, 1);
  else if (key == "synth.n_per_class") synth.n_per_class = count(key, value, 1);
  else if (key == "synth.separability") synth.separability = real(key, value);
  else if (key == "synth.intensity") synth.intensity = real(key, value);
  else if (key == "synth.noise_scale") synth.noise_scale = real(key, value);
  else if (key == "synth.intensity_spread") synth.intensity_spread = real(key, value);
  else throw Error(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const {
  return {
      {"input", input},
      {"out", out},
      {"labels", labels},
      {"values", values},
      {"model_path", model_path},
      {"seed", std::to_string(seed)},
      {"k", std::to_string(k)},
      {"ratio", num(ratio)},
      {"band", num(band.low_hz) + "," + num(band.high_hz)},
      {"filter_order", std::to_string(filter_order)},
      {"select_features", yes_no(select_features)},
      {"tune", yes_no(tune)},
      {"budget", std::to_string(budget)},
      {"cv_all", yes_no(cv_all)},
      {"attempts", std::to_string(attempts)},
      {"pair", pair},
      {"model", std::string(family_tag(spec.family))},
      {"svm.c", num(spec.svm.c)},
      {"svm.gamma", num(spec.svm.gamma)},
      {"svm.tolerance", num(spec.svm.tolerance)},
      {"tree.max_depth", std::to_string(spec.tree.max_depth)},
      {"tree.min_split", std::to_string(spec.tree.min_split)},
      {"forest.n_trees", std::to_string(spec.forest.n_trees)},
      {"forest.features_per_split", std::to_string(spec.forest.features_per_split)},
      {"forest.bootstrap", yes_no(spec.forest.bootstrap)},
      {"gnb.var_smoothing", num(spec.gnb.var_smoothing)},
      {"lr.l2", num(spec.logreg.l2)},
      {"lr.max_iter", std::to_string(spec.logreg.max_iter)},
      {"nn.hidden", list(spec.mlp.hidden)},
      {"nn.learning_rate", num(spec.mlp.learning_rate)},
      {"nn.batch_size", std::to_string(spec.mlp.batch_size)},
      {"nn.max_epochs", std::to_string(spec.mlp.max_epochs)},
      {"nn.min_delta", num(spec.mlp.min_delta)},
      {"nn.patience", std::to_string(spec.mlp.patience)},
      {"synth.n_per_class", std::to_string(synth.n_per_class)},
      {"synth.separability", num(synth.separability)},
      {"synth.intensity", num(synth.intensity)},
      {"synth.noise_scale", num(synth.noise_scale)},
      {"synth.intensity_spread", num(synth.intensity_spread)},
  };
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ErrorCode::FileMissing, path.string(), 0, "cannot open config file");
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(ErrorCode::InvalidConfig, path.string(), row, "expected key = value");
    }
    try {
      cfg.set(t.substr(0, eq), t.substr(eq + 1));
    } catch (const Error& e) {
      throw ParseError(ErrorCode::InvalidConfig, path.string(), row, e.detail());
    }
  }
}

std::string config_text(const PipelineConfig& cfg, std::string_view prefix) {
  std::string s;
  for (const auto& [key, value] : cfg.entries()) s += std::string(prefix) + key + " = " + value + "\n";
  return s;
}

}  // namespace hygiene::cli

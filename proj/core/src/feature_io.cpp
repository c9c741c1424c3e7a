#include <cmath>
#include <fstream>
#include <string>

#include "hygiene/error.hpp"
#include "hygiene/features.hpp"
#include "hygiene/text.hpp"

namespace hygiene {

namespace {

std::vector<std::pair<std::size_t, std::string>> read_rows(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw ParseError(ErrorCode::FileMissing, path.string(), 0, "no such file");
  std::ifstream in(path);
  if (!in) throw ParseError(ErrorCode::FileMissing, path.string(), 0, "cannot open for reading");
  std::vector<std::pair<std::size_t, std::string>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!text::trim(line).empty()) rows.emplace_back(row, line);
  }
  return rows;
}

}  // namespace

void write_feature_files(const FeatureMatrix& m, const std::filesystem::path& labels_path,
                         const std::filesystem::path& values_path) {
  m.validate();
  for (const auto& p : {labels_path, values_path}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream labels(labels_path, std::ios::binary | std::ios::trunc);
  std::ofstream values(values_path, std::ios::binary | std::ios::trunc);
  if (!labels || !values) {
    throw Error(ErrorCode::InvalidArgument, "cannot write " + labels_path.string() + " / " + values_path.string());
  }
  for (std::size_t r = 0; r < m.size(); ++r) {
    labels << class_code(m.labels[r]) << '\n';
    const auto& v = m.rows[r].values;
    for (std::size_t c = 0; c < kNumFeatures; ++c) values << (c ? "," : "") << text::format_real(v[c]);
    values << '\n';
  }
}

FeatureMatrix read_feature_files(const std::filesystem::path& labels_path,
                                 const std::filesystem::path& values_path) {
  const auto label_rows = read_rows(labels_path);
  const auto value_rows = read_rows(values_path);
  if (label_rows.size() != value_rows.size()) {
    throw ParseError(ErrorCode::LengthMismatch, labels_path.string() + " and " + values_path.string(), 0,
                     std::to_string(label_rows.size()) + " labels vs " + std::to_string(value_rows.size()) +
                         " value rows");
  }
  if (label_rows.empty()) throw ParseError(ErrorCode::EmptyData, labels_path.string(), 0, "no rows");

  FeatureMatrix m;
  for (const auto& [row, line] : label_rows) {
    const auto code = text::parse_int(line);
    if (!code || *code < 0 || *code >= static_cast<long long>(kNumClasses)) {
      throw ParseError(ErrorCode::MalformedRow, labels_path.string(), row, "label must be 0, 1 or 2");
    }
    m.labels.push_back(class_from_code(static_cast<int>(*code)));
  }
  for (const auto& [row, line] : value_rows) {
    const auto fields = text::split(line);
    if (fields.size() != kNumFeatures) {
      throw ParseError(ErrorCode::MalformedRow, values_path.string(), row,
                       "expected 10 values, found " + std::to_string(fields.size()));
    }
    FeatureVector f;
    for (std::size_t c = 0; c < kNumFeatures; ++c) {
      const auto v = text::parse_real(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(ErrorCode::MalformedRow, values_path.string(), row,
                         "column " + std::to_string(c + 1) + " is not a finite number");
      }
      f.values[c] = *v;
    }
    m.rows.push_back(f);
  }
  return m;
}

}  // namespace hygiene

#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace hygiene::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("hygiene_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

EventRecording random_recording(Rng& rng, std::size_t min_len, std::size_t max_len, const std::string& id) {
  const std::size_t n = min_len + static_cast<std::size_t>(rng.uniform_index(max_len - min_len + 1));
  const double offset = rng.uniform(-5.0, 5.0);
  const double scale = rng.log_uniform(0.1, 100.0);
  std::vector<double> samples(n);
  for (auto& s : samples) s = offset + scale * rng.normal();
  return EventRecording(id, std::move(samples));
}

Dataset gaussian_blobs(std::size_t n_per_class, std::size_t classes, std::size_t dims, double shift,
                       std::uint64_t seed) {
  Rng rng(seed);
  Dataset d{Matrix(0, dims), {}};
  std::vector<double> row(dims);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      for (auto& v : row) v = shift * static_cast<double>(c) + rng.normal();
      d.x.append_row(row);
      d.y.push_back(static_cast<int>(c));
    }
  }
  return d;
}

Dataset planted_triple(std::size_t n_per_class, std::array<int, 3> planted, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d{Matrix(0, 10), {}};
  std::size_t counts[2] = {0, 0};
  std::vector<double> row(10);
  while (counts[0] < n_per_class || counts[1] < n_per_class) {
    for (auto& v : row) v = rng.normal();
    double s = 0;
    for (const int f : planted) s += row[static_cast<std::size_t>(f - 1)];
    const int label = s > 0 ? 1 : 0;
    if (counts[label] == n_per_class) continue;
    counts[label]++;
    d.x.append_row(row);
    d.y.push_back(label);
  }
  return d;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_text(e.path());
  }
  return files;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hygiene::testing

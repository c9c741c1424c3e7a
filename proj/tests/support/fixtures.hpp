#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hygiene/matrix.hpp"
#include "hygiene/rng.hpp"
#include "hygiene/signal.hpp"

namespace hygiene::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

/// Gaussian samples with a random offset and scale; length in [min_len, max_len].
EventRecording random_recording(Rng& rng, std::size_t min_len, std::size_t max_len, const std::string& id = "rand");

struct Dataset {
  Matrix x;
  std::vector<int> y;
};

/// Gaussian blobs, one per class, `shift` apart along every axis.
Dataset gaussian_blobs(std::size_t n_per_class, std::size_t classes, std::size_t dims, double shift,
                       std::uint64_t seed);

/// Two classes of 10-column rows; only columns `planted` (1-based) carry the
/// class, through the sign of their sum. Other columns are pure noise.
Dataset planted_triple(std::size_t n_per_class, std::array<int, 3> planted, std::uint64_t seed);

/// Byte contents of every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const std::filesystem::path& dir);

std::string read_text(const std::filesystem::path& path);

}  // namespace hygiene::testing

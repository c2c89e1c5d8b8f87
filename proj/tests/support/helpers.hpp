#pragma once

#include <unistd.h>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/nnet.hpp"
#include "assemai/rng.hpp"

namespace testutil {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    assemai::Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(::getpid()));
    path_ = std::filesystem::temp_directory_path() / ("assemai-" + tag + "-" + std::to_string(rng.next() % 1000000007));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

 private:
  std::filesystem::path path_;
};

inline assemai::ImageRaster random_raster(assemai::Rng& rng, int w, int h, int c = 1) {
  std::vector<double> px(static_cast<std::size_t>(w) * h * c);
  for (double& v : px) v = rng.uniform();
  return assemai::ImageRaster(w, h, c, std::move(px));
}

inline assemai::Tensor random_tensor(assemai::Rng& rng, std::vector<int> shape, double lo = -1.0, double hi = 1.0) {
  assemai::Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

/// Model with every parameter (biases included) drawn uniformly, so no path is trivially zero.
inline assemai::Model random_model(assemai::Rng& rng, const assemai::ModelSpec& spec, double scale = 0.5) {
  assemai::Model m(spec);
  for (auto& p : m.params())
    for (double& v : p.data) v = rng.uniform(-scale, scale);
  return m;
}

}  // namespace testutil

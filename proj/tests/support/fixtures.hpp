#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "netbend/engine.hpp"

namespace fixtures {

std::filesystem::path path(const std::string& name);
std::string read_bytes(const std::filesystem::path& p);
void write_bytes(const std::filesystem::path& p, std::string_view bytes);

// Default toy generator with random_init(weights_seed).
netbend::ModelGraph toy_graph(std::uint64_t weights_seed = 1);
std::shared_ptr<const netbend::Engine> toy_engine(std::uint64_t weights_seed = 1);
std::vector<std::string> layer_ids(const netbend::ModelGraph& graph);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }

 private:
  std::filesystem::path dir_;
};

}  // namespace fixtures

#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "netbend/weights_io.hpp"

namespace fixtures {

namespace fs = std::filesystem;

fs::path path(const std::string& name) { return fs::path(NETBEND_FIXTURE_DIR) / name; }

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const fs::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

netbend::ModelGraph toy_graph(std::uint64_t weights_seed) {
  const netbend::GeneratorConfig config;
  return netbend::build_toy_generator(config, netbend::random_init(config, weights_seed));
}

std::shared_ptr<const netbend::Engine> toy_engine(std::uint64_t weights_seed) {
  return std::make_shared<const netbend::Engine>(toy_graph(weights_seed));
}

std::vector<std::string> layer_ids(const netbend::ModelGraph& graph) {
  std::vector<std::string> ids;
  for (const auto& layer : graph.layers()) ids.push_back(layer.id);
  return ids;
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 16; ++attempt) {
    fs::path candidate = fs::temp_directory_path() / ("netbend-test-" + std::to_string(rd()));
    if (fs::create_directory(candidate)) {
      dir_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temp directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(dir_, ec);
}

}  // namespace fixtures

#include "netbend/weights_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "netbend/rng.hpp"

namespace netbend {

static_assert(std::endian::native == std::endian::little, "NBW1 reader/writer assumes a little-endian host");

WeightTable random_init(const GeneratorConfig& config, std::uint64_t seed) {
  DeterministicRng rng(seed);
  WeightTable table;
  for (const auto& slot : weight_manifest(config)) {
    switch (slot.init) {
      case WeightInit::kZero:
        table.insert(slot.name, Tensor(slot.shape));
        break;
      case WeightInit::kUnitNormal:
        table.insert(slot.name, normal_vector(rng, shape_numel(slot.shape)).reshaped(slot.shape));
        break;
      case WeightInit::kHe: {
        const float stddev = static_cast<float>(std::sqrt(2.0 / static_cast<double>(slot.fan_in)));
        Tensor t = normal_vector(rng, shape_numel(slot.shape)).reshaped(slot.shape);
        for (float& v : t.data()) v *= stddev;
        table.insert(slot.name, std::move(t));
        break;
      }
    }
  }
  return table;
}

std::string_view errc_name(WeightsIoErrc code) noexcept {
  switch (code) {
    case WeightsIoErrc::kIo:
      return "io";
    case WeightsIoErrc::kBadMagic:
      return "bad_magic";
    case WeightsIoErrc::kBadVersion:
      return "bad_version";
    case WeightsIoErrc::kTruncated:
      return "truncated";
    case WeightsIoErrc::kDuplicateName:
      return "duplicate_name";
    case WeightsIoErrc::kBadShape:
      return "bad_shape";
    case WeightsIoErrc::kBadName:
      return "bad_name";
    case WeightsIoErrc::kTrailingData:
      return "trailing_data";
  }
  return "unknown";
}

WeightsIoError::WeightsIoError(WeightsIoErrc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

namespace {

constexpr char kMagic[4] = {'N', 'B', 'W', '1'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  bool get(T& value) {
    if (remaining() < sizeof(T)) return false;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return true;
  }

  bool get_bytes(void* dst, std::size_t n) {
    if (remaining() < n) return false;
    if (n) std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
    return true;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t nbw_size(const WeightTable& table) noexcept {
  std::size_t size = 12;
  for (const auto& [name, t] : table.entries()) size += 2 + name.size() + 1 + 4 * t.rank() + 4 * t.numel();
  return size;
}

std::vector<std::uint8_t> encode_nbw(const WeightTable& table) {
  std::vector<std::uint8_t> out;
  out.reserve(nbw_size(table));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kNbwVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.size()));
  for (const auto& [name, t] : table.entries()) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t.rank()));
    for (auto e : t.shape()) put<std::uint32_t>(out, static_cast<std::uint32_t>(e));
    const auto* p = reinterpret_cast<const std::uint8_t*>(t.data().data());
    out.insert(out.end(), p, p + t.numel() * sizeof(float));
  }
  return out;
}

WeightTable decode_nbw(const std::vector<std::uint8_t>& bytes, std::vector<std::string>* warnings) {
  Reader in(bytes);
  char magic[4];
  if (!in.get_bytes(magic, 4)) throw WeightsIoError(WeightsIoErrc::kTruncated, "file shorter than the header");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw WeightsIoError(WeightsIoErrc::kBadMagic, "expected magic NBW1, got '" + std::string(magic, 4) + "'");
  }
  std::uint32_t version = 0, count = 0;
  if (!in.get(version)) throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside the header");
  if (version != kNbwVersion) {
    throw WeightsIoError(WeightsIoErrc::kBadVersion, "unsupported NBW version " + std::to_string(version));
  }
  if (!in.get(count)) throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside the header");

  WeightTable table;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string where = "tensor #" + std::to_string(i);
    std::uint16_t name_len = 0;
    if (!in.get(name_len)) throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends before " + where);
    if (name_len == 0 || name_len > kMaxWeightNameBytes) {
      throw WeightsIoError(WeightsIoErrc::kBadName, where + " has name length " + std::to_string(name_len));
    }
    std::string name(name_len, '\0');
    if (!in.get_bytes(name.data(), name_len)) {
      throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside the name of " + where);
    }
    if (table.contains(name)) throw WeightsIoError(WeightsIoErrc::kDuplicateName, "duplicate tensor name '" + name + "'");

    std::uint8_t ndim = 0;
    if (!in.get(ndim)) throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside tensor '" + name + "'");
    if (ndim < 1 || ndim > 4) {
      throw WeightsIoError(WeightsIoErrc::kBadShape, "tensor '" + name + "' has rank " + std::to_string(ndim));
    }
    Shape shape(ndim);
    std::uint64_t numel = 1;
    for (auto& e : shape) {
      std::uint32_t dim = 0;
      if (!in.get(dim)) throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside tensor '" + name + "'");
      if (dim == 0) throw WeightsIoError(WeightsIoErrc::kBadShape, "tensor '" + name + "' has a zero extent");
      e = dim;
      numel *= dim;
      if (numel * sizeof(float) > in.remaining() + 4ull * ndim) {
        throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside tensor '" + name + "'");
      }
    }
    std::vector<float> data(static_cast<std::size_t>(numel));
    if (!in.get_bytes(data.data(), data.size() * sizeof(float))) {
      throw WeightsIoError(WeightsIoErrc::kTruncated, "file ends inside tensor '" + name + "'");
    }
    Tensor t(std::move(shape), std::move(data));
    if (warnings && !t.all_finite()) warnings->push_back("tensor '" + name + "' contains non-finite values");
    table.insert(std::move(name), std::move(t));
  }
  if (in.remaining() != 0) {
    throw WeightsIoError(WeightsIoErrc::kTrailingData, std::to_string(in.remaining()) + " bytes after the last tensor");
  }
  return table;
}

void save(const WeightTable& table, const std::filesystem::path& path) {
  const auto bytes = encode_nbw(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WeightsIoError(WeightsIoErrc::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WeightsIoError(WeightsIoErrc::kIo, "write failed for " + path.string());
}

WeightTable load(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsIoError(WeightsIoErrc::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw WeightsIoError(WeightsIoErrc::kIo, "read failed for " + path.string());
  return decode_nbw(bytes, warnings);
}

}  // namespace netbend

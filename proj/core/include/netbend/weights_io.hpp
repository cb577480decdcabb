#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "netbend/model.hpp"
#include "netbend/weight_table.hpp"

namespace netbend {

/// He-normal weights (std = sqrt(2 / fan_in)), zero biases and a unit-normal
/// constant input, drawn from one splitmix64 stream in manifest order.
WeightTable random_init(const GeneratorConfig& config, std::uint64_t seed);

// NBW1 weight file, little-endian throughout:
//
//   "NBW1" | u32 version = 1 | u32 tensor_count
//   per tensor: u16 name_len | name bytes | u8 ndim | u32 dims[ndim] | f32 data[numel]

inline constexpr std::uint32_t kNbwVersion = 1;

enum class WeightsIoErrc {
  kIo,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kDuplicateName,
  kBadShape,
  kBadName,
  kTrailingData,
};

std::string_view errc_name(WeightsIoErrc code) noexcept;

class WeightsIoError : public std::runtime_error {
 public:
  WeightsIoError(WeightsIoErrc code, const std::string& message);
  WeightsIoErrc code() const noexcept { return code_; }

 private:
  WeightsIoErrc code_;
};

std::vector<std::uint8_t> encode_nbw(const WeightTable& table);
/// `warnings` receives one line per tensor holding non-finite values.
WeightTable decode_nbw(const std::vector<std::uint8_t>& bytes, std::vector<std::string>* warnings = nullptr);

/// Expected encoded size: 12 + sum(2 + name_len + 1 + 4 ndim + 4 numel).
std::size_t nbw_size(const WeightTable& table) noexcept;

void save(const WeightTable& table, const std::filesystem::path& path);
WeightTable load(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

}  // namespace netbend

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netbend/tensor.hpp"

namespace netbend {

inline constexpr std::size_t kMaxWeightNameBytes = 255;

/// Named tensors in insertion order. Names are unique, non-empty and at most
/// 255 bytes.
class WeightTable {
 public:
  using Entry = std::pair<std::string, Tensor>;

  /// Throws std::invalid_argument on an empty, oversized or duplicate name.
  void insert(std::string name, Tensor tensor);

  const Tensor* find(std::string_view name) const noexcept;
  /// Throws std::out_of_range when absent.
  const Tensor& at(std::string_view name) const;
  bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Same names in the same order with bit-identical tensors.
  bool bit_equal(const WeightTable& other) const noexcept;

 private:
  std::vector<Entry> entries_;
};

}  // namespace netbend

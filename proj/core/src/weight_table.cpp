#include "netbend/weight_table.hpp"

#include <stdexcept>

namespace netbend {

void WeightTable::insert(std::string name, Tensor tensor) {
  if (name.empty()) throw std::invalid_argument("weight name must not be empty");
  if (name.size() > kMaxWeightNameBytes) throw std::invalid_argument("weight name longer than 255 bytes: " + name);
  if (contains(name)) throw std::invalid_argument("duplicate weight name: " + name);
  entries_.emplace_back(std::move(name), std::move(tensor));
}

const Tensor* WeightTable::find(std::string_view name) const noexcept {
  for (const auto& [n, t] : entries_) {
    if (n == name) return &t;
  }
  return nullptr;
}

const Tensor& WeightTable::at(std::string_view name) const {
  const Tensor* t = find(name);
  if (!t) throw std::out_of_range("no weight named " + std::string(name));
  return *t;
}

bool WeightTable::bit_equal(const WeightTable& other) const noexcept {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first) return false;
    if (!entries_[i].second.bit_equal(other.entries_[i].second)) return false;
  }
  return true;
}

}  // namespace netbend

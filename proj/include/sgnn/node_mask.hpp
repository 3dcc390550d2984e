#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgnn {

// Boolean indicator over nodes with a cached count of set entries.
class NodeMask {
 public:
  NodeMask() = default;
  explicit NodeMask(std::size_t n, bool value = false)
      : bits_(n, value ? 1 : 0), count_(value ? n : 0) {}

  static NodeMask from_indices(std::size_t n, std::span<const std::uint32_t> nodes);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t count() const noexcept { return count_; }
  bool none() const noexcept { return count_ == 0; }
  bool all() const noexcept { return count_ == bits_.size(); }
  double fraction() const noexcept {
    return bits_.empty() ? 0.0 : static_cast<double>(count_) / static_cast<double>(bits_.size());
  }

  bool operator[](std::size_t v) const noexcept { return bits_[v] != 0; }
  void set(std::size_t v, bool on);

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::vector<std::uint32_t> indices() const;

  bool is_subset_of(const NodeMask& other) const;
  NodeMask operator&(const NodeMask& other) const;
  NodeMask operator|(const NodeMask& other) const;

  friend bool operator==(const NodeMask&, const NodeMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

}  // namespace sgnn

#include "sgnn/node_mask.hpp"

#include "sgnn/errors.hpp"

namespace sgnn {

NodeMask NodeMask::from_indices(std::size_t n, std::span<const std::uint32_t> nodes) {
  NodeMask mask(n);
  for (auto v : nodes) {
    if (v >= n) throw ShapeError("NodeMask: index " + std::to_string(v) + " out of range");
    mask.set(v, true);
  }
  return mask;
}

void NodeMask::set(std::size_t v, bool on) {
  const std::uint8_t bit = on ? 1 : 0;
  if (bits_[v] == bit) return;
  bits_[v] = bit;
  if (on) {
    ++count_;
  } else {
    --count_;
  }
}

std::vector<std::uint32_t> NodeMask::indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(count_);
  for (std::size_t v = 0; v < bits_.size(); ++v)
    if (bits_[v]) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

bool NodeMask::is_subset_of(const NodeMask& other) const {
  if (other.size() != size()) throw ShapeError("NodeMask: size mismatch");
  for (std::size_t v = 0; v < bits_.size(); ++v)
    if (bits_[v] && !other.bits_[v]) return false;
  return true;
}

NodeMask NodeMask::operator&(const NodeMask& other) const {
  if (other.size() != size()) throw ShapeError("NodeMask: size mismatch");
  NodeMask out(size());
  for (std::size_t v = 0; v < bits_.size(); ++v) out.set(v, bits_[v] && other.bits_[v]);
  return out;
}

NodeMask NodeMask::operator|(const NodeMask& other) const {
  if (other.size() != size()) throw ShapeError("NodeMask: size mismatch");
  NodeMask out(size());
  for (std::size_t v = 0; v < bits_.size(); ++v) out.set(v, bits_[v] || other.bits_[v]);
  return out;
}

}  // namespace sgnn

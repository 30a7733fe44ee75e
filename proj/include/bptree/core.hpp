#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace bptree {

// Split factor of the tree. Node arrays have capacity 2k; a non-root inner
// node carries between k and 2k separators. k = 0 is rejected because the
// bounds on the root would be contradictory.
class order {
 public:
  explicit order(std::uint32_t k) : k_(k) {
    if (k == 0) throw std::invalid_argument("order: split factor k must be >= 1");
  }

  std::uint32_t k() const { return k_; }
  std::uint32_t capacity() const { return 2 * k_; }

  friend bool operator==(order, order) = default;

 private:
  std::uint32_t k_;
};

enum class search_strategy { linear, binary };

inline const char* to_string(search_strategy s) {
  return s == search_strategy::linear ? "linear" : "binary";
}

inline std::optional<search_strategy> strategy_from_name(std::string_view name) {
  if (name == "linear") return search_strategy::linear;
  if (name == "binary") return search_strategy::binary;
  return std::nullopt;
}

// Opaque index into a node_store. The nil handle is the end-of-chain marker
// standing in for an absent link.
struct node_handle {
  static constexpr std::uint32_t nil_index = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t index = nil_index;

  static constexpr node_handle nil() { return node_handle{}; }
  bool is_nil() const { return index == nil_index; }

  friend bool operator==(node_handle, node_handle) = default;
};

struct dangling_handle : std::runtime_error {
  explicit dangling_handle(std::uint32_t index)
      : std::runtime_error("dangling node handle: " + std::to_string(index)) {}
};

struct cyclic_structure : std::runtime_error {
  explicit cyclic_structure(std::uint32_t index)
      : std::runtime_error("handle repeats on descent path: " + std::to_string(index)) {}
};

struct capacity_exceeded : std::runtime_error {
  explicit capacity_exceeded(std::size_t fill, std::size_t capacity)
      : std::runtime_error("node fill " + std::to_string(fill) + " exceeds capacity " +
                           std::to_string(capacity)) {}
};

}  // namespace bptree

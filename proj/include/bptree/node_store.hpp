#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/partial_array.hpp"

namespace bptree {

template <typename V>
struct inner_entry {
  node_handle child;  // subtree left of the separator
  V sep;

  friend bool operator==(const inner_entry&, const inner_entry&) = default;
};

template <typename V>
struct leaf_node {
  partial_array<V> values;
  node_handle next = node_handle::nil();  // nil marks the end of the chain

  explicit leaf_node(std::uint32_t capacity) : values(capacity) {}
};

template <typename V>
struct inner_node {
  partial_array<inner_entry<V>> entries;
  node_handle last = node_handle::nil();

  explicit inner_node(std::uint32_t capacity) : entries(capacity) {}
};

// Arena of tree nodes addressed by opaque handles. Slots of released nodes go
// to a free list and are recycled last-in first-out; a handle held by a live
// tree resolves to exactly one node.
template <typename V>
class node_store {
 public:
  using node = std::variant<leaf_node<V>, inner_node<V>>;

  node_handle alloc(node n) {
    if (!free_.empty()) {
      node_handle h = free_.back();
      free_.pop_back();
      slots_[h.index] = std::move(n);
      ++live_;
      return h;
    }
    node_handle h{static_cast<std::uint32_t>(slots_.size())};
    slots_.push_back(std::move(n));
    ++live_;
    return h;
  }

  void release(node_handle h) {
    assert(is_live(h));
    slots_[h.index].reset();
    free_.push_back(h);
    --live_;
  }

  node& get(node_handle h) {
    if (h.is_nil() || h.index >= slots_.size() || !slots_[h.index]) throw dangling_handle(h.index);
    return *slots_[h.index];
  }

  const node& get(node_handle h) const {
    if (h.is_nil() || h.index >= slots_.size() || !slots_[h.index]) throw dangling_handle(h.index);
    return *slots_[h.index];
  }

  leaf_node<V>& leaf(node_handle h) { return std::get<leaf_node<V>>(get(h)); }
  const leaf_node<V>& leaf(node_handle h) const { return std::get<leaf_node<V>>(get(h)); }
  inner_node<V>& inner(node_handle h) { return std::get<inner_node<V>>(get(h)); }
  const inner_node<V>& inner(node_handle h) const { return std::get<inner_node<V>>(get(h)); }

  bool is_live(node_handle h) const {
    return !h.is_nil() && h.index < slots_.size() && slots_[h.index].has_value();
  }

  bool is_leaf(node_handle h) const { return std::holds_alternative<leaf_node<V>>(get(h)); }

  std::size_t slot_count() const { return slots_.size(); }
  std::size_t live_count() const { return live_; }

  // Places a node at an explicit handle; used when reconstructing a store
  // from a dump. The slot must not already be live.
  void put_at(node_handle h, node n) {
    assert(!h.is_nil());
    if (h.index >= slots_.size()) slots_.resize(h.index + 1);
    assert(!slots_[h.index].has_value());
    slots_[h.index] = std::move(n);
    ++live_;
  }

 private:
  std::vector<std::optional<node>> slots_;
  std::vector<node_handle> free_;
  std::size_t live_ = 0;
};

}  // namespace bptree

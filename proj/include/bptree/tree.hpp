#pragma once

#include <cassert>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/navigation.hpp"
#include "bptree/node_store.hpp"

namespace bptree {

template <std::totally_ordered V>
class bplus_tree;

// Iterator over the linked leaf chain. init positions it at a leaf handle,
// has_next tests for the end marker, next yields the current leaf's value
// array together with its forwarding handle.
template <std::totally_ordered V>
class leaf_chain_iterator {
 public:
  leaf_chain_iterator(const bplus_tree<V>* tree, node_handle start);

  bool has_next() const { return !current_.is_nil(); }

  std::pair<std::span<const V>, node_handle> next();

  std::span<const V> next_view() { return next().first; }

  node_handle current() const { return current_; }

 private:
  void check_epoch() const;

  const bplus_tree<V>* tree_;
  node_handle current_;
  std::uint64_t epoch_;
};

// Composes an outer iterator yielding value-array views with iteration inside
// each view, producing one flat element stream.
template <typename Outer, typename V>
class flatten_iterator {
 public:
  explicit flatten_iterator(Outer outer) : outer_(std::move(outer)) {}

  // starts mid-view; used by lower-bounded range cursors
  flatten_iterator(Outer outer, std::span<const V> view, std::size_t pos)
      : outer_(std::move(outer)), view_(view), pos_(pos) {}

  bool has_next() {
    while (pos_ >= view_.size() && outer_.has_next()) {
      view_ = outer_.next_view();
      pos_ = 0;
    }
    return pos_ < view_.size();
  }

  const V& next() {
    const bool more = has_next();
    assert(more && "flatten_iterator: next past the end");
    (void)more;
    return view_[pos_++];
  }

  std::vector<V> drain() {
    std::vector<V> out;
    while (has_next()) out.push_back(next());
    return out;
  }

 private:
  Outer outer_;
  std::span<const V> view_{};
  std::size_t pos_ = 0;
};

template <std::totally_ordered V>
using leaves_cursor = flatten_iterator<leaf_chain_iterator<V>, V>;

// Imperative B+-tree over a node arena: partially filled arrays inside the
// nodes, a singly linked chain across the leaves, and pluggable intra-node
// search. Mutations require exclusive access; any number of readers and
// cursors may run between mutations (a live cursor must not overlap a
// mutation — enforced only when BPT_DEBUG_EPOCHS=1 is set).
template <std::totally_ordered V>
class bplus_tree {
 public:
  using node = typename node_store<V>::node;

  explicit bplus_tree(order k, search_strategy strategy = search_strategy::binary)
      : k_(k), strategy_(strategy) {
    root_ = first_ = store_.alloc(node(leaf_node<V>(k.capacity())));
  }

  // Wraps an externally built store (dump loader, materialization).
  static bplus_tree adopt(order k, node_store<V> store, node_handle root, node_handle first,
                          search_strategy strategy) {
    bplus_tree t(k, strategy);
    t.store_ = std::move(store);
    t.root_ = root;
    t.first_ = first;
    return t;
  }

  order k() const { return k_; }
  std::uint32_t capacity() const { return k_.capacity(); }
  search_strategy strategy() const { return strategy_; }
  node_handle root() const { return root_; }
  node_handle first() const { return first_; }
  const node_store<V>& store() const { return store_; }
  node_store<V>& store() { return store_; }

  std::uint64_t comparisons() const { return cmp_count_; }
  void reset_comparisons() { cmp_count_ = 0; }
  std::uint64_t epoch() const { return epoch_; }

  // Cursor-vs-mutation contract checking, opt-in via BPT_DEBUG_EPOCHS=1.
  // Exposed as a mutable flag so tests can flip it without the environment.
  static bool& debug_epochs_flag() {
    static bool enabled = [] {
      const char* v = std::getenv("BPT_DEBUG_EPOCHS");
      return v && v[0] == '1';
    }();
    return enabled;
  }

  static bool debug_epochs() { return debug_epochs_flag(); }

  // --- point query ----------------------------------------------------------

  bool contains(const V& x) const {
    node_handle h = root_;
    for (;;) {
      const node& n = store_.get(h);
      if (const auto* lf = std::get_if<leaf_node<V>>(&n)) {
        return nav::isin_list<V>(strategy_, x, lf->values.view(), less());
      }
      const auto& in = std::get<inner_node<V>>(n);
      h = child_for(in, x);
    }
  }

  // --- mutation ---------------------------------------------------------------

  void insert(const V& x) {
    ++epoch_;
    auto up = insert_rec(root_, x);
    if (!up) return;
    inner_node<V> nr(capacity());
    nr.entries.push_back({root_, up->sep});
    nr.last = up->right;
    root_ = store_.alloc(node(std::move(nr)));
  }

  void erase(const V& x) {
    ++epoch_;
    erase_rec(root_, x);
    auto* in = std::get_if<inner_node<V>>(&store_.get(root_));
    if (in && in->entries.fill() == 0) {
      const node_handle old = root_;
      root_ = in->last;
      store_.release(old);
    }
  }

  // --- leaf access and iteration ----------------------------------------------

  // Leftmost leaf by descending first-child links.
  node_handle first_leaf() const {
    node_handle h = root_;
    while (!store_.is_leaf(h)) {
      const auto& in = store_.inner(h);
      h = in.entries.fill() > 0 ? in.entries[0].child : in.last;
    }
    return h;
  }

  leaf_chain_iterator<V> leaf_iter() const { return {this, first_}; }

  leaves_cursor<V> values_iter() const { return leaves_cursor<V>(leaf_iter()); }

  // Handle of the leaf where x would reside; the chain from it holds exactly
  // the leaf-node suffix covering all values >= x.
  node_handle leaf_nodes_lrange(const V& x) const {
    node_handle h = root_;
    while (!store_.is_leaf(h)) h = child_for(store_.inner(h), x);
    return h;
  }

  // Cursor over all values >= x, positioned inside the located leaf.
  leaves_cursor<V> lrange(const V& x) const {
    const node_handle h = leaf_nodes_lrange(x);
    const auto& lf = store_.leaf(h);
    const std::size_t pos = nav::split_index<V>(strategy_, lf.values.view(), x, less());
    return leaves_cursor<V>(leaf_chain_iterator<V>(this, lf.next), lf.values.view(), pos);
  }

 private:
  nav::counting_less<V> less() const { return {&cmp_count_}; }

  node_handle child_for(const inner_node<V>& in, const V& x) const {
    const std::size_t n = in.entries.fill();
    const std::size_t i = nav::descend_index(
        strategy_, n, [&](std::size_t j) -> const V& { return in.entries[j].sep; }, x, less());
    return i < n ? in.entries[i].child : in.last;
  }

  std::size_t fill_of(node_handle h) const {
    const node& n = store_.get(h);
    if (const auto* lf = std::get_if<leaf_node<V>>(&n)) return lf->values.fill();
    return std::get<inner_node<V>>(n).entries.fill();
  }

  node_handle child_at(const inner_node<V>& in, std::size_t i) const {
    return i < in.entries.fill() ? in.entries[i].child : in.last;
  }

  struct split_up {
    node_handle right;
    V sep;
  };

  // Inserts x below h. A returned split_up means h overflowed and was split
  // in place: h keeps the left half, `right` is freshly allocated, `sep`
  // bounds them. References into the store are refetched after every alloc.
  std::optional<split_up> insert_rec(node_handle h, const V& x) {
    if (auto* lf = std::get_if<leaf_node<V>>(&store_.get(h))) {
      if (nav::isin_list<V>(strategy_, x, lf->values.view(), less())) return std::nullopt;
      const std::size_t i = nav::split_index<V>(strategy_, lf->values.view(), x, less());
      if (!lf->values.full()) {
        lf->values.insert_at(i, x);
        return std::nullopt;
      }
      // 2k+1 values live briefly in scratch; k stay left, k+1 move right, and
      // the separator is the right leaf's first value, copied.
      std::vector<V> scratch(lf->values.view().begin(), lf->values.view().end());
      scratch.insert(scratch.begin() + static_cast<std::ptrdiff_t>(i), x);
      leaf_node<V> right(capacity());
      right.values.assign(std::span<const V>(scratch).subspan(k_.k()));
      right.next = lf->next;
      V sep = scratch[k_.k()];
      const node_handle rh = store_.alloc(node(std::move(right)));
      auto& left = store_.leaf(h);
      left.values.assign(std::span<const V>(scratch).first(k_.k()));
      left.next = rh;
      return split_up{rh, std::move(sep)};
    }

    auto& in = store_.inner(h);
    const std::size_t n = in.entries.fill();
    const std::size_t i = nav::descend_index(
        strategy_, n, [&](std::size_t j) -> const V& { return in.entries[j].sep; }, x, less());
    const node_handle child = child_at(in, i);
    auto up = insert_rec(child, x);
    if (!up) return std::nullopt;

    auto& in2 = store_.inner(h);
    std::vector<inner_entry<V>> scratch(in2.entries.view().begin(), in2.entries.view().end());
    node_handle last = in2.last;
    if (i < scratch.size()) {
      const V old_sep = scratch[i].sep;
      scratch[i] = {child, up->sep};
      scratch.insert(scratch.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                     inner_entry<V>{up->right, old_sep});
    } else {
      scratch.push_back({child, up->sep});
      last = up->right;
    }
    if (scratch.size() <= capacity()) {
      in2.entries.assign(scratch);
      in2.last = last;
      return std::nullopt;
    }

    // 2k+1 pairs: median separator moves up, k pairs stay either side.
    const V up_sep = scratch[k_.k()].sep;
    const node_handle left_last = scratch[k_.k()].child;
    inner_node<V> right(capacity());
    right.entries.assign(std::span<const inner_entry<V>>(scratch).subspan(k_.k() + 1));
    right.last = last;
    const node_handle rh = store_.alloc(node(std::move(right)));
    auto& left = store_.inner(h);
    left.entries.assign(std::span<const inner_entry<V>>(scratch).first(k_.k()));
    left.last = left_last;
    return split_up{rh, up_sep};
  }

  void erase_rec(node_handle h, const V& x) {
    if (auto* lf = std::get_if<leaf_node<V>>(&store_.get(h))) {
      const std::size_t i = nav::split_index<V>(strategy_, lf->values.view(), x, less());
      if (i < lf->values.fill() && lf->values[i] == x) lf->values.erase_at(i);
      return;
    }
    auto& in = store_.inner(h);
    const std::size_t n = in.entries.fill();
    const std::size_t i = nav::descend_index(
        strategy_, n, [&](std::size_t j) -> const V& { return in.entries[j].sep; }, x, less());
    const node_handle child = child_at(in, i);
    erase_rec(child, x);
    if (fill_of(child) < k_.k()) rebalance_child(h, i);
  }

  // Repairs the underfull child at position i of parent h: borrow from the
  // right sibling, else the left, else merge with the right (or the left when
  // the child is rightmost). Merges keep the left node and release the right,
  // so the head of the leaf chain is never freed.
  void rebalance_child(node_handle h, std::size_t i) {
    auto& p = store_.inner(h);
    const std::size_t n = p.entries.fill();
    const bool has_right = i < n;
    const bool has_left = i > 0;
    const node_handle c = child_at(p, i);

    if (has_right && fill_of(child_at(p, i + 1)) > k_.k()) {
      const node_handle r = child_at(p, i + 1);
      if (store_.is_leaf(c)) {
        auto& cl = store_.leaf(c);
        auto& rl = store_.leaf(r);
        cl.values.push_back(rl.values.front());
        rl.values.erase_at(0);
        p.entries[i].sep = rl.values.front();
      } else {
        auto& ci = store_.inner(c);
        auto& ri = store_.inner(r);
        ci.entries.push_back({ci.last, p.entries[i].sep});
        ci.last = ri.entries.front().child;
        p.entries[i].sep = ri.entries.front().sep;
        ri.entries.erase_at(0);
      }
      return;
    }

    if (has_left && fill_of(child_at(p, i - 1)) > k_.k()) {
      const node_handle l = child_at(p, i - 1);
      if (store_.is_leaf(c)) {
        auto& ll = store_.leaf(l);
        auto& cl = store_.leaf(c);
        cl.values.insert_at(0, ll.values.back());
        ll.values.pop_back();
        p.entries[i - 1].sep = cl.values.front();
      } else {
        auto& li = store_.inner(l);
        auto& ci = store_.inner(c);
        ci.entries.insert_at(0, {li.last, p.entries[i - 1].sep});
        p.entries[i - 1].sep = li.entries.back().sep;
        li.last = li.entries.back().child;
        li.entries.pop_back();
      }
      return;
    }

    merge_children(h, has_right ? i : i - 1);
  }

  // Merges children j and j+1 of parent h into the left node.
  void merge_children(node_handle h, std::size_t j) {
    auto& p = store_.inner(h);
    const std::size_t n = p.entries.fill();
    const node_handle a = child_at(p, j);
    const node_handle b = child_at(p, j + 1);

    if (store_.is_leaf(a)) {
      auto& la = store_.leaf(a);
      auto& lb = store_.leaf(b);
      la.values.append(lb.values.view());
      la.next = lb.next;
    } else {
      auto& ia = store_.inner(a);
      auto& ib = store_.inner(b);
      ia.entries.push_back({ia.last, p.entries[j].sep});
      ia.entries.append(ib.entries.view());
      ia.last = ib.last;
    }

    if (j + 1 < n) {
      p.entries[j].sep = p.entries[j + 1].sep;
      p.entries.erase_at(j + 1);
    } else {
      p.last = a;
      p.entries.erase_at(j);
    }
    store_.release(b);
  }

  order k_;
  search_strategy strategy_;
  node_store<V> store_;
  node_handle root_;
  node_handle first_;
  std::uint64_t epoch_ = 0;
  mutable std::uint64_t cmp_count_ = 0;

  friend class leaf_chain_iterator<V>;
};

template <std::totally_ordered V>
leaf_chain_iterator<V>::leaf_chain_iterator(const bplus_tree<V>* tree, node_handle start)
    : tree_(tree), current_(start), epoch_(tree->epoch()) {}

template <std::totally_ordered V>
void leaf_chain_iterator<V>::check_epoch() const {
  if (bplus_tree<V>::debug_epochs() && tree_->epoch() != epoch_) {
    throw std::logic_error("leaf cursor used across a mutation");
  }
}

template <std::totally_ordered V>
std::pair<std::span<const V>, node_handle> leaf_chain_iterator<V>::next() {
  check_epoch();
  assert(has_next() && "leaf_chain_iterator: next past the end marker");
  const auto& lf = tree_->store().leaf(current_);
  current_ = lf.next;
  return {lf.values.view(), lf.next};
}

}  // namespace bptree

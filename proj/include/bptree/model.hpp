#pragma once

#include <cassert>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/navigation.hpp"

// Algebraic B+-tree: the purely functional layer all imperative behavior is
// checked against. Operations return new trees; values are never shared or
// mutated in place.
namespace bptree::model {

// A tree is either a leaf holding a sorted value list, or an inner node
// holding subtrees interleaved with separators. Internally an inner node is
// stored as parallel vectors with children.size() == separators.size() + 1;
// pair i is (child(i), separators()[i]) and child(count-1) is the last
// subtree. Separators only guide navigation: values in child(i) lie in
// [separators()[i-1], separators()[i]).
template <std::totally_ordered V>
class alg_tree {
 public:
  alg_tree() = default;  // empty leaf

  static alg_tree leaf(std::vector<V> values) {
    alg_tree t;
    t.keys_ = std::move(values);
    return t;
  }

  static alg_tree inner(std::vector<alg_tree> children, std::vector<V> separators) {
    assert(children.size() == separators.size() + 1);
    alg_tree t;
    t.children_ = std::move(children);
    t.keys_ = std::move(separators);
    return t;
  }

  bool is_leaf() const { return children_.empty(); }

  const std::vector<V>& values() const {
    assert(is_leaf());
    return keys_;
  }

  std::span<const V> separators() const {
    assert(!is_leaf());
    return keys_;
  }

  std::size_t child_count() const { return children_.size(); }

  const alg_tree& child(std::size_t i) const {
    assert(i < children_.size());
    return children_[i];
  }

  const alg_tree& last() const {
    assert(!is_leaf());
    return children_.back();
  }

  friend bool operator==(const alg_tree&, const alg_tree&) = default;

 private:
  std::vector<alg_tree> children_;  // empty for a leaf
  std::vector<V> keys_;             // leaf values, or inner separators
};

// --- views ------------------------------------------------------------------

template <std::totally_ordered V>
void append_leaves(const alg_tree<V>& t, std::vector<V>& out) {
  if (t.is_leaf()) {
    out.insert(out.end(), t.values().begin(), t.values().end());
    return;
  }
  for (std::size_t i = 0; i < t.child_count(); ++i) append_leaves(t.child(i), out);
}

// In-order concatenation of all leaf value lists; the set the tree refines.
template <std::totally_ordered V>
std::vector<V> leaves(const alg_tree<V>& t) {
  std::vector<V> out;
  append_leaves(t, out);
  return out;
}

template <std::totally_ordered V>
void append_leaf_nodes(const alg_tree<V>& t, std::vector<alg_tree<V>>& out) {
  if (t.is_leaf()) {
    out.push_back(t);
    return;
  }
  for (std::size_t i = 0; i < t.child_count(); ++i) append_leaf_nodes(t.child(i), out);
}

// In-order list of the leaf subtrees themselves.
template <std::totally_ordered V>
std::vector<alg_tree<V>> leaf_nodes(const alg_tree<V>& t) {
  std::vector<alg_tree<V>> out;
  append_leaf_nodes(t, out);
  return out;
}

// The tree with every leaf's contents erased; structure and separators kept.
template <std::totally_ordered V>
alg_tree<V> trunk(const alg_tree<V>& t) {
  if (t.is_leaf()) return alg_tree<V>::leaf({});
  std::vector<alg_tree<V>> children;
  children.reserve(t.child_count());
  for (std::size_t i = 0; i < t.child_count(); ++i) children.push_back(trunk(t.child(i)));
  return alg_tree<V>::inner(std::move(children),
                            std::vector<V>(t.separators().begin(), t.separators().end()));
}

template <std::totally_ordered V>
std::size_t height(const alg_tree<V>& t) {
  if (t.is_leaf()) return 0;
  std::size_t h = 0;
  for (std::size_t i = 0; i < t.child_count(); ++i) h = std::max(h, height(t.child(i)));
  return h + 1;
}

template <std::totally_ordered V>
std::string to_text(const alg_tree<V>& t) {
  std::ostringstream os;
  if (t.is_leaf()) {
    os << "Leaf[";
    for (std::size_t i = 0; i < t.values().size(); ++i) os << (i ? "," : "") << t.values()[i];
    os << "]";
  } else {
    os << "Node[";
    for (std::size_t i = 0; i + 1 < t.child_count(); ++i)
      os << (i ? "," : "") << "(" << to_text(t.child(i)) << "," << t.separators()[i] << ")";
    os << "](" << to_text(t.last()) << ")";
  }
  return os.str();
}

// --- invariants ---------------------------------------------------------------

struct invariant_report {
  bool balanced = false;
  bool order = false;
  bool aligned = false;
  bool sorted = false;

  bool all() const { return balanced && order && aligned && sorted; }
};

namespace detail {

template <std::totally_ordered V>
std::optional<std::size_t> balanced_height(const alg_tree<V>& t) {
  if (t.is_leaf()) return 0;
  std::optional<std::size_t> h;
  for (std::size_t i = 0; i < t.child_count(); ++i) {
    auto ch = balanced_height(t.child(i));
    if (!ch) return std::nullopt;
    if (h && *h != *ch) return std::nullopt;
    h = ch;
  }
  return *h + 1;
}

template <std::totally_ordered V>
bool order_ok(order k, const alg_tree<V>& t, bool is_root) {
  const std::size_t max = k.capacity();
  if (t.is_leaf()) {
    const std::size_t n = t.values().size();
    return is_root ? n <= max : (n >= k.k() && n <= max);
  }
  const std::size_t m = t.separators().size();
  const std::size_t min = is_root ? 1 : k.k();
  if (m < min || m > max) return false;
  for (std::size_t i = 0; i < t.child_count(); ++i) {
    if (!order_ok(k, t.child(i), false)) return false;
  }
  return true;
}

template <std::totally_ordered V>
bool aligned_ok(const std::optional<V>& lo, const alg_tree<V>& t, const std::optional<V>& hi) {
  if (t.is_leaf()) {
    for (const V& v : t.values()) {
      if (lo && v < *lo) return false;
      if (hi && !(v < *hi)) return false;
    }
    return true;
  }
  const auto seps = t.separators();
  for (std::size_t i = 0; i + 1 < seps.size(); ++i) {
    if (!(seps[i] < seps[i + 1])) return false;
  }
  if (lo && seps.front() < *lo) return false;
  if (hi && !(seps.back() < *hi)) return false;
  for (std::size_t i = 0; i < t.child_count(); ++i) {
    const std::optional<V> l = i == 0 ? lo : std::optional<V>(seps[i - 1]);
    const std::optional<V> h = i == seps.size() ? hi : std::optional<V>(seps[i]);
    if (!aligned_ok(l, t.child(i), h)) return false;
  }
  return true;
}

template <std::totally_ordered V>
bool strictly_sorted(std::span<const V> xs) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i] < xs[i + 1])) return false;
  }
  return true;
}

}  // namespace detail

// Evaluates the four structural invariants independently. An absent lo bound
// checks the leftmost-spine shape (no lower constraint there); absent hi is
// an infinite upper bound.
template <std::totally_ordered V>
invariant_report check_invariants(order k, const alg_tree<V>& t, const std::optional<V>& lo = {},
                                  const std::optional<V>& hi = {}) {
  invariant_report r;
  r.balanced = detail::balanced_height(t).has_value();
  r.order = detail::order_ok(k, t, true);
  r.aligned = detail::aligned_ok(lo, t, hi);
  const auto ls = leaves(t);
  r.sorted = detail::strictly_sorted<V>(ls);
  return r;
}

// --- queries ------------------------------------------------------------------

// Home child for a probe: the unique subtree whose bounds admit x. Probes
// equal to a separator belong to its right subtree.
template <std::totally_ordered V>
std::size_t home_child(const alg_tree<V>& t, const V& x,
                       search_strategy s = search_strategy::binary) {
  return nav::descend_index<V>(s, t.separators(), x);
}

template <std::totally_ordered V>
bool isin(const alg_tree<V>& t, const V& x, search_strategy s = search_strategy::binary) {
  if (t.is_leaf()) return nav::isin_list<V>(s, x, t.values());
  return isin(t.child(home_child(t, x, s)), x, s);
}

// --- insertion ------------------------------------------------------------------

namespace detail {

template <std::totally_ordered V>
struct ins_up {
  alg_tree<V> left;
  V sep;
  alg_tree<V> right;
};

template <std::totally_ordered V>
using ins_result = std::variant<alg_tree<V>, ins_up<V>>;

template <std::totally_ordered V>
ins_result<V> insert_rec(order k, const V& x, const alg_tree<V>& t, search_strategy s) {
  const std::size_t cap = k.capacity();
  if (t.is_leaf()) {
    std::vector<V> vals = nav::insert_list<V>(s, x, t.values());
    if (vals.size() <= cap) return alg_tree<V>::leaf(std::move(vals));
    // 2k+1 values: left keeps k, right takes k+1; the separator is the first
    // value of the right leaf, copied, not moved.
    std::vector<V> left(vals.begin(), vals.begin() + k.k());
    std::vector<V> right(vals.begin() + k.k(), vals.end());
    V sep = right.front();
    return ins_up<V>{alg_tree<V>::leaf(std::move(left)), std::move(sep),
                     alg_tree<V>::leaf(std::move(right))};
  }

  const std::size_t i = home_child(t, x, s);
  ins_result<V> r = insert_rec(k, x, t.child(i), s);

  std::vector<alg_tree<V>> children;
  children.reserve(t.child_count() + 1);
  for (std::size_t j = 0; j < t.child_count(); ++j) children.push_back(t.child(j));
  std::vector<V> seps(t.separators().begin(), t.separators().end());

  if (auto* plain = std::get_if<alg_tree<V>>(&r)) {
    children[i] = std::move(*plain);
    return alg_tree<V>::inner(std::move(children), std::move(seps));
  }
  auto& up = std::get<ins_up<V>>(r);
  children[i] = std::move(up.left);
  children.insert(children.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(up.right));
  seps.insert(seps.begin() + static_cast<std::ptrdiff_t>(i), std::move(up.sep));
  if (seps.size() <= cap) return alg_tree<V>::inner(std::move(children), std::move(seps));

  // 2k+1 separators: the median separator moves up, k pairs stay either side.
  std::vector<alg_tree<V>> lch(children.begin(), children.begin() + k.k() + 1);
  std::vector<V> lsp(seps.begin(), seps.begin() + k.k());
  V up_sep = seps[k.k()];
  std::vector<alg_tree<V>> rch(children.begin() + k.k() + 1, children.end());
  std::vector<V> rsp(seps.begin() + k.k() + 1, seps.end());
  return ins_up<V>{alg_tree<V>::inner(std::move(lch), std::move(lsp)), std::move(up_sep),
                   alg_tree<V>::inner(std::move(rch), std::move(rsp))};
}

}  // namespace detail

// Set-semantics insertion: the result refines set(leaves(t)) + {x}. Inserting
// a present value returns the tree unchanged.
template <std::totally_ordered V>
alg_tree<V> insert(order k, const V& x, const alg_tree<V>& t,
                   search_strategy s = search_strategy::binary) {
  auto r = detail::insert_rec(k, x, t, s);
  if (auto* plain = std::get_if<alg_tree<V>>(&r)) return std::move(*plain);
  auto& up = std::get<detail::ins_up<V>>(r);
  std::vector<alg_tree<V>> children;
  children.push_back(std::move(up.left));
  children.push_back(std::move(up.right));
  return alg_tree<V>::inner(std::move(children), {std::move(up.sep)});
}

// --- deletion ------------------------------------------------------------------

namespace detail {

template <std::totally_ordered V>
std::size_t node_fill(const alg_tree<V>& t) {
  return t.is_leaf() ? t.values().size() : t.separators().size();
}

template <std::totally_ordered V>
bool underfull(order k, const alg_tree<V>& t) {
  return node_fill(t) < k.k();
}

// Merges children[j] and children[j+1], dropping the separator between them.
template <std::totally_ordered V>
void merge_children(std::vector<alg_tree<V>>& children, std::vector<V>& seps, std::size_t j) {
  const alg_tree<V>& a = children[j];
  const alg_tree<V>& b = children[j + 1];
  alg_tree<V> merged;
  if (a.is_leaf()) {
    std::vector<V> vals = a.values();
    vals.insert(vals.end(), b.values().begin(), b.values().end());
    merged = alg_tree<V>::leaf(std::move(vals));
  } else {
    std::vector<alg_tree<V>> ch;
    for (std::size_t i = 0; i < a.child_count(); ++i) ch.push_back(a.child(i));
    for (std::size_t i = 0; i < b.child_count(); ++i) ch.push_back(b.child(i));
    std::vector<V> sp(a.separators().begin(), a.separators().end());
    sp.push_back(seps[j]);
    sp.insert(sp.end(), b.separators().begin(), b.separators().end());
    merged = alg_tree<V>::inner(std::move(ch), std::move(sp));
  }
  children[j] = std::move(merged);
  children.erase(children.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  seps.erase(seps.begin() + static_cast<std::ptrdiff_t>(j));
}

// Repairs an underfull children[i]: borrow from the right sibling, else the
// left, else merge (preferring the right neighbor, keeping the left node).
template <std::totally_ordered V>
void rebalance(order k, std::vector<alg_tree<V>>& children, std::vector<V>& seps, std::size_t i) {
  const bool has_right = i + 1 < children.size();
  const bool has_left = i > 0;

  if (has_right && node_fill(children[i + 1]) > k.k()) {
    alg_tree<V>& c = children[i];
    alg_tree<V>& r = children[i + 1];
    if (c.is_leaf()) {
      std::vector<V> cv = c.values();
      std::vector<V> rv = r.values();
      cv.push_back(rv.front());
      rv.erase(rv.begin());
      seps[i] = rv.front();
      c = alg_tree<V>::leaf(std::move(cv));
      r = alg_tree<V>::leaf(std::move(rv));
    } else {
      std::vector<alg_tree<V>> cch;
      for (std::size_t j = 0; j < c.child_count(); ++j) cch.push_back(c.child(j));
      std::vector<V> csp(c.separators().begin(), c.separators().end());
      std::vector<alg_tree<V>> rch;
      for (std::size_t j = 0; j < r.child_count(); ++j) rch.push_back(r.child(j));
      std::vector<V> rsp(r.separators().begin(), r.separators().end());
      csp.push_back(seps[i]);
      cch.push_back(rch.front());
      seps[i] = rsp.front();
      rch.erase(rch.begin());
      rsp.erase(rsp.begin());
      c = alg_tree<V>::inner(std::move(cch), std::move(csp));
      r = alg_tree<V>::inner(std::move(rch), std::move(rsp));
    }
    return;
  }

  if (has_left && node_fill(children[i - 1]) > k.k()) {
    alg_tree<V>& l = children[i - 1];
    alg_tree<V>& c = children[i];
    if (c.is_leaf()) {
      std::vector<V> lv = l.values();
      std::vector<V> cv = c.values();
      cv.insert(cv.begin(), lv.back());
      lv.pop_back();
      seps[i - 1] = cv.front();
      l = alg_tree<V>::leaf(std::move(lv));
      c = alg_tree<V>::leaf(std::move(cv));
    } else {
      std::vector<alg_tree<V>> lch;
      for (std::size_t j = 0; j < l.child_count(); ++j) lch.push_back(l.child(j));
      std::vector<V> lsp(l.separators().begin(), l.separators().end());
      std::vector<alg_tree<V>> cch;
      for (std::size_t j = 0; j < c.child_count(); ++j) cch.push_back(c.child(j));
      std::vector<V> csp(c.separators().begin(), c.separators().end());
      cch.insert(cch.begin(), lch.back());
      csp.insert(csp.begin(), seps[i - 1]);
      seps[i - 1] = lsp.back();
      lch.pop_back();
      lsp.pop_back();
      l = alg_tree<V>::inner(std::move(lch), std::move(lsp));
      c = alg_tree<V>::inner(std::move(cch), std::move(csp));
    }
    return;
  }

  if (has_right) {
    merge_children(children, seps, i);
  } else {
    merge_children(children, seps, i - 1);
  }
}

template <std::totally_ordered V>
alg_tree<V> erase_rec(order k, const V& x, const alg_tree<V>& t, search_strategy s) {
  if (t.is_leaf()) return alg_tree<V>::leaf(nav::delete_list<V>(s, x, t.values()));

  const std::size_t i = home_child(t, x, s);
  std::vector<alg_tree<V>> children;
  children.reserve(t.child_count());
  for (std::size_t j = 0; j < t.child_count(); ++j) children.push_back(t.child(j));
  std::vector<V> seps(t.separators().begin(), t.separators().end());

  children[i] = erase_rec(k, x, children[i], s);
  if (underfull(k, children[i])) rebalance(k, children, seps, i);
  return alg_tree<V>::inner(std::move(children), std::move(seps));
}

}  // namespace detail

// Set-semantics deletion: the result refines set(leaves(t)) - {x}. Underflow
// is repaired borrow-first, merge-second; the root collapses when reduced to
// a single child.
template <std::totally_ordered V>
alg_tree<V> erase(order k, const V& x, const alg_tree<V>& t,
                  search_strategy s = search_strategy::binary) {
  alg_tree<V> out = detail::erase_rec(k, x, t, s);
  if (!out.is_leaf() && out.separators().empty()) return out.child(0);
  return out;
}

// --- range queries ---------------------------------------------------------------

// All stored values >= x, in order.
template <std::totally_ordered V>
std::vector<V> lrange(const alg_tree<V>& t, const V& x,
                      search_strategy s = search_strategy::binary) {
  if (t.is_leaf()) return nav::lrange_list<V>(s, x, t.values());
  const std::size_t i = home_child(t, x, s);
  std::vector<V> out = lrange(t.child(i), x, s);
  for (std::size_t j = i + 1; j < t.child_count(); ++j) append_leaves(t.child(j), out);
  return out;
}

// The suffix of leaf_nodes(t) starting at the leaf where x would reside.
template <std::totally_ordered V>
std::vector<alg_tree<V>> leaf_nodes_lrange(const alg_tree<V>& t, const V& x,
                                           search_strategy s = search_strategy::binary) {
  if (t.is_leaf()) return {t};
  const std::size_t i = home_child(t, x, s);
  std::vector<alg_tree<V>> out = leaf_nodes_lrange(t.child(i), x, s);
  for (std::size_t j = i + 1; j < t.child_count(); ++j) append_leaf_nodes(t.child(j), out);
  return out;
}

// lrange recovered from the located leaf suffix: filter the head leaf, then
// concatenate the rest wholesale. Agrees with lrange(t, x).
template <std::totally_ordered V>
std::vector<V> concat_leaf_nodes_lrange(const alg_tree<V>& t, const V& x,
                                        search_strategy s = search_strategy::binary) {
  const std::vector<alg_tree<V>> lns = leaf_nodes_lrange(t, x, s);
  assert(!lns.empty());
  std::vector<V> out = nav::lrange_list<V>(s, x, lns.front().values());
  for (std::size_t i = 1; i < lns.size(); ++i)
    out.insert(out.end(), lns[i].values().begin(), lns[i].values().end());
  return out;
}

}  // namespace bptree::model

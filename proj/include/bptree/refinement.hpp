#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/model.hpp"
#include "bptree/tree.hpp"

// Executable content of the refinement relation: the abstraction function
// from heap to algebraic tree, fringe extraction, and the checks that the
// linked-leaves view and the trunk view split the tree cleanly. This is the
// oracle binding the imperative tree to the model.
namespace bptree::refine {

struct check_line {
  std::string name;
  bool ok = true;
  std::string detail;
};

template <std::totally_ordered V>
struct report {
  std::vector<check_line> checks;
  std::optional<model::alg_tree<V>> abstract_tree;
  std::vector<node_handle> fringe;

  bool ok() const {
    for (const auto& c : checks) {
      if (!c.ok) return false;
    }
    return true;
  }

  void add(std::string name, bool ok, std::string detail = "") {
    checks.push_back({std::move(name), ok, std::move(detail)});
  }

  std::vector<check_line> violations() const {
    std::vector<check_line> out;
    for (const auto& c : checks) {
      if (!c.ok) out.push_back(c);
    }
    return out;
  }
};

namespace detail {

template <std::totally_ordered V>
model::alg_tree<V> abstract_rec(const node_store<V>& store, node_handle h,
                                std::unordered_set<std::uint32_t>& path) {
  if (!path.insert(h.index).second) throw cyclic_structure(h.index);
  const auto& n = store.get(h);
  model::alg_tree<V> out;
  if (const auto* lf = std::get_if<leaf_node<V>>(&n)) {
    out = model::alg_tree<V>::leaf(
        std::vector<V>(lf->values.view().begin(), lf->values.view().end()));
  } else {
    const auto& in = std::get<inner_node<V>>(n);
    std::vector<model::alg_tree<V>> children;
    std::vector<V> seps;
    for (std::size_t i = 0; i < in.entries.fill(); ++i) {
      children.push_back(abstract_rec(store, in.entries[i].child, path));
      seps.push_back(in.entries[i].sep);
    }
    children.push_back(abstract_rec(store, in.last, path));
    out = model::alg_tree<V>::inner(std::move(children), std::move(seps));
  }
  path.erase(h.index);
  return out;
}

template <std::totally_ordered V>
void fringe_rec(const node_store<V>& store, node_handle h, std::vector<node_handle>& out,
                std::unordered_set<std::uint32_t>& path) {
  if (!path.insert(h.index).second) throw cyclic_structure(h.index);
  const auto& n = store.get(h);
  if (std::holds_alternative<leaf_node<V>>(n)) {
    out.push_back(h);
  } else {
    const auto& in = std::get<inner_node<V>>(n);
    for (std::size_t i = 0; i < in.entries.fill(); ++i)
      fringe_rec(store, in.entries[i].child, out, path);
    fringe_rec(store, in.last, out, path);
  }
  path.erase(h.index);
}

// Image of the tree read from inner nodes only: children that turn out to be
// leaves become empty stubs without their contents being touched.
template <std::totally_ordered V>
model::alg_tree<V> trunk_rec(const node_store<V>& store, node_handle h,
                             std::unordered_set<std::uint32_t>& path) {
  if (!path.insert(h.index).second) throw cyclic_structure(h.index);
  const auto& n = store.get(h);
  model::alg_tree<V> out;
  if (std::holds_alternative<leaf_node<V>>(n)) {
    out = model::alg_tree<V>::leaf({});
  } else {
    const auto& in = std::get<inner_node<V>>(n);
    std::vector<model::alg_tree<V>> children;
    std::vector<V> seps;
    for (std::size_t i = 0; i < in.entries.fill(); ++i) {
      children.push_back(trunk_rec(store, in.entries[i].child, path));
      seps.push_back(in.entries[i].sep);
    }
    children.push_back(trunk_rec(store, in.last, path));
    out = model::alg_tree<V>::inner(std::move(children), std::move(seps));
  }
  path.erase(h.index);
  return out;
}

inline std::string handle_text(node_handle h) {
  return h.is_nil() ? std::string("NIL") : std::to_string(h.index);
}

}  // namespace detail

// Reads the algebraic value a heap tree refines: partially filled arrays map
// to lists of their first n elements, entry arrays to subtree/separator
// pairs. Rejects cycles on the descent path and dangling handles.
template <std::totally_ordered V>
model::alg_tree<V> abstract(const bplus_tree<V>& tree) {
  std::unordered_set<std::uint32_t> path;
  return detail::abstract_rec(tree.store(), tree.root(), path);
}

// Leaf handles of the tree in left-to-right structural order (by descent,
// not by following next links).
template <std::totally_ordered V>
std::vector<node_handle> fringe(const bplus_tree<V>& tree) {
  std::vector<node_handle> out;
  std::unordered_set<std::uint32_t> path;
  detail::fringe_rec(tree.store(), tree.root(), out, path);
  return out;
}

// Builds a heap image of an algebraic tree: nodes allocated per subtree, leaf
// next links wired in fringe order, the final leaf ending the chain. Inverse
// of abstract on valid trees.
template <std::totally_ordered V>
bplus_tree<V> materialize(order k, const model::alg_tree<V>& t,
                          search_strategy strategy = search_strategy::binary) {
  struct builder {
    node_store<V> store;
    std::uint32_t cap;
    std::vector<node_handle> leaves;

    node_handle build(const model::alg_tree<V>& t) {
      if (t.is_leaf()) {
        if (t.values().size() > cap) throw capacity_exceeded(t.values().size(), cap);
        leaf_node<V> lf(cap);
        lf.values.assign(std::span<const V>(t.values()));
        const node_handle h = store.alloc(typename node_store<V>::node(std::move(lf)));
        leaves.push_back(h);
        return h;
      }
      if (t.separators().size() > cap) throw capacity_exceeded(t.separators().size(), cap);
      std::vector<node_handle> children;
      for (std::size_t i = 0; i < t.child_count(); ++i) children.push_back(build(t.child(i)));
      inner_node<V> in(cap);
      for (std::size_t i = 0; i + 1 < t.child_count(); ++i)
        in.entries.push_back({children[i], t.separators()[i]});
      in.last = children.back();
      return store.alloc(typename node_store<V>::node(std::move(in)));
    }
  };

  builder b{node_store<V>{}, k.capacity(), {}};
  const node_handle root = b.build(t);
  for (std::size_t i = 0; i + 1 < b.leaves.size(); ++i)
    b.store.leaf(b.leaves[i]).next = b.leaves[i + 1];
  b.store.leaf(b.leaves.back()).next = node_handle::nil();
  return bplus_tree<V>::adopt(k, std::move(b.store), root, b.leaves.front(), strategy);
}

// Verifies the executable content of the leaf-chain/trunk view split:
//   chain       traversal from first() visits exactly the fringe, ending at
//               the end marker
//   leaves      leaf contents along the fringe refine the model's leaf nodes
//   trunk       the trunk is reconstructible from inner nodes alone
//   separation  no handle is reachable twice; leaf and inner handle sets are
//               disjoint
template <std::totally_ordered V>
report<V> check_view_split(const bplus_tree<V>& tree) {
  report<V> r;

  try {
    r.abstract_tree = abstract(tree);
    r.fringe = fringe(tree);
    r.add("abstraction", true);
  } catch (const std::exception& e) {
    r.add("abstraction", false, e.what());
    return r;
  }

  // (a) chain = fringe, terminated by the end marker
  {
    bool ok = true;
    std::string detail;
    node_handle h = tree.first();
    std::size_t i = 0;
    try {
      while (!h.is_nil()) {
        if (i >= r.fringe.size()) {
          ok = false;
          detail = "chain longer than fringe at handle " + detail::handle_text(h);
          break;
        }
        if (h != r.fringe[i]) {
          ok = false;
          detail = "chain position " + std::to_string(i) + " is " + detail::handle_text(h) +
                   ", fringe has " + detail::handle_text(r.fringe[i]);
          break;
        }
        const auto& n = tree.store().get(h);
        const auto* lf = std::get_if<leaf_node<V>>(&n);
        if (!lf) {
          ok = false;
          detail = "chain reaches non-leaf handle " + detail::handle_text(h);
          break;
        }
        h = lf->next;
        ++i;
      }
      if (ok && i < r.fringe.size()) {
        ok = false;
        detail = "chain ends after " + std::to_string(i) + " of " +
                 std::to_string(r.fringe.size()) + " leaves";
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    r.add("chain", ok, detail);
  }

  // (b) leaf contents along the chain refine the model leaf nodes
  {
    bool ok = true;
    std::string detail;
    const auto lns = model::leaf_nodes(*r.abstract_tree);
    node_handle h = tree.first();
    std::size_t i = 0;
    try {
      while (!h.is_nil() && i <= lns.size()) {
        const auto& n = tree.store().get(h);
        const auto* lf = std::get_if<leaf_node<V>>(&n);
        if (!lf) {
          ok = false;
          detail = "chain reaches non-leaf handle " + detail::handle_text(h);
          break;
        }
        const auto view = lf->values.view();
        if (i >= lns.size() || !std::equal(view.begin(), view.end(), lns[i].values().begin(),
                                           lns[i].values().end())) {
          ok = false;
          detail = "chain leaf " + detail::handle_text(h) + " at position " + std::to_string(i) +
                   " does not refine the model leaf";
          break;
        }
        h = lf->next;
        ++i;
      }
      if (ok && i != lns.size()) {
        ok = false;
        detail = "chain covers " + std::to_string(i) + " of " + std::to_string(lns.size()) +
                 " leaf nodes";
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    r.add("leaves", ok, detail);
  }

  // (c) trunk reconstructible from inner nodes alone
  {
    bool ok = true;
    std::string detail;
    try {
      std::unordered_set<std::uint32_t> path;
      const auto t = detail::trunk_rec(tree.store(), tree.root(), path);
      if (!(t == model::trunk(*r.abstract_tree))) {
        ok = false;
        detail = "trunk image differs from trunk of abstraction";
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    r.add("trunk", ok, detail);
  }

  // (d) separation: every reachable handle owned exactly once, leaf and inner
  // handle sets disjoint
  {
    bool ok = true;
    std::string detail;
    std::unordered_map<std::uint32_t, int> seen;
    std::unordered_set<std::uint32_t> leaf_set;
    std::unordered_set<std::uint32_t> inner_set;
    std::vector<node_handle> stack{tree.root()};
    try {
      while (!stack.empty()) {
        const node_handle h = stack.back();
        stack.pop_back();
        if (++seen[h.index] > 1) {
          ok = false;
          detail = "handle " + detail::handle_text(h) + " reachable more than once";
          break;
        }
        const auto& n = tree.store().get(h);
        if (std::holds_alternative<leaf_node<V>>(n)) {
          leaf_set.insert(h.index);
        } else {
          inner_set.insert(h.index);
          const auto& in = std::get<inner_node<V>>(n);
          for (std::size_t i = 0; i < in.entries.fill(); ++i) stack.push_back(in.entries[i].child);
          stack.push_back(in.last);
        }
      }
      if (ok) {
        for (std::uint32_t h : leaf_set) {
          if (inner_set.count(h)) {
            ok = false;
            detail = "handle " + std::to_string(h) + " appears as both leaf and inner";
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    r.add("separation", ok, detail);
  }

  return r;
}

// Full refinement check: the heap tree abstracts to `expected`
// structure-exactly, the view split holds, and all four model invariants hold
// for the tree's split factor.
template <std::totally_ordered V>
report<V> check_refinement(const bplus_tree<V>& tree, const model::alg_tree<V>& expected) {
  report<V> r = check_view_split(tree);
  if (!r.abstract_tree) {
    r.add("equal", false, "no abstraction");
    return r;
  }

  const bool equal = *r.abstract_tree == expected;
  r.add("equal", equal,
        equal ? "" : "expected " + model::to_text(expected) + ", got " +
                     model::to_text(*r.abstract_tree));

  const auto inv = model::check_invariants(tree.k(), *r.abstract_tree);
  r.add("balanced", inv.balanced);
  r.add("order", inv.order);
  r.add("aligned", inv.aligned);
  r.add("sorted", inv.sorted);
  return r;
}

}  // namespace bptree::refine

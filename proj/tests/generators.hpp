#pragma once

// Test-side helpers: an independent generator of valid algebraic trees
// (bottom-up chunking of a sorted key list, no reliance on model::insert),
// plus store fingerprinting for read-only checks. Framework-free so both the
// Catch2 suite and the acceptance runner can use it.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "bptree/model.hpp"
#include "bptree/node_store.hpp"
#include "bptree/tree.hpp"

namespace testgen {

using tree64 = bptree::model::alg_tree<std::int64_t>;

inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  return n == 0 ? 0 : g() % n;
}

inline std::vector<std::int64_t> random_sorted_keys(std::mt19937_64& g, std::size_t n,
                                                    std::uint64_t universe) {
  std::set<std::int64_t> keys;
  while (keys.size() < n) keys.insert(static_cast<std::int64_t>(bounded(g, universe)));
  return {keys.begin(), keys.end()};
}

// Group sizes for m items, each in [lo, hi], chosen randomly among feasible
// prefixes. Requires m >= lo.
inline std::vector<std::size_t> chunk_sizes(std::mt19937_64& g, std::size_t m, std::size_t lo,
                                            std::size_t hi) {
  std::vector<std::size_t> out;
  std::size_t rem = m;
  while (rem > 0) {
    std::vector<std::size_t> feasible;
    const std::size_t top = std::min(hi, rem);
    for (std::size_t c = lo; c <= top; ++c) {
      if (rem - c == 0 || rem - c >= lo) feasible.push_back(c);
    }
    out.push_back(feasible[bounded(g, feasible.size())]);
    rem -= out.back();
  }
  return out;
}

// Valid tree over the given strictly sorted keys: leaves sized k..2k, inner
// fanout k+1..2k+1, separators equal to the minimum of the right neighbor.
inline tree64 build_from_sorted(bptree::order k, const std::vector<std::int64_t>& keys,
                                std::mt19937_64& g) {
  if (keys.size() <= k.capacity()) return tree64::leaf(keys);

  struct part {
    tree64 node;
    std::int64_t min_key;
  };
  std::vector<part> level;
  {
    const auto sizes = chunk_sizes(g, keys.size(), k.k(), k.capacity());
    std::size_t at = 0;
    for (std::size_t s : sizes) {
      std::vector<std::int64_t> vs(keys.begin() + static_cast<std::ptrdiff_t>(at),
                                   keys.begin() + static_cast<std::ptrdiff_t>(at + s));
      level.push_back({tree64::leaf(std::move(vs)), keys[at]});
      at += s;
    }
  }

  while (level.size() > 1) {
    if (level.size() <= k.capacity() + 1) {
      std::vector<tree64> children;
      std::vector<std::int64_t> seps;
      for (std::size_t i = 0; i < level.size(); ++i) {
        children.push_back(std::move(level[i].node));
        if (i > 0) seps.push_back(level[i].min_key);
      }
      return tree64::inner(std::move(children), std::move(seps));
    }
    const auto sizes = chunk_sizes(g, level.size(), k.k() + 1, k.capacity() + 1);
    std::vector<part> next;
    std::size_t at = 0;
    for (std::size_t s : sizes) {
      std::vector<tree64> children;
      std::vector<std::int64_t> seps;
      const std::int64_t group_min = level[at].min_key;
      for (std::size_t i = 0; i < s; ++i) {
        children.push_back(std::move(level[at + i].node));
        if (i > 0) seps.push_back(level[at + i].min_key);
      }
      next.push_back({tree64::inner(std::move(children), std::move(seps)), group_min});
      at += s;
    }
    level = std::move(next);
  }
  return std::move(level.front().node);
}

inline tree64 random_tree(bptree::order k, std::size_t n_keys, std::mt19937_64& g) {
  const std::uint64_t universe = std::max<std::uint64_t>(4, 4 * n_keys);
  return build_from_sorted(k, random_sorted_keys(g, n_keys, universe), g);
}

// FNV-1a over every live slot of the store; changes iff any stored bit of the
// tree changes.
inline std::uint64_t store_fingerprint(const bptree::bplus_tree<std::int64_t>& tree) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  const auto& store = tree.store();
  mix(tree.root().index);
  mix(tree.first().index);
  for (std::uint32_t i = 0; i < store.slot_count(); ++i) {
    const bptree::node_handle hd{i};
    if (!store.is_live(hd)) continue;
    mix(i);
    const auto& n = store.get(hd);
    if (const auto* lf = std::get_if<bptree::leaf_node<std::int64_t>>(&n)) {
      mix(0x1eaf);
      mix(lf->values.fill());
      for (std::size_t j = 0; j < lf->values.fill(); ++j)
        mix(static_cast<std::uint64_t>(lf->values[j]));
      mix(lf->next.index);
    } else {
      const auto& in = std::get<bptree::inner_node<std::int64_t>>(n);
      mix(0x1a2b);
      mix(in.entries.fill());
      for (std::size_t j = 0; j < in.entries.fill(); ++j) {
        mix(in.entries[j].child.index);
        mix(static_cast<std::uint64_t>(in.entries[j].sep));
      }
      mix(in.last.index);
    }
  }
  return h;
}

}  // namespace testgen

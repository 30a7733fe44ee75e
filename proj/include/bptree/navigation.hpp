#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bptree/core.hpp"

// Node-internal navigation. Every tree walk funnels through the index
// functions here, so swapping linear scan for binary search (or counting
// comparisons) never touches the tree algorithms themselves.
namespace bptree::nav {

// Comparator wrapper that bumps an external counter on every ordering query.
template <typename V>
struct counting_less {
  std::uint64_t* count = nullptr;

  bool operator()(const V& a, const V& b) const {
    if (count) ++*count;
    return a < b;
  }
};

// --- index functions -------------------------------------------------------
//
// split_index:   smallest i with sep(i) >= p, or n if none (lower bound).
// descend_index: smallest i with sep(i) > p, or n if none (upper bound).
//
// split_index realizes the abstract split contract: left of the index every
// separator is < p, at the index (if any) p <= separator. descend_index
// picks the home subtree for a probe: separators bound subtrees as
// [sep(i-1), sep(i)), so a probe equal to a separator belongs to the right.
// sep_at is any callable mapping a position to the separator stored there.

template <typename V, typename SepAt, typename Cmp>
std::size_t split_index_linear(std::size_t n, SepAt&& sep_at, const V& p, Cmp less) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!less(sep_at(i), p)) return i;
  }
  return n;
}

template <typename V, typename SepAt, typename Cmp>
std::size_t split_index_binary(std::size_t n, SepAt&& sep_at, const V& p, Cmp less) {
  std::size_t lo = 0;
  std::size_t len = n;
  while (len > 0) {
    const std::size_t half = len / 2;
    const std::size_t mid = lo + half;
    if (less(sep_at(mid), p)) {
      lo = mid + 1;
      len -= half + 1;
    } else {
      len = half;
    }
  }
  return lo;
}

template <typename V, typename SepAt, typename Cmp>
std::size_t descend_index_linear(std::size_t n, SepAt&& sep_at, const V& p, Cmp less) {
  for (std::size_t i = 0; i < n; ++i) {
    if (less(p, sep_at(i))) return i;
  }
  return n;
}

template <typename V, typename SepAt, typename Cmp>
std::size_t descend_index_binary(std::size_t n, SepAt&& sep_at, const V& p, Cmp less) {
  std::size_t lo = 0;
  std::size_t len = n;
  while (len > 0) {
    const std::size_t half = len / 2;
    const std::size_t mid = lo + half;
    if (less(p, sep_at(mid))) {
      len = half;
    } else {
      lo = mid + 1;
      len -= half + 1;
    }
  }
  return lo;
}

template <typename V, typename SepAt, typename Cmp>
std::size_t split_index(search_strategy s, std::size_t n, SepAt&& sep_at, const V& p, Cmp less) {
  return s == search_strategy::linear ? split_index_linear(n, sep_at, p, less)
                                      : split_index_binary(n, sep_at, p, less);
}

template <typename V, typename SepAt, typename Cmp>
std::size_t descend_index(search_strategy s, std::size_t n, SepAt&& sep_at, const V& p, Cmp less) {
  return s == search_strategy::linear ? descend_index_linear(n, sep_at, p, less)
                                      : descend_index_binary(n, sep_at, p, less);
}

// span convenience overloads (separator-only lists, leaf value lists)

template <typename V, typename Cmp = std::less<V>>
std::size_t split_index(search_strategy s, std::span<const V> values, const V& p, Cmp less = {}) {
  return split_index(s, values.size(), [&](std::size_t i) -> const V& { return values[i]; }, p,
                     less);
}

template <typename V, typename Cmp = std::less<V>>
std::size_t descend_index(search_strategy s, std::span<const V> values, const V& p, Cmp less = {}) {
  return descend_index(s, values.size(), [&](std::size_t i) -> const V& { return values[i]; }, p,
                       less);
}

// --- abstract split on (payload, separator) pair lists ----------------------

template <typename E>
struct split_result {
  std::vector<E> left;
  std::vector<E> right;
  std::size_t index = 0;  // |left|; what the imperative strategies return
};

// Partitions a pair list around probe p: left holds the longest prefix whose
// separators are < p, right the remainder. sep_of projects the separator out
// of an element.
template <typename E, typename V, typename SepOf, typename Cmp = std::less<V>>
split_result<E> split(search_strategy s, std::span<const E> pairs, const V& p, SepOf sep_of,
                      Cmp less = {}) {
  const std::size_t i = split_index(
      s, pairs.size(), [&](std::size_t j) -> const V& { return sep_of(pairs[j]); }, p, less);
  split_result<E> r;
  r.index = i;
  r.left.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(i));
  r.right.assign(pairs.begin() + static_cast<std::ptrdiff_t>(i), pairs.end());
  return r;
}

// split on plain separator/value lists: left = all values < p.
template <typename V, typename Cmp = std::less<V>>
std::pair<std::vector<V>, std::vector<V>> split_list(search_strategy s, std::span<const V> values,
                                                     const V& p, Cmp less = {}) {
  const std::size_t i = split_index(s, values, p, less);
  return {std::vector<V>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(i)),
          std::vector<V>(values.begin() + static_cast<std::ptrdiff_t>(i), values.end())};
}

// Membership in a strictly sorted list: split, then compare the head of the
// right part.
template <typename V, typename Cmp = std::less<V>>
bool isin_list(search_strategy s, const V& x, std::span<const V> values, Cmp less = {}) {
  const std::size_t i = split_index(s, values, x, less);
  return i < values.size() && values[i] == x;
}

// Suffix of a strictly sorted list holding all values >= x.
template <typename V, typename Cmp = std::less<V>>
std::vector<V> lrange_list(search_strategy s, const V& x, std::span<const V> values,
                           Cmp less = {}) {
  const std::size_t i = split_index(s, values, x, less);
  return std::vector<V>(values.begin() + static_cast<std::ptrdiff_t>(i), values.end());
}

// Sorted insertion without duplication.
template <typename V, typename Cmp = std::less<V>>
std::vector<V> insert_list(search_strategy s, const V& x, std::span<const V> values,
                           Cmp less = {}) {
  const std::size_t i = split_index(s, values, x, less);
  std::vector<V> out(values.begin(), values.end());
  if (i == values.size() || values[i] != x) out.insert(out.begin() + static_cast<std::ptrdiff_t>(i), x);
  return out;
}

// Removal if present.
template <typename V, typename Cmp = std::less<V>>
std::vector<V> delete_list(search_strategy s, const V& x, std::span<const V> values,
                           Cmp less = {}) {
  const std::size_t i = split_index(s, values, x, less);
  std::vector<V> out(values.begin(), values.end());
  if (i < values.size() && values[i] == x) out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

}  // namespace bptree::nav

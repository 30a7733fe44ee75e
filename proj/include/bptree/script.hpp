#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/model.hpp"
#include "bptree/refinement.hpp"
#include "bptree/tree.hpp"

// Randomized op scripts and the lockstep differential runner: the same script
// drives the heap tree, the algebraic model and std::set as an independent
// ordered-set oracle, comparing all answers and re-checking refinement after
// every mutation.
namespace bptree::harness {

enum class op_kind : std::uint8_t { insert, erase, contains, lrange, iter_all };

struct op {
  op_kind kind;
  std::int64_t key = 0;
};

struct op_script {
  std::uint64_t seed = 0;
  std::uint32_t k = 2;
  std::vector<op> ops;
};

// Uniform-enough draw that depends only on the mt19937_64 stream, so scripts
// are a pure function of (seed, parameters) on any toolchain.
inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  return n == 0 ? 0 : g() % n;
}

// Keys are drawn from a bounded universe (4x the op count) to force
// collisions, duplicate inserts and deletions of present keys.
inline op_script make_script(std::uint64_t seed, std::uint32_t k, std::size_t n_ops) {
  op_script s{seed, k, {}};
  std::mt19937_64 g(seed * 0x9e3779b97f4a7c15ULL + k);
  const std::uint64_t universe = std::max<std::uint64_t>(4, 4 * n_ops);
  s.ops.reserve(n_ops);
  for (std::size_t i = 0; i < n_ops; ++i) {
    const std::uint64_t roll = bounded(g, 100);
    op_kind kind;
    if (roll < 40) {
      kind = op_kind::insert;
    } else if (roll < 65) {
      kind = op_kind::erase;
    } else if (roll < 80) {
      kind = op_kind::contains;
    } else if (roll < 95) {
      kind = op_kind::lrange;
    } else {
      kind = op_kind::iter_all;
    }
    s.ops.push_back({kind, static_cast<std::int64_t>(bounded(g, universe))});
  }
  return s;
}

// Mutation-only scripts (for building dump trees).
inline op_script mutations_of(const op_script& s) {
  op_script out{s.seed, s.k, {}};
  for (const op& o : s.ops) {
    if (o.kind == op_kind::insert || o.kind == op_kind::erase) out.ops.push_back(o);
  }
  return out;
}

struct lockstep_outcome {
  std::optional<std::size_t> failed_op;
  std::string detail;
  std::size_t mutations = 0;
  std::size_t queries = 0;

  bool ok() const { return !failed_op.has_value(); }
};

struct lockstep_options {
  bool refine_every_mutation = true;
};

inline std::string op_text(const op& o) {
  switch (o.kind) {
    case op_kind::insert:
      return "I " + std::to_string(o.key);
    case op_kind::erase:
      return "D " + std::to_string(o.key);
    case op_kind::contains:
      return "Q " + std::to_string(o.key);
    case op_kind::lrange:
      return "R " + std::to_string(o.key);
    case op_kind::iter_all:
      return "A";
  }
  return "?";
}

template <typename T>
std::string list_text(const std::vector<T>& xs, std::size_t limit = 16) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < xs.size() && i < limit; ++i) os << (i ? " " : "") << xs[i];
  if (xs.size() > limit) os << " ...";
  os << "]";
  return os.str();
}

// Heap is the system under test; mutation-testing can substitute a faulty
// wrapper derived from bplus_tree<int64_t> to show the harness catches it.
template <typename Heap = bplus_tree<std::int64_t>>
lockstep_outcome run_lockstep(const op_script& s, search_strategy strategy,
                              const lockstep_options& opt = {}) {
  lockstep_outcome out;
  const order k(s.k);
  Heap heap(k, strategy);
  model::alg_tree<std::int64_t> m;
  std::set<std::int64_t> oracle;

  auto fail = [&](std::size_t i, std::string detail) {
    out.failed_op = i;
    out.detail = "op " + std::to_string(i) + " (" + op_text(s.ops[i]) + "): " + std::move(detail);
  };

  for (std::size_t i = 0; i < s.ops.size(); ++i) {
    const op& o = s.ops[i];
    switch (o.kind) {
      case op_kind::insert:
      case op_kind::erase: {
        ++out.mutations;
        if (o.kind == op_kind::insert) {
          heap.insert(o.key);
          m = model::insert(k, o.key, m, strategy);
          oracle.insert(o.key);
        } else {
          heap.erase(o.key);
          m = model::erase(k, o.key, m, strategy);
          oracle.erase(o.key);
        }
        if (opt.refine_every_mutation) {
          const auto rep = refine::check_refinement(heap, m);
          if (!rep.ok()) {
            std::string v;
            for (const auto& c : rep.violations()) v += c.name + " " + c.detail + "; ";
            fail(i, "refinement check failed: " + v);
            return out;
          }
        }
        break;
      }
      case op_kind::contains: {
        ++out.queries;
        const bool h = heap.contains(o.key);
        const bool mm = model::isin(m, o.key, strategy);
        const bool oo = oracle.count(o.key) > 0;
        if (h != oo || mm != oo) {
          fail(i, "contains mismatch: heap=" + std::to_string(h) + " model=" +
                      std::to_string(mm) + " oracle=" + std::to_string(oo));
          return out;
        }
        break;
      }
      case op_kind::lrange: {
        ++out.queries;
        const std::vector<std::int64_t> h = heap.lrange(o.key).drain();
        const std::vector<std::int64_t> mm = model::lrange(m, o.key, strategy);
        const std::vector<std::int64_t> cc = model::concat_leaf_nodes_lrange(m, o.key, strategy);
        std::vector<std::int64_t> oo(oracle.lower_bound(o.key), oracle.end());
        if (h != oo || mm != oo || cc != oo) {
          fail(i, "lrange mismatch: heap=" + list_text(h) + " model=" + list_text(mm) +
                      " concat=" + list_text(cc) + " oracle=" + list_text(oo));
          return out;
        }
        break;
      }
      case op_kind::iter_all: {
        ++out.queries;
        const std::vector<std::int64_t> h = heap.values_iter().drain();
        const std::vector<std::int64_t> mm = model::leaves(m);
        std::vector<std::int64_t> oo(oracle.begin(), oracle.end());
        if (h != oo || mm != oo) {
          fail(i, "iteration mismatch: heap=" + list_text(h) + " model=" + list_text(mm) +
                      " oracle=" + list_text(oo));
          return out;
        }
        break;
      }
    }
  }
  return out;
}

// Greedy one-op-at-a-time removal; keeps any removal that still fails.
template <typename Heap = bplus_tree<std::int64_t>>
op_script shrink_script(op_script s, search_strategy strategy, const lockstep_options& opt = {}) {
  if (run_lockstep<Heap>(s, strategy, opt).ok()) return s;
  bool progress = true;
  while (progress) {
    progress = false;
    std::size_t i = 0;
    while (i < s.ops.size()) {
      op_script cand = s;
      cand.ops.erase(cand.ops.begin() + static_cast<std::ptrdiff_t>(i));
      if (!run_lockstep<Heap>(cand, strategy, opt).ok()) {
        s = std::move(cand);
        progress = true;
      } else {
        ++i;
      }
    }
  }
  return s;
}

inline std::string format_script(const op_script& s) {
  std::ostringstream os;
  os << "SCRIPT seed=" << s.seed << " k=" << s.k << "\n";
  for (const op& o : s.ops) os << op_text(o) << "\n";
  return os.str();
}

inline op_script parse_script(std::istream& in) {
  op_script s;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream is(line);
    std::string tag;
    if (!(is >> tag)) continue;
    if (!header) {
      if (tag != "SCRIPT") throw std::runtime_error("script line 1: expected SCRIPT header");
      std::string t;
      while (is >> t) {
        if (t.rfind("seed=", 0) == 0) s.seed = std::stoull(t.substr(5));
        if (t.rfind("k=", 0) == 0) s.k = static_cast<std::uint32_t>(std::stoul(t.substr(2)));
      }
      header = true;
      continue;
    }
    op o;
    if (tag == "I") {
      o.kind = op_kind::insert;
    } else if (tag == "D") {
      o.kind = op_kind::erase;
    } else if (tag == "Q") {
      o.kind = op_kind::contains;
    } else if (tag == "R") {
      o.kind = op_kind::lrange;
    } else if (tag == "A") {
      o.kind = op_kind::iter_all;
      s.ops.push_back(o);
      continue;
    } else {
      throw std::runtime_error("script line " + std::to_string(line_no) + ": unknown op " + tag);
    }
    if (!(is >> o.key))
      throw std::runtime_error("script line " + std::to_string(line_no) + ": missing key");
    s.ops.push_back(o);
  }
  if (!header) throw std::runtime_error("empty script");
  return s;
}

}  // namespace bptree::harness

#pragma once

#include <concepts>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bptree/core.hpp"
#include "bptree/refinement.hpp"
#include "bptree/tree.hpp"

// Textual dump of a heap tree, one node per line in pre-order:
//
//   BPT k=<k> root=<handle> first=<handle>
//   N <handle> [<child> <sep> ...] <last>
//   L <handle> [<v> ...] -> <next|NIL>
//
// The writer is deterministic given the op sequence that built the tree and
// independent of the search strategy used.
namespace bptree::io {

struct parse_error : std::runtime_error {
  std::size_t line_no;

  parse_error(std::size_t line_no, const std::string& msg)
      : std::runtime_error("dump parse error, line " + std::to_string(line_no) + ": " + msg),
        line_no(line_no) {}
};

namespace detail {

inline std::string handle_text(node_handle h) {
  return h.is_nil() ? std::string("NIL") : std::to_string(h.index);
}

template <std::totally_ordered V>
void write_node(const node_store<V>& store, node_handle h, std::ostream& os) {
  const auto& n = store.get(h);
  if (const auto* lf = std::get_if<leaf_node<V>>(&n)) {
    os << "L " << h.index << " [";
    for (std::size_t i = 0; i < lf->values.fill(); ++i) os << (i ? " " : "") << lf->values[i];
    os << "] -> " << handle_text(lf->next) << "\n";
    return;
  }
  const auto& in = std::get<inner_node<V>>(n);
  os << "N " << h.index << " [";
  for (std::size_t i = 0; i < in.entries.fill(); ++i)
    os << (i ? " " : "") << in.entries[i].child.index << " " << in.entries[i].sep;
  os << "] " << in.last.index << "\n";
  for (std::size_t i = 0; i < in.entries.fill(); ++i) write_node(store, in.entries[i].child, os);
  write_node(store, in.last, os);
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline node_handle parse_handle(const std::string& t, std::size_t line_no, bool allow_nil) {
  if (t == "NIL") {
    if (!allow_nil) throw parse_error(line_no, "NIL not allowed here");
    return node_handle::nil();
  }
  try {
    const unsigned long v = std::stoul(t);
    if (v >= node_handle::nil_index) throw parse_error(line_no, "handle out of range: " + t);
    return node_handle{static_cast<std::uint32_t>(v)};
  } catch (const parse_error&) {
    throw;
  } catch (...) {
    throw parse_error(line_no, "bad handle: " + t);
  }
}

template <typename V>
V parse_value(const std::string& t, std::size_t line_no) {
  std::istringstream is(t);
  V v;
  if (!(is >> v) || !is.eof()) throw parse_error(line_no, "bad value: " + t);
  return v;
}

}  // namespace detail

template <std::totally_ordered V>
std::string write_dump(const bplus_tree<V>& tree) {
  std::ostringstream os;
  os << "BPT k=" << tree.k().k() << " root=" << tree.root().index
     << " first=" << tree.first().index << "\n";
  detail::write_node(tree.store(), tree.root(), os);
  return os.str();
}

template <std::totally_ordered V>
void write_dump_file(const bplus_tree<V>& tree, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << write_dump(tree);
}

// Parsed dump, not yet checked against any invariant. Nodes whose fill
// exceeds the capacity 2k cannot be loaded into a store and are kept aside as
// capacity violations.
template <std::totally_ordered V>
struct raw_dump {
  std::uint32_t k = 0;
  node_handle root;
  node_handle first;

  struct raw_leaf {
    node_handle h;
    std::vector<V> values;
    node_handle next;
  };
  struct raw_inner {
    node_handle h;
    std::vector<std::pair<node_handle, V>> entries;
    node_handle last;
  };

  std::vector<raw_leaf> leaves;
  std::vector<raw_inner> inners;
};

template <std::totally_ordered V>
raw_dump<V> parse_dump(std::istream& in) {
  raw_dump<V> out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::unordered_set<std::uint32_t> defined;

  auto bracket_parts = [](const std::string& s, std::size_t line_no)
      -> std::tuple<std::string, std::string, std::string> {
    const auto open = s.find('[');
    const auto close = s.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw parse_error(line_no, "missing [...] list");
    return {s.substr(0, open), s.substr(open + 1, close - open - 1), s.substr(close + 1)};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto head = detail::tokens(line);
    if (head.empty()) continue;

    if (!header_seen) {
      if (head[0] != "BPT") throw parse_error(line_no, "expected BPT header");
      if (head.size() != 4) throw parse_error(line_no, "malformed header");
      auto field = [&](const std::string& t, const std::string& key) -> std::string {
        if (t.rfind(key + "=", 0) != 0) throw parse_error(line_no, "expected " + key + "=");
        return t.substr(key.size() + 1);
      };
      out.k = static_cast<std::uint32_t>(
          detail::parse_value<long long>(field(head[1], "k"), line_no));
      if (out.k == 0) throw parse_error(line_no, "k must be >= 1");
      out.root = detail::parse_handle(field(head[2], "root"), line_no, false);
      out.first = detail::parse_handle(field(head[3], "first"), line_no, false);
      header_seen = true;
      continue;
    }

    auto [before, middle, after] = bracket_parts(line, line_no);
    const auto pre = detail::tokens(before);
    const auto mid = detail::tokens(middle);
    const auto post = detail::tokens(after);
    if (pre.size() != 2) throw parse_error(line_no, "expected kind and handle before [");
    const node_handle h = detail::parse_handle(pre[1], line_no, false);
    if (!defined.insert(h.index).second)
      throw parse_error(line_no, "handle defined twice: " + pre[1]);

    if (pre[0] == "L") {
      if (post.size() != 2 || post[0] != "->")
        throw parse_error(line_no, "leaf line must end with -> <next|NIL>");
      typename raw_dump<V>::raw_leaf lf;
      lf.h = h;
      for (const auto& t : mid) lf.values.push_back(detail::parse_value<V>(t, line_no));
      lf.next = detail::parse_handle(post[1], line_no, true);
      out.leaves.push_back(std::move(lf));
    } else if (pre[0] == "N") {
      if (post.size() != 1) throw parse_error(line_no, "inner line must end with <last>");
      if (mid.size() % 2 != 0) throw parse_error(line_no, "inner list must alternate child sep");
      typename raw_dump<V>::raw_inner nn;
      nn.h = h;
      for (std::size_t i = 0; i < mid.size(); i += 2) {
        nn.entries.emplace_back(detail::parse_handle(mid[i], line_no, false),
                                detail::parse_value<V>(mid[i + 1], line_no));
      }
      nn.last = detail::parse_handle(post[0], line_no, false);
      out.inners.push_back(std::move(nn));
    } else {
      throw parse_error(line_no, "unknown node kind: " + pre[0]);
    }
  }

  if (!header_seen) throw parse_error(line_no, "empty dump");
  return out;
}

template <std::totally_ordered V>
raw_dump<V> parse_dump(const std::string& text) {
  std::istringstream is(text);
  return parse_dump<V>(is);
}

// Result of checking a dump: the capacity pre-check, then (when loadable) the
// view-split checks and the model invariants of the abstraction.
template <std::totally_ordered V>
struct check_result {
  std::vector<refine::check_line> lines;
  std::optional<bplus_tree<V>> tree;

  bool ok() const {
    for (const auto& l : lines) {
      if (!l.ok) return false;
    }
    return true;
  }
};

template <std::totally_ordered V>
check_result<V> run_checks(const raw_dump<V>& raw,
                           search_strategy strategy = search_strategy::binary) {
  check_result<V> out;
  const std::uint32_t cap = 2 * raw.k;

  std::string cap_detail;
  for (const auto& lf : raw.leaves) {
    if (lf.values.size() > cap) {
      cap_detail = "leaf " + std::to_string(lf.h.index) + " holds " +
                   std::to_string(lf.values.size()) + " values, capacity " + std::to_string(cap);
      break;
    }
  }
  if (cap_detail.empty()) {
    for (const auto& nn : raw.inners) {
      if (nn.entries.size() > cap) {
        cap_detail = "inner " + std::to_string(nn.h.index) + " holds " +
                     std::to_string(nn.entries.size()) + " pairs, capacity " + std::to_string(cap);
        break;
      }
    }
  }
  out.lines.push_back({"capacity", cap_detail.empty(), cap_detail});
  if (!cap_detail.empty()) return out;

  node_store<V> store;
  for (const auto& lf : raw.leaves) {
    leaf_node<V> n(cap);
    n.values.assign(std::span<const V>(lf.values));
    n.next = lf.next;
    store.put_at(lf.h, typename node_store<V>::node(std::move(n)));
  }
  for (const auto& nn : raw.inners) {
    inner_node<V> n(cap);
    for (const auto& [child, sep] : nn.entries) n.entries.push_back({child, sep});
    n.last = nn.last;
    store.put_at(nn.h, typename node_store<V>::node(std::move(n)));
  }

  out.tree =
      bplus_tree<V>::adopt(order(raw.k), std::move(store), raw.root, raw.first, strategy);
  refine::report<V> rep = refine::check_view_split(*out.tree);
  for (auto& l : rep.checks) out.lines.push_back(std::move(l));
  if (rep.abstract_tree) {
    const auto inv = model::check_invariants(out.tree->k(), *rep.abstract_tree);
    out.lines.push_back({"balanced", inv.balanced, ""});
    out.lines.push_back({"order", inv.order, ""});
    out.lines.push_back({"aligned", inv.aligned, ""});
    out.lines.push_back({"sorted", inv.sorted, ""});
  }
  return out;
}

inline std::string render_check_lines(const std::vector<refine::check_line>& lines) {
  std::ostringstream os;
  for (const auto& l : lines) {
    os << "CHECK " << l.name << " " << (l.ok ? "ok" : "fail");
    if (!l.detail.empty()) os << " " << l.detail;
    os << "\n";
  }
  return os.str();
}

}  // namespace bptree::io

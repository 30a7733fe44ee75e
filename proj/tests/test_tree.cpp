#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <vector>

#include "bptree/dump.hpp"
#include "bptree/refinement.hpp"
#include "bptree/tree.hpp"

#include "generators.hpp"

using bptree::bplus_tree;
using bptree::node_handle;
using bptree::order;
using bptree::search_strategy;
namespace model = bptree::model;
namespace refine = bptree::refine;
using tree64 = model::alg_tree<std::int64_t>;

namespace {

tree64 e1() {
  return tree64::inner({tree64::leaf({1, 2}), tree64::leaf({3, 4})}, {3});
}

std::vector<std::int64_t> chain_values(const bplus_tree<std::int64_t>& t) {
  return t.values_iter().drain();
}

}  // namespace

TEST_CASE("a fresh tree is a single empty root leaf") {
  bplus_tree<std::int64_t> t((order(1)));
  CHECK(refine::abstract(t) == tree64::leaf({}));
  CHECK(t.first_leaf() == t.root());
  CHECK(t.first() == t.root());
  CHECK(chain_values(t).empty());
}

TEST_CASE("point query on a materialized two-leaf tree") {
  const auto t = refine::materialize(order(1), e1());
  CHECK(t.contains(3));
  CHECK(t.contains(1));
  CHECK_FALSE(t.contains(0));
  CHECK_FALSE(t.contains(5));
}

TEST_CASE("contains agrees with the model on random trees") {
  std::mt19937_64 g(43);
  for (int round = 0; round < 150; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 140), g);
    const auto t = refine::materialize(k, m);
    for (int probe = 0; probe < 30; ++probe) {
      const auto x = static_cast<std::int64_t>(testgen::bounded(g, 600));
      CHECK(t.contains(x) == model::isin(m, x));
    }
  }
}

TEST_CASE("insert splits leaves and keeps the chain linked") {
  auto t = refine::materialize(order(1), e1());
  t.insert(5);
  CHECK(chain_values(t) == std::vector<std::int64_t>{1, 2, 3, 4, 5});
  CHECK(refine::abstract(t) == model::insert(order(1), std::int64_t{5}, e1()));
}

TEST_CASE("inserting a present value changes nothing") {
  auto t = refine::materialize(order(1), e1());
  const auto before = testgen::store_fingerprint(t);
  t.insert(3);
  CHECK(testgen::store_fingerprint(t) == before);
  CHECK(refine::abstract(t) == e1());
}

TEST_CASE("erase merges down to a single empty root leaf") {
  auto t = refine::materialize(order(1), e1());
  for (std::int64_t x : {1, 2, 3, 4}) t.erase(x);
  CHECK(refine::abstract(t) == tree64::leaf({}));
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() == 1);
  CHECK(fr.front() == t.root());
  CHECK(t.first() == t.root());
}

TEST_CASE("erasing an absent value changes nothing") {
  auto t = refine::materialize(order(1), e1());
  const auto before = testgen::store_fingerprint(t);
  t.erase(9);
  CHECK(testgen::store_fingerprint(t) == before);
}

TEST_CASE("mirrored mutations refine the model step by step") {
  std::mt19937_64 g(47);
  for (int round = 0; round < 40; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 3)));
    bplus_tree<std::int64_t> heap(k);
    tree64 m;
    for (int step = 0; step < 250; ++step) {
      const auto x = static_cast<std::int64_t>(testgen::bounded(g, 200));
      if (testgen::bounded(g, 5) < 3) {
        heap.insert(x);
        m = model::insert(k, x, m);
      } else {
        heap.erase(x);
        m = model::erase(k, x, m);
      }
      REQUIRE(refine::abstract(heap) == m);
    }
    REQUIRE(refine::check_refinement(heap, m).ok());
  }
}

TEST_CASE("first_leaf matches the cached handle and the fringe head") {
  std::mt19937_64 g(53);
  bplus_tree<std::int64_t> t((order(2)));
  for (int step = 0; step < 500; ++step) {
    const auto x = static_cast<std::int64_t>(testgen::bounded(g, 400));
    if (testgen::bounded(g, 3) < 2) {
      t.insert(x);
    } else {
      t.erase(x);
    }
    REQUIRE(t.first_leaf() == t.first());
    REQUIRE(refine::fringe(t).front() == t.first());
  }
}

TEST_CASE("leaf iterator yields per-leaf views ending at the marker") {
  const auto t = refine::materialize(order(1), e1());
  auto it = t.leaf_iter();
  REQUIRE(it.has_next());
  auto [v1, n1] = it.next();
  CHECK(std::vector<std::int64_t>(v1.begin(), v1.end()) == std::vector<std::int64_t>{1, 2});
  CHECK_FALSE(n1.is_nil());
  REQUIRE(it.has_next());
  auto [v2, n2] = it.next();
  CHECK(std::vector<std::int64_t>(v2.begin(), v2.end()) == std::vector<std::int64_t>{3, 4});
  CHECK(n2.is_nil());
  CHECK_FALSE(it.has_next());
}

TEST_CASE("leaf iterator on an empty tree yields one empty leaf") {
  bplus_tree<std::int64_t> t((order(2)));
  auto it = t.leaf_iter();
  REQUIRE(it.has_next());
  auto [view, next] = it.next();
  CHECK(view.empty());
  CHECK(next.is_nil());
  CHECK_FALSE(it.has_next());
}

TEST_CASE("values_iter flattens the chain to exactly the leaves") {
  CHECK(refine::materialize(order(1), e1()).values_iter().drain() ==
        std::vector<std::int64_t>{1, 2, 3, 4});

  std::mt19937_64 g(59);
  for (int round = 0; round < 200; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 160), g);
    const auto t = refine::materialize(k, m);
    REQUIRE(t.values_iter().drain() == model::leaves(m));
  }
}

TEST_CASE("leaf_nodes_lrange locates the home leaf") {
  const auto t = refine::materialize(order(1), e1());
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() == 2);
  CHECK(t.leaf_nodes_lrange(2) == fr[0]);
  CHECK(t.leaf_nodes_lrange(4) == fr[1]);
  CHECK(t.leaf_nodes_lrange(3) == fr[1]);  // probe equal to the separator
  CHECK(t.leaf_nodes_lrange(0) == t.first_leaf());
  CHECK(t.leaf_nodes_lrange(99) == fr[1]);
}

TEST_CASE("leaf_nodes_lrange suffix refines the model leaf-node suffix") {
  std::mt19937_64 g(61);
  for (int round = 0; round < 150; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 140), g);
    const auto t = refine::materialize(k, m);
    const auto x = static_cast<std::int64_t>(testgen::bounded(g, 600));
    const auto expect = model::leaf_nodes_lrange(m, x);

    node_handle h = t.leaf_nodes_lrange(x);
    std::vector<tree64> got;
    while (!h.is_nil()) {
      const auto& lf = t.store().leaf(h);
      got.push_back(tree64::leaf({lf.values.view().begin(), lf.values.view().end()}));
      h = lf.next;
    }
    REQUIRE(got == expect);
  }
}

TEST_CASE("lrange cursor drains the lower-bounded range") {
  const auto t = refine::materialize(order(1), e1());
  CHECK(t.lrange(2).drain() == std::vector<std::int64_t>{2, 3, 4});
  CHECK(t.lrange(10).drain().empty());
  CHECK(t.lrange(-5).drain() == std::vector<std::int64_t>{1, 2, 3, 4});

  std::mt19937_64 g(67);
  for (int round = 0; round < 150; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 140), g);
    const auto t2 = refine::materialize(k, m);
    for (int probe = 0; probe < 10; ++probe) {
      const auto x = static_cast<std::int64_t>(testgen::bounded(g, 600));
      REQUIRE(t2.lrange(x).drain() == model::lrange(m, x));
    }
  }
}

TEST_CASE("read-only operations leave the store bit-identical") {
  std::mt19937_64 g(71);
  const order k(2);
  const auto m = testgen::random_tree(k, 120, g);
  const auto t = refine::materialize(k, m);
  const auto before = testgen::store_fingerprint(t);

  (void)t.contains(17);
  (void)t.first_leaf();
  (void)t.leaf_nodes_lrange(300);
  (void)t.lrange(42).drain();
  (void)t.values_iter().drain();
  for (auto it = t.leaf_iter(); it.has_next();) (void)it.next();

  CHECK(testgen::store_fingerprint(t) == before);
}

TEST_CASE("no live node exceeds capacity and none leak") {
  std::mt19937_64 g(73);
  bplus_tree<std::int64_t> t((order(2)));
  for (int step = 0; step < 800; ++step) {
    const auto x = static_cast<std::int64_t>(testgen::bounded(g, 500));
    if (testgen::bounded(g, 2) == 0) {
      t.insert(x);
    } else {
      t.erase(x);
    }
  }
  std::size_t reachable = 0;
  std::vector<node_handle> stack{t.root()};
  while (!stack.empty()) {
    const node_handle h = stack.back();
    stack.pop_back();
    ++reachable;
    const auto& n = t.store().get(h);
    if (const auto* lf = std::get_if<bptree::leaf_node<std::int64_t>>(&n)) {
      REQUIRE(lf->values.fill() <= t.capacity());
    } else {
      const auto& in = std::get<bptree::inner_node<std::int64_t>>(n);
      REQUIRE(in.entries.fill() <= t.capacity());
      for (std::size_t i = 0; i < in.entries.fill(); ++i) stack.push_back(in.entries[i].child);
      stack.push_back(in.last);
    }
  }
  CHECK(reachable == t.store().live_count());
}

TEST_CASE("strategies produce identical trees and dumps") {
  std::mt19937_64 g(79);
  for (int round = 0; round < 20; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    bplus_tree<std::int64_t> lin(k, search_strategy::linear);
    bplus_tree<std::int64_t> bin(k, search_strategy::binary);
    for (int step = 0; step < 300; ++step) {
      const auto x = static_cast<std::int64_t>(testgen::bounded(g, 250));
      if (testgen::bounded(g, 5) < 3) {
        lin.insert(x);
        bin.insert(x);
      } else {
        lin.erase(x);
        bin.erase(x);
      }
    }
    REQUIRE(refine::abstract(lin) == refine::abstract(bin));
    REQUIRE(bptree::io::write_dump(lin) == bptree::io::write_dump(bin));
  }
}

TEST_CASE("cursors notice mutations when epoch checking is on") {
  const bool saved = bplus_tree<std::int64_t>::debug_epochs_flag();
  bplus_tree<std::int64_t>::debug_epochs_flag() = true;

  bplus_tree<std::int64_t> t((order(1)));
  for (std::int64_t x : {1, 2, 3, 4}) t.insert(x);
  auto cursor = t.values_iter();
  REQUIRE(cursor.has_next());
  (void)cursor.next();
  t.insert(9);
  CHECK_THROWS_AS(cursor.drain(), std::logic_error);

  bplus_tree<std::int64_t>::debug_epochs_flag() = saved;
}

TEST_CASE("rejects k = 0") {
  CHECK_THROWS_AS(bplus_tree<std::int64_t>(order(0)), std::invalid_argument);
}

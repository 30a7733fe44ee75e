#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "bptree/refinement.hpp"
#include "bptree/tree.hpp"

#include "generators.hpp"

using bptree::bplus_tree;
using bptree::node_handle;
using bptree::order;
namespace model = bptree::model;
namespace refine = bptree::refine;
using tree64 = model::alg_tree<std::int64_t>;

namespace {

tree64 e1() {
  return tree64::inner({tree64::leaf({1, 2}), tree64::leaf({3, 4})}, {3});
}

bool has_violation(const refine::report<std::int64_t>& r, const std::string& name) {
  for (const auto& c : r.violations()) {
    if (c.name == name) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("abstract of a materialized tree is the original") {
  CHECK(refine::abstract(refine::materialize(order(1), e1())) == e1());
  CHECK(refine::abstract(bplus_tree<std::int64_t>(order(3))) == tree64::leaf({}));
}

TEST_CASE("abstract . materialize is the identity on random valid trees") {
  std::mt19937_64 g(83);
  for (int round = 0; round < 10000; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 5)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 180), g);
    REQUIRE(refine::abstract(refine::materialize(k, m)) == m);
  }
}

TEST_CASE("materialize wires the chain in fringe order") {
  const auto t = refine::materialize(order(1), e1());
  auto it = t.leaf_iter();
  auto [v1, n1] = it.next();
  CHECK(std::vector<std::int64_t>(v1.begin(), v1.end()) == std::vector<std::int64_t>{1, 2});
  auto [v2, n2] = it.next();
  CHECK(std::vector<std::int64_t>(v2.begin(), v2.end()) == std::vector<std::int64_t>{3, 4});
  CHECK(n2.is_nil());
}

TEST_CASE("materialize rejects over-capacity nodes") {
  // 3 pairs in one node cannot fit capacity 2k = 2
  const auto wide = tree64::inner(
      {tree64::leaf({1}), tree64::leaf({2}), tree64::leaf({3}), tree64::leaf({4})}, {2, 3, 4});
  CHECK_THROWS_AS(refine::materialize(order(1), wide), bptree::capacity_exceeded);
  // 2k+1 values in a leaf
  CHECK_THROWS_AS(refine::materialize(order(1), tree64::leaf({1, 2, 3})),
                  bptree::capacity_exceeded);
}

TEST_CASE("fringe lists leaf handles in structural order") {
  const auto t = refine::materialize(order(1), e1());
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() == 2);
  CHECK(t.store().leaf(fr[0]).values[0] == 1);
  CHECK(t.store().leaf(fr[1]).values[0] == 3);

  bplus_tree<std::int64_t> single((order(2)));
  const auto fr1 = refine::fringe(single);
  REQUIRE(fr1.size() == 1);
  CHECK(fr1.front() == single.root());

  std::mt19937_64 g(89);
  for (int round = 0; round < 200; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 160), g);
    REQUIRE(refine::fringe(refine::materialize(k, m)).size() == model::leaf_nodes(m).size());
  }
}

TEST_CASE("check_view_split passes on materialized and mutated trees") {
  std::mt19937_64 g(97);
  for (int round = 0; round < 100; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 4)));
    const auto m = testgen::random_tree(k, testgen::bounded(g, 140), g);
    auto t = refine::materialize(k, m);
    REQUIRE(refine::check_view_split(t).ok());
    t.insert(static_cast<std::int64_t>(testgen::bounded(g, 600)));
    t.erase(static_cast<std::int64_t>(testgen::bounded(g, 600)));
    REQUIRE(refine::check_view_split(t).ok());
  }
}

TEST_CASE("fault injection: rerouted next link skips a sibling") {
  std::mt19937_64 g(101);
  const order k(2);
  auto t = refine::materialize(k, testgen::random_tree(k, 60, g));
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() >= 3);
  // first leaf now points past its sibling
  t.store().leaf(fr[0]).next = fr[2];
  const auto r = refine::check_view_split(t);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "chain"));
}

TEST_CASE("fault injection: chain broken early") {
  std::mt19937_64 g(103);
  const order k(2);
  auto t = refine::materialize(k, testgen::random_tree(k, 60, g));
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() >= 2);
  t.store().leaf(fr[0]).next = node_handle::nil();
  const auto r = refine::check_view_split(t);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "chain"));
}

TEST_CASE("fault injection: inner entry aliases a leaf handle") {
  std::mt19937_64 g(107);
  const order k(1);
  auto t = refine::materialize(k, testgen::random_tree(k, 24, g));
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() >= 2);
  auto& root = t.store().inner(t.root());
  REQUIRE(root.entries.fill() >= 1);
  // the same leaf handle is now reachable through two parents
  const node_handle victim = fr.back();
  auto& parent_of_first = t.store().inner(root.entries[0].child);
  parent_of_first.entries[0].child = victim;
  const auto r = refine::check_view_split(t);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "separation"));
}

TEST_CASE("fault injection: chain detours through an orphan leaf") {
  std::mt19937_64 g(211);
  const order k(2);
  auto t = refine::materialize(k, testgen::random_tree(k, 60, g));
  const auto fr = refine::fringe(t);
  REQUIRE(fr.size() >= 2);
  bptree::leaf_node<std::int64_t> orphan(t.capacity());
  orphan.values.push_back(-100);
  orphan.next = fr[1];
  const auto oh = t.store().alloc(bptree::node_store<std::int64_t>::node(std::move(orphan)));
  t.store().leaf(fr[0]).next = oh;
  const auto r = refine::check_view_split(t);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "chain"));
  CHECK(has_violation(r, "leaves"));
}

TEST_CASE("fault injection: leaf content diverges from the chain view") {
  std::mt19937_64 g(109);
  const order k(2);
  auto t = refine::materialize(k, testgen::random_tree(k, 60, g));
  const auto fr = refine::fringe(t);
  auto& lf = t.store().leaf(fr[fr.size() / 2]);
  REQUIRE(lf.values.fill() >= 2);
  std::swap(lf.values[0], lf.values[1]);
  // structure still splits cleanly; the unsorted content shows up in the
  // model invariants instead
  const auto expected = refine::abstract(t);
  auto rep = refine::check_refinement(t, expected);
  CHECK(has_violation(rep, "sorted"));
}

TEST_CASE("fault injection: dangling child handle") {
  const order k(1);
  auto t = refine::materialize(k, e1());
  t.store().inner(t.root()).last = node_handle{999};
  const auto r = refine::check_view_split(t);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "abstraction"));
}

TEST_CASE("fault injection: structural cycle is rejected") {
  std::mt19937_64 g(113);
  const order k(1);
  auto t = refine::materialize(k, testgen::random_tree(k, 30, g));
  auto& root = t.store().inner(t.root());
  root.entries[0].child = t.root();  // child points back at the root
  CHECK_THROWS_AS(refine::abstract(t), bptree::cyclic_structure);
  const auto r = refine::check_view_split(t);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "abstraction"));
}

TEST_CASE("check_refinement compares structure-exactly") {
  const auto t = refine::materialize(order(1), e1());
  CHECK(refine::check_refinement(t, e1()).ok());

  // same leaves, different structure
  const auto other = tree64::inner({tree64::leaf({1}), tree64::leaf({2, 3, 4})}, {2});
  const auto r = refine::check_refinement(t, other);
  CHECK_FALSE(r.ok());
  CHECK(has_violation(r, "equal"));
}

TEST_CASE("check_refinement over mirrored random runs") {
  std::mt19937_64 g(127);
  for (int round = 0; round < 30; ++round) {
    const order k(1 + static_cast<std::uint32_t>(testgen::bounded(g, 3)));
    bplus_tree<std::int64_t> heap(k);
    tree64 m;
    for (int step = 0; step < 120; ++step) {
      const auto x = static_cast<std::int64_t>(testgen::bounded(g, 150));
      if (testgen::bounded(g, 5) < 3) {
        heap.insert(x);
        m = model::insert(k, x, m);
      } else {
        heap.erase(x);
        m = model::erase(k, x, m);
      }
      REQUIRE(refine::check_refinement(heap, m).ok());
    }
  }
}

#include <catch2/catch_amalgamated.hpp>

#include "bptree/partial_array.hpp"

using bptree::partial_array;

TEST_CASE("partial_array basic fill accounting") {
  partial_array<int> a(4);
  REQUIRE(a.capacity() == 4);
  REQUIRE(a.fill() == 0);
  REQUIRE(a.empty());

  a.push_back(10);
  a.push_back(20);
  REQUIRE(a.fill() == 2);
  REQUIRE(a[0] == 10);
  REQUIRE(a[1] == 20);
  REQUIRE(!a.full());

  a.push_back(30);
  a.push_back(40);
  REQUIRE(a.full());
  REQUIRE(a.capacity() == 4);  // capacity never changes
}

TEST_CASE("partial_array insert_at and erase_at shift elements") {
  partial_array<int> a(5);
  a.push_back(1);
  a.push_back(3);
  a.push_back(5);

  a.insert_at(1, 2);
  REQUIRE(a.fill() == 4);
  REQUIRE(a[0] == 1);
  REQUIRE(a[1] == 2);
  REQUIRE(a[2] == 3);
  REQUIRE(a[3] == 5);

  a.erase_at(2);
  REQUIRE(a.fill() == 3);
  REQUIRE(a[2] == 5);

  a.erase_at(0);
  REQUIRE(a.front() == 2);
  REQUIRE(a.back() == 5);
}

TEST_CASE("partial_array assign and append from spans") {
  partial_array<int> a(6);
  const int xs[] = {4, 5, 6};
  a.assign(std::span<const int>(xs));
  REQUIRE(a.fill() == 3);

  const int ys[] = {7, 8};
  a.append(std::span<const int>(ys));
  REQUIRE(a.fill() == 5);
  REQUIRE(a.back() == 8);

  auto v = a.view();
  REQUIRE(v.size() == 5);
  REQUIRE(v[0] == 4);

  a.clear();
  REQUIRE(a.fill() == 0);
  REQUIRE(a.capacity() == 6);
}

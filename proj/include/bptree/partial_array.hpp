#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bptree {

// Fixed-capacity buffer with a fill count. Slots at index >= fill() are
// undefined and reads there are rejected; the capacity is set once at
// construction and never changes.
template <typename E>
class partial_array {
 public:
  explicit partial_array(std::uint32_t capacity) : buf_(capacity) {}

  std::uint32_t capacity() const { return static_cast<std::uint32_t>(buf_.size()); }
  std::uint32_t fill() const { return fill_; }
  bool empty() const { return fill_ == 0; }
  bool full() const { return fill_ == capacity(); }

  const E& operator[](std::size_t i) const {
    assert(i < fill_ && "partial_array: read beyond fill");
    return buf_[i];
  }
  E& operator[](std::size_t i) {
    assert(i < fill_ && "partial_array: read beyond fill");
    return buf_[i];
  }

  const E& front() const { return (*this)[0]; }
  const E& back() const { return (*this)[fill_ - 1]; }

  std::span<const E> view() const { return {buf_.data(), fill_}; }

  void push_back(E value) {
    assert(fill_ < capacity() && "partial_array: overflow");
    buf_[fill_++] = std::move(value);
  }

  void pop_back() {
    assert(fill_ > 0);
    --fill_;
  }

  void insert_at(std::size_t i, E value) {
    assert(i <= fill_);
    assert(fill_ < capacity() && "partial_array: overflow");
    for (std::size_t j = fill_; j > i; --j) buf_[j] = std::move(buf_[j - 1]);
    buf_[i] = std::move(value);
    ++fill_;
  }

  void erase_at(std::size_t i) {
    assert(i < fill_);
    for (std::size_t j = i; j + 1 < fill_; ++j) buf_[j] = std::move(buf_[j + 1]);
    --fill_;
  }

  void clear() { fill_ = 0; }

  void assign(std::span<const E> values) {
    assert(values.size() <= capacity());
    for (std::size_t i = 0; i < values.size(); ++i) buf_[i] = values[i];
    fill_ = static_cast<std::uint32_t>(values.size());
  }

  void append(std::span<const E> values) {
    assert(fill_ + values.size() <= capacity());
    for (const E& v : values) buf_[fill_++] = v;
  }

 private:
  std::vector<E> buf_;
  std::uint32_t fill_ = 0;
};

}  // namespace bptree

#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <stdexcept>

namespace nocf {

/// Bounded one-directional word queue. Producers must check `has_space()`
/// and hold their word when the queue is full.
template <typename Word>
class FifoLink {
 public:
  explicit FifoLink(std::size_t depth = 4) : depth_(depth) {
    if (depth_ == 0) throw std::invalid_argument("link depth must be positive");
  }

  std::size_t depth() const { return depth_; }
  std::size_t size() const { return q_.size(); }
  bool empty() const { return q_.empty(); }
  std::size_t free_slots() const { return depth_ - q_.size(); }
  bool has_space(std::size_t n = 1) const { return q_.size() + n <= depth_; }

  bool try_push(Word w) {
    if (!has_space()) return false;
    q_.push_back(w);
    return true;
  }

  std::optional<Word> pop() {
    if (q_.empty()) return std::nullopt;
    Word w = q_.front();
    q_.pop_front();
    return w;
  }

  const std::deque<Word>& contents() const { return q_; }

  friend bool operator==(const FifoLink&, const FifoLink&) = default;

 private:
  std::size_t depth_;
  std::deque<Word> q_;
};

}  // namespace nocf

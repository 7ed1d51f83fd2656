#ifndef BISO_PERMUTATION_HPP
#define BISO_PERMUTATION_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace biso {

// Bijection on {0, ..., n-1} stored as a rank map: rank(i) is the position
// assigned to index i. Read as a function, p(i) = rank(i).
//
// Row and column estimates use this map with rank(i) = estimated latent
// position of observed row i, so sorting observed rows by rank recovers the
// latent (monotone) order.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> ranks) : ranks_(std::move(ranks)) {
    std::vector<char> seen(ranks_.size(), 0);
    for (std::size_t r : ranks_) {
      if (r >= ranks_.size() || seen[r])
        throw std::invalid_argument("Permutation: ranks are not a bijection of [0, " +
                                    std::to_string(ranks_.size()) + ")");
      seen[r] = 1;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    return Permutation(std::move(r), unchecked{});
  }

  // order[k] is the index placed at position k.
  static Permutation from_order(const std::vector<std::size_t>& order) {
    return Permutation(order).inverse();
  }

  static Permutation uniform(std::size_t n, Rng& rng) {
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), std::size_t{0});
    std::shuffle(r.begin(), r.end(), rng);
    return Permutation(std::move(r), unchecked{});
  }

  std::size_t size() const noexcept { return ranks_.size(); }
  std::size_t operator()(std::size_t i) const noexcept { return ranks_[i]; }
  const std::vector<std::size_t>& ranks() const noexcept { return ranks_; }

  // Indices listed by increasing rank.
  std::vector<std::size_t> order() const {
    std::vector<std::size_t> o(ranks_.size());
    for (std::size_t i = 0; i < ranks_.size(); ++i) o[ranks_[i]] = i;
    return o;
  }

  Permutation inverse() const { return Permutation(order(), unchecked{}); }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < ranks_.size(); ++i)
      if (ranks_[i] != i) return false;
    return true;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  struct unchecked {};
  Permutation(std::vector<std::size_t> ranks, unchecked) : ranks_(std::move(ranks)) {}

  std::vector<std::size_t> ranks_;
};

// (p o q)(i) = p(q(i)).
inline Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw std::invalid_argument("compose: length mismatch");
  std::vector<std::size_t> r(p.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p(q(i));
  return Permutation(std::move(r));
}

// Ranks that sort `scores` ascending, ties broken by smaller index first.
inline Permutation ranks_ascending(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return Permutation::from_order(order);
}

}  // namespace biso

#endif  // BISO_PERMUTATION_HPP

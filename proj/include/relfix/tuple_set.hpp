#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace relfix {

/// Dense relation over a universe of at most 64 atoms. A tuple (t1..tk) lives
/// in word number(t1..t(k-1)) at bit tk, so unary sets are a single word and
/// each row of a binary relation is one word.
class TupleSet {
 public:
  using Words = boost::container::small_vector<std::uint64_t, 16>;
  static constexpr std::uint32_t kMaxAtoms = 64;

  TupleSet() = default;
  TupleSet(std::uint32_t n, std::uint32_t arity);

  static TupleSet unary(std::uint32_t n, std::uint64_t mask);
  static TupleSet single(std::uint32_t n, std::span<const std::uint32_t> tuple);
  static TupleSet iden(std::uint32_t n, std::uint64_t over);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t arity() const noexcept { return arity_; }
  std::size_t words() const noexcept { return w_.size(); }
  std::uint64_t word(std::size_t i) const noexcept { return w_[i]; }
  std::uint64_t& word(std::size_t i) noexcept { return w_[i]; }
  /// The atoms of a unary set.
  std::uint64_t mask() const noexcept { return w_.empty() ? 0 : w_[0]; }

  bool empty() const noexcept;
  std::size_t count() const noexcept;
  bool contains(std::span<const std::uint32_t> tuple) const noexcept;
  void insert(std::span<const std::uint32_t> tuple) noexcept;
  void erase(std::span<const std::uint32_t> tuple) noexcept;
  bool subset_of(const TupleSet& o) const noexcept;
  bool intersects(const TupleSet& o) const noexcept;

  TupleSet& operator|=(const TupleSet& o) noexcept;
  TupleSet& operator&=(const TupleSet& o) noexcept;
  TupleSet& operator-=(const TupleSet& o) noexcept;
  friend bool operator==(const TupleSet& a, const TupleSet& b) noexcept {
    return a.arity_ == b.arity_ && a.w_ == b.w_;
  }

  /// Calls fn(tuple) for each member in increasing lexicographic order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<std::uint32_t> t(arity_);
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      for (std::uint64_t bits = w_[wi]; bits; bits &= bits - 1) {
        std::size_t rest = wi;
        for (std::uint32_t k = arity_ - 1; k-- > 0;) {
          t[k] = static_cast<std::uint32_t>(rest % n_);
          rest /= n_;
        }
        t[arity_ - 1] = static_cast<std::uint32_t>(std::countr_zero(bits));
        fn(static_cast<const std::vector<std::uint32_t>&>(t));
      }
    }
  }

  std::size_t hash() const noexcept;

 private:
  std::uint32_t n_ = 0;
  std::uint32_t arity_ = 0;
  Words w_;
};

TupleSet operator|(TupleSet a, const TupleSet& b);
TupleSet operator&(TupleSet a, const TupleSet& b);
TupleSet operator-(TupleSet a, const TupleSet& b);
TupleSet join(const TupleSet& a, const TupleSet& b);
TupleSet product(const TupleSet& a, const TupleSet& b);
TupleSet transpose(const TupleSet& a);
TupleSet closure(const TupleSet& a);

}  // namespace relfix

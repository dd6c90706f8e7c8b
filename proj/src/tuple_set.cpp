#include "relfix/tuple_set.hpp"

#include <cassert>

#include "relfix/errors.hpp"

namespace relfix {

namespace {

std::size_t word_count(std::uint32_t n, std::uint32_t arity) {
  std::size_t w = 1;
  for (std::uint32_t i = 1; i < arity; ++i) {
    w *= n;
    if (w > (std::size_t{1} << 20)) throw ResourceError("relation of arity " + std::to_string(arity) + " over " + std::to_string(n) + " atoms is too large");
  }
  return w;
}

std::size_t tuple_word(std::uint32_t n, std::span<const std::uint32_t> t) {
  std::size_t wi = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) wi = wi * n + t[k];
  return wi;
}

}  // namespace

TupleSet::TupleSet(std::uint32_t n, std::uint32_t arity) : n_(n), arity_(arity) {
  if (n > kMaxAtoms) throw ResourceError("universe has more than 64 atoms");
  w_.assign(arity == 0 ? 0 : word_count(n, arity), 0);
}

TupleSet TupleSet::unary(std::uint32_t n, std::uint64_t mask) {
  TupleSet t(n, 1);
  t.w_[0] = mask;
  return t;
}

TupleSet TupleSet::single(std::uint32_t n, std::span<const std::uint32_t> tuple) {
  TupleSet t(n, static_cast<std::uint32_t>(tuple.size()));
  t.insert(tuple);
  return t;
}

TupleSet TupleSet::iden(std::uint32_t n, std::uint64_t over) {
  TupleSet t(n, 2);
  for (std::uint64_t b = over; b; b &= b - 1) {
    auto i = std::countr_zero(b);
    t.w_[i] |= std::uint64_t{1} << i;
  }
  return t;
}

bool TupleSet::empty() const noexcept {
  for (auto x : w_)
    if (x) return false;
  return true;
}

std::size_t TupleSet::count() const noexcept {
  std::size_t c = 0;
  for (auto x : w_) c += std::popcount(x);
  return c;
}

bool TupleSet::contains(std::span<const std::uint32_t> t) const noexcept {
  return (w_[tuple_word(n_, t)] >> t.back()) & 1;
}

void TupleSet::insert(std::span<const std::uint32_t> t) noexcept {
  w_[tuple_word(n_, t)] |= std::uint64_t{1} << t.back();
}

void TupleSet::erase(std::span<const std::uint32_t> t) noexcept {
  w_[tuple_word(n_, t)] &= ~(std::uint64_t{1} << t.back());
}

bool TupleSet::subset_of(const TupleSet& o) const noexcept {
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & ~o.w_[i]) return false;
  return true;
}

bool TupleSet::intersects(const TupleSet& o) const noexcept {
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] & o.w_[i]) return true;
  return false;
}

TupleSet& TupleSet::operator|=(const TupleSet& o) noexcept {
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
  return *this;
}

TupleSet& TupleSet::operator&=(const TupleSet& o) noexcept {
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  return *this;
}

TupleSet& TupleSet::operator-=(const TupleSet& o) noexcept {
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
  return *this;
}

std::size_t TupleSet::hash() const noexcept {
  std::size_t h = arity_ * 0x9e3779b97f4a7c15ULL;
  for (auto x : w_) h = (h ^ x) * 0x100000001b3ULL + (h >> 29);
  return h;
}

TupleSet operator|(TupleSet a, const TupleSet& b) { return a |= b; }
TupleSet operator&(TupleSet a, const TupleSet& b) { return a &= b; }
TupleSet operator-(TupleSet a, const TupleSet& b) { return a -= b; }

TupleSet join(const TupleSet& a, const TupleSet& b) {
  const std::uint32_t n = a.n(), p = a.arity(), q = b.arity();
  assert(p + q >= 3);
  if (q == 1) {
    TupleSet out(n, p - 1);
    const std::uint64_t m = b.word(0);
    for (std::size_t pi = 0; pi < a.words(); ++pi)
      if (a.word(pi) & m) out.word(pi / n) |= std::uint64_t{1} << (pi % n);
    return out;
  }
  TupleSet out(n, p + q - 2);
  const std::size_t block = b.words() / n;
  for (std::size_t pi = 0; pi < a.words(); ++pi) {
    for (std::uint64_t bits = a.word(pi); bits; bits &= bits - 1) {
      std::size_t x = std::countr_zero(bits);
      for (std::size_t j = 0; j < block; ++j) out.word(pi * block + j) |= b.word(x * block + j);
    }
  }
  return out;
}

TupleSet product(const TupleSet& a, const TupleSet& b) {
  const std::uint32_t n = a.n();
  TupleSet out(n, a.arity() + b.arity());
  const std::size_t block = b.words();
  for (std::size_t pi = 0; pi < a.words(); ++pi) {
    for (std::uint64_t bits = a.word(pi); bits; bits &= bits - 1) {
      std::size_t ta = pi * n + std::countr_zero(bits);
      for (std::size_t j = 0; j < block; ++j) out.word(ta * block + j) = b.word(j);
    }
  }
  return out;
}

TupleSet transpose(const TupleSet& a) {
  TupleSet out(a.n(), 2);
  for (std::size_t x = 0; x < a.words(); ++x)
    for (std::uint64_t bits = a.word(x); bits; bits &= bits - 1)
      out.word(std::countr_zero(bits)) |= std::uint64_t{1} << x;
  return out;
}

TupleSet closure(const TupleSet& a) {
  TupleSet out = a;
  const std::size_t n = a.n();
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    for (std::size_t i = 0; i < n; ++i)
      if (out.word(i) & bit) out.word(i) |= out.word(k);
  }
  return out;
}

}  // namespace relfix

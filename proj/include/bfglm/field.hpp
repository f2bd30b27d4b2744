#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bfglm/errors.hpp"

namespace bfglm {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Canonical representative in [0, p).
using FieldElem = u64;

inline constexpr u64 kPrime65537 = 65537;
inline constexpr u64 kPrime101 = 101;

bool is_prime(u64 n);

class Modulus {
 public:
  explicit Modulus(u64 p);

  u64 p() const { return p_; }

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const { return rem_small((u128)a * b); }
  u64 reduce(u128 x) const {
    u64 hi = static_cast<u64>(x >> 64);
    if (hi >= p_) x = ((u128)(hi % p_) << 64) | static_cast<u64>(x);
    return rem_small(x);
  }
  u64 pow(u64 a, u64 e) const;
  u64 inv(u64 a) const;  // throws DivisionByZero
  u64 div(u64 a, u64 b) const { return mul(a, inv(b)); }
  u64 from_int(long long v) const;

  // Number of products a*b (a, b < p) that can be summed in a u128
  // without overflow.
  u64 lazy_limit() const { return lazy_; }

  bool operator==(const Modulus& o) const { return p_ == o.p_; }

 private:
  // x mod p for x < p * 2^64, by the precomputed inverse of the normalized
  // modulus (Moller-Granlund)
  u64 rem_small(u128 x) const {
    u64 u1 = static_cast<u64>(x >> (64 - shift_)), u0 = static_cast<u64>(x) << shift_;
    u128 q = (u128)vinv_ * u1 + ((u128)u1 << 64 | u0);
    u64 q1 = static_cast<u64>(q >> 64) + 1, q0 = static_cast<u64>(q);
    u64 r = u0 - q1 * dnorm_;
    if (r > q0) r += dnorm_;
    if (r >= dnorm_) r -= dnorm_;
    return r >> shift_;
  }

  u64 p_;
  u64 lazy_;
  int shift_;
  u64 dnorm_, vinv_;
};

// Accumulates sum of products with delayed reduction.
class LazyAcc {
 public:
  explicit LazyAcc(const Modulus& K) : K_(K), lim_(K.lazy_limit()) {}
  void add(u64 a, u64 b) {
    acc_ += (u128)a * b;
    if (++cnt_ == lim_) {
      acc_ = K_.reduce(acc_);
      cnt_ = 1;
    }
  }
  void add(u64 a) {
    acc_ += a;
    if (++cnt_ == lim_) {
      acc_ = K_.reduce(acc_);
      cnt_ = 1;
    }
  }
  u64 get() const { return K_.reduce(acc_); }

 private:
  const Modulus& K_;
  u64 lim_;
  u128 acc_ = 0;
  u64 cnt_ = 0;
};

class Rng {
 public:
  explicit Rng(u64 seed = 0) : seed_(seed), eng_(seed) {}
  u64 seed() const { return seed_; }
  u64 next() { return eng_(); }
  u64 below(u64 bound);  // uniform in [0, bound)
  FieldElem elem(const Modulus& K) { return below(K.p()); }
  FieldElem nonzero(const Modulus& K) { return 1 + below(K.p() - 1); }
  // Independent stream derived from this one's seed and a tag; does not
  // advance this generator.
  Rng child(u64 tag) const;

 private:
  u64 seed_;
  std::mt19937_64 eng_;
};

u64 splitmix64(u64 x);

}  // namespace bfglm

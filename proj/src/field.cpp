#include "bfglm/field.hpp"

#include <limits>
#include <string>

namespace bfglm {

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for all 64-bit n.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

Modulus::Modulus(u64 p) : p_(p) {
  if (p >= (1ull << 62)) throw InvalidInput("modulus must be below 2^62");
  if (!is_prime(p)) throw InvalidInput("modulus " + std::to_string(p) + " is not prime");
  shift_ = __builtin_clzll(p);
  dnorm_ = p << shift_;
  vinv_ = static_cast<u64>(~(u128)0 / dnorm_);  // floor((2^128 - 1) / d) - 2^64
  u128 sq = (u128)(p - 1) * (p - 1);
  u128 lim = sq == 0 ? std::numeric_limits<u128>::max() : std::numeric_limits<u128>::max() / sq;
  lazy_ = lim > (u128)std::numeric_limits<u64>::max() / 2 ? std::numeric_limits<u64>::max() / 2
                                                             : static_cast<u64>(lim);
  if (lazy_ < 2) lazy_ = 2;
  // keep one slot of headroom for the residue carried after a reduction
  lazy_ -= 1;
}

u64 Modulus::pow(u64 a, u64 e) const { return powmod(a, e, p_); }

u64 Modulus::inv(u64 a) const {
  if (a % p_ == 0) throw DivisionByZero("inverse of zero");
  // extended Euclid on signed 128-bit values
  __int128 t = 0, nt = 1, r = p_, nr = a % p_;
  while (nr != 0) {
    __int128 q = r / nr;
    __int128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (t < 0) t += p_;
  return static_cast<u64>(t);
}

u64 Modulus::from_int(long long v) const {
  long long m = static_cast<long long>(p_);
  long long r = v % m;
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

u64 Rng::below(u64 bound) {
  std::uniform_int_distribution<u64> dist(0, bound - 1);
  return dist(eng_);
}

Rng Rng::child(u64 tag) const { return Rng(splitmix64(seed_ ^ splitmix64(tag + 0x5bd1e995ull))); }

}  // namespace bfglm

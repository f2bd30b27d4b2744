#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "bfglm/field.hpp"

namespace bfglm {

// Dense univariate polynomial, lowest degree first, no trailing zeros.
struct Poly {
  std::vector<u64> c;

  Poly() = default;
  explicit Poly(std::vector<u64> coeffs) : c(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<u64> coeffs) : c(coeffs) { trim(); }

  static Poly constant(u64 v) { return Poly(std::vector<u64>{v}); }
  static Poly monomial(std::size_t k, u64 v = 1);

  int deg() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  u64 lc() const { return c.empty() ? 0 : c.back(); }
  u64 operator[](std::size_t i) const { return i < c.size() ? c[i] : 0; }
  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool operator==(const Poly& o) const = default;
};

using ScalarSeq = std::vector<u64>;

struct NotInvertible : Error {
  Poly gcd;
  NotInvertible(const std::string& what, Poly g) : Error(what), gcd(std::move(g)) {}
};

std::string to_string(const Poly& a);

Poly add(const Modulus& K, const Poly& a, const Poly& b);
Poly sub(const Modulus& K, const Poly& a, const Poly& b);
Poly neg(const Modulus& K, const Poly& a);
Poly scale(const Modulus& K, const Poly& a, u64 s);
Poly mul(const Modulus& K, const Poly& a, const Poly& b);
Poly mul_trunc(const Modulus& K, const Poly& a, const Poly& b, std::size_t n);
Poly trunc(const Poly& a, std::size_t n);
Poly shift_up(const Poly& a, std::size_t k);    // a * T^k
Poly shift_down(const Poly& a, std::size_t k);  // a div T^k
std::pair<Poly, Poly> quo_rem(const Modulus& K, const Poly& a, const Poly& b);
Poly quo(const Modulus& K, const Poly& a, const Poly& b);
Poly rem(const Modulus& K, const Poly& a, const Poly& b);
Poly monic(const Modulus& K, const Poly& a);
Poly gcd(const Modulus& K, const Poly& a, const Poly& b);
Poly lcm(const Modulus& K, const Poly& a, const Poly& b);
// Inverse of a modulo m; throws NotInvertible carrying gcd(a, m).
Poly modinv(const Modulus& K, const Poly& a, const Poly& m);
Poly mulmod(const Modulus& K, const Poly& a, const Poly& b, const Poly& m);
Poly divmod(const Modulus& K, const Poly& a, const Poly& b, const Poly& m);  // a / b mod m
u64 eval(const Modulus& K, const Poly& a, u64 x);
Poly derivative(const Modulus& K, const Poly& a);
// 1/a mod T^n; a(0) must be nonzero.
Poly series_inv(const Modulus& K, const Poly& a, std::size_t n);
Poly reverse(const Poly& a, std::size_t len);
// a(T + s)
Poly taylor_shift(const Modulus& K, const Poly& a, u64 s);
Poly from_roots(const Modulus& K, const std::vector<u64>& roots);
Poly compose_mod(const Modulus& K, const Poly& a, const Poly& h, const Poly& m);  // a(h) mod m

// Minimal generator of the finite prefix; monic, degree <= bound when the
// prefix has >= 2*bound terms and a generator of degree <= bound exists.
Poly berlekamp_massey(const Modulus& K, const ScalarSeq& seq, std::size_t bound);
Poly squarefree_part(const Modulus& K, const Poly& P);
Poly scalar_numerator_direct(const Modulus& K, const ScalarSeq& seq, const Poly& P);
ScalarSeq laurent_expand(const Modulus& K, const Poly& A, const Poly& F, std::size_t k);
// Returns (num, den) with a = num/den mod T^n, deg num <= nb, deg den <= db,
// den(0) = 1. Throws PrecisionFailure when no such pair exists.
std::pair<Poly, Poly> rational_reconstruct(const Modulus& K, const Poly& a, std::size_t n,
                                           std::size_t nb, std::size_t db);
Poly crt_pair(const Modulus& K, const Poly& a1, const Poly& q1, const Poly& a2, const Poly& q2);

// ell(H^s mod F) for s < t, ell given by its values on 1, T, ..., T^{deg F - 1}.
ScalarSeq power_projection(const Modulus& K, const Poly& F, const Poly& H, const ScalarSeq& ell,
                           std::size_t t);
// Several linear forms sharing F and H.
std::vector<ScalarSeq> power_projection_multi(const Modulus& K, const Poly& F, const Poly& H,
                                              const std::vector<ScalarSeq>& ells, std::size_t t);
// Form i projected on lengths[i] powers.
std::vector<ScalarSeq> power_projection_multi(const Modulus& K, const Poly& F, const Poly& H,
                                              const std::vector<ScalarSeq>& ells,
                                              const std::vector<std::size_t>& lengths);
ScalarSeq power_projection_naive(const Modulus& K, const Poly& F, const Poly& H,
                                 const ScalarSeq& ell, std::size_t t);
// The linear form f -> ell(g f mod F), as values on the monomial basis.
ScalarSeq transposed_mulmod(const Modulus& K, const Poly& F, const Poly& g, const ScalarSeq& ell);

}  // namespace bfglm

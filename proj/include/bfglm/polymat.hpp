#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bfglm/dense.hpp"
#include "bfglm/poly.hpp"

namespace bfglm {

struct PolyMat {
  std::size_t rows = 0, cols = 0;
  std::vector<Poly> e;

  PolyMat() = default;
  PolyMat(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}

  Poly& operator()(std::size_t i, std::size_t j) { return e[i * cols + j]; }
  const Poly& operator()(std::size_t i, std::size_t j) const { return e[i * cols + j]; }

  int rowdeg(std::size_t i) const;  // -1 for a zero row
  int deg() const;
  DenseMat coeff(std::size_t k) const;

  bool operator==(const PolyMat& o) const = default;

  static PolyMat identity(std::size_t n);
  static PolyMat from_constant(const DenseMat& A);
};

using MatSeq = std::vector<DenseMat>;

PolyMat pm_mul(const Modulus& K, const PolyMat& A, const PolyMat& B);
PolyMat pm_add(const Modulus& K, const PolyMat& A, const PolyMat& B);
PolyMat pm_trunc(const PolyMat& A, std::size_t n);
PolyMat pm_shift_down(const PolyMat& A, std::size_t k);
PolyMat pm_taylor_shift(const Modulus& K, const PolyMat& A, u64 s);
PolyMat pm_scale(const Modulus& K, const PolyMat& A, const Poly& s);
DenseMat pm_eval(const Modulus& K, const PolyMat& A, u64 x);
PolyMat pm_row(const PolyMat& A, std::size_t i);
PolyMat pm_rows(const PolyMat& A, const std::vector<std::size_t>& idx);
PolyMat pm_block(const PolyMat& A, std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc);

enum class ApproxMethod { Iterative, DivideConquer };

struct ApproxBasis {
  PolyMat basis;
  std::vector<long> pivot_deg;  // degree of the diagonal pivots
};

// Shifted ordered weak Popov basis of {p : p F = 0 mod T^order}; row i has
// its shifted pivot at column i.
ApproxBasis approximant_basis(const Modulus& K, const PolyMat& F, std::size_t order,
                              const std::vector<long>& shift,
                              ApproxMethod method = ApproxMethod::DivideConquer);
// Canonical shifted Popov form of the same module.
ApproxBasis popov_approximant_basis(const Modulus& K, const PolyMat& F, std::size_t order,
                                    const std::vector<long>& shift,
                                    ApproxMethod method = ApproxMethod::DivideConquer);

// Shifted leading matrix invertible. Zero rows give false.
bool is_row_reduced(const Modulus& K, const PolyMat& P, const std::vector<long>& shift = {});
// Popov with pivots on the diagonal, for the uniform shift.
bool is_popov(const Modulus& K, const PolyMat& P);

// Left generator from the approximant basis of [sum F_s T^{order-1-s}; -I].
// order defaults to dl + dr + 1, clipped to the number of terms supplied.
PolyMat minimal_matrix_generator(const Modulus& K, const MatSeq& seq, std::size_t dl, std::size_t dr,
                                 std::size_t order = 0);

// Checks sum_k P_k F_{s+k} = 0 for every s with s + deg P < #terms.
bool generator_cancels(const Modulus& K, const PolyMat& P, const MatSeq& seq);

Poly largest_invariant_factor(const Modulus& K, const PolyMat& P, Rng& rng);

// a with a P = s1 e_i, verified exactly.
PolyMat left_quotient_row(const Modulus& K, const PolyMat& P, const Poly& s1, std::size_t i);

// q with q B = p when it exists (B square nonsingular).
std::optional<PolyMat> left_divide(const Modulus& K, const PolyMat& B, const PolyMat& p);

}  // namespace bfglm

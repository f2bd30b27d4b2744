#pragma once

#include <cstddef>
#include <vector>

#include "bfglm/field.hpp"

namespace bfglm {

// Row-major dense matrix over K.
struct DenseMat {
  std::size_t rows = 0, cols = 0;
  std::vector<u64> a;

  DenseMat() = default;
  DenseMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

  u64& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  u64 operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  const u64* row(std::size_t i) const { return a.data() + i * cols; }
  u64* row(std::size_t i) { return a.data() + i * cols; }

  bool operator==(const DenseMat& o) const = default;

  static DenseMat identity(std::size_t n);
  static DenseMat from_rows(const std::vector<std::vector<u64>>& rows);
};

DenseMat sample_block(const Modulus& K, Rng& rng, std::size_t rows, std::size_t cols);

DenseMat transpose(const DenseMat& A);
DenseMat mat_mul(const Modulus& K, const DenseMat& A, const DenseMat& B);
DenseMat mat_add(const Modulus& K, const DenseMat& A, const DenseMat& B);
DenseMat mat_sub(const Modulus& K, const DenseMat& A, const DenseMat& B);
std::vector<u64> mat_vec(const Modulus& K, const DenseMat& A, const std::vector<u64>& x);

std::size_t rank(const Modulus& K, DenseMat A);
// Throws GenericityFailure when singular.
DenseMat inverse(const Modulus& K, const DenseMat& A);
u64 determinant(const Modulus& K, DenseMat A);
// Basis of {x : x A = 0}, one vector per row.
DenseMat left_kernel(const Modulus& K, const DenseMat& A);

}  // namespace bfglm

#include "bfglm/dense.hpp"

#include <utility>

namespace bfglm {

DenseMat DenseMat::identity(std::size_t n) {
  DenseMat I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

DenseMat DenseMat::from_rows(const std::vector<std::vector<u64>>& rows) {
  DenseMat A(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < A.rows; ++i) {
    if (rows[i].size() != A.cols) throw ShapeError("ragged rows");
    for (std::size_t j = 0; j < A.cols; ++j) A(i, j) = rows[i][j];
  }
  return A;
}

DenseMat sample_block(const Modulus& K, Rng& rng, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw ShapeError("sample_block needs positive dimensions");
  DenseMat A(rows, cols);
  for (auto& x : A.a) x = rng.elem(K);
  return A;
}

DenseMat transpose(const DenseMat& A) {
  DenseMat T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

DenseMat mat_mul(const Modulus& K, const DenseMat& A, const DenseMat& B) {
  if (A.cols != B.rows) throw ShapeError("mat_mul shape mismatch");
  DenseMat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < B.cols; ++j) {
      LazyAcc acc(K);
      for (std::size_t k = 0; k < A.cols; ++k) acc.add(A(i, k), B(k, j));
      C(i, j) = acc.get();
    }
  return C;
}

DenseMat mat_add(const Modulus& K, const DenseMat& A, const DenseMat& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw ShapeError("mat_add shape mismatch");
  DenseMat C = A;
  for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] = K.add(C.a[i], B.a[i]);
  return C;
}

DenseMat mat_sub(const Modulus& K, const DenseMat& A, const DenseMat& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw ShapeError("mat_sub shape mismatch");
  DenseMat C = A;
  for (std::size_t i = 0; i < C.a.size(); ++i) C.a[i] = K.sub(C.a[i], B.a[i]);
  return C;
}

std::vector<u64> mat_vec(const Modulus& K, const DenseMat& A, const std::vector<u64>& x) {
  if (A.cols != x.size()) throw ShapeError("mat_vec shape mismatch");
  std::vector<u64> y(A.rows);
  for (std::size_t i = 0; i < A.rows; ++i) {
    LazyAcc acc(K);
    for (std::size_t k = 0; k < A.cols; ++k) acc.add(A(i, k), x[k]);
    y[i] = acc.get();
  }
  return y;
}

namespace {

// Row echelon in place; returns pivot columns.
std::vector<std::size_t> echelon(const Modulus& K, DenseMat& A, u64* det = nullptr) {
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  u64 d = 1;
  for (std::size_t c = 0; c < A.cols && r < A.rows; ++c) {
    std::size_t s = r;
    while (s < A.rows && A(s, c) == 0) ++s;
    if (s == A.rows) continue;
    if (s != r) {
      for (std::size_t j = 0; j < A.cols; ++j) std::swap(A(s, j), A(r, j));
      d = K.neg(d);
    }
    u64 iv = K.inv(A(r, c));
    d = K.mul(d, A(r, c));
    for (std::size_t j = c; j < A.cols; ++j) A(r, j) = K.mul(A(r, j), iv);
    for (std::size_t i = 0; i < A.rows; ++i) {
      if (i == r || A(i, c) == 0) continue;
      u64 f = A(i, c);
      for (std::size_t j = c; j < A.cols; ++j) A(i, j) = K.sub(A(i, j), K.mul(f, A(r, j)));
    }
    piv.push_back(c);
    ++r;
  }
  if (det) *det = d;
  return piv;
}

}  // namespace

std::size_t rank(const Modulus& K, DenseMat A) { return echelon(K, A).size(); }

u64 determinant(const Modulus& K, DenseMat A) {
  if (A.rows != A.cols) throw ShapeError("determinant of non-square matrix");
  u64 d = 0;
  auto piv = echelon(K, A, &d);
  return piv.size() == A.rows ? d : 0;
}

DenseMat inverse(const Modulus& K, const DenseMat& A) {
  if (A.rows != A.cols) throw ShapeError("inverse of non-square matrix");
  std::size_t n = A.rows;
  DenseMat W(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) W(i, j) = A(i, j);
    W(i, n + i) = 1;
  }
  auto piv = echelon(K, W);
  if (piv.size() < n || piv[n - 1] != n - 1) throw GenericityFailure("singular constant matrix");
  DenseMat R(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) R(i, j) = W(i, n + j);
  return R;
}

DenseMat left_kernel(const Modulus& K, const DenseMat& A) {
  // x A = 0  <=>  A^T x^T = 0
  DenseMat T = transpose(A);
  auto piv = echelon(K, T);
  std::vector<bool> is_piv(T.cols, false);
  for (auto c : piv) is_piv[c] = true;
  DenseMat N(T.cols - piv.size(), T.cols);
  std::size_t k = 0;
  for (std::size_t f = 0; f < T.cols; ++f) {
    if (is_piv[f]) continue;
    N(k, f) = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) N(k, piv[r]) = K.neg(T(r, f));
    ++k;
  }
  return N;
}

}  // namespace bfglm

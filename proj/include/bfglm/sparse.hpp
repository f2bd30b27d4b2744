#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "bfglm/dense.hpp"
#include "bfglm/field.hpp"

namespace bfglm {

struct Triplet {
  std::size_t row, col;
  u64 val;
};

// Square sparse matrix, compressed rows. A column-compressed copy is kept
// alongside for row-vector products.
class SparseMat {
 public:
  SparseMat() = default;
  // Duplicates are summed, zeros dropped.
  SparseMat(const Modulus& K, std::size_t dim, std::vector<Triplet> entries);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return val_.size(); }
  double density() const { return dim_ == 0 ? 0.0 : double(nnz()) / (double(dim_) * double(dim_)); }

  const std::vector<std::size_t>& row_ptr() const { return rp_; }
  const std::vector<std::size_t>& col_idx() const { return ci_; }
  const std::vector<u64>& values() const { return val_; }
  std::vector<Triplet> triplets() const;
  u64 at(std::size_t i, std::size_t j) const;

  DenseMat to_dense() const;
  static SparseMat from_dense(const Modulus& K, const DenseMat& A);
  static SparseMat identity(std::size_t n);

  bool operator==(const SparseMat& o) const {
    return dim_ == o.dim_ && rp_ == o.rp_ && ci_ == o.ci_ && val_ == o.val_;
  }

  friend std::vector<u64> vec_mat(const Modulus& K, const std::vector<u64>& v, const SparseMat& M);

 private:
  void build_columns();

  std::size_t dim_ = 0;
  std::vector<std::size_t> rp_{0}, ci_;
  std::vector<u64> val_;
  std::vector<std::size_t> cp_{0}, ri_;
  std::vector<u64> cval_;
};

SparseMat combine_matrices(const Modulus& K, const std::vector<u64>& t, const std::vector<SparseMat>& mats);
// Row vector times matrix.
std::vector<u64> vec_mat(const Modulus& K, const std::vector<u64>& v, const SparseMat& M);
// Matrix times column vector.
std::vector<u64> mat_vec(const Modulus& K, const SparseMat& M, const std::vector<u64>& v);
SparseMat sparse_mul(const Modulus& K, const SparseMat& A, const SparseMat& B);

// blocks[s] = U^T M^s, each m x D.
struct KrylovTable {
  std::size_t m = 0;
  std::vector<DenseMat> blocks;
};

std::size_t resolve_workers(std::size_t workers);

KrylovTable krylov_left_sequence(const Modulus& K, const SparseMat& M, const DenseMat& U,
                                 std::size_t count, std::size_t workers = 1);

// Streaming variant: returns F_s = U^T M^s V for s < count while keeping
// only the first `keep` blocks of the table.
struct KrylovStream {
  std::vector<DenseMat> seq;
  KrylovTable table;
};
KrylovStream krylov_stream(const Modulus& K, const SparseMat& M, const DenseMat& U, const DenseMat& V,
                           std::size_t count, std::size_t keep, std::size_t workers = 1);

std::vector<DenseMat> project_right(const Modulus& K, const KrylovTable& table, const DenseMat& V);
// E_s = L_s w, as m-vectors.
std::vector<std::vector<u64>> project_vector(const Modulus& K, const KrylovTable& table,
                                             const std::vector<u64>& w);

}  // namespace bfglm

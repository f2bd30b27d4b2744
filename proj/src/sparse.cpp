#include "bfglm/sparse.hpp"

#include <algorithm>
#include <map>
#include <thread>

namespace bfglm {

SparseMat::SparseMat(const Modulus& K, std::size_t dim, std::vector<Triplet> entries) : dim_(dim) {
  for (const auto& e : entries)
    if (e.row >= dim || e.col >= dim) throw ShapeError("sparse entry out of range");
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  rp_.assign(dim + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t r = entries[k].row, c = entries[k].col;
    u64 v = 0;
    while (k < entries.size() && entries[k].row == r && entries[k].col == c) v = K.add(v, entries[k++].val % K.p());
    if (v == 0) continue;
    ci_.push_back(c);
    val_.push_back(v);
    ++rp_[r + 1];
  }
  for (std::size_t i = 0; i < dim; ++i) rp_[i + 1] += rp_[i];
  build_columns();
}

void SparseMat::build_columns() {
  cp_.assign(dim_ + 1, 0);
  for (auto c : ci_) ++cp_[c + 1];
  for (std::size_t j = 0; j < dim_; ++j) cp_[j + 1] += cp_[j];
  ri_.assign(ci_.size(), 0);
  cval_.assign(ci_.size(), 0);
  std::vector<std::size_t> pos(cp_.begin(), cp_.end() - 1);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = rp_[i]; k < rp_[i + 1]; ++k) {
      std::size_t q = pos[ci_[k]]++;
      ri_[q] = i;
      cval_[q] = val_[k];
    }
}

std::vector<Triplet> SparseMat::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = rp_[i]; k < rp_[i + 1]; ++k) t.push_back({i, ci_[k], val_[k]});
  return t;
}

u64 SparseMat::at(std::size_t i, std::size_t j) const {
  auto b = ci_.begin() + rp_[i], e = ci_.begin() + rp_[i + 1];
  auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? val_[it - ci_.begin()] : 0;
}

DenseMat SparseMat::to_dense() const {
  DenseMat A(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = rp_[i]; k < rp_[i + 1]; ++k) A(i, ci_[k]) = val_[k];
  return A;
}

SparseMat SparseMat::from_dense(const Modulus& K, const DenseMat& A) {
  if (A.rows != A.cols) throw ShapeError("sparse matrices are square");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j)
      if (A(i, j)) t.push_back({i, j, A(i, j)});
  return SparseMat(K, A.rows, std::move(t));
}

SparseMat SparseMat::identity(std::size_t n) {
  SparseMat I;
  I.dim_ = n;
  I.rp_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) I.rp_[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    I.ci_.push_back(i);
    I.val_.push_back(1);
  }
  I.build_columns();
  return I;
}

SparseMat combine_matrices(const Modulus& K, const std::vector<u64>& t, const std::vector<SparseMat>& mats) {
  if (mats.empty() || t.size() != mats.size()) throw ShapeError("combine_matrices: need one coefficient per matrix");
  std::size_t D = mats[0].dim();
  std::vector<Triplet> all;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].dim() != D) throw ShapeError("combine_matrices: dimension mismatch");
    if (t[i] == 0) continue;
    for (auto e : mats[i].triplets()) all.push_back({e.row, e.col, K.mul(t[i], e.val)});
  }
  return SparseMat(K, D, std::move(all));
}

std::vector<u64> vec_mat(const Modulus& K, const std::vector<u64>& v, const SparseMat& M) {
  if (v.size() != M.dim_) throw ShapeError("vec_mat: length mismatch");
  std::vector<u64> out(M.dim_);
  for (std::size_t j = 0; j < M.dim_; ++j) {
    LazyAcc acc(K);
    for (std::size_t k = M.cp_[j]; k < M.cp_[j + 1]; ++k) acc.add(v[M.ri_[k]], M.cval_[k]);
    out[j] = acc.get();
  }
  return out;
}

std::vector<u64> mat_vec(const Modulus& K, const SparseMat& M, const std::vector<u64>& v) {
  if (v.size() != M.dim()) throw ShapeError("mat_vec: length mismatch");
  std::vector<u64> out(M.dim());
  const auto& rp = M.row_ptr();
  const auto& ci = M.col_idx();
  const auto& val = M.values();
  for (std::size_t i = 0; i < M.dim(); ++i) {
    LazyAcc acc(K);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) acc.add(val[k], v[ci[k]]);
    out[i] = acc.get();
  }
  return out;
}

SparseMat sparse_mul(const Modulus& K, const SparseMat& A, const SparseMat& B) {
  if (A.dim() != B.dim()) throw ShapeError("sparse_mul: dimension mismatch");
  std::size_t D = A.dim();
  std::vector<Triplet> out;
  std::vector<u64> acc(D, 0);
  std::vector<char> used(D, 0);
  std::vector<std::size_t> touched;
  const auto &arp = A.row_ptr(), &aci = A.col_idx(), &brp = B.row_ptr(), &bci = B.col_idx();
  const auto &av = A.values(), &bv = B.values();
  for (std::size_t i = 0; i < D; ++i) {
    touched.clear();
    for (std::size_t k = arp[i]; k < arp[i + 1]; ++k) {
      std::size_t r = aci[k];
      for (std::size_t l = brp[r]; l < brp[r + 1]; ++l) {
        std::size_t c = bci[l];
        if (!used[c]) {
          used[c] = 1;
          touched.push_back(c);
        }
        acc[c] = K.add(acc[c], K.mul(av[k], bv[l]));
      }
    }
    for (auto c : touched) {
      if (acc[c]) out.push_back({i, c, acc[c]});
      acc[c] = 0;
      used[c] = 0;
    }
  }
  return SparseMat(K, D, std::move(out));
}

std::size_t resolve_workers(std::size_t workers) {
  if (workers != 0) return workers;
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

namespace {

// Runs body(i) for i in [0, n) over up to `workers` threads, rows assigned
// round-robin. Each i is handled by exactly one thread.
template <class F>
void parallel_rows(std::size_t n, std::size_t workers, F body) {
  std::size_t w = std::min(resolve_workers(workers), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> th;
  for (std::size_t t = 0; t < w; ++t)
    th.emplace_back([=, &body] {
      for (std::size_t i = t; i < n; i += w) body(i);
    });
  for (auto& x : th) x.join();
}

}  // namespace

KrylovTable krylov_left_sequence(const Modulus& K, const SparseMat& M, const DenseMat& U,
                                 std::size_t count, std::size_t workers) {
  if (U.rows != M.dim()) throw ShapeError("krylov: U must have D rows");
  if (count == 0) throw InvalidInput("krylov: count must be positive");
  std::size_t m = U.cols, D = M.dim();
  KrylovTable T;
  T.m = m;
  T.blocks.assign(count, DenseMat(m, D));
  parallel_rows(m, workers, [&](std::size_t i) {
    std::vector<u64> v(D);
    for (std::size_t k = 0; k < D; ++k) v[k] = U(k, i);
    for (std::size_t s = 0; s < count; ++s) {
      std::copy(v.begin(), v.end(), T.blocks[s].row(i));
      if (s + 1 < count) v = vec_mat(K, v, M);
    }
  });
  return T;
}

KrylovStream krylov_stream(const Modulus& K, const SparseMat& M, const DenseMat& U, const DenseMat& V,
                           std::size_t count, std::size_t keep, std::size_t workers) {
  if (U.rows != M.dim() || V.rows != M.dim()) throw ShapeError("krylov: U and V must have D rows");
  if (count == 0) throw InvalidInput("krylov: count must be positive");
  std::size_t m = U.cols, D = M.dim(), c = V.cols;
  keep = std::min(keep, count);
  KrylovStream out;
  out.table.m = m;
  out.table.blocks.assign(keep, DenseMat(m, D));
  out.seq.assign(count, DenseMat(m, c));
  DenseMat Vt = transpose(V);
  parallel_rows(m, workers, [&](std::size_t i) {
    std::vector<u64> v(D);
    for (std::size_t k = 0; k < D; ++k) v[k] = U(k, i);
    for (std::size_t s = 0; s < count; ++s) {
      if (s < keep) std::copy(v.begin(), v.end(), out.table.blocks[s].row(i));
      for (std::size_t j = 0; j < c; ++j) {
        LazyAcc acc(K);
        const u64* col = Vt.row(j);
        for (std::size_t k = 0; k < D; ++k) acc.add(v[k], col[k]);
        out.seq[s](i, j) = acc.get();
      }
      if (s + 1 < count) v = vec_mat(K, v, M);
    }
  });
  return out;
}

std::vector<DenseMat> project_right(const Modulus& K, const KrylovTable& table, const DenseMat& V) {
  std::vector<DenseMat> out;
  out.reserve(table.blocks.size());
  for (const auto& L : table.blocks) {
    if (L.cols != V.rows) throw ShapeError("project_right: V must have D rows");
    out.push_back(mat_mul(K, L, V));
  }
  return out;
}

std::vector<std::vector<u64>> project_vector(const Modulus& K, const KrylovTable& table,
                                             const std::vector<u64>& w) {
  std::vector<std::vector<u64>> out;
  out.reserve(table.blocks.size());
  for (const auto& L : table.blocks) out.push_back(mat_vec(K, L, w));
  return out;
}

}  // namespace bfglm

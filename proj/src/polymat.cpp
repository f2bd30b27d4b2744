#include "bfglm/polymat.hpp"

#include <algorithm>

namespace bfglm {

int PolyMat::rowdeg(std::size_t i) const {
  int d = -1;
  for (std::size_t j = 0; j < cols; ++j) d = std::max(d, (*this)(i, j).deg());
  return d;
}

int PolyMat::deg() const {
  int d = -1;
  for (const auto& p : e) d = std::max(d, p.deg());
  return d;
}

DenseMat PolyMat::coeff(std::size_t k) const {
  DenseMat A(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) A(i, j) = (*this)(i, j)[k];
  return A;
}

PolyMat PolyMat::identity(std::size_t n) {
  PolyMat I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = Poly::constant(1);
  return I;
}

PolyMat PolyMat::from_constant(const DenseMat& A) {
  PolyMat P(A.rows, A.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) P(i, j) = Poly::constant(A(i, j));
  return P;
}

PolyMat pm_mul(const Modulus& K, const PolyMat& A, const PolyMat& B) {
  if (A.cols != B.rows) throw ShapeError("pm_mul shape mismatch");
  PolyMat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < B.cols; ++j) {
      Poly acc;
      for (std::size_t k = 0; k < A.cols; ++k) {
        if (A(i, k).is_zero() || B(k, j).is_zero()) continue;
        acc = add(K, acc, mul(K, A(i, k), B(k, j)));
      }
      C(i, j) = std::move(acc);
    }
  return C;
}

PolyMat pm_add(const Modulus& K, const PolyMat& A, const PolyMat& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw ShapeError("pm_add shape mismatch");
  PolyMat C(A.rows, A.cols);
  for (std::size_t k = 0; k < A.e.size(); ++k) C.e[k] = add(K, A.e[k], B.e[k]);
  return C;
}

PolyMat pm_trunc(const PolyMat& A, std::size_t n) {
  PolyMat C = A;
  for (auto& p : C.e) p = trunc(p, n);
  return C;
}

PolyMat pm_shift_down(const PolyMat& A, std::size_t k) {
  PolyMat C = A;
  for (auto& p : C.e) p = shift_down(p, k);
  return C;
}

PolyMat pm_taylor_shift(const Modulus& K, const PolyMat& A, u64 s) {
  if (s == 0) return A;
  PolyMat C = A;
  for (auto& p : C.e) p = taylor_shift(K, p, s);
  return C;
}

PolyMat pm_scale(const Modulus& K, const PolyMat& A, const Poly& s) {
  PolyMat C = A;
  for (auto& p : C.e) p = mul(K, p, s);
  return C;
}

DenseMat pm_eval(const Modulus& K, const PolyMat& A, u64 x) {
  DenseMat R(A.rows, A.cols);
  for (std::size_t k = 0; k < A.e.size(); ++k) R.a[k] = eval(K, A.e[k], x);
  return R;
}

PolyMat pm_row(const PolyMat& A, std::size_t i) { return pm_rows(A, {i}); }

PolyMat pm_rows(const PolyMat& A, const std::vector<std::size_t>& idx) {
  PolyMat C(idx.size(), A.cols);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t j = 0; j < A.cols; ++j) C(r, j) = A(idx[r], j);
  return C;
}

PolyMat pm_block(const PolyMat& A, std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) {
  PolyMat C(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) C(i, j) = A(r0 + i, c0 + j);
  return C;
}

namespace {

constexpr std::size_t kMbasisThreshold = 32;

// a -= f * b
void axpy(const Modulus& K, Poly& a, const Poly& b, u64 f) {
  if (b.c.size() > a.c.size()) a.c.resize(b.c.size(), 0);
  for (std::size_t i = 0; i < b.c.size(); ++i) a.c[i] = K.sub(a.c[i], K.mul(f, b.c[i]));
  a.trim();
}

void times_t(Poly& a, std::size_t cap) {
  if (a.is_zero()) return;
  a.c.insert(a.c.begin(), 0);
  if (a.c.size() > cap) a.c.resize(cap);
  a.trim();
}

ApproxBasis mbasis(const Modulus& K, const PolyMat& F, std::size_t order, const std::vector<long>& shift) {
  std::size_t r = F.rows, c = F.cols;
  std::vector<std::vector<Poly>> B(r, std::vector<Poly>(r)), R(r, std::vector<Poly>(c));
  for (std::size_t i = 0; i < r; ++i) {
    B[i][i] = Poly::constant(1);
    for (std::size_t j = 0; j < c; ++j) R[i][j] = trunc(F(i, j), order);
  }
  std::vector<long> rdeg = shift;
  std::vector<long> mindeg(r, 0);
  std::size_t big = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < order; ++k) {
    for (std::size_t j = 0; j < c; ++j) {
      std::size_t piv = big;
      for (std::size_t i = 0; i < r; ++i)
        if (R[i][j][k] != 0 && (piv == big || rdeg[i] < rdeg[piv])) piv = i;
      if (piv == big) continue;
      u64 inv = K.inv(R[piv][j][k]);
      for (std::size_t i = 0; i < r; ++i) {
        if (i == piv || R[i][j][k] == 0) continue;
        u64 f = K.mul(R[i][j][k], inv);
        for (std::size_t l = 0; l < r; ++l) axpy(K, B[i][l], B[piv][l], f);
        for (std::size_t l = 0; l < c; ++l) axpy(K, R[i][l], R[piv][l], f);
      }
      for (std::size_t l = 0; l < r; ++l) times_t(B[piv][l], static_cast<std::size_t>(-1));
      for (std::size_t l = 0; l < c; ++l) times_t(R[piv][l], order);
      ++rdeg[piv];
      ++mindeg[piv];
    }
  }
  ApproxBasis out{PolyMat(r, r), mindeg};
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < r; ++l) out.basis(i, l) = std::move(B[i][l]);
  return out;
}

ApproxBasis pmbasis(const Modulus& K, const PolyMat& F, std::size_t order, const std::vector<long>& shift) {
  if (order <= kMbasisThreshold) return mbasis(K, F, order, shift);
  std::size_t d1 = order / 2;
  ApproxBasis A1 = pmbasis(K, pm_trunc(F, d1), d1, shift);
  PolyMat R = pm_trunc(pm_shift_down(pm_mul(K, A1.basis, pm_trunc(F, order)), d1), order - d1);
  std::vector<long> s2(shift.size());
  for (std::size_t i = 0; i < shift.size(); ++i) s2[i] = shift[i] + A1.pivot_deg[i];
  ApproxBasis A2 = pmbasis(K, R, order - d1, s2);
  ApproxBasis out{pm_mul(K, A2.basis, A1.basis), A1.pivot_deg};
  for (std::size_t i = 0; i < shift.size(); ++i) out.pivot_deg[i] += A2.pivot_deg[i];
  return out;
}

std::vector<DenseMat> coeff_list(const PolyMat& P) {
  std::vector<DenseMat> out;
  for (int k = 0; k <= std::max(P.deg(), 0); ++k) out.push_back(P.coeff(k));
  return out;
}

bool invertible_at(const Modulus& K, const PolyMat& P, u64 x) {
  return determinant(K, pm_eval(K, P, x)) != 0;
}

// Expansion point where P is invertible; deterministic unless rng given.
u64 find_shift(const Modulus& K, const PolyMat& P, Rng* rng) {
  if (invertible_at(K, P, 0)) return 0;
  long bound = 0;
  for (std::size_t i = 0; i < P.rows; ++i) bound += std::max(P.rowdeg(i), 0);
  for (long tries = 0; tries < bound + 64; ++tries) {
    u64 x = rng ? rng->nonzero(K) : static_cast<u64>(tries + 1) % K.p();
    if (invertible_at(K, P, x)) return x;
  }
  throw GenericityFailure("no expansion point where the matrix is invertible");
}

}  // namespace

ApproxBasis approximant_basis(const Modulus& K, const PolyMat& F, std::size_t order,
                              const std::vector<long>& shift, ApproxMethod method) {
  if (order == 0) throw InvalidInput("approximant order must be positive");
  std::vector<long> s = shift.empty() ? std::vector<long>(F.rows, 0) : shift;
  if (s.size() != F.rows) throw ShapeError("shift length must equal row count");
  return method == ApproxMethod::Iterative ? mbasis(K, F, order, s) : pmbasis(K, F, order, s);
}

ApproxBasis popov_approximant_basis(const Modulus& K, const PolyMat& F, std::size_t order,
                                    const std::vector<long>& shift, ApproxMethod method) {
  ApproxBasis first = approximant_basis(K, F, order, shift, method);
  std::vector<long> s2(first.pivot_deg.size());
  for (std::size_t i = 0; i < s2.size(); ++i) s2[i] = -first.pivot_deg[i];
  ApproxBasis second = approximant_basis(K, F, order, s2, method);
  std::size_t r = F.rows;
  DenseMat lead(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) lead(i, j) = second.basis(i, j)[first.pivot_deg[j]];
  DenseMat li = inverse(K, lead);
  return {pm_mul(K, PolyMat::from_constant(li), second.basis), first.pivot_deg};
}

bool is_row_reduced(const Modulus& K, const PolyMat& P, const std::vector<long>& shift) {
  if (P.rows != P.cols) throw ShapeError("is_row_reduced expects a square matrix");
  std::size_t n = P.rows;
  std::vector<long> s = shift.empty() ? std::vector<long>(n, 0) : shift;
  DenseMat L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    long rd = 0;
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (P(i, j).is_zero()) continue;
      long v = P(i, j).deg() + s[j];
      if (!any || v > rd) rd = v;
      any = true;
    }
    if (!any) return false;
    for (std::size_t j = 0; j < n; ++j) {
      long k = rd - s[j];
      if (k >= 0) L(i, j) = P(i, j)[static_cast<std::size_t>(k)];
    }
  }
  return determinant(K, L) != 0;
}

bool is_popov(const Modulus& /*K*/, const PolyMat& P) {
  std::size_t n = P.rows;
  for (std::size_t i = 0; i < n; ++i) {
    int rd = P.rowdeg(i);
    if (rd < 0) return false;
    std::size_t piv = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (P(i, j).deg() == rd) piv = j;
    if (piv != i || P(i, i).lc() != 1) return false;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i && P(k, i).deg() >= rd) return false;
  }
  return true;
}

PolyMat minimal_matrix_generator(const Modulus& K, const MatSeq& seq, std::size_t dl, std::size_t dr,
                                 std::size_t order) {
  if (seq.empty()) throw InsufficientTerms("minimal_matrix_generator: empty sequence");
  std::size_t m = seq[0].rows;
  for (const auto& F : seq)
    if (F.rows != m || F.cols != m) throw ShapeError("sequence terms must be square of equal size");
  if (order == 0) order = std::min(dl + dr + 1, seq.size());
  if (order > seq.size()) throw InsufficientTerms("minimal_matrix_generator: order exceeds terms");

  PolyMat Phi(2 * m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<u64> c(order, 0);
      for (std::size_t s = 0; s < order; ++s) c[order - 1 - s] = seq[s](i, j);
      Phi(i, j) = Poly(std::move(c));
    }
  for (std::size_t i = 0; i < m; ++i) Phi(m + i, i) = Poly::constant(K.neg(1));

  ApproxBasis B = popov_approximant_basis(K, Phi, order, {});
  std::vector<std::pair<std::size_t, std::size_t>> chosen;  // (pivot column, row)
  for (std::size_t i = 0; i < 2 * m; ++i) {
    int rd = B.basis.rowdeg(i);
    std::size_t piv = 0;
    for (std::size_t j = 0; j < 2 * m; ++j)
      if (B.basis(i, j).deg() == rd) piv = j;
    if (piv < m) chosen.push_back({piv, i});
  }
  if (chosen.size() != m) throw GenericityFailure("generator row selection found wrong row count");
  std::sort(chosen.begin(), chosen.end());
  PolyMat P(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t i = chosen[r].second;
    if (B.basis.rowdeg(i) > static_cast<int>(dl)) throw GenericityFailure("generator degree exceeds bound");
    for (std::size_t j = 0; j < m; ++j) P(r, j) = B.basis(i, j);
  }
  if (!is_row_reduced(K, P)) throw GenericityFailure("generator is not row reduced");
  return P;
}

bool generator_cancels(const Modulus& K, const PolyMat& P, const MatSeq& seq) {
  int d = P.deg();
  if (d < 0) return false;
  auto Pk = coeff_list(P);
  for (std::size_t s = 0; s + d < seq.size(); ++s) {
    DenseMat acc(P.rows, seq[0].cols);
    for (int k = 0; k <= d; ++k) acc = mat_add(K, acc, mat_mul(K, Pk[k], seq[s + k]));
    for (u64 x : acc.a)
      if (x) return false;
  }
  return true;
}

Poly largest_invariant_factor(const Modulus& K, const PolyMat& P, Rng& rng) {
  if (P.rows != P.cols) throw ShapeError("largest_invariant_factor expects a square matrix");
  std::size_t m = P.rows;
  std::size_t bound = 0;
  for (std::size_t i = 0; i < m; ++i) {
    int rd = P.rowdeg(i);
    if (rd < 0) throw InvalidInput("largest_invariant_factor: singular matrix");
    bound += rd;
  }
  if (bound == 0) return Poly::constant(1);
  u64 x0 = find_shift(K, P, &rng);
  auto Pk = coeff_list(pm_taylor_shift(K, P, x0));
  DenseMat P0i = inverse(K, Pk[0]);
  std::vector<u64> y(m);
  for (auto& v : y) v = rng.elem(K);

  std::size_t N = 2 * bound + 1;
  for (int attempt = 0; attempt <= 4; ++attempt, N *= 2) {
    std::vector<std::vector<u64>> x(N);
    x[0] = mat_vec(K, P0i, y);
    for (std::size_t k = 1; k < N; ++k) {
      std::vector<u64> acc(m, 0);
      for (std::size_t j = 1; j <= std::min(k, Pk.size() - 1); ++j) {
        auto t = mat_vec(K, Pk[j], x[k - j]);
        for (std::size_t i = 0; i < m; ++i) acc[i] = K.add(acc[i], t[i]);
      }
      x[k] = mat_vec(K, P0i, acc);
      for (auto& v : x[k]) v = K.neg(v);
    }
    try {
      Poly s = Poly::constant(1);
      for (std::size_t i = 0; i < m; ++i) {
        std::vector<u64> c(N);
        for (std::size_t k = 0; k < N; ++k) c[k] = x[k][i];
        auto nd = rational_reconstruct(K, Poly(std::move(c)), N, bound, bound);
        s = lcm(K, s, nd.second);
      }
      return monic(K, taylor_shift(K, s, K.neg(x0)));
    } catch (const PrecisionFailure&) {
    }
  }
  throw PrecisionFailure("largest_invariant_factor: reconstruction failed at every precision");
}

namespace {

// Row series z with z P = e, returned as coefficient rows z_0..z_{prec-1}.
std::vector<std::vector<u64>> row_series_solve(const Modulus& K, const std::vector<DenseMat>& Pk,
                                               const DenseMat& P0i, const std::vector<u64>& e0,
                                               std::size_t prec) {
  std::size_t m = P0i.rows;
  DenseMat P0iT = transpose(P0i);
  std::vector<DenseMat> PkT;
  for (const auto& A : Pk) PkT.push_back(transpose(A));
  std::vector<std::vector<u64>> z(prec);
  z[0] = mat_vec(K, P0iT, e0);
  for (std::size_t k = 1; k < prec; ++k) {
    std::vector<u64> acc(m, 0);
    for (std::size_t j = 1; j <= std::min(k, Pk.size() - 1); ++j) {
      auto t = mat_vec(K, PkT[j], z[k - j]);
      for (std::size_t i = 0; i < m; ++i) acc[i] = K.add(acc[i], t[i]);
    }
    z[k] = mat_vec(K, P0iT, acc);
    for (auto& v : z[k]) v = K.neg(v);
  }
  return z;
}

}  // namespace

PolyMat left_quotient_row(const Modulus& K, const PolyMat& P, const Poly& s1, std::size_t i) {
  if (P.rows != P.cols || i >= P.rows) throw ShapeError("left_quotient_row: bad shape or index");
  std::size_t m = P.rows;
  u64 x0 = find_shift(K, P, nullptr);
  auto Pk = coeff_list(pm_taylor_shift(K, P, x0));
  DenseMat P0i = inverse(K, Pk[0]);
  Poly s1s = taylor_shift(K, s1, x0);
  std::size_t prec = std::max(s1.deg(), 0) + std::max(P.deg(), 0) + 1;
  std::vector<u64> e(m, 0);
  e[i] = 1;
  auto z = row_series_solve(K, Pk, P0i, e, prec);
  PolyMat a(1, m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<u64> c(prec);
    for (std::size_t k = 0; k < prec; ++k) c[k] = z[k][j];
    a(0, j) = taylor_shift(K, mul_trunc(K, s1s, Poly(std::move(c)), prec), K.neg(x0));
  }
  PolyMat check = pm_mul(K, a, P);
  for (std::size_t j = 0; j < m; ++j) {
    const Poly& want = j == i ? s1 : Poly();
    if (check(0, j) != want) throw GenericityFailure("left_quotient_row: a P != s1 e_i");
    if (a(0, j).deg() > s1.deg()) throw GenericityFailure("left_quotient_row: degree bound violated");
  }
  return a;
}

std::optional<PolyMat> left_divide(const Modulus& K, const PolyMat& B, const PolyMat& p) {
  if (B.rows != B.cols || p.cols != B.rows) throw ShapeError("left_divide: bad shapes");
  std::size_t m = B.rows;
  long bound = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (B.rowdeg(i) < 0) return std::nullopt;
    bound += B.rowdeg(i);
  }
  u64 x0;
  try {
    x0 = find_shift(K, B, nullptr);
  } catch (const GenericityFailure&) {
    return std::nullopt;
  }
  auto Bk = coeff_list(pm_taylor_shift(K, B, x0));
  DenseMat B0i = inverse(K, Bk[0]);
  PolyMat ps = pm_taylor_shift(K, p, x0);
  std::size_t prec = static_cast<std::size_t>(std::max(p.deg(), 0) + bound + 1);
  PolyMat q(p.rows, m);
  for (std::size_t r = 0; r < p.rows; ++r) {
    // z B = e_l for each l, then q_r = sum_l ps(r,l) z_l
    for (std::size_t l = 0; l < m; ++l) {
      if (ps(r, l).is_zero()) continue;
      std::vector<u64> e(m, 0);
      e[l] = 1;
      auto z = row_series_solve(K, Bk, B0i, e, prec);
      for (std::size_t j = 0; j < m; ++j) {
        std::vector<u64> c(prec);
        for (std::size_t k = 0; k < prec; ++k) c[k] = z[k][j];
        q(r, j) = add(K, q(r, j), mul_trunc(K, ps(r, l), Poly(std::move(c)), prec));
      }
    }
  }
  q = pm_taylor_shift(K, q, K.neg(x0));
  if (pm_mul(K, q, B) != p) return std::nullopt;
  return q;
}

}  // namespace bfglm

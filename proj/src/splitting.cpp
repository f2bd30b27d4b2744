#include "bfglm/splitting.hpp"

#include <chrono>
#include <thread>

namespace bfglm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
void parallel_jobs(std::size_t n, std::size_t workers, F body) {
  std::size_t w = std::min(resolve_workers(workers), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> th;
  std::vector<std::exception_ptr> err(w);
  for (std::size_t t = 0; t < w; ++t)
    th.emplace_back([=, &body, &err] {
      try {
        for (std::size_t i = t; i < n; i += w) body(i);
      } catch (...) {
        err[t] = std::current_exception();
      }
    });
  for (auto& x : th) x.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

Poly dot_row(const Modulus& K, const PolyMat& a, const PolyMat& col) {
  Poly s;
  for (std::size_t j = 0; j < a.cols; ++j) s = add(K, s, mul(K, a(0, j), col(j, 0)));
  return s;
}

std::vector<DenseMat> as_columns(const std::vector<std::vector<u64>>& v) {
  std::vector<DenseMat> out;
  for (const auto& x : v) {
    DenseMat c(x.size(), 1);
    c.a = x;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

std::size_t residual_blocks(std::size_t D_B, std::size_t m) { return std::max<std::size_t>(1, (D_B + m - 1) / m); }

ZeroDimParam block_parametrization_x1(const Modulus& K, const Instance& inst, const DenseMat& U, const DenseMat& V,
                                      const std::vector<u64>& y, Rng& rng, const BlockOptions& opt,
                                      X1SolveCache& cache) {
  check_instance(inst);
  std::size_t D = inst.D, m = U.cols, n = inst.n;
  if (m == 0 || m > D || V.cols != m || U.rows != D || V.rows != D) throw ShapeError("bad block shapes");
  if (y.size() + 1 != n) throw ShapeError("y must have n - 1 entries");
  cache.U = U;
  cache.V = V;
  std::size_t d = (D + m - 1) / m;
  auto tk = std::chrono::steady_clock::now();
  KrylovStream ks = krylov_stream(K, inst.mats[0], U, V, 2 * d, d, opt.workers);
  cache.krylov_seconds = seconds_since(tk);
  cache.seq = std::move(ks.seq);
  cache.table = std::move(ks.table);

  cache.Pmat = minimal_matrix_generator(K, cache.seq, d, d, 2 * d);
  cache.M_min = largest_invariant_factor(K, cache.Pmat, rng);
  const Poly& Mm = cache.M_min;
  if (Mm.deg() > static_cast<int>(D)) throw GenericityFailure("invariant factor degree exceeds D");
  cache.a_rows.clear();
  for (std::size_t i = 0; i < m; ++i) cache.a_rows.push_back(left_quotient_row(K, cache.Pmat, Mm, i));

  // roots of multiplicity one in the minimal polynomial
  Poly F = squarefree_part(K, Mm);
  F = quo(K, F, gcd(K, F, gcd(K, Mm, derivative(K, Mm))));

  std::vector<u64> ty(n, 0);
  for (std::size_t k = 1; k < n; ++k) ty[k] = y[k - 1];
  SparseMat N = combine_matrices(K, ty, inst.mats);
  NumeratorInputs inp{cache.Pmat, Mm, cache.a_rows[0], cache.table};
  std::vector<u64> w = unit_vector(D);
  Poly A[3];
  for (int j = 0; j < 3; ++j) {
    A[j] = scalar_numerator(K, inp, w);
    if (j < 2) w = mat_vec(K, N, w);
  }
  F = gcd(K, F, sub(K, mul(K, A[0], A[2]), mul(K, A[1], A[1])));

  ZeroDimParam z;
  z.Q = F;
  z.t.assign(n, 0);
  z.t[0] = 1;
  z.V.push_back(rem(K, Poly::monomial(1), F));
  for (std::size_t k = 1; k < n; ++k) {
    if (F.deg() <= 0) {
      z.V.emplace_back();
      continue;
    }
    Poly AX = scalar_numerator(K, inp, mat_vec(K, inst.mats[k], unit_vector(D)));
    z.V.push_back(divmod(K, AX, A[0], F));
  }
  cache.param_A = z;
  cache.D_A = std::max(F.deg(), 0);
  return z;
}

ScalarSeq decompose(const Modulus& K, const Poly& M_min, const Poly& C, const ZeroDimParam& param_A,
                    const std::vector<u64>& t, std::size_t tau) {
  const Poly& F = param_A.Q;
  if (tau == 0) return {};
  if (F.deg() <= 0 || C.is_zero()) return ScalarSeq(tau, 0);
  auto [E, r] = quo_rem(K, M_min, F);
  if (!r.is_zero()) throw InvalidInput("decompose: F does not divide the minimal polynomial");
  Poly Einv;
  try {
    Einv = modinv(K, rem(K, E, F), F);
  } catch (const NotInvertible&) {
    throw NotCoprime("decompose: F and M/F share a factor");
  }
  Poly A = mulmod(K, rem(K, C, F), Einv, F);
  ScalarSeq ell = laurent_expand(K, A, F, F.deg());
  Poly lam;
  for (std::size_t i = 0; i < t.size(); ++i) lam = add(K, lam, scale(K, param_A.V[i], t[i]));
  lam = rem(K, lam, F);
  return power_projection(K, F, lam, ell, tau);
}

CorrectionSet correction_matrices(const Modulus& K, const X1SolveCache& cache, const Instance& inst,
                                  const std::vector<u64>& t, std::size_t workers) {
  std::size_t D = inst.D, n = inst.n, m = cache.U.cols;
  CorrectionSet cs;
  cs.D_B = D - cache.D_A;
  std::size_t dB = residual_blocks(cs.D_B, m);
  cs.delta.assign(2 * dB, DenseMat(m, m));
  cs.delta_coord.assign(dB, DenseMat(m, n));
  cs.delta_one.assign(dB, std::vector<u64>(m, 0));
  if (cache.D_A == 0) return cs;

  // columns of V, then M_k e_1, then e_1
  std::vector<std::vector<u64>> ws;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<u64> v(D);
    for (std::size_t r = 0; r < D; ++r) v[r] = cache.V(r, j);
    ws.push_back(std::move(v));
  }
  for (std::size_t k = 0; k < n; ++k) ws.push_back(mat_vec(K, inst.mats[k], unit_vector(D)));
  ws.push_back(unit_vector(D));

  std::vector<std::vector<ScalarSeq>> out(ws.size(), std::vector<ScalarSeq>(m));
  parallel_jobs(ws.size(), workers, [&](std::size_t c) {
    std::size_t tau = c < m ? 2 * dB : dB;
    PolyMat Om = matrix_numerator(K, as_columns(project_vector(K, cache.table, ws[c])), cache.Pmat);
    for (std::size_t i = 0; i < m; ++i)
      out[c][i] = decompose(K, cache.M_min, dot_row(K, cache.a_rows[i], Om), cache.param_A, t, tau);
  });
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t s = 0; s < 2 * dB; ++s) cs.delta[s](i, j) = out[j][i][s];
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t s = 0; s < dB; ++s) cs.delta_coord[s](i, k) = out[m + k][i][s];
    for (std::size_t s = 0; s < dB; ++s) cs.delta_one[s][i] = out[m + n][i][s];
  }
  return cs;
}

ZeroDimParam block_parametrization_residual(const Modulus& K, const Instance& inst, const DenseMat& U,
                                            const DenseMat& V, const CorrectionSet& corr,
                                            const std::vector<u64>& t, Rng& rng, const BlockOptions& opt,
                                            ResidualTrace* trace) {
  check_instance(inst);
  if (corr.D_B == 0) throw InvalidInput("residual solve needs D_B >= 1");
  std::size_t D = inst.D, m = U.cols, n = inst.n;
  std::size_t dB = residual_blocks(corr.D_B, m);
  if (corr.delta.size() != 2 * dB || corr.delta_coord.size() != dB || corr.delta_one.size() != dB)
    throw ShapeError("correction counts do not match D_B and m");
  ResidualTrace local;
  ResidualTrace& tr = trace ? *trace : local;

  SparseMat M = combine_matrices(K, t, inst.mats);
  auto tk = std::chrono::steady_clock::now();
  KrylovStream ks = krylov_stream(K, M, U, V, 2 * dB, dB, opt.workers);
  tr.krylov_seconds = seconds_since(tk);
  tr.seq.clear();
  for (std::size_t s = 0; s < 2 * dB; ++s) tr.seq.push_back(mat_sub(K, ks.seq[s], corr.delta[s]));

  tr.Pmat = minimal_matrix_generator(K, tr.seq, dB, dB, 2 * dB);
  tr.S = largest_invariant_factor(K, tr.Pmat, rng);
  if (tr.S.deg() > static_cast<int>(corr.D_B)) throw GenericityFailure("residual invariant factor too large");
  tr.R = squarefree_part(K, tr.S);
  PolyMat a1 = left_quotient_row(K, tr.Pmat, tr.S, 0);
  NumeratorInputs inp{tr.Pmat, tr.S, a1, ks.table};
  Poly C1 = scalar_numerator_corrected(K, inp, unit_vector(D), corr.delta_one);
  ZeroDimParam z;
  z.Q = tr.R;
  z.t = t;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<u64>> col(dB, std::vector<u64>(m));
    for (std::size_t s = 0; s < dB; ++s)
      for (std::size_t i = 0; i < m; ++i) col[s][i] = corr.delta_coord[s](i, k);
    Poly CX = scalar_numerator_corrected(K, inp, mat_vec(K, inst.mats[k], unit_vector(D)), col);
    z.V.push_back(divmod(K, CX, C1, tr.R));
  }
  return z;
}

ZeroDimParam change_separating_element(const Modulus& K, const ZeroDimParam& param, const std::vector<u64>& t,
                                       Rng& rng) {
  const Poly& F = param.Q;
  if (t.size() != param.V.size()) throw ShapeError("t length differs from coordinate count");
  int DA = F.deg();
  if (DA <= 0) return {Poly::constant(1), std::vector<Poly>(t.size()), t};
  Poly lam;
  for (std::size_t i = 0; i < t.size(); ++i) lam = add(K, lam, scale(K, param.V[i], t[i]));
  lam = rem(K, lam, F);
  for (int attempt = 0; attempt < 4; ++attempt) {
    ScalarSeq ell(DA);
    for (auto& x : ell) x = rng.elem(K);
    std::vector<ScalarSeq> forms{ell};
    for (const auto& G : param.V) forms.push_back(transposed_mulmod(K, F, rem(K, G, F), ell));
    std::vector<std::size_t> lengths(forms.size(), DA);
    lengths[0] = 2 * DA;
    auto seqs = power_projection_multi(K, F, lam, forms, lengths);
    std::vector<ScalarSeq> coords(seqs.begin() + 1, seqs.end());
    try {
      ZeroDimParam z = parametrization_from_series(K, seqs[0], coords, DA, t);
      if (z.Q.deg() == DA) return z;
    } catch (const NotInvertible&) {
    }
  }
  throw NonSeparating("coordinate change: X does not separate the points");
}

ZeroDimParam union_params(const Modulus& K, const ZeroDimParam& pA, const ZeroDimParam& pB) {
  if (pA.t != pB.t) throw InvalidInput("union_params: different separating forms");
  if (pB.Q.deg() <= 0) return pA;
  if (pA.Q.deg() <= 0) return pB;
  ZeroDimParam z;
  z.t = pA.t;
  z.Q = mul(K, pA.Q, pB.Q);
  for (std::size_t i = 0; i < pA.V.size(); ++i) z.V.push_back(crt_pair(K, pA.V[i], pA.Q, pB.V[i], pB.Q));
  return z;
}

ZeroDimParam block_parametrization_with_splitting(const Modulus& K, const Instance& inst, const DenseMat& U,
                                                  const DenseMat& V, const std::vector<u64>& t,
                                                  const std::vector<u64>& y, Rng& rng, const BlockOptions& opt,
                                                  SplitTrace* trace) {
  SplitTrace local;
  SplitTrace& tr = trace ? *trace : local;
  if (t.size() != inst.n) throw ShapeError("t must have n entries");
  ZeroDimParam pA = block_parametrization_x1(K, inst, U, V, y, rng, opt, tr.cache);
  tr.krylov_seconds = tr.cache.krylov_seconds;
  tr.param_A_on_X = change_separating_element(K, pA, t, rng);
  std::size_t D_B = inst.D - tr.cache.D_A;
  if (D_B == 0) {
    tr.P = tr.param_A_on_X.Q;
    tr.param_B = {Poly::constant(1), std::vector<Poly>(inst.n), t};
    return tr.param_A_on_X;
  }
  tr.corr = correction_matrices(K, tr.cache, inst, t, opt.workers);
  tr.param_B = block_parametrization_residual(K, inst, U, V, tr.corr, t, rng, opt, &tr.residual);
  tr.krylov_seconds += tr.residual.krylov_seconds;
  tr.P = mul(K, tr.param_A_on_X.Q, tr.residual.S);
  return union_params(K, tr.param_A_on_X, tr.param_B);
}

SplitResult solve_split(const Modulus& K, const Instance& inst, Rng& rng, const SplitOptions& opt) {
  check_instance(inst);
  if (opt.x1_index >= inst.n) throw InvalidInput("x1 index out of range");
  std::size_t m = std::min(opt.m, inst.D);
  if (m == 0) throw InvalidInput("block size must be positive");
  // variable x1_index moves to the front
  std::vector<std::size_t> order{opt.x1_index};
  for (std::size_t i = 0; i < inst.n; ++i)
    if (i != opt.x1_index) order.push_back(i);
  Instance pi = inst;
  for (std::size_t i = 0; i < inst.n; ++i) pi.mats[i] = inst.mats[order[i]];

  SplitResult res;
  auto t0 = std::chrono::steady_clock::now();
  auto fresh = [&](std::size_t len) {
    std::vector<u64> v(len);
    for (auto& x : v) x = rng.elem(K);
    return v;
  };
  std::vector<u64> t = fresh(inst.n);
  int since_t = 0;
  for (int attempt = 0; attempt <= opt.retries; ++attempt, ++since_t) {
    if (since_t >= 2) {
      t = fresh(inst.n);
      since_t = 0;
    }
    DenseMat U = sample_block(K, rng, inst.D, m), V = sample_block(K, rng, inst.D, m);
    std::vector<u64> y = fresh(inst.n - 1);
    SplitTrace tr;
    auto ta = std::chrono::steady_clock::now();
    try {
      ZeroDimParam z = block_parametrization_with_splitting(K, pi, U, V, t, y, rng, {opt.workers, opt.method}, &tr);
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
      SparseMat Mx = combine_matrices(K, t, pi.mats);
      bool good = param_violation(K, z).empty() && tr.P.deg() <= static_cast<int>(inst.D);
      for (int k = 0; good && k < 2; ++k) {
        std::vector<u64> w = fresh(inst.D);
        for (u64 x : poly_apply(K, Mx, tr.P, w))
          if (x) good = false;
      }
      if (good && !separation_check(K, pi, Mx, tr.P, z, rng)) {
        ++res.stats.separation_failures;
        since_t = 2;
        continue;
      }
      if (good) {
        ZeroDimParam out{z.Q, std::vector<Poly>(inst.n), std::vector<u64>(inst.n)};
        for (std::size_t i = 0; i < inst.n; ++i) {
          out.V[order[i]] = z.V[i];
          out.t[order[i]] = z.t[i];
        }
        res.param = std::move(out);
        res.minpoly = tr.P;
        res.D_A = tr.cache.D_A;
        res.D_B = inst.D - tr.cache.D_A;
        res.stats.retries = attempt;
        res.stats.total_seconds = seconds_since(t0);
        return res;
      }
    } catch (const NonSeparating&) {
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
      ++res.stats.separation_failures;
      since_t = 2;
    } catch (const NotCoprime&) {
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
      since_t = 2;
    } catch (const RandomnessFailure&) {
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
    } catch (const NotInvertible&) {
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
    }
  }
  throw UnluckyRandomness("splitting solver failed after " + std::to_string(opt.retries) + " retries");
}

}  // namespace bfglm

#include "bfglm/param.hpp"

#include <chrono>
#include <set>

namespace bfglm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string param_violation(const Modulus& K, const ZeroDimParam& z) {
  if (z.Q.is_zero() || z.Q.lc() != 1) return "Q is not monic";
  if (z.Q.deg() > 0 && gcd(K, z.Q, derivative(K, z.Q)).deg() != 0) return "Q is not squarefree";
  if (z.V.size() != z.t.size()) return "V and t lengths differ";
  for (const auto& v : z.V)
    if (v.deg() >= z.Q.deg()) return "deg V_i >= deg Q";
  Poly s;
  for (std::size_t i = 0; i < z.V.size(); ++i) s = add(K, s, scale(K, z.V[i], z.t[i]));
  if (rem(K, sub(K, s, Poly::monomial(1)), z.Q).deg() >= 0) return "sum t_i V_i != T mod Q";
  return {};
}

void check_instance(const Instance& inst) {
  if (!is_prime(inst.p)) throw InvalidInput("modulus is not prime");
  if (inst.n == 0 || inst.mats.size() != inst.n) throw InvalidInput("need one matrix per variable");
  if (inst.D == 0 || inst.D >= inst.p) throw InvalidInput("need 0 < D < p");
  for (const auto& M : inst.mats)
    if (M.dim() != inst.D) throw ShapeError("matrix dimension differs from D");
}

std::vector<u64> unit_vector(std::size_t D, std::size_t i) {
  std::vector<u64> e(D, 0);
  e.at(i) = 1;
  return e;
}

std::vector<u64> poly_apply(const Modulus& K, const SparseMat& M, const Poly& P, const std::vector<u64>& w) {
  std::vector<u64> r(w.size(), 0);
  for (int k = P.deg(); k >= 0; --k) {
    r = mat_vec(K, M, r);
    u64 c = P.c[k];
    if (c)
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = K.add(r[i], K.mul(c, w[i]));
  }
  return r;
}

ZeroDimParam parametrization_from_series(const Modulus& K, const ScalarSeq& ell_powers,
                                         const std::vector<ScalarSeq>& ell_coord, std::size_t bound,
                                         const std::vector<u64>& t) {
  if (ell_powers.size() < 2 * bound) throw InsufficientTerms("parametrization_from_series: need 2*bound terms");
  Poly P = berlekamp_massey(K, ell_powers, bound);
  ZeroDimParam z;
  z.Q = squarefree_part(K, P);
  z.t = t.empty() ? std::vector<u64>(ell_coord.size(), 0) : t;
  Poly C1 = scalar_numerator_direct(K, ell_powers, P);
  for (const auto& s : ell_coord) {
    if (s.size() < static_cast<std::size_t>(P.deg())) throw InsufficientTerms("coordinate sequence too short");
    z.V.push_back(divmod(K, scalar_numerator_direct(K, s, P), C1, z.Q));
  }
  return z;
}

ZeroDimParam block_parametrization(const Modulus& K, const Instance& inst, const DenseMat& U, const DenseMat& V,
                                   const std::vector<u64>& t, Rng& rng, const BlockOptions& opt,
                                   BlockTrace* trace) {
  auto t0 = std::chrono::steady_clock::now();
  check_instance(inst);
  std::size_t D = inst.D, m = U.cols;
  if (m == 0 || m > D || V.cols != m || U.rows != D || V.rows != D) throw ShapeError("bad block shapes");
  if (t.size() != inst.n) throw ShapeError("t must have n entries");
  BlockTrace local;
  BlockTrace& tr = trace ? *trace : local;

  tr.M = combine_matrices(K, t, inst.mats);
  std::size_t d = (D + m - 1) / m;
  auto tk = std::chrono::steady_clock::now();
  KrylovStream ks = krylov_stream(K, tr.M, U, V, 2 * d, d, opt.workers);
  tr.krylov_seconds = seconds_since(tk);
  tr.seq = std::move(ks.seq);
  tr.table = std::move(ks.table);

  tr.Pmat = minimal_matrix_generator(K, tr.seq, d, d, 2 * d);
  tr.P = largest_invariant_factor(K, tr.Pmat, rng);
  if (tr.P.deg() > static_cast<int>(D)) throw GenericityFailure("invariant factor degree exceeds D");
  tr.Q = squarefree_part(K, tr.P);
  tr.a1 = left_quotient_row(K, tr.Pmat, tr.P, 0);

  NumeratorInputs inp{tr.Pmat, tr.P, tr.a1, tr.table};
  tr.C1 = scalar_numerator(K, inp, unit_vector(D));
  tr.CX.clear();
  ZeroDimParam z;
  z.Q = tr.Q;
  z.t = t;
  for (const auto& Mi : inst.mats) {
    tr.CX.push_back(scalar_numerator(K, inp, mat_vec(K, Mi, unit_vector(D))));
    z.V.push_back(divmod(K, tr.CX.back(), tr.C1, tr.Q));
  }
  tr.total_seconds = seconds_since(t0);
  return z;
}

bool separation_check(const Modulus& K, const Instance& inst, const SparseMat& Mx, const Poly& P,
                      const ZeroDimParam& z, Rng& rng) {
  std::vector<u64> w(inst.D);
  for (auto& x : w) x = rng.elem(K);
  std::vector<u64> y = poly_apply(K, Mx, quo(K, P, z.Q), w);
  std::vector<std::vector<u64>> acc(inst.n, std::vector<u64>(inst.D, 0));
  std::vector<u64> yk = y;
  for (int k = 0; k < z.Q.deg(); ++k) {
    for (std::size_t i = 0; i < inst.n; ++i) {
      u64 c = z.V[i][k];
      if (c)
        for (std::size_t j = 0; j < inst.D; ++j) acc[i][j] = K.add(acc[i][j], K.mul(c, yk[j]));
    }
    if (k + 1 < z.Q.deg()) yk = mat_vec(K, Mx, yk);
  }
  for (std::size_t i = 0; i < inst.n; ++i)
    if (mat_vec(K, inst.mats[i], y) != acc[i]) return false;
  return true;
}

SolveResult solve_block(const Modulus& K, const Instance& inst, Rng& rng, const SolveOptions& opt) {
  check_instance(inst);
  std::size_t m = std::min(opt.m, inst.D);
  if (m == 0) throw InvalidInput("block size must be positive");
  SolveResult res;
  auto t0 = std::chrono::steady_clock::now();
  auto fresh_t = [&] {
    std::vector<u64> t(inst.n);
    for (auto& x : t) x = rng.elem(K);
    return t;
  };
  std::vector<u64> t = fresh_t();
  int since_t = 0;
  for (int attempt = 0; attempt <= opt.retries; ++attempt, ++since_t) {
    if (since_t >= 2) {
      t = fresh_t();
      since_t = 0;
    }
    DenseMat U = sample_block(K, rng, inst.D, m), V = sample_block(K, rng, inst.D, m);
    BlockTrace tr;
    auto ta = std::chrono::steady_clock::now();
    try {
      ZeroDimParam z = block_parametrization(K, inst, U, V, t, rng, {opt.workers, opt.method}, &tr);
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += tr.total_seconds;
      bool good = param_violation(K, z).empty();
      for (int k = 0; good && k < 2; ++k) {
        std::vector<u64> w(inst.D);
        for (auto& x : w) x = rng.elem(K);
        for (u64 x : poly_apply(K, tr.M, tr.P, w))
          if (x) good = false;
      }
      if (good && !separation_check(K, inst, tr.M, tr.P, z, rng)) {
        ++res.stats.separation_failures;
        since_t = 2;
        continue;
      }
      if (good) {
        res.param = std::move(z);
        res.minpoly = tr.P;
        res.stats.retries = attempt;
        res.stats.total_seconds = seconds_since(t0);
        return res;
      }
    } catch (const RandomnessFailure&) {
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
    } catch (const NotInvertible&) {
      res.stats.krylov_seconds += tr.krylov_seconds;
      res.stats.algorithm_seconds += seconds_since(ta);
    }
  }
  throw UnluckyRandomness("block solver failed after " + std::to_string(opt.retries) + " retries");
}

VerifyReport verify_against_points(const Modulus& K, const ZeroDimParam& z,
                                   const std::vector<std::vector<u64>>& truth) {
  VerifyReport rep;
  if (truth.empty()) {
    rep.notes.push_back("warning: empty truth list, nothing checked");
    return rep;
  }
  std::set<u64> xs;
  for (const auto& a : truth) {
    PointReport pr{a, true};
    if (a.size() != z.V.size()) {
      pr.ok = false;
    } else {
      u64 x = 0;
      for (std::size_t i = 0; i < a.size(); ++i) x = K.add(x, K.mul(z.t[i], a[i]));
      xs.insert(x);
      if (eval(K, z.Q, x) != 0) pr.ok = false;
      for (std::size_t i = 0; pr.ok && i < a.size(); ++i)
        if (eval(K, z.V[i], x) != a[i] % K.p()) pr.ok = false;
    }
    if (!pr.ok) rep.ok = false;
    rep.points.push_back(std::move(pr));
  }
  if (z.Q.deg() != static_cast<int>(xs.size())) {
    rep.degree_ok = false;
    rep.ok = false;
    rep.notes.push_back("deg Q = " + std::to_string(z.Q.deg()) + " but truth has " + std::to_string(xs.size()) +
                        " distinct values of X");
  }
  return rep;
}

}  // namespace bfglm

#pragma once

#include <string>
#include <vector>

#include "bfglm/numerators.hpp"
#include "bfglm/polymat.hpp"
#include "bfglm/sparse.hpp"

namespace bfglm {

struct ZeroDimParam {
  Poly Q;
  std::vector<Poly> V;
  std::vector<u64> t;  // separating form sum t_i X_i

  bool operator==(const ZeroDimParam& o) const = default;
};

// Empty string when all invariants hold, otherwise the first violation.
std::string param_violation(const Modulus& K, const ZeroDimParam& z);

struct Instance {
  u64 p = 0;
  std::size_t n = 0, D = 0;
  std::vector<SparseMat> mats;
};

void check_instance(const Instance& inst);
std::vector<u64> unit_vector(std::size_t D, std::size_t i = 0);
// P(M) w, Horner with matrix-vector products.
std::vector<u64> poly_apply(const Modulus& K, const SparseMat& M, const Poly& P, const std::vector<u64>& w);

ZeroDimParam parametrization_from_series(const Modulus& K, const ScalarSeq& ell_powers,
                                         const std::vector<ScalarSeq>& ell_coord, std::size_t bound,
                                         const std::vector<u64>& t = {});

struct BlockOptions {
  std::size_t workers = 1;
  ApproxMethod method = ApproxMethod::DivideConquer;
};

// Intermediates of one run.
struct BlockTrace {
  SparseMat M;
  std::vector<DenseMat> seq;
  KrylovTable table;
  PolyMat Pmat;
  Poly P, Q;
  PolyMat a1;
  Poly C1;
  std::vector<Poly> CX;
  double krylov_seconds = 0, total_seconds = 0;
};

ZeroDimParam block_parametrization(const Modulus& K, const Instance& inst, const DenseMat& U, const DenseMat& V,
                                   const std::vector<u64>& t, Rng& rng, const BlockOptions& opt = {},
                                   BlockTrace* trace = nullptr);

struct SolveOptions {
  std::size_t m = 2;
  std::size_t workers = 1;
  int retries = 6;
  ApproxMethod method = ApproxMethod::DivideConquer;
};

struct SolveStats {
  int retries = 0;
  int separation_failures = 0;  // retries caused by a non-separating t
  // total includes the post-checks; algorithm covers only the solver runs
  double total_seconds = 0, algorithm_seconds = 0, krylov_seconds = 0;
  double krylov_fraction() const { return algorithm_seconds > 0 ? krylov_seconds / algorithm_seconds : 0; }
};

struct SolveResult {
  ZeroDimParam param;
  SolveStats stats;
  Poly minpoly;  // P of the accepted run
};

// X_i - V_i(X) vanishes on (P/Q)(X) w for a random w, for every i. Fails
// when X does not separate the points.
bool separation_check(const Modulus& K, const Instance& inst, const SparseMat& Mx, const Poly& P,
                      const ZeroDimParam& z, Rng& rng);

// Random t, U, V with retries; the accepted P passes P(M)w = 0 for random w.
SolveResult solve_block(const Modulus& K, const Instance& inst, Rng& rng, const SolveOptions& opt);

struct PointReport {
  std::vector<u64> point;
  bool ok = false;
};

struct VerifyReport {
  bool ok = true;
  bool degree_ok = true;
  std::vector<PointReport> points;
  std::vector<std::string> notes;
};

VerifyReport verify_against_points(const Modulus& K, const ZeroDimParam& z,
                                   const std::vector<std::vector<u64>>& truth);

}  // namespace bfglm

#pragma once

#include <vector>

#include "bfglm/param.hpp"

namespace bfglm {

// State kept from the solve on X_1 alone.
struct X1SolveCache {
  DenseMat U, V;
  KrylovTable table;          // first d blocks of U^T M_1^s
  std::vector<DenseMat> seq;
  PolyMat Pmat;
  Poly M_min;                 // minimal polynomial of X_1
  std::vector<PolyMat> a_rows;
  ZeroDimParam param_A;       // (F, G_1 = T, G_2, ...) on X_1
  std::size_t D_A = 0;
  double krylov_seconds = 0;
};

struct CorrectionSet {
  std::vector<DenseMat> delta;                   // 2 d_B terms, m x m
  std::vector<DenseMat> delta_coord;             // d_B terms, m x n
  std::vector<std::vector<u64>> delta_one;       // d_B terms, length m
  std::size_t D_B = 0;
};

// d_B = max(1, ceil(D_B / m)).
std::size_t residual_blocks(std::size_t D_B, std::size_t m);

// y holds the n-1 weights of Y = sum_{k>=2} y_k X_k.
ZeroDimParam block_parametrization_x1(const Modulus& K, const Instance& inst, const DenseMat& U, const DenseMat& V,
                                      const std::vector<u64>& y, Rng& rng, const BlockOptions& opt,
                                      X1SolveCache& cache);

// Values of the A-part of the form with numerator C at X^s, s < tau.
ScalarSeq decompose(const Modulus& K, const Poly& M_min, const Poly& C, const ZeroDimParam& param_A,
                    const std::vector<u64>& t, std::size_t tau);

CorrectionSet correction_matrices(const Modulus& K, const X1SolveCache& cache, const Instance& inst,
                                  const std::vector<u64>& t, std::size_t workers = 1);

struct ResidualTrace {
  std::vector<DenseMat> seq;  // corrected terms
  PolyMat Pmat;
  Poly S, R;
  double krylov_seconds = 0;
};

ZeroDimParam block_parametrization_residual(const Modulus& K, const Instance& inst, const DenseMat& U,
                                            const DenseMat& V, const CorrectionSet& corr,
                                            const std::vector<u64>& t, Rng& rng, const BlockOptions& opt,
                                            ResidualTrace* trace = nullptr);

ZeroDimParam change_separating_element(const Modulus& K, const ZeroDimParam& param, const std::vector<u64>& t,
                                       Rng& rng);

ZeroDimParam union_params(const Modulus& K, const ZeroDimParam& pA, const ZeroDimParam& pB);

struct SplitTrace {
  X1SolveCache cache;
  CorrectionSet corr;
  ResidualTrace residual;
  ZeroDimParam param_A_on_X, param_B;
  Poly P;  // minimal polynomial of X: product of the A-part and S
  double krylov_seconds = 0;
};

ZeroDimParam block_parametrization_with_splitting(const Modulus& K, const Instance& inst, const DenseMat& U,
                                                  const DenseMat& V, const std::vector<u64>& t,
                                                  const std::vector<u64>& y, Rng& rng,
                                                  const BlockOptions& opt = {}, SplitTrace* trace = nullptr);

struct SplitOptions : SolveOptions {
  std::size_t x1_index = 0;
};

struct SplitResult : SolveResult {
  std::size_t D_A = 0, D_B = 0;
};

SplitResult solve_split(const Modulus& K, const Instance& inst, Rng& rng, const SplitOptions& opt);

}  // namespace bfglm

#pragma once

#include <vector>

#include "bfglm/polymat.hpp"
#include "bfglm/sparse.hpp"

namespace bfglm {

struct NumeratorInputs {
  const PolyMat& Pmat;
  const Poly& s1;
  const PolyMat& a_row;  // 1 x m
  const KrylovTable& table;
};

// (P * sum_{s<d} E_{d-1-s} T^s) div T^d with d = terms.size(); needs d >= deg P.
PolyMat matrix_numerator(const Modulus& K, const std::vector<DenseMat>& terms, const PolyMat& Pmat);

// a_row * Omega for precomputed column terms E_s (m-vectors).
Poly scalar_numerator_from_terms(const Modulus& K, const PolyMat& Pmat, const PolyMat& a_row,
                                 const std::vector<std::vector<u64>>& terms);

Poly scalar_numerator(const Modulus& K, const NumeratorInputs& inp, const std::vector<u64>& w);

// Same with E_s = L_s w - corrections[s]; one correction per table block.
Poly scalar_numerator_corrected(const Modulus& K, const NumeratorInputs& inp, const std::vector<u64>& w,
                                const std::vector<std::vector<u64>>& corrections);

}  // namespace bfglm

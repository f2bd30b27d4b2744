#include "bfglm/numerators.hpp"

namespace bfglm {

PolyMat matrix_numerator(const Modulus& K, const std::vector<DenseMat>& terms, const PolyMat& Pmat) {
  std::size_t m = Pmat.rows;
  if (Pmat.cols != m) throw ShapeError("matrix_numerator: generator must be square");
  std::size_t d = terms.size();
  if (d == 0 || static_cast<long>(d) < Pmat.deg()) throw InsufficientTerms("matrix_numerator: not enough terms");
  std::size_t k = terms[0].cols;
  for (const auto& E : terms)
    if (E.rows != m || E.cols != k) throw ShapeError("matrix_numerator: term shape mismatch");
  PolyMat S(m, k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<u64> c(d);
      for (std::size_t s = 0; s < d; ++s) c[d - 1 - s] = terms[s](i, j);
      S(i, j) = Poly(std::move(c));
    }
  return pm_shift_down(pm_mul(K, Pmat, S), d);
}

Poly scalar_numerator_from_terms(const Modulus& K, const PolyMat& Pmat, const PolyMat& a_row,
                                 const std::vector<std::vector<u64>>& terms) {
  std::size_t m = Pmat.rows;
  if (a_row.rows != 1 || a_row.cols != m) throw ShapeError("scalar_numerator: a_row must be 1 x m");
  std::vector<DenseMat> E;
  E.reserve(terms.size());
  for (const auto& v : terms) {
    if (v.size() != m) throw ShapeError("scalar_numerator: term length mismatch");
    DenseMat c(m, 1);
    c.a = v;
    E.push_back(std::move(c));
  }
  PolyMat Om = matrix_numerator(K, E, Pmat);
  return pm_mul(K, a_row, Om)(0, 0);
}

Poly scalar_numerator(const Modulus& K, const NumeratorInputs& inp, const std::vector<u64>& w) {
  return scalar_numerator_from_terms(K, inp.Pmat, inp.a_row, project_vector(K, inp.table, w));
}

Poly scalar_numerator_corrected(const Modulus& K, const NumeratorInputs& inp, const std::vector<u64>& w,
                                const std::vector<std::vector<u64>>& corrections) {
  auto E = project_vector(K, inp.table, w);
  if (corrections.size() != E.size()) throw ShapeError("scalar_numerator_corrected: correction count mismatch");
  for (std::size_t s = 0; s < E.size(); ++s) {
    if (corrections[s].size() != E[s].size()) throw ShapeError("scalar_numerator_corrected: length mismatch");
    for (std::size_t i = 0; i < E[s].size(); ++i) E[s][i] = K.sub(E[s][i], corrections[s][i]);
  }
  return scalar_numerator_from_terms(K, inp.Pmat, inp.a_row, E);
}

}  // namespace bfglm

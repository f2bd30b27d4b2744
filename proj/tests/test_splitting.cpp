#include "doctest.h"

#include "bfglm/splitting.hpp"
#include "bfglm/toolkit.hpp"
#include "oracles.hpp"

using namespace bfglm;

namespace {

Poly P_(std::initializer_list<u64> c) { return Poly(std::vector<u64>(c)); }

struct Case {
  GroundTruth g;
  Instance inst;
};

Case make_case(const Modulus& K, Rng& rng, TruthRequest req) {
  Case c;
  c.g = random_truth(K, req, rng);
  c.inst = generate_instance(K, c.g, rng);
  return c;
}

std::vector<u64> rand_vec(const Modulus& K, Rng& rng, std::size_t n) {
  std::vector<u64> v(n);
  for (auto& x : v) x = rng.elem(K);
  return v;
}

// Dense P(A).
DenseMat dense_poly(const Modulus& K, const DenseMat& A, const Poly& P) {
  DenseMat R(A.rows, A.cols);
  for (int k = P.deg(); k >= 0; --k) {
    R = mat_mul(K, R, A);
    for (std::size_t i = 0; i < A.rows; ++i) R(i, i) = K.add(R(i, i), P[k]);
  }
  return R;
}

// Runs the X_1 stage, retrying randomness.
ZeroDimParam solve_x1(const Modulus& K, const Instance& inst, Rng& rng, std::size_t m, X1SolveCache& cache) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    try {
      return block_parametrization_x1(K, inst, sample_block(K, rng, inst.D, m), sample_block(K, rng, inst.D, m),
                                      rand_vec(K, rng, inst.n - 1), rng, {}, cache);
    } catch (const RandomnessFailure&) {
    } catch (const NotInvertible&) {
    }
  }
  FAIL("X_1 stage kept failing");
  return {};
}

bool x1_root(const Modulus& K, const ZeroDimParam& pA, u64 a) { return eval(K, pA.Q, a) == 0; }

}  // namespace

TEST_SUITE("splitting") {

TEST_CASE("X_1 stage keeps simple points with unique first coordinate") {
  Modulus K(65537);
  Rng rng(41);
  TruthRequest req;
  req.n = 3;
  req.D = 25;
  Case c = make_case(K, rng, req);
  X1SolveCache cache;
  ZeroDimParam pA = solve_x1(K, c.inst, rng, 2, cache);
  CHECK(cache.D_A == 25);
  CHECK(pA.Q == squarefree_part(K, cache.M_min));
  CHECK(verify_against_points(K, pA, c.g.distinct_points()).ok);
  for (std::size_t i = 0; i < cache.a_rows.size(); ++i) {
    PolyMat aP = pm_mul(K, cache.a_rows[i], cache.Pmat);
    for (std::size_t j = 0; j < aP.cols; ++j) CHECK(aP(0, j) == (i == j ? cache.M_min : Poly()));
  }
}

TEST_CASE("X_1 stage drops collisions, double points and hidden multiplicity") {
  Modulus K(65537);
  Rng rng(42);
  TruthRequest req;
  req.n = 3;
  req.D = 30;
  req.collide = 2;
  req.doubles = 2;
  req.hidden = 2;
  Case c = make_case(K, rng, req);
  X1SolveCache cache;
  ZeroDimParam pA = solve_x1(K, c.inst, rng, 3, cache);
  std::size_t expect = 0;
  for (std::size_t j = 0; j < c.g.points.size(); ++j) {
    const auto& pt = c.g.points[j];
    bool shared = false;
    for (std::size_t k = 0; k < c.g.points.size(); ++k)
      shared |= k != j && c.g.points[k].coords[0] == pt.coords[0];
    bool good = pt.nu == 1 && !shared;
    expect += good;
    CHECK(x1_root(K, pA, pt.coords[0]) == good);
  }
  CHECK(cache.D_A == expect);
}

TEST_CASE("square test vanishes on good points and rarely on bad ones") {
  Modulus K(65537);
  Rng rng(43);
  TruthRequest req;
  req.n = 3;
  req.D = 16;
  req.collide = 1;
  req.hidden = 1;
  Case c = make_case(K, rng, req);
  X1SolveCache cache;
  solve_x1(K, c.inst, rng, 2, cache);
  NumeratorInputs inp{cache.Pmat, cache.M_min, cache.a_rows[0], cache.table};
  int good_zero = 0, good_total = 0, bad_nonzero = 0, bad_total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<u64> ty = rand_vec(K, rng, 3);
    ty[0] = 0;
    SparseMat N = combine_matrices(K, ty, c.inst.mats);
    std::vector<u64> w = unit_vector(c.inst.D);
    Poly A[3];
    for (int j = 0; j < 3; ++j) {
      A[j] = scalar_numerator(K, inp, w);
      w = mat_vec(K, N, w);
    }
    Poly acb = sub(K, mul(K, A[0], A[2]), mul(K, A[1], A[1]));
    for (std::size_t j = 0; j < c.g.points.size(); ++j) {
      const auto& pt = c.g.points[j];
      bool shared = false;
      for (std::size_t k = 0; k < c.g.points.size(); ++k)
        shared |= k != j && c.g.points[k].coords[0] == pt.coords[0];
      u64 v = eval(K, acb, pt.coords[0]);
      if (pt.nu == 1 && !shared) {
        ++good_total;
        good_zero += v == 0;
      } else {
        ++bad_total;
        bad_nonzero += v != 0;
      }
    }
  }
  CHECK(good_zero == good_total);
  CHECK(bad_nonzero >= 0.95 * bad_total);
}

TEST_CASE("corrections match the idempotent projection") {
  Modulus K(65537);
  Rng rng(44);
  TruthRequest req;
  req.n = 2;
  req.D = 18;
  req.collide = 1;
  req.doubles = 2;
  Case c = make_case(K, rng, req);
  X1SolveCache cache;
  ZeroDimParam pA = solve_x1(K, c.inst, rng, 2, cache);
  std::vector<u64> t = rand_vec(K, rng, 2);
  CorrectionSet cs = correction_matrices(K, cache, c.inst, t, 2);
  std::size_t dB = residual_blocks(cs.D_B, 2);
  CHECK(cs.D_B == 18 - cache.D_A);
  CHECK(cs.delta.size() == 2 * dB);
  CHECK(cs.delta_coord.size() == dB);
  CHECK(cs.delta_one.size() == dB);

  // idempotent: 1 mod F, 0 mod M_min / F
  Poly E = quo(K, cache.M_min, pA.Q);
  Poly e = crt_pair(K, Poly::constant(1), pA.Q, Poly(), E);
  DenseMat M1 = c.inst.mats[0].to_dense();
  DenseMat Pi = dense_poly(K, M1, e);
  DenseMat M = combine_matrices(K, t, c.inst.mats).to_dense();
  auto full = oracle::dense_krylov(K, M, cache.U, mat_mul(K, Pi, cache.V), 2 * dB);
  for (std::size_t s = 0; s < 2 * dB; ++s) CHECK(cs.delta[s] == full[s]);
  DenseMat cols(18, 2);
  for (std::size_t k = 0; k < 2; ++k) {
    auto v = mat_vec(K, c.inst.mats[k], unit_vector(18));
    for (std::size_t r = 0; r < 18; ++r) cols(r, k) = v[r];
  }
  auto coord = oracle::dense_krylov(K, M, cache.U, mat_mul(K, Pi, cols), dB);
  for (std::size_t s = 0; s < dB; ++s) CHECK(cs.delta_coord[s] == coord[s]);
  DenseMat e1(18, 1);
  e1(0, 0) = 1;
  auto one = oracle::dense_krylov(K, M, cache.U, mat_mul(K, Pi, e1), dB);
  for (std::size_t s = 0; s < dB; ++s) CHECK(cs.delta_one[s] == one[s].a);
}

TEST_CASE("radical instance: corrections are the whole sequence") {
  Modulus K(65537);
  Rng rng(45);
  TruthRequest req;
  req.n = 2;
  req.D = 12;
  Case c = make_case(K, rng, req);
  X1SolveCache cache;
  ZeroDimParam pA = solve_x1(K, c.inst, rng, 2, cache);
  REQUIRE(cache.D_A == 12);
  std::vector<u64> t = rand_vec(K, rng, 2);
  DenseMat M = combine_matrices(K, t, c.inst.mats).to_dense();
  auto seq = oracle::dense_krylov(K, M, cache.U, cache.V, 6);
  std::vector<u64> v1(12);
  for (std::size_t r = 0; r < 12; ++r) v1[r] = cache.V(r, 1);
  std::vector<DenseMat> E;
  for (auto& v : project_vector(K, cache.table, v1)) {
    DenseMat x(2, 1);
    x.a = v;
    E.push_back(x);
  }
  PolyMat Om = matrix_numerator(K, E, cache.Pmat);
  for (std::size_t i = 0; i < 2; ++i) {
    Poly C;
    for (std::size_t j = 0; j < 2; ++j) C = add(K, C, mul(K, cache.a_rows[i](0, j), Om(j, 0)));
    ScalarSeq got = decompose(K, cache.M_min, C, pA, t, 6);
    for (std::size_t s = 0; s < 6; ++s) CHECK(got[s] == seq[s](i, 1));
  }
  CHECK(decompose(K, cache.M_min, Poly(), pA, t, 4) == ScalarSeq(4, 0));
  CHECK(decompose(K, cache.M_min, Poly::constant(3), pA, t, 0).empty());
}

TEST_CASE("empty A part gives zero corrections") {
  Modulus K(65537);
  Rng rng(46);
  TruthRequest req;
  req.n = 2;
  req.D = 9;
  req.same_x1 = true;
  Case c = make_case(K, rng, req);
  X1SolveCache cache;
  solve_x1(K, c.inst, rng, 2, cache);
  CHECK(cache.D_A == 0);
  CorrectionSet cs = correction_matrices(K, cache, c.inst, {1, 2});
  CHECK(cs.D_B == 9);
  CHECK(cs.delta.size() == 10);
  for (const auto& d : cs.delta)
    for (u64 x : d.a) CHECK(x == 0);
}

TEST_CASE("residual recovers the B points") {
  Modulus K(65537);
  Rng rng(47);
  GroundTruth g;
  g.points = {{{3, 4}, 2, {1, 6}}, {{10, 11}, 1, {}}, {{20, 21}, 1, {}}, {{30, 31}, 1, {}}};
  Instance inst = generate_instance(K, g, rng);
  std::vector<u64> t{5, 7};
  for (int attempt = 0;; ++attempt) {
    REQUIRE(attempt < 6);
    try {
      X1SolveCache cache;
      DenseMat U = sample_block(K, rng, 5, 2), V = sample_block(K, rng, 5, 2);
      block_parametrization_x1(K, inst, U, V, {rng.elem(K)}, rng, {}, cache);
      REQUIRE(cache.D_A == 3);
      CorrectionSet cs = correction_matrices(K, cache, inst, t);
      ZeroDimParam pB = block_parametrization_residual(K, inst, U, V, cs, t, rng, {});
      u64 x = K.add(K.mul(5, 3), K.mul(7, 4));
      CHECK(pB.Q == P_({K.neg(x), 1}));
      CHECK(pB.V[0] == P_({3}));
      CHECK(pB.V[1] == P_({4}));
      CorrectionSet none;
      CHECK_THROWS_AS(block_parametrization_residual(K, inst, U, V, none, t, rng, {}), InvalidInput);
      break;
    } catch (const RandomnessFailure&) {
    }
  }
}

TEST_CASE("residual with a collision pair") {
  Modulus K(65537);
  Rng rng(48);
  GroundTruth g;
  g.points = {{{3, 4}, 1, {}}, {{3, 9}, 1, {}}, {{10, 11}, 1, {}}, {{20, 21}, 1, {}}};
  Instance inst = generate_instance(K, g, rng);
  std::vector<u64> t{5, 7};
  X1SolveCache cache;
  for (int attempt = 0;; ++attempt) {
    REQUIRE(attempt < 6);
    try {
      DenseMat U = sample_block(K, rng, 4, 2), V = sample_block(K, rng, 4, 2);
      block_parametrization_x1(K, inst, U, V, {rng.elem(K)}, rng, {}, cache);
      CorrectionSet cs = correction_matrices(K, cache, inst, t);
      ZeroDimParam pB = block_parametrization_residual(K, inst, U, V, cs, t, rng, {});
      CHECK(pB.Q.deg() == 2);
      CHECK(verify_against_points(K, pB, {{3, 4}, {3, 9}}).ok);
      break;
    } catch (const RandomnessFailure&) {
    }
  }
}

TEST_CASE("changing the separating element") {
  Modulus K(101);
  Rng rng(49);
  ZeroDimParam p{P_({3, 97, 1}), {P_({0, 1}), P_({5, 100})}, {1, 0}};
  ZeroDimParam same = change_separating_element(K, p, {1, 0}, rng);
  CHECK(same == p);
  ZeroDimParam q = change_separating_element(K, p, {2, 9}, rng);
  CHECK(q.Q.deg() == 2);
  CHECK(verify_against_points(K, q, {{1, 4}, {3, 2}}).ok);
  CHECK(param_violation(K, q).empty());
  // X_1 + X_2 is 5 at both points
  CHECK_THROWS_AS(change_separating_element(K, p, {1, 1}, rng), NonSeparating);
}

TEST_CASE("union of parametrizations") {
  Modulus K(101);
  std::vector<u64> t{1, 2};
  ZeroDimParam a{P_({K.neg(9), 1}), {P_({1}), P_({4})}, t};
  ZeroDimParam b{P_({K.neg(7), 1}), {P_({3}), P_({2})}, t};
  ZeroDimParam empty{P_({1}), {Poly(), Poly()}, t};
  CHECK(union_params(K, a, empty) == a);
  ZeroDimParam u = union_params(K, a, b);
  CHECK(u.Q == mul(K, a.Q, b.Q));
  CHECK(verify_against_points(K, u, {{1, 4}, {3, 2}}).ok);
  CHECK(param_violation(K, u).empty());
  CHECK_THROWS_AS(union_params(K, a, a), NotCoprime);
}

TEST_CASE("splitting agrees with the plain algorithm") {
  Modulus K(65537);
  Rng rng(50);
  for (int seed = 0; seed < 4; ++seed) {
    TruthRequest req;
    req.n = 3;
    req.D = 20 + 5 * seed;
    req.doubles = seed % 2;
    req.collide = seed / 2;
    req.same_x1 = seed == 3;
    Case c = make_case(K, rng, req);
    std::vector<u64> t = rand_vec(K, rng, 3);
    ZeroDimParam plain, split;
    bool have_plain = false, have_split = false;
    for (int attempt = 0; attempt < 6 && !(have_plain && have_split); ++attempt) {
      DenseMat U = sample_block(K, rng, c.inst.D, 2), V = sample_block(K, rng, c.inst.D, 2);
      try {
        if (!have_plain) {
          plain = block_parametrization(K, c.inst, U, V, t, rng);
          have_plain = true;
        }
        if (!have_split) {
          split = block_parametrization_with_splitting(K, c.inst, U, V, t, rand_vec(K, rng, 2), rng);
          have_split = true;
        }
      } catch (const RandomnessFailure&) {
      } catch (const NotInvertible&) {
      }
    }
    REQUIRE(have_plain);
    REQUIRE(have_split);
    CHECK(plain == split);
    CHECK(verify_against_points(K, split, c.g.distinct_points()).ok);
  }
}

TEST_CASE("solver wrapper with a different first variable") {
  Modulus K(65537);
  Rng rng(51);
  TruthRequest req;
  req.n = 3;
  req.D = 24;
  req.doubles = 1;
  Case c = make_case(K, rng, req);
  SplitOptions opt;
  opt.m = 2;
  opt.x1_index = 2;
  SplitResult r = solve_split(K, c.inst, rng, opt);
  CHECK(verify_against_points(K, r.param, c.g.distinct_points()).ok);
  CHECK(r.D_A + r.D_B == 24);
  CHECK(r.D_B >= 2);
}

}

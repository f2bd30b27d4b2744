#include "doctest.h"

#include <sstream>

#include "bfglm/toolkit.hpp"
#include "golden.hpp"

using namespace bfglm;

TEST_SUITE("toolkit") {

TEST_CASE("two simple points without mixing are diagonal") {
  Modulus K(101);
  GroundTruth g;
  g.points = {{{4, 10}, 1, {}}, {{5, 20}, 1, {}}};
  Rng rng(1);
  Instance inst = generate_instance(K, g, rng, {0, false});
  // unit column folds into index 0; eigenvalues stay on the diagonal
  DenseMat M1 = inst.mats[0].to_dense(), M2 = inst.mats[1].to_dense();
  CHECK(M1(0, 0) == 4);
  CHECK(M1(1, 1) == 5);
  CHECK(M2(0, 0) == 10);
  CHECK(M2(1, 1) == 20);
  CHECK(M1(0, 1) == 0);
  SolveResult r = solve_block(K, inst, rng, {2});
  CHECK(verify_against_points(K, r.param, g.distinct_points()).ok);
}

TEST_CASE("one simple point gives 1x1 matrices") {
  Modulus K(65537);
  GroundTruth g;
  g.points = {{{7, 8, 9}, 1, {}}};
  Rng rng(2);
  Instance inst = generate_instance(K, g, rng);
  CHECK(inst.D == 1);
  CHECK(inst.mats[2].at(0, 0) == 9);
}

TEST_CASE("generated matrices commute and represent the unit at index 0") {
  Modulus K(65537);
  Rng rng(3);
  TruthRequest req;
  req.n = 3;
  req.D = 40;
  req.doubles = 3;
  req.hidden = 2;
  req.collide = 2;
  GroundTruth g = random_truth(K, req, rng);
  CHECK(g.dimension() == 40);
  Instance inst = generate_instance(K, g, rng, {3});
  CHECK(inst.D == 40);
  CHECK(matrices_commute(K, inst, rng));
  // M_i e_0 must be the coordinates of X_i: its minimal polynomial has the point values as roots
  for (const auto& pt : g.points) {
    DenseMat A = inst.mats[0].to_dense();
    for (std::size_t i = 0; i < 40; ++i) A(i, i) = K.sub(A(i, i), pt.coords[0]);
    CHECK(determinant(K, A) == 0);
  }
}

TEST_CASE("double point leaves a square factor in the minimal polynomial of X_1") {
  Modulus K(65537);
  GroundTruth g;
  g.points = {{{3, 4}, 2, {1, 5}}, {{6, 7}, 1, {}}};
  Rng rng(4);
  Instance inst = generate_instance(K, g, rng);
  SparseMat M1 = inst.mats[0];
  Poly sq = mul(K, Poly{K.neg(3), 1}, Poly{K.neg(3), 1});
  Poly P = mul(K, sq, Poly{K.neg(6), 1});
  std::vector<u64> w{1, 2, 3};
  for (u64 x : poly_apply(K, M1, P, w)) CHECK(x == 0);
  bool nonzero = false;
  for (u64 x : poly_apply(K, M1, mul(K, Poly{K.neg(3), 1}, Poly{K.neg(6), 1}), w)) nonzero |= x != 0;
  CHECK(nonzero);
  CHECK(squarefree_part(K, P) == mul(K, Poly{K.neg(3), 1}, Poly{K.neg(6), 1}));
}

TEST_CASE("infeasible requests") {
  Modulus K(101);
  Rng rng(5);
  GroundTruth g;
  g.points = {{{1, 2}, 1, {}}, {{1, 2}, 1, {}}};
  CHECK_THROWS_AS(generate_instance(K, g, rng), InvalidSpec);
  TruthRequest req;
  req.D = 101;
  CHECK_THROWS_AS(random_truth(K, req, rng), InvalidSpec);
}

TEST_CASE("shape family keeps X_1 sparse") {
  Modulus K(65537);
  Rng rng(6);
  auto [inst, g] = generate_shape_instance(K, 3, 60, 6, rng);
  CHECK(matrices_commute(K, inst, rng));
  SparseMat M = combine_matrices(K, {3, 5, 7}, inst.mats);
  CHECK(inst.mats[0].density() <= 0.3 * M.density());
  SolveResult r = solve_block(K, inst, rng, {3});
  CHECK(verify_against_points(K, r.param, g.distinct_points()).ok);
}

TEST_CASE("instance round trip") {
  Modulus K(101);
  Instance inst = golden::instance(K);
  GroundTruth g;
  g.points = {{{4, 10}, 1, {}}, {{5, 20}, 2, {}}};
  std::ostringstream a;
  write_instance(a, inst, &g);
  std::istringstream in(a.str());
  std::optional<GroundTruth> back;
  Instance again = read_instance(in, &back);
  std::ostringstream b;
  write_instance(b, again, back ? &*back : nullptr);
  CHECK(a.str() == b.str());
  REQUIRE(back);
  CHECK(back->points[1].nu == 2);
}

TEST_CASE("format errors name the line") {
  Modulus K(101);
  std::ostringstream a;
  write_instance(a, golden::instance(K));
  std::string text = a.str();
  std::istringstream cut(text.substr(0, text.size() / 2));
  try {
    read_instance(cut);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).rfind("line ", 0) == 0);
  }
  std::string bad = text;
  bad.replace(bad.find("matrix 1 "), 11, "matrix 1 10");
  std::istringstream in(bad);
  CHECK_THROWS_AS(read_instance(in), FormatError);
  std::istringstream junk("BFGLM 2\n101 1 1\n");
  CHECK_THROWS_AS(read_instance(junk), FormatError);
}

TEST_CASE("param round trip") {
  ZeroDimParam z{Poly{61, 8, 1}, {Poly{14, 15}, Poly{}}, {2, 53}};
  std::ostringstream os;
  write_param(os, 101, z);
  std::istringstream is(os.str());
  u64 p = 0;
  CHECK(read_param(is, &p) == z);
  CHECK(p == 101);
}

TEST_CASE("verification of the worked example output") {
  Modulus K(101);
  Instance inst = golden::instance(K);
  ZeroDimParam z{Poly{61, 8, 1}, {Poly{14, 15}, Poly{9, 49}}, {2, 53}};
  Rng rng(7);
  auto rep = verify_solution(K, inst, z, nullptr, rng);
  CHECK(rep.ok);
  CHECK_FALSE(rep.certified);
  CHECK(rep.status == "subset-consistent");
  ZeroDimParam bad = z;
  bad.V[0] = Poly{15, 15};
  bad.V[1] = sub(K, Poly{0, 1}, scale(K, bad.V[0], 2));
  bad.V[1] = scale(K, bad.V[1], K.inv(53));
  auto rb = verify_solution(K, inst, bad, nullptr, rng);
  CHECK_FALSE(rb.ok);
}

TEST_CASE("radical generated instance certifies") {
  Modulus K(65537);
  Rng rng(8);
  TruthRequest req;
  req.n = 2;
  req.D = 30;
  GroundTruth g = random_truth(K, req, rng);
  Instance inst = generate_instance(K, g, rng);
  SolveResult r = solve_block(K, inst, rng, {2});
  auto rep = verify_solution(K, inst, r.param, &g, rng);
  CHECK(rep.ok);
  CHECK(rep.status == "certified complete and radical");
  ZeroDimParam broken = r.param;
  broken.V[0] = add(K, broken.V[0], Poly::constant(1));
  broken.V[1] = sub(K, broken.V[1], Poly::constant(K.mul(broken.t[0], K.inv(broken.t[1]))));
  CHECK_FALSE(verify_solution(K, inst, broken, &g, rng).ok);
}

}

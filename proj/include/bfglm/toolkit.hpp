#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bfglm/param.hpp"

namespace bfglm {

struct PointSpec {
  std::vector<u64> coords;
  std::size_t nu = 1;      // block size; 1 = simple
  std::vector<u64> c;      // nilpotent coefficients c_i, used when nu > 1
};

struct GroundTruth {
  std::vector<PointSpec> points;
  std::size_t dimension() const;
  std::vector<std::vector<u64>> distinct_points() const;
};

struct TruthRequest {
  std::size_t n = 2, D = 10;
  std::size_t doubles = 0;   // points with nu = 2, c_1 != 0
  std::size_t hidden = 0;    // points with nu = 2, c_1 = 0
  std::size_t collide = 0;   // pairs of simple points sharing X_1
  bool same_x1 = false;      // every point shares X_1
};

// Random distinct points meeting the request; D counts block sizes.
GroundTruth random_truth(const Modulus& K, const TruthRequest& req, Rng& rng);

struct GenOptions {
  std::size_t k = 2;        // conjugation mixing; 0 keeps the block-diagonal form
  bool shuffle = true;
};

// Block-diagonal commuting matrices conjugated by a sparse change of basis
// whose first vector is the unit of the algebra.
Instance generate_instance(const Modulus& K, const GroundTruth& truth, Rng& rng, const GenOptions& opt = {});

// Radical instance in the basis 1, X_1, ..., X_1^{D-1}: M_1 is a companion
// matrix, M_k = V_k(M_1) with deg V_k <= vdeg. All X_1 values distinct.
std::pair<Instance, GroundTruth> generate_shape_instance(const Modulus& K, std::size_t n, std::size_t D,
                                                         std::size_t vdeg, Rng& rng);

// Text formats.
void write_instance(std::ostream& os, const Instance& inst, const GroundTruth* truth = nullptr);
Instance read_instance(std::istream& is, std::optional<GroundTruth>* truth = nullptr);
void write_instance_file(const std::string& path, const Instance& inst, const GroundTruth* truth = nullptr);
Instance read_instance_file(const std::string& path, std::optional<GroundTruth>* truth = nullptr);

void write_param(std::ostream& os, u64 p, const ZeroDimParam& z);
ZeroDimParam read_param(std::istream& is, u64* p = nullptr);

struct SolutionReport {
  bool ok = true;
  bool certified = false;  // deg Q = D
  std::string status;
  std::vector<std::string> notes;
};

SolutionReport verify_solution(const Modulus& K, const Instance& inst, const ZeroDimParam& z,
                               const GroundTruth* truth, Rng& rng);

// Checks M_i M_j w = M_j M_i w on `trials` random vectors.
bool matrices_commute(const Modulus& K, const Instance& inst, Rng& rng, int trials = 5);

}  // namespace bfglm

#include "bfglm/toolkit.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace bfglm {

std::size_t GroundTruth::dimension() const {
  std::size_t D = 0;
  for (const auto& pt : points) D += pt.nu;
  return D;
}

std::vector<std::vector<u64>> GroundTruth::distinct_points() const {
  std::vector<std::vector<u64>> out;
  for (const auto& pt : points) out.push_back(pt.coords);
  return out;
}

GroundTruth random_truth(const Modulus& K, const TruthRequest& req, Rng& rng) {
  if (req.n == 0 || req.D == 0 || req.D >= K.p()) throw InvalidSpec("need n > 0 and 0 < D < p");
  std::size_t fat = req.doubles + req.hidden;
  if (2 * fat > req.D) throw InvalidSpec("too many double points for D");
  std::size_t simple = req.D - 2 * fat;
  if (2 * req.collide > simple) throw InvalidSpec("too many collision pairs");
  if ((req.collide > 0 || req.hidden > 0 || req.same_x1) && req.n < 2) throw InvalidSpec("needs n >= 2");
  std::size_t npts = simple + fat;
  if (req.same_x1 && npts > K.p()) throw InvalidSpec("too many points sharing X_1");

  GroundTruth g;
  std::set<u64> used_x1;
  std::set<std::vector<u64>> seen;
  u64 common = rng.elem(K);
  auto fresh_x1 = [&] {
    if (req.same_x1) return common;
    u64 a;
    do a = rng.elem(K);
    while (!used_x1.insert(a).second);
    return a;
  };
  auto add_point = [&](u64 x1, std::size_t nu, std::vector<u64> c) {
    std::vector<u64> a(req.n);
    do {
      a[0] = x1;
      for (std::size_t i = 1; i < req.n; ++i) a[i] = rng.elem(K);
    } while (seen.count(a));
    seen.insert(a);
    g.points.push_back({a, nu, std::move(c)});
  };
  for (std::size_t j = 0; j < req.collide; ++j) {
    u64 x = fresh_x1();
    add_point(x, 1, {});
    add_point(x, 1, {});
  }
  for (std::size_t j = 0; j < req.doubles; ++j) {
    std::vector<u64> c(req.n);
    c[0] = rng.nonzero(K);
    for (std::size_t i = 1; i < req.n; ++i) c[i] = rng.elem(K);
    add_point(fresh_x1(), 2, c);
  }
  for (std::size_t j = 0; j < req.hidden; ++j) {
    std::vector<u64> c(req.n, 0);
    for (std::size_t i = 1; i < req.n; ++i) c[i] = rng.nonzero(K);
    add_point(fresh_x1(), 2, c);
  }
  while (g.points.size() < npts) add_point(fresh_x1(), 1, {});
  return g;
}

namespace {

void scatter_block(const std::vector<std::size_t>& idx, const DenseMat& B, std::vector<Triplet>& acc) {
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c)
      if (B(r, c)) acc.push_back({idx[r], idx[c], B(r, c)});
}

}  // namespace

Instance generate_instance(const Modulus& K, const GroundTruth& truth, Rng& rng, const GenOptions& opt) {
  if (truth.points.empty()) throw InvalidSpec("no points requested");
  std::size_t n = truth.points[0].coords.size();
  std::size_t D = truth.dimension();
  if (n == 0 || D >= K.p()) throw InvalidSpec("need n > 0 and D < p");
  std::set<std::vector<u64>> seen;
  for (const auto& pt : truth.points) {
    if (pt.coords.size() != n || pt.nu == 0) throw InvalidSpec("inconsistent point description");
    if (pt.nu > 1 && pt.c.size() != n) throw InvalidSpec("nilpotent point needs n coefficients");
    if (!seen.insert(pt.coords).second) throw InvalidSpec("duplicate point");
  }

  std::vector<std::size_t> order(truth.points.size());
  std::iota(order.begin(), order.end(), 0);
  if (opt.shuffle)
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<std::vector<Triplet>> ent(n);
  std::vector<u64> unit(D, 0);
  std::size_t pos = 0;
  for (std::size_t j : order) {
    const auto& pt = truth.points[j];
    unit[pos] = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < pt.nu; ++r) {
        ent[i].push_back({pos + r, pos + r, pt.coords[i] % K.p()});
        if (r + 1 < pt.nu) ent[i].push_back({pos + r + 1, pos + r, pt.c[i] % K.p()});
      }
    pos += pt.nu;
  }

  // E: column 0 becomes the unit vector of the algebra.
  std::vector<Triplet> e, ei;
  for (std::size_t r = 0; r < D; ++r) {
    e.push_back({r, r, 1});
    ei.push_back({r, r, 1});
    if (r > 0 && unit[r]) {
      e.push_back({r, 0, unit[r]});
      ei.push_back({r, 0, K.neg(unit[r])});
    }
  }
  SparseMat S(K, D, e), Si(K, D, ei);

  if (opt.k > 0 && D > 2) {
    // G: random groups of size k+1 among indices 1..D-1, unit lower triangular on each.
    std::vector<std::size_t> perm(D - 1);
    std::iota(perm.begin(), perm.end(), 1);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<Triplet> g{{0, 0, 1}}, gi{{0, 0, 1}};
    for (std::size_t s = 0; s < perm.size(); s += opt.k + 1) {
      std::vector<std::size_t> idx(perm.begin() + s, perm.begin() + std::min(perm.size(), s + opt.k + 1));
      DenseMat L = DenseMat::identity(idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < r; ++c) L(r, c) = rng.elem(K);
      scatter_block(idx, L, g);
      scatter_block(idx, inverse(K, L), gi);
    }
    SparseMat G(K, D, g), Gi(K, D, gi);
    S = sparse_mul(K, S, G);
    Si = sparse_mul(K, Gi, Si);
  }

  Instance inst;
  inst.p = K.p();
  inst.n = n;
  inst.D = D;
  for (std::size_t i = 0; i < n; ++i) {
    SparseMat M(K, D, ent[i]);
    inst.mats.push_back(sparse_mul(K, Si, sparse_mul(K, M, S)));
  }
  return inst;
}

std::pair<Instance, GroundTruth> generate_shape_instance(const Modulus& K, std::size_t n, std::size_t D,
                                                         std::size_t vdeg, Rng& rng) {
  if (n == 0 || D == 0 || D >= K.p()) throw InvalidSpec("need n > 0 and 0 < D < p");
  std::set<u64> xs;
  std::vector<u64> alpha;
  while (alpha.size() < D) {
    u64 a = rng.elem(K);
    if (xs.insert(a).second) alpha.push_back(a);
  }
  Poly F = from_roots(K, alpha);
  std::vector<Poly> Vk(n);
  Vk[0] = Poly::monomial(1);
  std::size_t vd = std::min(vdeg, D - 1);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<u64> c(vd + 1);
    for (auto& x : c) x = rng.elem(K);
    Vk[k] = rem(K, Poly(std::move(c)), F);
  }
  GroundTruth g;
  for (u64 a : alpha) {
    std::vector<u64> pt(n);
    for (std::size_t k = 0; k < n; ++k) pt[k] = eval(K, Vk[k], a);
    g.points.push_back({pt, 1, {}});
  }
  Instance inst;
  inst.p = K.p();
  inst.n = n;
  inst.D = D;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Triplet> ent;
    Poly col = rem(K, Vk[k], F);
    for (std::size_t j = 0; j < D; ++j) {
      for (std::size_t r = 0; r < col.c.size(); ++r)
        if (col.c[r]) ent.push_back({r, j, col.c[r]});
      if (j + 1 < D) col = rem(K, shift_up(col, 1), F);
    }
    inst.mats.emplace_back(K, D, std::move(ent));
  }
  return {inst, g};
}

void write_instance(std::ostream& os, const Instance& inst, const GroundTruth* truth) {
  os << "BFGLM 1\n" << inst.p << ' ' << inst.n << ' ' << inst.D << '\n';
  for (std::size_t i = 0; i < inst.mats.size(); ++i) {
    const auto& M = inst.mats[i];
    os << "matrix " << i + 1 << ' ' << M.nnz() << '\n';
    for (const auto& t : M.triplets()) os << t.row << ' ' << t.col << ' ' << t.val << '\n';
  }
  if (truth) {
    os << "truth " << truth->points.size() << '\n';
    for (const auto& pt : truth->points) {
      if (pt.nu == 1)
        os << "simple";
      else
        os << "nilpotent " << pt.nu;
      for (u64 a : pt.coords) os << ' ' << a;
      os << '\n';
    }
  }
}

namespace {

struct LineReader {
  std::istream& is;
  std::size_t lineno = 0;

  bool next(std::istringstream& out) {
    std::string s;
    while (std::getline(is, s)) {
      ++lineno;
      if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
      out.clear();
      out.str(s);
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("line " + std::to_string(lineno) + ": " + what);
  }
  std::istringstream require(const std::string& what) {
    std::istringstream ss;
    if (!next(ss)) {
      ++lineno;
      fail("unexpected end of file, expected " + what);
    }
    return ss;
  }
};

}  // namespace

Instance read_instance(std::istream& is, std::optional<GroundTruth>* truth) {
  LineReader lr{is};
  auto ss = lr.require("header");
  std::string magic;
  int version = 0;
  if (!(ss >> magic >> version) || magic != "BFGLM" || version != 1) lr.fail("expected 'BFGLM 1'");
  ss = lr.require("'p n D'");
  Instance inst;
  if (!(ss >> inst.p >> inst.n >> inst.D)) lr.fail("expected 'p n D'");
  if (!is_prime(inst.p)) lr.fail("modulus is not prime");
  if (inst.D >= inst.p) lr.fail("D must be smaller than p");
  Modulus K(inst.p);
  for (std::size_t i = 0; i < inst.n; ++i) {
    ss = lr.require("matrix header");
    std::string kw;
    std::size_t idx = 0, nnz = 0;
    if (!(ss >> kw >> idx >> nnz) || kw != "matrix" || idx != i + 1) lr.fail("expected 'matrix " + std::to_string(i + 1) + " nnz'");
    std::vector<Triplet> t;
    t.reserve(nnz);
    std::set<std::pair<std::size_t, std::size_t>> pos;
    for (std::size_t k = 0; k < nnz; ++k) {
      ss = lr.require("matrix entry");
      std::string tok;
      Triplet e{};
      if (!(ss >> e.row >> e.col >> e.val)) {
        ss.clear();
        if (ss >> tok && tok == "matrix") lr.fail("nnz mismatch: matrix " + std::to_string(i + 1) + " has fewer entries than declared");
        lr.fail("expected 'row col value'");
      }
      if (e.row >= inst.D || e.col >= inst.D) lr.fail("index out of range");
      if (e.val >= inst.p) lr.fail("value not reduced mod p");
      if (!pos.insert({e.row, e.col}).second) lr.fail("duplicate entry");
      t.push_back(e);
    }
    inst.mats.emplace_back(K, inst.D, std::move(t));
    if (inst.mats.back().nnz() != nnz) lr.fail("explicit zero entries are not allowed");
  }
  std::istringstream rest;
  if (lr.next(rest)) {
    std::string kw;
    std::size_t count = 0;
    if (!(rest >> kw >> count) || kw != "truth") lr.fail("nnz mismatch or trailing data: expected 'truth K'");
    GroundTruth g;
    for (std::size_t j = 0; j < count; ++j) {
      ss = lr.require("truth point");
      std::string tag;
      PointSpec pt;
      ss >> tag;
      if (tag == "nilpotent") {
        if (!(ss >> pt.nu) || pt.nu < 2) lr.fail("bad block size");
      } else if (tag != "simple") {
        lr.fail("expected 'simple' or 'nilpotent'");
      }
      pt.coords.resize(inst.n);
      for (auto& a : pt.coords)
        if (!(ss >> a)) lr.fail("expected " + std::to_string(inst.n) + " coordinates");
      g.points.push_back(std::move(pt));
    }
    if (lr.next(rest)) lr.fail("trailing data");
    if (truth) *truth = std::move(g);
  }
  return inst;
}

void write_instance_file(const std::string& path, const Instance& inst, const GroundTruth* truth) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_instance(f, inst, truth);
}

Instance read_instance_file(const std::string& path, std::optional<GroundTruth>* truth) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return read_instance(f, truth);
}

void write_param(std::ostream& os, u64 p, const ZeroDimParam& z) {
  os << "PARAM 1\n" << p << ' ' << z.V.size() << ' ' << z.Q.deg() << "\nt:";
  for (u64 x : z.t) os << ' ' << x;
  auto coeffs = [&](const Poly& a) {
    if (a.is_zero()) os << " 0";
    for (u64 x : a.c) os << ' ' << x;
    os << '\n';
  };
  os << "\nQ:";
  coeffs(z.Q);
  for (std::size_t i = 0; i < z.V.size(); ++i) {
    os << "V_" << i + 1 << ':';
    coeffs(z.V[i]);
  }
}

ZeroDimParam read_param(std::istream& is, u64* p_out) {
  LineReader lr{is};
  auto ss = lr.require("header");
  std::string magic;
  int version = 0;
  if (!(ss >> magic >> version) || magic != "PARAM" || version != 1) lr.fail("expected 'PARAM 1'");
  ss = lr.require("'p n degQ'");
  u64 p = 0;
  std::size_t n = 0;
  long dq = 0;
  if (!(ss >> p >> n >> dq)) lr.fail("expected 'p n degQ'");
  auto labelled = [&](const std::string& label) {
    auto s = lr.require(label);
    std::string tok;
    s >> tok;
    if (tok != label + ":") lr.fail("expected '" + label + ":'");
    std::vector<u64> v;
    u64 x;
    while (s >> x) v.push_back(x);
    if (!s.eof()) lr.fail("bad number after '" + label + ":'");
    return v;
  };
  ZeroDimParam z;
  z.t = labelled("t");
  if (z.t.size() != n) lr.fail("t has wrong length");
  z.Q = Poly(labelled("Q"));
  if (z.Q.deg() != dq) lr.fail("Q degree differs from header");
  for (std::size_t i = 0; i < n; ++i) z.V.push_back(Poly(labelled("V_" + std::to_string(i + 1))));
  if (p_out) *p_out = p;
  return z;
}

bool matrices_commute(const Modulus& K, const Instance& inst, Rng& rng, int trials) {
  for (int k = 0; k < trials; ++k) {
    std::vector<u64> w(inst.D);
    for (auto& x : w) x = rng.elem(K);
    for (std::size_t i = 0; i < inst.n; ++i)
      for (std::size_t j = i + 1; j < inst.n; ++j)
        if (mat_vec(K, inst.mats[i], mat_vec(K, inst.mats[j], w)) !=
            mat_vec(K, inst.mats[j], mat_vec(K, inst.mats[i], w)))
          return false;
  }
  return true;
}

namespace {

// Minimal polynomial of M by scalar sequences, confirmed on random vectors.
Poly recompute_minpoly(const Modulus& K, const SparseMat& M, Rng& rng) {
  std::size_t D = M.dim();
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<u64> u(D), w(D);
    for (auto& x : u) x = rng.elem(K);
    for (auto& x : w) x = rng.elem(K);
    ScalarSeq seq;
    for (std::size_t s = 0; s < 2 * D; ++s) {
      u64 acc = 0;
      for (std::size_t i = 0; i < D; ++i) acc = K.add(acc, K.mul(u[i], w[i]));
      seq.push_back(acc);
      w = mat_vec(K, M, w);
    }
    Poly P = berlekamp_massey(K, seq, D);
    bool good = true;
    for (int k = 0; good && k < 2; ++k) {
      std::vector<u64> v(D);
      for (auto& x : v) x = rng.elem(K);
      for (u64 x : poly_apply(K, M, P, v))
        if (x) good = false;
    }
    if (good) return P;
  }
  throw UnluckyRandomness("could not recompute the minimal polynomial");
}

}  // namespace

SolutionReport verify_solution(const Modulus& K, const Instance& inst, const ZeroDimParam& z,
                               const GroundTruth* truth, Rng& rng) {
  SolutionReport rep;
  auto fail = [&](const std::string& why) {
    rep.ok = false;
    rep.notes.push_back(why);
  };
  std::string v = param_violation(K, z);
  if (!v.empty()) fail("structure: " + v);
  if (z.V.size() != inst.n) fail("parametrization has wrong number of coordinates");
  if (z.Q.deg() > static_cast<int>(inst.D)) fail("deg Q exceeds D");

  if (rep.ok) {
    SparseMat Mx = combine_matrices(K, z.t, inst.mats);
    Poly P = recompute_minpoly(K, Mx, rng);
    if (rem(K, P, z.Q).deg() >= 0) fail("Q does not divide the minimal polynomial of X");
    if (rep.ok) {
      // Split P into the part over roots of Q and the rest.
      Poly rest = P, g;
      while ((g = gcd(K, rest, z.Q)).deg() > 0) rest = quo(K, rest, g);
      // bound on the nilpotency index of X_i - V_i(X) over those roots
      long e = (P.deg() - rest.deg()) - z.Q.deg() + 1 + static_cast<long>(inst.D) - P.deg();
      std::vector<u64> w(inst.D);
      for (auto& x : w) x = rng.elem(K);
      std::vector<u64> y = poly_apply(K, Mx, rest, w);
      for (std::size_t i = 0; rep.ok && i < inst.n; ++i) {
        std::vector<u64> r = y;
        for (long k = 0; k < std::max(1L, e); ++k) {
          auto a = mat_vec(K, inst.mats[i], r);
          auto b = poly_apply(K, Mx, z.V[i], r);
          for (std::size_t j = 0; j < r.size(); ++j) r[j] = K.sub(a[j], b[j]);
        }
        for (u64 x : r)
          if (x) {
            fail("coordinate " + std::to_string(i + 1) + " does not match V_" + std::to_string(i + 1));
            break;
          }
      }
      if (rep.ok && z.Q.deg() == static_cast<int>(inst.D)) rep.certified = true;
    }
  }
  if (truth) {
    auto pr = verify_against_points(K, z, truth->distinct_points());
    for (const auto& p : pr.points)
      if (!p.ok) {
        std::string s = "truth point (";
        for (std::size_t i = 0; i < p.point.size(); ++i) s += (i ? "," : "") + std::to_string(p.point[i]);
        fail(s + ") not matched");
      }
    for (const auto& n : pr.notes) {
      rep.notes.push_back(n);
      if (!pr.degree_ok) rep.ok = false;
    }
  }
  rep.status = !rep.ok ? "FAILED" : rep.certified ? "certified complete and radical" : "subset-consistent";
  return rep;
}

}  // namespace bfglm

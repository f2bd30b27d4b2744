// Command line front end: solve, solve-split, gen, verify, bench.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bfglm/splitting.hpp"
#include "bfglm/toolkit.hpp"

using namespace bfglm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitUnlucky = 3;
constexpr int kExitVerify = 4;

struct Common {
  std::string in, out;
  std::size_t m = 2, workers = 1, x1_index = 0;
  u64 seed = 1;
  int retries = 6;
};

void emit_param(const std::string& out, u64 p, const ZeroDimParam& z) {
  if (out.empty()) {
    write_param(std::cout, p, z);
    return;
  }
  std::ofstream f(out);
  if (!f) throw IoError("cannot open " + out + " for writing");
  write_param(f, p, z);
}

void print_stats(const SolveStats& s, std::ostream& os) {
  os << "retries " << s.retries << "\n";
  os << "separation_failures " << s.separation_failures << "\n";
  os << "time_total " << s.total_seconds << "\n";
  os << "time_algorithm " << s.algorithm_seconds << "\n";
  os << "krylov_fraction " << s.krylov_fraction() << "\n";
}

int run_solve(const Common& c, bool split) {
  Instance inst = read_instance_file(c.in);
  Modulus K(inst.p);
  Rng rng(c.seed);
  std::ostream& log = c.out.empty() ? std::cerr : std::cout;
  if (split) {
    SplitOptions opt;
    opt.m = c.m;
    opt.workers = c.workers;
    opt.retries = c.retries;
    opt.x1_index = c.x1_index;
    SplitResult r = solve_split(K, inst, rng, opt);
    emit_param(c.out, inst.p, r.param);
    print_stats(r.stats, log);
    log << "D_A " << r.D_A << "\nD_B " << r.D_B << "\n";
  } else {
    SolveOptions opt;
    opt.m = c.m;
    opt.workers = c.workers;
    opt.retries = c.retries;
    SolveResult r = solve_block(K, inst, rng, opt);
    emit_param(c.out, inst.p, r.param);
    print_stats(r.stats, log);
  }
  return 0;
}

GroundTruth read_points(const std::string& path, std::size_t n, const Modulus& K, Rng& rng) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  GroundTruth g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    PointSpec pt;
    if (tag == "nilpotent") {
      if (!(ss >> pt.nu) || pt.nu < 2) throw FormatError("line " + std::to_string(lineno) + ": bad block size");
      pt.c.resize(n);
      for (auto& x : pt.c) x = rng.elem(K);
      pt.c[0] = rng.nonzero(K);
    } else if (tag != "simple") {
      throw FormatError("line " + std::to_string(lineno) + ": expected 'simple' or 'nilpotent'");
    }
    pt.coords.resize(n);
    for (auto& a : pt.coords)
      if (!(ss >> a)) throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(n) + " coordinates");
    g.points.push_back(std::move(pt));
  }
  return g;
}

struct GenArgs {
  u64 p = 65537;
  std::size_t n = 2, D = 10, doubles = 0, hidden = 0, collide = 0, k = 2, vdeg = 6;
  std::string family = "block", points;
};

std::pair<Instance, GroundTruth> generate(const GenArgs& a, Rng& rng) {
  Modulus K(a.p);
  if (a.family == "shape") return generate_shape_instance(K, a.n, a.D, a.vdeg, rng);
  if (a.family != "block") throw InvalidInput("unknown family " + a.family);
  GroundTruth g;
  if (!a.points.empty()) {
    g = read_points(a.points, a.n, K, rng);
  } else {
    TruthRequest req;
    req.n = a.n;
    req.D = a.D;
    req.doubles = a.doubles;
    req.hidden = a.hidden;
    req.collide = a.collide;
    g = random_truth(K, req, rng);
  }
  GenOptions opt;
  opt.k = a.k;
  return {generate_instance(K, g, rng, opt), g};
}

int run_gen(const GenArgs& a, const Common& c) {
  if (!is_prime(a.p)) throw InvalidInput("--p must be prime");
  Rng rng(c.seed);
  auto [inst, g] = generate(a, rng);
  if (c.out.empty())
    write_instance(std::cout, inst, &g);
  else
    write_instance_file(c.out, inst, &g);
  return 0;
}

int run_verify(const Common& c, const std::string& param_path, bool use_truth) {
  std::optional<GroundTruth> truth;
  Instance inst = read_instance_file(c.in, &truth);
  std::ifstream f(param_path);
  if (!f) throw IoError("cannot open " + param_path);
  u64 p = 0;
  ZeroDimParam z = read_param(f, &p);
  if (p != inst.p) throw FormatError("parametrization modulus differs from the instance");
  if (use_truth && !truth) throw InvalidInput("--truth given but the instance has no truth section");
  Modulus K(inst.p);
  Rng rng(c.seed);
  SolutionReport rep = verify_solution(K, inst, z, use_truth ? &*truth : nullptr, rng);
  std::cout << "status " << rep.status << "\n";
  for (const auto& n : rep.notes) std::cout << "note " << n << "\n";
  return rep.ok ? 0 : kExitVerify;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_bench(GenArgs a, const Common& c) {
  Rng rng(c.seed);
  auto [inst, g] = generate(a, rng);
  Modulus K(inst.p);
  std::vector<u64> t(inst.n);
  for (auto& x : t) x = rng.elem(K);
  SparseMat M = combine_matrices(K, t, inst.mats);
  double d1 = inst.mats[0].density(), dM = M.density();

  SolveOptions so;
  so.m = c.m;
  so.workers = c.workers;
  so.retries = c.retries;
  Rng r1(c.seed + 1);
  auto t0 = std::chrono::steady_clock::now();
  SolveResult plain = solve_block(K, inst, r1, so);
  double tp = seconds_since(t0);

  SplitOptions sp;
  static_cast<SolveOptions&>(sp) = so;
  sp.x1_index = c.x1_index;
  Rng r2(c.seed + 1);
  t0 = std::chrono::steady_clock::now();
  SplitResult split = solve_split(K, inst, r2, sp);
  double ts = seconds_since(t0);

  // same randomness, different worker budgets
  Rng r3(c.seed + 1), r4(c.seed + 1);
  SolveOptions s1 = so, s2 = so;
  s1.workers = 1;
  s2.workers = resolve_workers(0) > 1 ? resolve_workers(0) : 4;
  bool same = solve_block(K, inst, r3, s1).param == solve_block(K, inst, r4, s2).param;

  bool ok_plain = verify_against_points(K, plain.param, g.distinct_points()).ok;
  bool ok_split = verify_against_points(K, split.param, g.distinct_points()).ok;
  double ratio_da = double(split.D_A) / double(inst.D);
  std::printf("%-8s %-10s %-10s %-3s %-10s %-10s %-10s %-10s %-8s %-10s\n", "D", "dens(M1)", "dens(M)", "m",
              "plain_s", "krylov_fr", "split_s", "split/pl", "D_A/D", "verified");
  std::printf("%-8zu %-10.4f %-10.4f %-3zu %-10.3f %-10.3f %-10.3f %-10.3f %-8.3f %s/%s\n", inst.D, d1, dM, c.m,
              plain.stats.algorithm_seconds, plain.stats.krylov_fraction(), split.stats.algorithm_seconds,
              split.stats.algorithm_seconds / plain.stats.algorithm_seconds, ratio_da, ok_plain ? "yes" : "no",
              ok_split ? "yes" : "no");
  std::printf("wall_plain %.3f wall_split %.3f (including post-checks)\n", tp, ts);
  std::printf("worker_determinism %s (budgets %zu and %zu)\n", same ? "identical" : "DIFFERENT", s1.workers,
              s2.workers);
  bool premise = d1 <= 0.3 * dM && ratio_da >= 0.95;
  std::printf("splitting_premise %s; split_not_slower %s\n", premise ? "met" : "not met",
              split.stats.algorithm_seconds <= plain.stats.algorithm_seconds ? "yes" : "no");
  return ok_plain && ok_split && same ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse FGLM by block Krylov sequences over prime fields"};
  app.require_subcommand(1);
  Common c;
  GenArgs g;
  std::string param_path;
  bool use_truth = false;

  auto add_common = [&](CLI::App* s, bool solve) {
    s->add_option("--seed", c.seed, "random seed");
    if (solve) {
      s->add_option("--m", c.m, "block size")->check(CLI::PositiveNumber);
      s->add_option("--workers", c.workers, "Krylov worker threads (0 = all cores)");
      s->add_option("--retries", c.retries, "retry cap for unlucky randomness")->check(CLI::NonNegativeNumber);
    }
  };
  auto add_gen = [&](CLI::App* s) {
    s->add_option("--p", g.p, "prime modulus");
    s->add_option("--n", g.n, "number of variables")->check(CLI::PositiveNumber);
    s->add_option("--D", g.D, "dimension")->check(CLI::PositiveNumber);
    s->add_option("--double", g.doubles, "double points visible to X_1");
    s->add_option("--hidden", g.hidden, "double points invisible to X_1");
    s->add_option("--collide", g.collide, "pairs of points sharing X_1");
    s->add_option("--k", g.k, "conjugation mixing group size minus one");
    s->add_option("--family", g.family, "block or shape")->check(CLI::IsMember({"block", "shape"}));
    s->add_option("--vdeg", g.vdeg, "degree of the coordinate polynomials (shape family)");
  };

  auto* solve = app.add_subcommand("solve", "parametrize with the block algorithm");
  solve->add_option("--in", c.in, "instance file")->required();
  solve->add_option("--out", c.out, "output parametrization file");
  add_common(solve, true);

  auto* split = app.add_subcommand("solve-split", "parametrize with the splitting variant");
  split->add_option("--in", c.in, "instance file")->required();
  split->add_option("--out", c.out, "output parametrization file");
  split->add_option("--x1-index", c.x1_index, "variable playing the X_1 role (0-based)");
  add_common(split, true);

  auto* gen = app.add_subcommand("gen", "generate an instance with known solutions");
  gen->add_option("--out", c.out, "output instance file");
  gen->add_option("--points", g.points, "point list: lines 'simple a1..an' or 'nilpotent nu a1..an'");
  add_common(gen, false);
  add_gen(gen);

  auto* verify = app.add_subcommand("verify", "check a parametrization against an instance");
  verify->add_option("--in", c.in, "instance file")->required();
  verify->add_option("--param", param_path, "parametrization file")->required();
  verify->add_flag("--truth", use_truth, "also compare with the truth section of the instance");
  add_common(verify, false);

  auto* bench = app.add_subcommand("bench", "timing table on a generated instance");
  bench->add_option("--x1-index", c.x1_index, "variable playing the X_1 role (0-based)");
  add_common(bench, true);
  add_gen(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return run_solve(c, false);
    if (*split) return run_solve(c, true);
    if (*gen) return run_gen(g, c);
    if (*verify) return run_verify(c, param_path, use_truth);
    if (*bench) return run_bench(g, c);
  } catch (const UnluckyRandomness& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnlucky;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

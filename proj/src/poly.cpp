#include "bfglm/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bfglm {

namespace {

constexpr std::size_t kKaraThreshold = 32;
constexpr std::size_t kFastDivThreshold = 96;

// sum a[i] b[n-1-i], reducing once per lazy_limit products
u64 dot_reversed(const Modulus& K, const u64* a, const u64* b, std::size_t n) {
  std::size_t lim = K.lazy_limit();
  u128 acc = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t e = std::min(n, i + lim);
    for (; i < e; ++i) acc += (u128)a[i] * b[n - 1 - i];
    if (i < n) acc = K.reduce(acc);
  }
  return K.reduce(acc);
}

void school(const Modulus& K, const u64* a, std::size_t na, const u64* b, std::size_t nb, u64* out) {
  for (std::size_t k = 0; k + 1 < na + nb; ++k) {
    std::size_t lo = k >= nb ? k - (nb - 1) : 0;
    std::size_t hi = std::min(k, na - 1);
    out[k] = dot_reversed(K, a + lo, b + (k - hi), hi - lo + 1);
  }
}

void mul_raw(const Modulus& K, const u64* a, std::size_t na, const u64* b, std::size_t nb, u64* out);

void kara(const Modulus& K, const u64* a, const u64* b, std::size_t n, u64* out) {
  if (n <= kKaraThreshold) {
    school(K, a, n, b, n, out);
    return;
  }
  std::size_t h = n / 2, hl = n - h;
  std::vector<u64> z0(2 * h - 1), z2(2 * hl - 1), z1(2 * hl - 1), sa(hl), sb(hl);
  kara(K, a, b, h, z0.data());
  kara(K, a + h, b + h, hl, z2.data());
  for (std::size_t i = 0; i < hl; ++i) {
    sa[i] = K.add(a[h + i], i < h ? a[i] : 0);
    sb[i] = K.add(b[h + i], i < h ? b[i] : 0);
  }
  kara(K, sa.data(), sb.data(), hl, z1.data());
  for (std::size_t i = 0; i < z0.size(); ++i) z1[i] = K.sub(z1[i], z0[i]);
  for (std::size_t i = 0; i < z2.size(); ++i) z1[i] = K.sub(z1[i], z2[i]);
  std::fill(out, out + 2 * n - 1, 0);
  for (std::size_t i = 0; i < z0.size(); ++i) out[i] = z0[i];
  for (std::size_t i = 0; i < z2.size(); ++i) out[2 * h + i] = K.add(out[2 * h + i], z2[i]);
  for (std::size_t i = 0; i < z1.size(); ++i) out[h + i] = K.add(out[h + i], z1[i]);
}

void mul_raw(const Modulus& K, const u64* a, std::size_t na, const u64* b, std::size_t nb, u64* out) {
  if (na < nb) {
    std::swap(a, b);
    std::swap(na, nb);
  }
  if (nb <= kKaraThreshold) {
    school(K, a, na, b, nb, out);
    return;
  }
  if (na == nb) {
    kara(K, a, b, na, out);
    return;
  }
  std::fill(out, out + na + nb - 1, 0);
  std::vector<u64> tmp(2 * nb - 1);
  for (std::size_t off = 0; off < na; off += nb) {
    std::size_t len = std::min(nb, na - off);
    mul_raw(K, a + off, len, b, nb, tmp.data());
    for (std::size_t i = 0; i + 1 < len + nb; ++i) out[off + i] = K.add(out[off + i], tmp[i]);
  }
}

std::pair<Poly, Poly> quo_rem_naive(const Modulus& K, const Poly& a, const Poly& b) {
  int db = b.deg();
  if (a.deg() < db) return {Poly(), a};
  std::vector<u64> r = a.c;
  std::vector<u64> q(a.deg() - db + 1, 0);
  u64 ilc = K.inv(b.lc());
  for (int i = a.deg(); i >= db; --i) {
    u64 coef = K.mul(r[i], ilc);
    q[i - db] = coef;
    if (coef == 0) continue;
    for (int j = 0; j <= db; ++j) r[i - db + j] = K.sub(r[i - db + j], K.mul(coef, b.c[j]));
  }
  r.resize(db);
  return {Poly(std::move(q)), Poly(std::move(r))};
}

// Precomputed data for fast reduction modulo a fixed F.
struct Reducer {
  const Modulus& K;
  Poly F;
  std::size_t r;
  Poly rinv;  // 1 / rev(F) mod x^r

  Reducer(const Modulus& K_, const Poly& F_) : K(K_), F(F_), r(F_.deg()) {
    rinv = r > 0 ? series_inv(K, reverse(F, r + 1), r) : Poly();
  }

  // a of degree <= 2r - 2
  Poly reduce(const Poly& a) const {
    if (a.deg() < static_cast<int>(r)) return a;
    if (r < kFastDivThreshold) return quo_rem_naive(K, a, F).second;
    std::size_t qlen = a.deg() - r + 1;
    if (qlen > r) return rem(K, a, F);
    Poly ra = reverse(a, a.deg() + 1);
    Poly q = reverse(mul_trunc(K, trunc(ra, qlen), trunc(rinv, qlen), qlen), qlen);
    Poly qf = mul_trunc(K, q, F, r);
    return sub(K, trunc(a, r), qf);
  }

  Poly mulmod(const Poly& a, const Poly& b) const { return reduce(mul(K, a, b)); }
};

// Values ell(T^s) for s < len, extended by the recurrence of F.
ScalarSeq extend_form(const Modulus& K, const Poly& F, const Poly& rfinv, const ScalarSeq& ell,
                      std::size_t len) {
  std::size_t r = F.deg();
  Poly rF = reverse(F, r + 1);
  Poly S(std::vector<u64>(ell.begin(), ell.end()));
  Poly N = mul_trunc(K, rF, S, r);
  Poly full = mul_trunc(K, N, rfinv, len);
  ScalarSeq out(len, 0);
  for (std::size_t i = 0; i < len; ++i) out[i] = full[i];
  return out;
}

ScalarSeq transposed_mulmod_pre(const Modulus& K, const Poly& F, const Poly& rfinv, const Poly& g,
                                const ScalarSeq& ell) {
  std::size_t r = F.deg();
  if (r == 0) return {};
  ScalarSeq ext = extend_form(K, F, rfinv, ell, 2 * r - 1);
  Poly gh = reverse(g, r);
  Poly S(std::vector<u64>(ext.begin(), ext.end()));
  Poly prod = mul(K, gh, S);
  ScalarSeq out(r);
  for (std::size_t c = 0; c < r; ++c) out[c] = prod[r - 1 + c];
  return out;
}

u64 dot_form(const Modulus& K, const ScalarSeq& ell, const Poly& f) {
  LazyAcc acc(K);
  std::size_t n = std::min(ell.size(), f.c.size());
  for (std::size_t i = 0; i < n; ++i) acc.add(ell[i], f.c[i]);
  return acc.get();
}

// Form e gets lengths[e] values; the baby steps are shared, so k balances
// them against the giant steps of all forms together.
std::vector<ScalarSeq> bsgs(const Modulus& K, const Poly& F, const Poly& H,
                            const std::vector<ScalarSeq>& ells, const std::vector<std::size_t>& lengths) {
  std::size_t r = F.deg(), total = 0, tmax = 0;
  for (std::size_t t : lengths) {
    total += t;
    tmax = std::max(tmax, t);
  }
  std::vector<ScalarSeq> out(ells.size());
  for (std::size_t e = 0; e < ells.size(); ++e) out[e].assign(lengths[e], 0);
  if (tmax == 0) return out;
  Reducer red(K, F);
  Poly rfinv = series_inv(K, reverse(F, r + 1), 2 * r);
  std::size_t k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(total))));
  k = std::clamp<std::size_t>(k, 1, tmax);
  std::vector<Poly> baby(k);
  baby[0] = red.reduce(Poly::constant(1));
  for (std::size_t j = 1; j < k; ++j) baby[j] = red.mulmod(baby[j - 1], H);
  Poly giant = red.mulmod(baby[k - 1], H);
  for (std::size_t e = 0; e < ells.size(); ++e) {
    std::size_t t = lengths[e];
    ScalarSeq cur = ells[e];
    for (std::size_t i = 0; i * k < t; ++i) {
      for (std::size_t j = 0; j < k && i * k + j < t; ++j) out[e][i * k + j] = dot_form(K, cur, baby[j]);
      if ((i + 1) * k < t) cur = transposed_mulmod_pre(K, F, rfinv, giant, cur);
    }
  }
  return out;
}

}  // namespace

Poly Poly::monomial(std::size_t k, u64 v) {
  std::vector<u64> c(k + 1, 0);
  c[k] = v;
  return Poly(std::move(c));
}

std::string to_string(const Poly& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = a.deg(); i >= 0; --i) {
    u64 v = a.c[i];
    if (v == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << v;
    } else {
      if (v != 1) os << v << "*";
      os << "T";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

Poly add(const Modulus& K, const Poly& a, const Poly& b) {
  std::vector<u64> c(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = K.add(a[i], b[i]);
  return Poly(std::move(c));
}

Poly sub(const Modulus& K, const Poly& a, const Poly& b) {
  std::vector<u64> c(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = K.sub(a[i], b[i]);
  return Poly(std::move(c));
}

Poly neg(const Modulus& K, const Poly& a) {
  Poly r = a;
  for (auto& x : r.c) x = K.neg(x);
  return r;
}

Poly scale(const Modulus& K, const Poly& a, u64 s) {
  if (s == 0) return Poly();
  Poly r = a;
  for (auto& x : r.c) x = K.mul(x, s);
  r.trim();
  return r;
}

Poly mul(const Modulus& K, const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  std::vector<u64> out(a.c.size() + b.c.size() - 1);
  mul_raw(K, a.c.data(), a.c.size(), b.c.data(), b.c.size(), out.data());
  return Poly(std::move(out));
}

Poly trunc(const Poly& a, std::size_t n) {
  if (a.c.size() <= n) return a;
  return Poly(std::vector<u64>(a.c.begin(), a.c.begin() + n));
}

Poly mul_trunc(const Modulus& K, const Poly& a, const Poly& b, std::size_t n) {
  return trunc(mul(K, trunc(a, n), trunc(b, n)), n);
}

Poly shift_up(const Poly& a, std::size_t k) {
  if (a.is_zero()) return a;
  std::vector<u64> c(k, 0);
  c.insert(c.end(), a.c.begin(), a.c.end());
  return Poly(std::move(c));
}

Poly shift_down(const Poly& a, std::size_t k) {
  if (a.c.size() <= k) return Poly();
  return Poly(std::vector<u64>(a.c.begin() + k, a.c.end()));
}

Poly reverse(const Poly& a, std::size_t len) {
  std::vector<u64> c(len, 0);
  for (std::size_t i = 0; i < len && i < a.c.size(); ++i) c[len - 1 - i] = a.c[i];
  return Poly(std::move(c));
}

Poly series_inv(const Modulus& K, const Poly& a, std::size_t n) {
  if (a[0] == 0) throw DivisionByZero("series_inv: zero constant term");
  if (n == 0) return Poly();
  Poly g = Poly::constant(K.inv(a[0]));
  std::size_t len = 1;
  while (len < n) {
    std::size_t len2 = std::min(2 * len, n);
    Poly e = mul_trunc(K, trunc(a, len2), g, len2);  // a*g = 1 + O(T^len)
    e = neg(K, e);
    std::vector<u64> ec = e.c;
    ec.resize(std::max<std::size_t>(ec.size(), 1), 0);
    ec[0] = K.add(ec[0], 2);
    g = mul_trunc(K, g, Poly(std::move(ec)), len2);
    len = len2;
  }
  return g;
}

std::pair<Poly, Poly> quo_rem(const Modulus& K, const Poly& a, const Poly& b) {
  if (b.is_zero()) throw DivisionByZero("quo_rem by zero polynomial");
  int da = a.deg(), db = b.deg();
  if (da < db) return {Poly(), a};
  std::size_t qlen = da - db + 1;
  if (db < static_cast<int>(kFastDivThreshold) || qlen < kFastDivThreshold) return quo_rem_naive(K, a, b);
  Poly ra = reverse(a, da + 1);
  Poly rb = reverse(b, db + 1);
  Poly q = reverse(mul_trunc(K, ra, series_inv(K, rb, qlen), qlen), qlen);
  Poly r = sub(K, trunc(a, db), mul_trunc(K, q, b, db));
  return {q, r};
}

Poly quo(const Modulus& K, const Poly& a, const Poly& b) { return quo_rem(K, a, b).first; }
Poly rem(const Modulus& K, const Poly& a, const Poly& b) { return quo_rem(K, a, b).second; }

Poly monic(const Modulus& K, const Poly& a) {
  if (a.is_zero()) return a;
  return scale(K, a, K.inv(a.lc()));
}

Poly gcd(const Modulus& K, const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = rem(K, x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return monic(K, x);
}

Poly lcm(const Modulus& K, const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  return monic(K, mul(K, quo(K, a, gcd(K, a, b)), b));
}

Poly modinv(const Modulus& K, const Poly& a, const Poly& m) {
  if (m.is_zero()) throw DivisionByZero("modinv with zero modulus");
  Poly r0 = m, r1 = rem(K, a, m);
  Poly t0, t1 = Poly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = quo_rem(K, r0, r1);
    Poly t = sub(K, t0, mul(K, q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t);
  }
  if (r0.deg() != 0) throw NotInvertible("polynomial not invertible modulo m", monic(K, r0));
  if (m.deg() == 0) return Poly();
  return rem(K, scale(K, t0, K.inv(r0.lc())), m);
}

Poly mulmod(const Modulus& K, const Poly& a, const Poly& b, const Poly& m) {
  return rem(K, mul(K, a, b), m);
}

Poly divmod(const Modulus& K, const Poly& a, const Poly& b, const Poly& m) {
  return mulmod(K, a, modinv(K, b, m), m);
}

u64 eval(const Modulus& K, const Poly& a, u64 x) {
  u64 r = 0;
  for (int i = a.deg(); i >= 0; --i) r = K.add(K.mul(r, x), a.c[i]);
  return r;
}

Poly derivative(const Modulus& K, const Poly& a) {
  if (a.deg() <= 0) return Poly();
  std::vector<u64> c(a.deg());
  for (int i = 1; i <= a.deg(); ++i) c[i - 1] = K.mul(a.c[i], static_cast<u64>(i) % K.p());
  return Poly(std::move(c));
}

Poly taylor_shift(const Modulus& K, const Poly& a, u64 s) {
  std::vector<u64> b = a.c;
  int n = a.deg();
  for (int i = 0; i < n; ++i)
    for (int j = n - 1; j >= i; --j) b[j] = K.add(b[j], K.mul(s, b[j + 1]));
  return Poly(std::move(b));
}

Poly from_roots(const Modulus& K, const std::vector<u64>& roots) {
  Poly r = Poly::constant(1);
  for (u64 x : roots) r = mul(K, r, Poly{K.neg(x), 1});
  return r;
}

Poly compose_mod(const Modulus& K, const Poly& a, const Poly& h, const Poly& m) {
  Poly r;
  Poly hm = rem(K, h, m);
  for (int i = a.deg(); i >= 0; --i) r = rem(K, add(K, mul(K, r, hm), Poly::constant(a.c[i])), m);
  return r;
}

Poly berlekamp_massey(const Modulus& K, const ScalarSeq& seq, std::size_t /*bound*/) {
  std::vector<u64> C{1}, B{1};
  std::size_t L = 0, shift = 1;
  u64 b = 1;
  for (std::size_t n = 0; n < seq.size(); ++n) {
    LazyAcc acc(K);
    acc.add(seq[n]);
    for (std::size_t i = 1; i <= L && i < C.size(); ++i) acc.add(C[i], seq[n - i]);
    u64 d = acc.get();
    if (d == 0) {
      ++shift;
      continue;
    }
    u64 coef = K.mul(d, K.inv(b));
    std::vector<u64> Tm = C;
    if (C.size() < B.size() + shift) C.resize(B.size() + shift, 0);
    for (std::size_t i = 0; i < B.size(); ++i) C[i + shift] = K.sub(C[i + shift], K.mul(coef, B[i]));
    if (2 * L <= n) {
      L = n + 1 - L;
      B = std::move(Tm);
      b = d;
      shift = 1;
    } else {
      ++shift;
    }
  }
  std::vector<u64> P(L + 1, 0);
  for (std::size_t i = 0; i <= L; ++i) P[L - i] = i < C.size() ? C[i] : 0;
  return Poly(std::move(P));
}

Poly squarefree_part(const Modulus& K, const Poly& P) {
  if (P.is_zero()) throw InvalidInput("squarefree_part of zero");
  return monic(K, quo(K, P, gcd(K, P, derivative(K, P))));
}

Poly scalar_numerator_direct(const Modulus& K, const ScalarSeq& seq, const Poly& P) {
  if (P.is_zero()) throw InvalidInput("numerator with respect to zero polynomial");
  std::size_t d = P.deg();
  if (seq.size() < d) throw InsufficientTerms("scalar_numerator_direct needs deg(P) terms");
  std::vector<u64> N(d, 0);
  for (std::size_t s = 0; s < d; ++s) N[s] = seq[d - 1 - s];
  return shift_down(mul(K, P, Poly(std::move(N))), d);
}

ScalarSeq laurent_expand(const Modulus& K, const Poly& A, const Poly& F, std::size_t k) {
  if (F.is_zero() || A.deg() >= F.deg()) throw InvalidInput("laurent_expand needs deg A < deg F");
  std::size_t n = F.deg();
  ScalarSeq out(k, 0);
  if (k == 0 || A.is_zero()) return out;
  Poly rA = reverse(A, n);
  Poly rF = reverse(F, n + 1);
  Poly v = mul_trunc(K, rA, series_inv(K, rF, k), k);
  for (std::size_t i = 0; i < k; ++i) out[i] = v[i];
  return out;
}

std::pair<Poly, Poly> rational_reconstruct(const Modulus& K, const Poly& a, std::size_t n,
                                           std::size_t nb, std::size_t db) {
  Poly r0 = Poly::monomial(n), r1 = trunc(a, n);
  Poly t0, t1 = Poly::constant(1);
  while (!r1.is_zero() && r1.deg() > static_cast<int>(nb)) {
    auto [q, r] = quo_rem(K, r0, r1);
    Poly t = sub(K, t0, mul(K, q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t);
  }
  if (t1.deg() > static_cast<int>(db) || t1[0] == 0)
    throw PrecisionFailure("rational reconstruction failed");
  u64 s = K.inv(t1[0]);
  return {scale(K, r1, s), scale(K, t1, s)};
}

Poly crt_pair(const Modulus& K, const Poly& a1, const Poly& q1, const Poly& a2, const Poly& q2) {
  Poly inv;
  try {
    inv = modinv(K, q1, q2);
  } catch (const NotInvertible&) {
    throw NotCoprime("crt_pair: moduli are not coprime");
  }
  Poly k = mulmod(K, sub(K, a2, a1), inv, q2);
  return add(K, a1, mul(K, q1, k));
}

ScalarSeq transposed_mulmod(const Modulus& K, const Poly& F, const Poly& g, const ScalarSeq& ell) {
  std::size_t r = F.deg();
  if (r == 0) return {};
  Poly rfinv = series_inv(K, reverse(F, r + 1), 2 * r);
  return transposed_mulmod_pre(K, F, rfinv, rem(K, g, F), ell);
}

std::vector<ScalarSeq> power_projection_multi(const Modulus& K, const Poly& F, const Poly& H,
                                              const std::vector<ScalarSeq>& ells, std::size_t t) {
  if (F.deg() < 0) throw InvalidInput("power_projection modulo zero");
  std::size_t r = F.deg();
  for (const auto& e : ells)
    if (e.size() != r) throw ShapeError("power_projection: linear form size must be deg F");
  if (r == 0 || t == 0) return std::vector<ScalarSeq>(ells.size(), ScalarSeq(t, 0));
  Poly Hm = rem(K, H, F);
  if (t <= 2 * r) return bsgs(K, F, Hm, ells, std::vector<std::size_t>(ells.size(), t));
  auto head = bsgs(K, F, Hm, ells, std::vector<std::size_t>(ells.size(), 2 * r));
  std::vector<ScalarSeq> out;
  for (auto& h : head) {
    Poly P = berlekamp_massey(K, h, r);
    std::size_t L = P.deg();
    ScalarSeq s = h;
    s.resize(t, 0);
    for (std::size_t i = 2 * r; i < t; ++i) {
      LazyAcc acc(K);
      for (std::size_t j = 0; j < L; ++j) acc.add(P.c[j], s[i - L + j]);
      s[i] = K.neg(acc.get());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScalarSeq> power_projection_multi(const Modulus& K, const Poly& F, const Poly& H,
                                              const std::vector<ScalarSeq>& ells,
                                              const std::vector<std::size_t>& lengths) {
  if (lengths.size() != ells.size()) throw ShapeError("power_projection: one length per form");
  std::size_t r = std::max(F.deg(), 0), tmax = 0;
  for (std::size_t t : lengths) tmax = std::max(tmax, t);
  if (tmax <= 2 * r) {
    if (F.deg() < 0) throw InvalidInput("power_projection modulo zero");
    for (const auto& e : ells)
      if (e.size() != r) throw ShapeError("power_projection: linear form size must be deg F");
    if (r == 0) {
      std::vector<ScalarSeq> out;
      for (std::size_t t : lengths) out.emplace_back(t, 0);
      return out;
    }
    return bsgs(K, F, rem(K, H, F), ells, lengths);
  }
  auto out = power_projection_multi(K, F, H, ells, tmax);
  for (std::size_t e = 0; e < out.size(); ++e) out[e].resize(lengths[e]);
  return out;
}

ScalarSeq power_projection(const Modulus& K, const Poly& F, const Poly& H, const ScalarSeq& ell,
                           std::size_t t) {
  return power_projection_multi(K, F, H, {ell}, t)[0];
}

ScalarSeq power_projection_naive(const Modulus& K, const Poly& F, const Poly& H,
                                 const ScalarSeq& ell, std::size_t t) {
  if (ell.size() != static_cast<std::size_t>(std::max(F.deg(), 0)))
    throw ShapeError("power_projection: linear form size must be deg F");
  ScalarSeq out(t, 0);
  if (F.deg() <= 0) return out;
  Poly Hm = rem(K, H, F);
  Poly cur = rem(K, Poly::constant(1), F);
  for (std::size_t s = 0; s < t; ++s) {
    out[s] = dot_form(K, ell, cur);
    cur = mulmod(K, cur, Hm, F);
  }
  return out;
}

}  // namespace bfglm

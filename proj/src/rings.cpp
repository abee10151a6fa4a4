#include "chevdioph/rings.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <sstream>

#include "chevdioph/checked.hpp"

namespace chevdioph {

namespace {

// Extended gcd: returns g and x with a*x == g (mod m0); used for modular
// inverses.
long long inv_mod(long long a, long long m) {
  long long g = m, x = 0, g1 = mod_canonical(a, m), x1 = 1;
  while (g1) {
    long long q = g / g1;
    long long t = g - q * g1; g = g1; g1 = t;
    t = x - q * x1; x = x1; x1 = t;
  }
  if (g != 1) throw not_a_unit_error("element has no inverse mod " + std::to_string(m));
  return mod_canonical(x, m);
}

// Monic polynomial arithmetic over F_p for GF construction (dense,
// low->high coefficient vectors).
std::vector<long long> pmod(std::vector<long long> a, const std::vector<long long>& f, long long p) {
  int k = static_cast<int>(f.size()) - 1;
  while (static_cast<int>(a.size()) > k) {
    long long lead = mod_canonical(a.back(), p);
    int shift = static_cast<int>(a.size()) - 1 - k;
    if (lead != 0)
      for (int i = 0; i <= k; ++i)
        a[i + shift] = mod_canonical(a[i + shift] - lead * f[i], p);
    a.pop_back();
  }
  a.resize(k, 0);
  for (auto& c : a) c = mod_canonical(c, p);
  return a;
}

std::vector<long long> pmul(const std::vector<long long>& a, const std::vector<long long>& b, long long p) {
  std::vector<long long> r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = mod_canonical(r[i + j] + a[i] * b[j], p);
  return r;
}

// Remainder of a by monic b over F_p; both low->high.
std::vector<long long> prem(std::vector<long long> a, const std::vector<long long>& b, long long p) {
  while (!a.empty() && a.back() % p == 0) a.pop_back();
  while (a.size() >= b.size()) {
    long long lead = mod_canonical(a.back(), p);
    long long binv = inv_mod(b.back(), p);
    long long q = mod_canonical(lead * binv, p);
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i)
      a[i + shift] = mod_canonical(a[i + shift] - q * b[i], p);
    while (!a.empty() && mod_canonical(a.back(), p) == 0) a.pop_back();
  }
  return a;
}

bool poly_irreducible(const std::vector<long long>& f, long long p) {
  int k = static_cast<int>(f.size()) - 1;
  if (k == 1) return true;
  // Trial division by all monic polynomials of degree 1..k/2.  Degrees are
  // tiny here (GF construction), so the scan is cheap.
  for (int d = 1; 2 * d <= k; ++d) {
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long code = 0; code < count; ++code) {
      std::vector<long long> g(d + 1, 0);
      g[d] = 1;
      long long c = code;
      for (int i = 0; i < d; ++i) { g[i] = c % p; c /= p; }
      if (prem(f, g, p).empty()) return false;
    }
  }
  return true;
}

std::vector<long long> canonical_irreducible(long long p, int k) {
  long long count = 1;
  for (int i = 0; i < k; ++i) count *= p;
  for (long long code = 0; code < count; ++code) {
    std::vector<long long> f(k + 1, 0);
    f[k] = 1;
    long long c = code;
    for (int i = 0; i < k; ++i) { f[i] = c % p; c /= p; }
    if (poly_irreducible(f, p)) return f;
  }
  throw std::runtime_error("no irreducible polynomial found (bad p or k)");
}

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::mutex g_ring_mutex;
std::map<std::string, std::unique_ptr<Ring>>& ring_registry() {
  static std::map<std::string, std::unique_ptr<Ring>> reg;
  return reg;
}

}  // namespace

const Ring* intern_ring(Ring r) {
  std::string key = r.spec_string();
  std::lock_guard<std::mutex> lk(g_ring_mutex);
  auto& reg = ring_registry();
  auto it = reg.find(key);
  if (it == reg.end())
    it = reg.emplace(key, std::make_unique<Ring>(std::move(r))).first;
  return it->second.get();
}

const Ring* ring_integers() {
  Ring r; r.kind = RingKind::Integers;
  return intern_ring(std::move(r));
}

const Ring* ring_rationals() {
  Ring r; r.kind = RingKind::Rationals;
  return intern_ring(std::move(r));
}

const Ring* ring_modn(long long n) {
  if (n < 2) throw ring_parse_error("Z/n needs n >= 2");
  Ring r; r.kind = RingKind::ModN; r.n = n;
  return intern_ring(std::move(r));
}

const Ring* ring_gf(long long p, int k) {
  return ring_gf(p, k, canonical_irreducible(p, k));
}

const Ring* ring_gf(long long p, int k, const std::vector<long long>& f) {
  if (!is_prime(p)) throw ring_parse_error("GF characteristic must be prime");
  if (k < 1 || k > 12) throw ring_parse_error("GF degree out of range");
  if (static_cast<int>(f.size()) != k + 1 || mod_canonical(f[k], p) != 1)
    throw ring_parse_error("GF modulus must be monic of degree k");
  Ring r; r.kind = RingKind::GF; r.p = p; r.k = k;
  r.f.resize(k + 1);
  for (int i = 0; i <= k; ++i) r.f[i] = mod_canonical(f[i], p);
  if (!poly_irreducible(r.f, p)) throw ring_parse_error("GF modulus is reducible");
  return intern_ring(std::move(r));
}

const Ring* ring_polyz(const std::vector<std::string>& vars) {
  if (vars.empty()) throw ring_parse_error("ZPoly needs at least one variable");
  Ring r; r.kind = RingKind::PolyZ; r.vars = vars;
  return intern_ring(std::move(r));
}

const Ring* ring_parse_spec(const std::string& spec_in) {
  std::string s;
  for (char c : spec_in)
    if (!isspace(static_cast<unsigned char>(c))) s += c;
  if (s == "Z") return ring_integers();
  if (s == "Q") return ring_rationals();
  if (s.rfind("Z/", 0) == 0) {
    try {
      return ring_modn(std::stoll(s.substr(2)));
    } catch (const ring_parse_error&) {
      throw;
    } catch (...) {
      throw ring_parse_error("bad modulus in ring spec: " + spec_in);
    }
  }
  if (s.rfind("GF(", 0) == 0 && s.back() == ')') {
    std::string body = s.substr(3, s.size() - 4);
    std::string qpart = body, fpart;
    auto semi = body.find(';');
    if (semi != std::string::npos) {
      qpart = body.substr(0, semi);
      fpart = body.substr(semi + 1);
    }
    long long p = 0; int k = 1;
    auto caret = qpart.find('^');
    try {
      if (caret != std::string::npos) {
        p = std::stoll(qpart.substr(0, caret));
        k = std::stoi(qpart.substr(caret + 1));
      } else {
        long long q = std::stoll(qpart);
        // factor q = p^k with p prime
        for (long long d = 2; d * d <= q; ++d)
          if (q % d == 0) { p = d; break; }
        if (p == 0) { p = q; k = 1; }
        else {
          k = 0;
          long long t = q;
          while (t % p == 0) { t /= p; ++k; }
          if (t != 1) throw ring_parse_error("GF size must be a prime power: " + spec_in);
        }
      }
    } catch (const ring_parse_error&) {
      throw;
    } catch (...) {
      throw ring_parse_error("bad GF size in ring spec: " + spec_in);
    }
    if (fpart.empty()) return ring_gf(p, k);
    if (fpart.rfind("f=[", 0) != 0 || fpart.back() != ']')
      throw ring_parse_error("GF modulus must look like f=[c0,...,ck]");
    std::vector<long long> f;
    std::string nums = fpart.substr(3, fpart.size() - 4);
    std::stringstream ss(nums);
    std::string tok;
    while (std::getline(ss, tok, ','))
      f.push_back(std::stoll(tok));
    return ring_gf(p, k, f);
  }
  if (s.rfind("ZPoly[", 0) == 0 && s.back() == ']') {
    std::vector<std::string> vars;
    std::string nums = s.substr(6, s.size() - 7);
    std::stringstream ss(nums);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) vars.push_back(tok);
    return ring_polyz(vars);
  }
  throw ring_parse_error("unrecognized ring spec: " + spec_in);
}

long long Ring::size() const {
  switch (kind) {
    case RingKind::ModN: return n;
    case RingKind::GF: {
      long long s = 1;
      for (int i = 0; i < k; ++i) s = checked_mul(s, p);
      return s;
    }
    default: return 0;
  }
}

bool Ring::is_field() const {
  if (kind == RingKind::GF || kind == RingKind::Rationals) return true;
  if (kind == RingKind::ModN) return is_prime(n);
  return false;
}

bool Ring::has_half() const {
  switch (kind) {
    case RingKind::Rationals: return true;
    case RingKind::Integers: return false;
    case RingKind::PolyZ: return false;
    case RingKind::ModN: return n % 2 == 1;
    case RingKind::GF: return p != 2;
  }
  return false;
}

std::string Ring::spec_string() const {
  switch (kind) {
    case RingKind::Integers: return "Z";
    case RingKind::Rationals: return "Q";
    case RingKind::ModN: return "Z/" + std::to_string(n);
    case RingKind::GF: {
      std::string s = "GF(" + std::to_string(p);
      if (k == 1) return s + ")";  // the canonical modulus is implied
      s += "^" + std::to_string(k);
      s += ";f=[";
      for (int i = 0; i <= k; ++i) {
        if (i) s += ",";
        s += std::to_string(f[i]);
      }
      return s + "])";
    }
    case RingKind::PolyZ: {
      std::string s = "ZPoly[";
      for (size_t i = 0; i < vars.size(); ++i) {
        if (i) s += ",";
        s += vars[i];
      }
      return s + "]";
    }
  }
  return "?";
}

std::vector<long long> Ring::gf_unpack(long long a) const {
  std::vector<long long> d(k);
  for (int i = 0; i < k; ++i) { d[i] = a % p; a /= p; }
  return d;
}

long long Ring::gf_pack(const std::vector<long long>& d) const {
  long long a = 0;
  for (int i = k - 1; i >= 0; --i) a = a * p + mod_canonical(d[i], p);
  return a;
}

std::vector<long long> Ring::gf_mulmod(const std::vector<long long>& x, const std::vector<long long>& y) const {
  return pmod(pmul(x, y, p), f, p);
}

RElem Ring::zero() const { return RElem(this, 0, 1, kind == RingKind::PolyZ ? Poly(vars.size()) : Poly()); }
RElem Ring::one() const { return from_int(1); }

RElem Ring::from_int(long long v) const {
  switch (kind) {
    case RingKind::Integers: return RElem(this, v, 1, Poly());
    case RingKind::Rationals: return RElem(this, v, 1, Poly());
    case RingKind::ModN: return RElem(this, mod_canonical(v, n), 1, Poly());
    case RingKind::GF: {
      std::vector<long long> d(k, 0);
      d[0] = mod_canonical(v, p);
      return RElem(this, gf_pack(d), 1, Poly());
    }
    case RingKind::PolyZ: return RElem(this, 0, 1, Poly::constant(vars.size(), v));
  }
  throw std::logic_error("bad ring kind");
}

RElem Ring::from_rational(long long num, long long den) const {
  if (den == 0) throw std::runtime_error("zero denominator");
  if (kind == RingKind::Rationals) {
    if (den < 0) { den = -den; num = -num; }
    long long g = gcd_ll(num, den);
    if (g > 1) { num /= g; den /= g; }
    return RElem(this, num, den, Poly());
  }
  return mul(from_int(num), inv(from_int(den)));
}

RElem Ring::var(size_t idx) const {
  if (kind != RingKind::PolyZ) throw std::runtime_error("var() needs a polynomial ring");
  return RElem(this, 0, 1, Poly::variable(vars.size(), idx));
}

RElem Ring::from_poly(const Poly& p_) const {
  if (kind != RingKind::PolyZ) throw std::runtime_error("from_poly() needs a polynomial ring");
  if (p_.nvars() != vars.size()) throw std::runtime_error("polynomial arity mismatch");
  return RElem(this, 0, 1, p_);
}

RElem Ring::add(const RElem& x, const RElem& y) const {
  switch (kind) {
    case RingKind::Integers: return RElem(this, checked_add(x.raw_a(), y.raw_a()), 1, Poly());
    case RingKind::ModN: return RElem(this, mod_canonical(x.raw_a() + y.raw_a(), n), 1, Poly());
    case RingKind::Rationals: {
      long long num = checked_add(checked_mul(x.raw_a(), y.raw_b()), checked_mul(y.raw_a(), x.raw_b()));
      long long den = checked_mul(x.raw_b(), y.raw_b());
      return from_rational(num, den);
    }
    case RingKind::GF: {
      auto a = gf_unpack(x.raw_a()), b = gf_unpack(y.raw_a());
      for (int i = 0; i < k; ++i) a[i] = mod_canonical(a[i] + b[i], p);
      return RElem(this, gf_pack(a), 1, Poly());
    }
    case RingKind::PolyZ: return RElem(this, 0, 1, x.raw_poly() + y.raw_poly());
  }
  throw std::logic_error("bad ring kind");
}

RElem Ring::neg(const RElem& x) const {
  switch (kind) {
    case RingKind::Integers: return RElem(this, checked_sub(0, x.raw_a()), 1, Poly());
    case RingKind::ModN: return RElem(this, mod_canonical(-x.raw_a(), n), 1, Poly());
    case RingKind::Rationals: return RElem(this, -x.raw_a(), x.raw_b(), Poly());
    case RingKind::GF: {
      auto a = gf_unpack(x.raw_a());
      for (int i = 0; i < k; ++i) a[i] = mod_canonical(-a[i], p);
      return RElem(this, gf_pack(a), 1, Poly());
    }
    case RingKind::PolyZ: return RElem(this, 0, 1, -x.raw_poly());
  }
  throw std::logic_error("bad ring kind");
}

RElem Ring::sub(const RElem& x, const RElem& y) const { return add(x, neg(y)); }

RElem Ring::mul(const RElem& x, const RElem& y) const {
  switch (kind) {
    case RingKind::Integers: return RElem(this, checked_mul(x.raw_a(), y.raw_a()), 1, Poly());
    case RingKind::ModN: return RElem(this, mod_canonical(checked_mul(x.raw_a(), y.raw_a()), n), 1, Poly());
    case RingKind::Rationals:
      return from_rational(checked_mul(x.raw_a(), y.raw_a()), checked_mul(x.raw_b(), y.raw_b()));
    case RingKind::GF:
      return RElem(this, gf_pack(gf_mulmod(gf_unpack(x.raw_a()), gf_unpack(y.raw_a()))), 1, Poly());
    case RingKind::PolyZ: return RElem(this, 0, 1, x.raw_poly() * y.raw_poly());
  }
  throw std::logic_error("bad ring kind");
}

bool Ring::is_zero(const RElem& x) const {
  if (kind == RingKind::PolyZ) return x.raw_poly().is_zero();
  return x.raw_a() == 0;
}

bool Ring::is_one(const RElem& x) const { return x == one(); }

bool Ring::is_unit(const RElem& x) const {
  switch (kind) {
    case RingKind::Integers: return x.raw_a() == 1 || x.raw_a() == -1;
    case RingKind::Rationals: return x.raw_a() != 0;
    case RingKind::ModN: return gcd_ll(x.raw_a(), n) == 1;
    case RingKind::GF: return x.raw_a() != 0;
    case RingKind::PolyZ: {
      const Poly& q = x.raw_poly();
      return q.is_constant() && (q.constant_value() == 1 || q.constant_value() == -1);
    }
  }
  return false;
}

RElem Ring::inv(const RElem& x) const {
  switch (kind) {
    case RingKind::Integers:
    case RingKind::PolyZ:
      if (!is_unit(x)) throw not_a_unit_error("not a unit in " + spec_string() + ": " + to_string(x));
      return x;  // only +-1 are units and both are self-inverse
    case RingKind::Rationals:
      if (x.raw_a() == 0) throw not_a_unit_error("division by zero in Q");
      return from_rational(x.raw_b(), x.raw_a());
    case RingKind::ModN:
      return RElem(this, inv_mod(x.raw_a(), n), 1, Poly());
    case RingKind::GF: {
      if (x.raw_a() == 0) throw not_a_unit_error("division by zero in " + spec_string());
      // x^(q-2) = x^{-1} in a field
      return pow_int(x, size() - 2);
    }
  }
  throw std::logic_error("bad ring kind");
}

RElem Ring::pow_int(const RElem& x, long long e) const {
  if (e < 0) return pow_int(inv(x), -e);
  RElem acc = one(), base = x;
  while (e > 0) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  return acc;
}

std::vector<RElem> Ring::enumerate() const {
  if (!finite()) throw std::runtime_error("cannot enumerate infinite ring " + spec_string());
  std::vector<RElem> out;
  long long s = size();
  out.reserve(s);
  for (long long i = 0; i < s; ++i) out.push_back(from_index(i));
  return out;
}

std::vector<RElem> Ring::units() const {
  std::vector<RElem> out;
  for (auto& e : enumerate())
    if (is_unit(e)) out.push_back(e);
  return out;
}

long long Ring::index_of(const RElem& x) const {
  if (!finite()) throw std::runtime_error("index_of on infinite ring");
  return x.raw_a();
}

RElem Ring::from_index(long long idx) const {
  switch (kind) {
    case RingKind::ModN:
    case RingKind::GF:
      return RElem(this, idx, 1, Poly());
    default:
      throw std::runtime_error("from_index on infinite ring");
  }
}

std::string Ring::to_string(const RElem& x) const {
  switch (kind) {
    case RingKind::Integers: return std::to_string(x.raw_a());
    case RingKind::ModN: return std::to_string(x.raw_a());
    case RingKind::Rationals:
      if (x.raw_b() == 1) return std::to_string(x.raw_a());
      return std::to_string(x.raw_a()) + "/" + std::to_string(x.raw_b());
    case RingKind::GF: {
      if (k == 1) return std::to_string(x.raw_a());
      auto d = gf_unpack(x.raw_a());
      std::string s;
      for (int i = k - 1; i >= 0; --i) {
        if (d[i] == 0) continue;
        if (!s.empty()) s += "+";
        if (i == 0 || d[i] != 1) s += std::to_string(d[i]);
        if (i >= 1) {
          if (d[i] != 1) s += "*";
          s += "g";
          if (i > 1) s += "^" + std::to_string(i);
        }
      }
      return s.empty() ? "0" : s;
    }
    case RingKind::PolyZ: return x.raw_poly().to_string(vars);
  }
  return "?";
}

RElem Ring::parse_literal(const std::string& raw) const {
  std::string s;
  for (char c : raw)
    if (!isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ring_parse_error("empty ring literal");
  if (s.front() == '[' && s.back() == ']') {
    if (kind != RingKind::GF) throw ring_parse_error("digit-vector literal needs a GF ring");
    std::vector<long long> d;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ','))
      d.push_back(std::stoll(tok));
    if (static_cast<int>(d.size()) > k) throw ring_parse_error("digit vector longer than GF degree");
    d.resize(k, 0);
    for (auto& c : d) c = mod_canonical(c, p);
    return RElem(this, gf_pack(d), 1, Poly());
  }
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    long long num = std::stoll(s.substr(0, slash));
    long long den = std::stoll(s.substr(slash + 1));
    return from_rational(num, den);
  }
  if (kind == RingKind::PolyZ) {
    for (size_t i = 0; i < vars.size(); ++i)
      if (s == vars[i]) return var(i);
  }
  if (kind == RingKind::GF && s == "g") {
    std::vector<long long> d(k, 0);
    if (k < 2) throw ring_parse_error("'g' literal needs a proper extension field");
    d[1] = 1;
    return RElem(this, gf_pack(d), 1, Poly());
  }
  try {
    return from_int(std::stoll(s));
  } catch (...) {
    throw ring_parse_error("bad ring literal: " + raw);
  }
}

void Ring::serialize(const RElem& x, std::string& out) const {
  switch (kind) {
    case RingKind::ModN:
    case RingKind::GF: {
      long long v = x.raw_a();
      size_t w = serialized_width();
      for (size_t i = 0; i < w; ++i) {
        out += static_cast<char>(v & 0xff);
        v >>= 8;
      }
      return;
    }
    default:
      out += to_string(x);
      out += ';';
      return;
  }
}

size_t Ring::serialized_width() const {
  long long s = size();
  if (s == 0) throw std::runtime_error("serialized_width on infinite ring");
  size_t w = 1;
  while ((1LL << (8 * w)) < s) ++w;
  return w;
}

std::vector<const Ring*> Ring::crt_components() const {
  if (kind != RingKind::ModN) throw std::runtime_error("crt_components needs Z/n");
  std::vector<const Ring*> out;
  long long m = n;
  for (long long d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      long long q = 1;
      while (m % d == 0) { m /= d; q *= d; }
      out.push_back(ring_modn(q));
    }
  }
  if (m > 1) out.push_back(ring_modn(m));
  return out;
}

RElem Ring::crt_project(const RElem& x, const Ring* comp) const {
  if (kind != RingKind::ModN || comp->kind != RingKind::ModN)
    throw std::runtime_error("crt_project needs Z/n rings");
  return comp->from_int(x.raw_a());
}

RElem Ring::crt_lift(const std::vector<RElem>& parts) const {
  auto comps = crt_components();
  if (parts.size() != comps.size()) throw std::runtime_error("crt_lift arity mismatch");
  // Standard incremental CRT combine.
  long long x = 0, m = 1;
  for (size_t i = 0; i < comps.size(); ++i) {
    long long ni = comps[i]->n, ai = parts[i].raw_a();
    long long t = mod_canonical((ai - x) % ni * inv_mod(m % ni, ni), ni);
    x = x + m * t;
    m *= ni;
    x = mod_canonical(x, m);
  }
  return from_int(x);
}

bool RElem::operator==(const RElem& o) const {
  if (R_ != o.R_) return false;
  if (!R_) return true;
  if (R_->kind == RingKind::PolyZ) return p_ == o.p_;
  return a_ == o.a_ && b_ == o.b_;
}

const FiniteRingOps* finite_ops(const Ring* R) {
  static std::mutex mx;
  static std::map<const Ring*, std::unique_ptr<FiniteRingOps>> cache;
  std::lock_guard<std::mutex> lk(mx);
  auto it = cache.find(R);
  if (it != cache.end()) return it->second.get();
  if (!R->finite()) throw std::runtime_error("finite_ops on infinite ring " + R->spec_string());
  long long s = R->size();
  if (s > 256) throw std::runtime_error("ring too large for packed operations (max 256 elements): " + R->spec_string());
  auto ops = std::make_unique<FiniteRingOps>();
  ops->R = R;
  ops->size = static_cast<int>(s);
  ops->add.resize(s * s);
  ops->mul.resize(s * s);
  ops->negt.resize(s);
  ops->invt.assign(s, -1);
  auto elems = R->enumerate();
  ops->one = static_cast<uint8_t>(R->index_of(R->one()));
  for (long long i = 0; i < s; ++i) {
    ops->negt[i] = static_cast<uint8_t>(R->index_of(R->neg(elems[i])));
    if (R->is_unit(elems[i]))
      ops->invt[i] = static_cast<int16_t>(R->index_of(R->inv(elems[i])));
    for (long long j = 0; j < s; ++j) {
      ops->add[i * s + j] = static_cast<uint8_t>(R->index_of(R->add(elems[i], elems[j])));
      ops->mul[i * s + j] = static_cast<uint8_t>(R->index_of(R->mul(elems[i], elems[j])));
    }
  }
  auto* raw = ops.get();
  cache.emplace(R, std::move(ops));
  return raw;
}

}  // namespace chevdioph

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chevdioph/poly.hpp"

namespace chevdioph {

struct not_a_unit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ring_parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RingKind { Integers, Rationals, ModN, GF, PolyZ };

class Ring;
class RElem;

// Rings are interned: every distinct spec string maps to one immortal
// descriptor, so elements can carry a plain pointer.
const Ring* ring_integers();
const Ring* ring_rationals();
const Ring* ring_modn(long long n);
const Ring* ring_gf(long long p, int k);  // canonical irreducible (first in the fixed scan order)
const Ring* ring_gf(long long p, int k, const std::vector<long long>& f);
const Ring* ring_polyz(const std::vector<std::string>& vars);
// Accepts: Z | Q | Z/<n> | GF(<q>) | GF(<p>^<k>) | GF(..;f=[c0,...,ck]) | ZPoly[v1,...]
const Ring* ring_parse_spec(const std::string& spec);

class RElem {
 public:
  RElem() = default;
  RElem(const Ring* R, long long a, long long b, Poly p) : R_(R), a_(a), b_(b), p_(std::move(p)) {}
  const Ring* ring() const { return R_; }
  long long raw_a() const { return a_; }
  long long raw_b() const { return b_; }
  const Poly& raw_poly() const { return p_; }
  bool operator==(const RElem& o) const;
  bool operator!=(const RElem& o) const { return !(*this == o); }

 private:
  const Ring* R_ = nullptr;
  long long a_ = 0;  // Integers/ModN: value; Rationals: numerator; GF: packed base-p digits
  long long b_ = 1;  // Rationals: denominator (>0, coprime)
  Poly p_;           // PolyZ payload
};

class Ring {
 public:
  RingKind kind;
  long long n = 0;             // ModN modulus
  long long p = 0;             // GF characteristic
  int k = 0;                   // GF extension degree
  std::vector<long long> f;    // GF monic modulus, coeffs low->high, f[k]==1
  std::vector<std::string> vars;  // PolyZ variables

  bool finite() const { return kind == RingKind::ModN || kind == RingKind::GF; }
  // Number of elements for finite rings.
  long long size() const;
  bool is_field() const;
  bool has_half() const;  // 2 is a unit
  std::string spec_string() const;

  RElem zero() const;
  RElem one() const;
  RElem from_int(long long v) const;  // image of an integer under Z -> R
  RElem from_rational(long long num, long long den) const;
  RElem var(size_t idx) const;  // PolyZ variable as element
  RElem from_poly(const Poly& p) const;

  RElem add(const RElem& x, const RElem& y) const;
  RElem sub(const RElem& x, const RElem& y) const;
  RElem mul(const RElem& x, const RElem& y) const;
  RElem neg(const RElem& x) const;
  bool is_zero(const RElem& x) const;
  bool is_one(const RElem& x) const;
  bool is_unit(const RElem& x) const;
  RElem inv(const RElem& x) const;  // throws not_a_unit_error
  RElem pow_int(const RElem& x, long long e) const;  // negative e needs a unit

  // Finite-ring enumeration in the canonical index order (ModN: residue
  // 0..n-1; GF: packed digit code 0..p^k-1).
  std::vector<RElem> enumerate() const;
  std::vector<RElem> units() const;
  long long index_of(const RElem& x) const;      // canonical index, finite only
  RElem from_index(long long idx) const;

  std::string to_string(const RElem& x) const;
  // Literal forms: integer; a/b (rationals); [c0,c1,...] digit vector (GF);
  // variable name (PolyZ).
  RElem parse_literal(const std::string& s) const;

  // Canonical bytes for hashing/fingerprints (finite rings: fixed width).
  void serialize(const RElem& x, std::string& out) const;
  size_t serialized_width() const;  // finite rings only

  // ModN factorization into prime-power components, ascending primes.
  std::vector<const Ring*> crt_components() const;
  RElem crt_project(const RElem& x, const Ring* comp) const;
  // Inverse of the projection tuple (components ordered as crt_components()).
  RElem crt_lift(const std::vector<RElem>& parts) const;

 private:
  friend const Ring* intern_ring(Ring r);
  std::vector<long long> gf_unpack(long long a) const;
  long long gf_pack(const std::vector<long long>& d) const;
  std::vector<long long> gf_mulmod(const std::vector<long long>& x, const std::vector<long long>& y) const;
};

// Byte-indexed operation tables for a finite ring with at most 256
// elements; this is the fast path all group enumeration runs on.
struct FiniteRingOps {
  const Ring* R = nullptr;
  int size = 0;
  std::vector<uint8_t> add;  // size*size
  std::vector<uint8_t> mul;  // size*size
  std::vector<uint8_t> negt; // size
  std::vector<int16_t> invt; // size, -1 when not a unit
  uint8_t one = 0;

  uint8_t addi(uint8_t a, uint8_t b) const { return add[size_t(a) * size + b]; }
  uint8_t muli(uint8_t a, uint8_t b) const { return mul[size_t(a) * size + b]; }
};

// Cached per ring; throws when the ring is infinite or has > 256 elements.
const FiniteRingOps* finite_ops(const Ring* R);

}  // namespace chevdioph

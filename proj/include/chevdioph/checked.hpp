#pragma once

#include <stdexcept>
#include <string>

namespace chevdioph {

// All exact integer arithmetic in the library goes through these helpers.
// Inputs the library produces stay far below 2^63 on the supported desk
// scale, so an overflow always indicates either a bug or an input outside
// the supported range; in both cases we stop loudly instead of wrapping.
struct overflow_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline long long checked_add(long long a, long long b) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw overflow_error("integer overflow in add");
  return r;
}

inline long long checked_sub(long long a, long long b) {
  long long r;
  if (__builtin_sub_overflow(a, b, &r)) throw overflow_error("integer overflow in sub");
  return r;
}

inline long long checked_mul(long long a, long long b) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw overflow_error("integer overflow in mul");
  return r;
}

// Exact division; throws if b does not divide a.
inline long long checked_div_exact(long long a, long long b, const char* what = "exact division") {
  if (b == 0 || a % b != 0)
    throw std::runtime_error(std::string(what) + ": " + std::to_string(a) + " not divisible by " + std::to_string(b));
  return a / b;
}

inline long long gcd_ll(long long a, long long b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) { long long t = a % b; a = b; b = t; }
  return a;
}

// Floor-free canonical residue in [0, n).
inline long long mod_canonical(long long a, long long n) {
  long long r = a % n;
  if (r < 0) r += n;
  return r;
}

// a^e mod n, e >= 0.
inline long long pow_mod(long long a, long long e, long long n) {
  long long r = 1 % n;
  a = mod_canonical(a, n);
  while (e > 0) {
    if (e & 1) r = (r * a) % n;
    a = (a * a) % n;
    e >>= 1;
  }
  return r;
}

}  // namespace chevdioph

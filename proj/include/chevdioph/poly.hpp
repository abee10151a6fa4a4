#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chevdioph {

// Sparse multivariate polynomial over Z.  Terms are kept sorted in
// descending graded-lex order (total degree first, then lexicographic on
// the exponent vector), which fixes a canonical form for printing,
// hashing and equality.  The variable list itself lives with the ring
// that owns the polynomial; a Poly only knows how many variables it has.
struct PolyTerm {
  std::vector<uint32_t> exps;  // one exponent per variable
  long long coeff = 0;
  bool operator==(const PolyTerm&) const = default;
};

class Poly {
 public:
  Poly() = default;
  explicit Poly(size_t nvars) : nvars_(nvars) {}
  static Poly constant(size_t nvars, long long c);
  static Poly variable(size_t nvars, size_t idx);

  size_t nvars() const { return nvars_; }
  const std::vector<PolyTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && total_degree(terms_[0]) == 0); }
  long long constant_value() const;  // requires is_constant()
  int degree() const;                // total degree, -1 for zero

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(long long c) const;
  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  // Substitute values for all variables; T must support ring-style
  // closure under + and * with an identity provided by `one`.
  long long eval_ll(const std::vector<long long>& vals) const;

  // Coefficient of the given exponent vector (0 when absent).
  long long coeff_of(const std::vector<uint32_t>& exps) const;

  std::string to_string(const std::vector<std::string>& varnames) const;

  // Raw term access used by ring/serialization code.
  void add_term(const std::vector<uint32_t>& exps, long long c);
  static int total_degree(const PolyTerm& t);

 private:
  void normalize();
  size_t nvars_ = 0;
  std::vector<PolyTerm> terms_;
};

// graded-lex: higher total degree first; ties broken lexicographically
// with larger exponent vectors first.
bool gradedlex_less(const PolyTerm& a, const PolyTerm& b);

}  // namespace chevdioph

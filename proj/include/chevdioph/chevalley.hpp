#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "chevdioph/poly.hpp"
#include "chevdioph/rootsys.hpp"

namespace chevdioph {

struct peel_failure_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense integer matrix, row-major, square.
struct MatZ {
  int n = 0;
  std::vector<long long> a;
  MatZ() = default;
  explicit MatZ(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0) {}
  long long& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
  long long at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
  static MatZ identity(int n);
  MatZ operator*(const MatZ& o) const;
  MatZ operator+(const MatZ& o) const;
  MatZ scaled(long long k) const;
  bool operator==(const MatZ& o) const { return n == o.n && a == o.a; }
  bool is_zero() const;
};

// Chevalley basis for an indecomposable root system: structure constants
// N(a,b) with the extraspecial-pair sign convention ("extraspecial-v1"):
// positive roots are scanned in the fixed (height, lex) order; for each
// non-simple positive root the minimal pair gets sign +, and every other
// constant is propagated through the standard antisymmetry / negation /
// cyclic / Jacobi relations.
class ChevBasis {
 public:
  explicit ChevBasis(const RootSystem* rs);

  const RootSystem& rs() const { return *rs_; }
  static constexpr const char* convention() { return "extraspecial-v1"; }

  // N(a,b) for root indices; 0 when a+b is not a root.
  long long N(int a, int b) const { return N_.at(a).at(b); }
  // h_a = [e_a, e_{-a}] expressed on the simple coroots.
  const std::vector<long long>& coroot(int a) const { return coroot_.at(a); }
  // The extraspecial pair (a, g-a) of a non-simple positive root g.
  std::pair<int, int> extraspecial(int g) const;

  // Adjoint matrices on the basis (h_1..h_l, e_0..e_{2m-1}).
  int adjoint_dim() const { return rs_->rank() + rs_->num_roots(); }
  MatZ ad_e(int rootIdx) const;
  MatZ ad_h(int simpleIdx) const;

  // Full bilinearity/Jacobi check via the adjoint action; heavy for large
  // systems, so callers choose between the full scan and a fixed sample.
  void verify_jacobi(bool full) const;

 private:
  long long n_pos_neg(int xi, int eta) const;
  const RootSystem* rs_;
  std::vector<std::vector<long long>> N_;
  std::vector<std::vector<long long>> coroot_;
};

enum class RepKind { Adjoint, NaturalSL, NaturalSp };
std::string rep_name(RepKind k);
RepKind parse_rep(const std::string& s);

// A faithful integral representation carrying a Chevalley basis aligned
// with the abstract structure constants, so commutator coefficients are
// representation independent.
class Rep {
 public:
  Rep(const RootSystem* rs, const ChevBasis* cb, RepKind kind);

  const RootSystem& rs() const { return *rs_; }
  const ChevBasis& basis() const { return *cb_; }
  RepKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const MatZ& e_matrix(int rootIdx) const { return emat_.at(rootIdx); }
  // [I, D1, D2, ...]: D_k = pi(e_alpha)^k / k!, integral; ends before the
  // first zero power.
  const std::vector<MatZ>& divided_powers(int rootIdx) const;
  // Weight of a basis vector as a doubled ambient vector.
  const std::vector<long long>& weight(int basisIdx) const { return weights_.at(basisIdx); }
  // <weight_b, gamma>: the exponent of u in h_gamma(u) acting on basis b.
  long long weight_pairing(int basisIdx, int rootIdx) const;
  // Basis indices ordered by decreasing weight height (the triangular
  // order used by decompositions); precomputed.
  const std::vector<int>& weight_order() const { return weight_order_; }
  long long weight_height2(int basisIdx) const { return wheight2_.at(basisIdx); }

 private:
  void build_adjoint();
  void build_natural_sl();
  void build_natural_sp();
  void align_and_verify();
  const RootSystem* rs_;
  const ChevBasis* cb_;
  RepKind kind_;
  int dim_ = 0;
  std::vector<MatZ> emat_;
  std::vector<std::vector<long long>> weights_;
  std::vector<int> weight_order_;
  std::vector<long long> wheight2_;
  mutable std::mutex dp_mutex_;
  mutable std::map<int, std::vector<MatZ>> dp_cache_;
};

// One factor x_{i a + j b}(c t^i u^j) of the fixed-order commutator
// product  [x_a(t), x_b(u)] = prod factors,  ordered by (height(ia+jb), i).
struct CommFactor {
  int i = 0, j = 0;
  int rootIdx = -1;
  long long c = 0;
};

// Derive the commutator factors for one ordered pair of linearly
// independent roots by symbolic peeling over Z[t,u]; the recomposition is
// rechecked exactly and peel_failure_error is thrown on any residue.
std::vector<CommFactor> derive_commutator_pair(const Rep& rep, int a, int b);

// Table over ordered pairs of linearly independent roots; rows are
// derived on first use and memoized.
class CommTable {
 public:
  explicit CommTable(const Rep& rep) : rep_(&rep) {}
  const std::vector<CommFactor>& pair(int a, int b) const;
  const RootSystem& rs() const { return rep_->rs(); }
  const Rep& rep() const { return *rep_; }

 private:
  const Rep* rep_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::vector<CommFactor>> table_;
};

// Symbolic verification of the Steinberg identities over Z[t,u]:
// x_a(t) x_a(u) == x_a(t+u), and the commutator formula against the
// derived table.  Throws on failure.
void verify_r1_symbolic(const Rep& rep);
void verify_r2_symbolic(const Rep& rep, const CommTable& tab);

// Plain-text "chevtab v1" serialization: all N constants and commutator
// entries, deterministic order.
std::string chevtab_write(const RootSystem* rs, const ChevBasis& cb, const CommTable& tab);
// Parse + recompute + compare; returns a list of mismatch descriptions
// (empty = verified).
std::vector<std::string> chevtab_verify(const std::string& text);

// Interned accessors (process-wide, derived once per type).
const ChevBasis* chev_basis(const RootSystem* rs);
const Rep* representation(const RootSystem* rs, RepKind kind);
const CommTable* comm_table(const Rep* rep);

}  // namespace chevdioph

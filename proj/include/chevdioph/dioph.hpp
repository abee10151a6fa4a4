#pragma once

#include <map>
#include <string>
#include <vector>

#include "chevdioph/group.hpp"

namespace chevdioph {

// The requested subgroup has no equation definition in this context (the
// rank-2 symplectic group without an invertible 2 only carries the
// diagonal Y-set, not the root subgroups themselves).
struct target_unavailable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// No interpreted-ring construction matches the requested carrier.
struct case_unavailable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Commutation sets

// All roots beta whose unit unipotent x_beta(1) commutes with x_alpha(1),
// decided by exact matrix commutation over the context's ring.
struct GammaSet {
  int alpha = -1;
  std::vector<int> members;  // ascending root indices; always contains alpha
  bool contains(int rootIdx) const;
};
GammaSet gamma_set(const GroupContext* ctx, int alphaIdx);

// Whether the centralizer of the commutation set of alpha is expected to
// take the three-factor shape X_alpha X_l1 X_l2 Z(G) (the doubled-length
// family's short roots, in either rank-2 realization) instead of the
// generic X_alpha Z(G).
bool dcent_exceptional(const RootSystem& rs, int alphaIdx);
// The two companion roots l1, l2 of an exceptional alpha: the opposite
// length class with l - alpha still a root; first entry has the larger
// height (ties by index).
std::vector<int> dcent_companions(const RootSystem& rs, int alphaIdx);

// ---------------------------------------------------------------------------
// Double centralizer audit

struct CentralizerReport {
  int alpha = -1;
  GammaSet gamma;
  std::string predicted_form;        // human-readable normal form
  std::vector<long long> computed;   // sorted table indices of C_G(Gamma_alpha)
  std::vector<long long> predicted;  // sorted table indices of the normal form
  size_t center_size = 0;
  bool equal = false;
  std::vector<std::string> witnesses;  // sample elements of the symmetric difference
};
CentralizerReport double_centralizer_report(const GroupContext* ctx, int alphaIdx,
                                            size_t cap = 2000000);

// ---------------------------------------------------------------------------
// Positive-primitive formulas over the group

// One symbol of a group word: either a named variable (optionally
// inverted) or a constant generator letter.
struct GWordSym {
  bool isVar = false;
  std::string var;
  bool vinv = false;
  WordAtom atom;  // constant letter when !isVar (atom.inv is honored)
};
struct GWord {
  std::vector<GWordSym> syms;
  GWord& operator*=(const GWord& o);
  GWord inversed() const;
  static GWord var(const std::string& name, bool inv = false);
  static GWord atom(char kind, int root, const RElem& t, bool inv = false);
  static GWord commutator(const GWord& a, const GWord& b);  // a b a^-1 b^-1
  std::vector<std::string> vars_used() const;               // deduped, in order
};

// An existentially quantified conjunction of word equations w = 1 over
// free variables, existential variables, and constant generators.
struct PPFormula {
  std::string system, rep, ringSpec;  // context stamp for printing
  std::vector<std::string> freeVars;
  std::vector<std::string> existVars;
  std::vector<GWord> equations;     // each equated to the identity
  std::vector<WordAtom> constants;  // deduped constant letters in use
  std::string note;                 // derivation tag
};

GroupElem eval_gword(const GroupContext* ctx, const GWord& w,
                     const std::map<std::string, GroupElem>& assignment);
std::string print_gword(const GroupContext* ctx, const GWord& w);
std::string print_pp_formula(const GroupContext* ctx, const PPFormula& f);
// Recompute the constants ledger from the equations.
void pp_collect_constants(const GroupContext* ctx, PPFormula& f);
// Rename variables (free and existential) by the given map.
PPFormula pp_rename(const PPFormula& f, const std::map<std::string, std::string>& m);

// ---------------------------------------------------------------------------
// Equation definitions of root subgroups

struct EDefineTarget {
  bool isY = false;
  int root = -1;  // root index when !isY
  static EDefineTarget X(int rootIdx) { return {false, rootIdx}; }
  static EDefineTarget Y() { return {true, -1}; }
};

// A one-free-variable formula whose solution set is exactly the target
// subgroup: the root subgroup X_gamma, or the diagonal set
// Y = { x_g(t) x_l(t) } in the rank-2 doubled-length case.  Throws
// target_unavailable_error when the context admits no such definition.
PPFormula e_define_subgroup(const GroupContext* ctx, const EDefineTarget& target);

// Exact solution-set evaluation of the emitted formula, exploiting its
// shape: commutation conjuncts bound each variable to a centralizer
// (computed from the full group table), the single defining equation is
// an image computation.  Returns sorted table indices.
std::vector<long long> e_define_solution_set(const GroupContext* ctx,
                                             const EDefineTarget& target,
                                             size_t cap = 2000000);

// The subgroup the definition is meant to carve out, enumerated directly
// from its parametrization.  Returns sorted table indices.
std::vector<long long> intended_subgroup(const GroupContext* ctx,
                                         const EDefineTarget& target,
                                         size_t cap = 2000000);

// Shape-blind brute force over all assignments (exactly one free
// variable; at most two existential variables).  The budget counts word
// evaluations.  Returns sorted table indices of the free variable.
std::vector<long long> pp_enumerate_solutions(const GroupContext* ctx, const PPFormula& f,
                                              size_t budget = 400000000,
                                              size_t cap = 2000000);

// ---------------------------------------------------------------------------
// The ring interpreted on a carrier subgroup

// Executable ring operations on a carrier subgroup: the product realizes
// addition; multiplication goes through commutator witnesses.  `otimes`
// constructs its witnesses by reading parameters off the matrices;
// `otimes_search` finds them by exhaustive search over the witness sets
// and is the reference semantics of the emitted equations.
class InterpretedRing {
 public:
  const GroupContext* ctx = nullptr;
  int caseId = 0;  // 1 plain pair, 2 doubled-triple chain, 3 rank-2 chain, 4 diagonal carrier
  EDefineTarget carrier;
  int g = -1;  // carrier root (the x_g component for the diagonal carrier)

  // case 1: [x_p(t), x_q(u)] = x_g(c11 t u), c11 = +1 by choice of pair
  int p = -1, q = -1;
  long long c11 = 1;
  // case 2: long p, short q, four-factor chain; inner long pair (p2, q2)
  int d1 = -1, d2 = -1, d3 = -1, p2 = -1, q2 = -1;
  long long phiSign = 1;
  // case 3: long p, q = g - p, d = p + 2q; conjugation by w_p(1)
  int d = -1, wroot = -1;
  int sigma = 1;
  // case 4: companions L1 (tall), L2; q = g - L1; sign-fixed constants
  int L1 = -1, L2 = -1;
  RElem u0;
  int sigmaP = 1;
  long long c12 = 1;

  GroupElem phi(const RElem& a) const;
  RElem read(const GroupElem& x) const;  // inverse of phi on the carrier
  GroupElem oplus(const GroupElem& x, const GroupElem& y) const;
  GroupElem otimes(const GroupElem& x, const GroupElem& y) const;
  GroupElem otimes_search(const GroupElem& x, const GroupElem& y) const;
  bool in_carrier(const GroupElem& x) const;  // finite rings
  const std::vector<GroupElem>& carrier_set() const { return carrier_; }

 private:
  friend InterpretedRing interpreted_ring_ops(const GroupContext*, const EDefineTarget&);
  int rr = -1, rc = -1;  // clean matrix position reading the carrier parameter
  long long rsgn = 1;
  std::vector<GroupElem> carrier_;            // phi image in ring-index order
  std::map<std::string, long long> cindex_;   // fingerprint -> ring index
  std::vector<GroupElem> gamL2_;              // case 4: commutation-set letters of L2
  mutable std::vector<std::string> junkset_;  // case 2/3 tail-subgroup fingerprints
  GroupElem mu_of(const GroupElem& longElem) const;       // cases 2/3
  GroupElem mu_search_of(const GroupElem& longElem) const;
  const std::vector<std::string>& junk_set() const;
};

InterpretedRing interpreted_ring_ops(const GroupContext* ctx, const EDefineTarget& carrier);

// The carrier a compiler should use in this context: a plain-pair sum
// root when one exists, otherwise the rank-2 chain carrier, otherwise Y.
EDefineTarget default_carrier(const GroupContext* ctx);

struct RingIsoReport {
  size_t pairs = 0;
  size_t addFailures = 0;
  size_t mulFailures = 0;
  size_t searchDisagreements = 0;  // otimes vs otimes_search
  bool injective = false;
  std::vector<std::string> witnesses;
  bool passed() const {
    return addFailures == 0 && mulFailures == 0 && searchDisagreements == 0 && injective;
  }
};
// Checks phi(a+b) = phi(a) (+) phi(b) and phi(ab) = phi(a) (x) phi(b)
// over every pair of ring elements, and that the two witness routes of
// (x) agree.  Finite rings only.
RingIsoReport verify_ring_isomorphism(const GroupContext* ctx, const EDefineTarget& carrier);

}  // namespace chevdioph

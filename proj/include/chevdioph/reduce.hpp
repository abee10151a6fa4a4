#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chevdioph/dioph.hpp"
#include "chevdioph/eqn.hpp"

namespace chevdioph {

// ---------------------------------------------------------------------------
// Straight-line circuits for polynomials

// A gate operand: a declared input variable, the value of an earlier gate,
// or an integer immediate.
struct CircOp {
  enum Kind { Input, Gate, Imm } kind = Imm;
  int idx = 0;        // input index or gate index
  long long imm = 0;  // immediate value when kind == Imm
  static CircOp input(int i) { return {Input, i, 0}; }
  static CircOp gate(int i) { return {Gate, i, 0}; }
  static CircOp immediate(long long v) { return {Imm, 0, v}; }
};

struct CircGate {
  char kind = '+';  // '+' add, '*' mul, 'k' constant (operand a is an Imm)
  CircOp a, b;
};

struct Circuit {
  std::vector<std::string> inputs;
  std::vector<CircGate> gates;  // topologically ordered
  CircOp output;                // value of the source polynomial
};

// Horner form over the lowest-index variable present, recursively on the
// coefficient polynomials.  Multiplications by 1 and additions of 0 are
// elided; a constant polynomial becomes a single const gate.
Circuit polynomial_to_circuit(const Poly& p, const std::vector<std::string>& inputs);

// Evaluate the circuit over a ring (immediates through from_int).
RElem eval_circuit(const Circuit& c, const Ring& R, const std::vector<RElem>& inputs);

// ---------------------------------------------------------------------------
// Reduction outputs

struct ReductionOutput {
  std::optional<GroupSystem> groupSystem;  // target of ring -> group
  std::optional<RingSystem> ringSystem;    // target of group -> ring
  // Source variable -> target variables carrying its value (total map).
  std::map<std::string, std::vector<std::string>> provenance;
  // Deduped constants in use, in first-use order (printed generator
  // letters for group targets, integer literals for ring targets).
  std::vector<std::string> constantLedger;
  // Non-zero when the group variables were replaced by bounded products
  // of root unipotents with this many sweeps of the root system.
  int boundedL = 0;
  // Printed target system followed by the provenance footer.
  std::string target_text() const;
};

// Compile a polynomial system over ctx's ring into an equisolvable system
// of word equations over ctx's group.  Throws case_unavailable_error when
// the context carries no interpreted ring, std::invalid_argument when the
// system's ring is not the context's ring.
ReductionOutput compile_ring_to_group(const RingSystem& rsys, const GroupContext* ctx);

// Compile a system of word equations into an equisolvable polynomial
// system over the same ring: per group variable an n-by-n block of entry
// variables constrained to the group's matrix scheme, a companion block
// for the inverse, and per word equation its n-by-n entry polynomials.
ReductionOutput compile_group_to_ring(const GroupSystem& gsys);

// The substitution replacing one group variable by a product of L sweeps
// of root unipotents with fresh ring parameters.
struct BoundedElemSubstitution {
  std::string var;
  int L = 0;
  std::vector<int> rootSeq;            // L * |Phi| root indices
  std::vector<std::string> params;     // fresh parameter names, same length
};
BoundedElemSubstitution encode_bounded_elementary(const std::string& var, int L,
                                                  const GroupContext* ctx);

// compile_group_to_ring after substituting every group variable by its
// bounded elementary product; sound when every solution value is a
// product of at most L * |Phi| root unipotents (caller-asserted), and the
// sweep count is recorded in the provenance footer.
ReductionOutput compile_group_to_ring_bounded(const GroupSystem& gsys, int L);

// ---------------------------------------------------------------------------
// Exhaustive solvers

struct SolveBudget {
  size_t nodes = 200000000;   // visited partial-assignment nodes
  size_t tableCap = 2000000;  // group enumeration cap
};

struct RingSolution {
  bool sat = false;
  std::map<std::string, RElem> witness;  // valid when sat
  long long count = -1;                  // filled in count mode
};
struct GroupSolution {
  bool sat = false;
  std::map<std::string, GroupElem> witness;
  long long count = -1;
};

// Depth-first search over declared variables in order, with each equation
// checked as soon as all its variables are bound and single-variable
// equations turned into candidate filters.  Exact verdicts; throws
// budget_exceeded_error past the node budget and std::invalid_argument
// for an infinite ring.
RingSolution solve_ring_system(const RingSystem& rsys, const SolveBudget& budget = {},
                               bool countAll = false);
GroupSolution solve_group_system(const GroupSystem& gsys, const SolveBudget& budget = {},
                                 bool countAll = false);

// ---------------------------------------------------------------------------
// Equisolvability verification

// One source system together with its compiled counterpart.  Exactly one
// of the two sources is present.
struct ReductionPair {
  std::string name;
  std::optional<RingSystem> ringSource;
  std::optional<GroupSystem> groupSource;
  ReductionOutput compiled;
};

struct EquisolvReport {
  struct Row {
    std::string name;
    bool sourceSat = false;
    bool targetSat = false;
    bool agree = false;
    bool pullbackOk = true;  // meaningful when targetSat
    std::string note;
  };
  std::vector<Row> rows;
  bool all_passed() const;
};

// Solves both sides of every pair, checks the SAT/UNSAT verdicts agree,
// and pulls every SAT witness back through the provenance map to a
// solution of the source system which is then re-evaluated directly.
EquisolvReport verify_equisolvability(const std::vector<ReductionPair>& pairs,
                                      const SolveBudget& budget = {});

}  // namespace chevdioph

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "chevdioph/chevalley.hpp"
#include "chevdioph/rings.hpp"

namespace chevdioph {

struct budget_exceeded_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class GroupContext;

// A group element: an exact dim x dim matrix over the context's ring.
// Finite rings of at most 256 elements use the packed byte form (entries
// are canonical ring indices); other rings store ring elements directly.
struct GroupElem {
  int dim = 0;
  bool packed = false;
  std::vector<uint8_t> pb;
  std::vector<RElem> sb;
  bool operator==(const GroupElem& o) const;
  bool operator!=(const GroupElem& o) const { return !(*this == o); }
};

// One letter of a group word: kind 'x', 'w' or 'h', a root index, a ring
// parameter, and an inversion flag.
struct WordAtom {
  char kind = 'x';
  int root = -1;
  RElem param;
  bool inv = false;
};

// Immutable bundle of (root system, representation, ring) together with
// the derived tables; the group in play is the large subgroup generated
// by all x_alpha(t) and all h_alpha(u) for units u.
class GroupContext {
 public:
  static const GroupContext* get(const RootSystem* rs, RepKind kind, const Ring* ring);
  static const GroupContext* get(const std::string& system, const std::string& rep,
                                 const std::string& ringSpec);

  const RootSystem& rs() const { return *rs_; }
  const Rep& rep() const { return *rep_; }
  const Ring& ring() const { return *ring_; }
  const ChevBasis& basis() const { return *cb_; }
  const CommTable& table() const { return *tab_; }
  bool packed() const { return packed_; }
  int dim() const { return rep_->dim(); }
  std::string spec_string() const;

  GroupElem identity() const;
  GroupElem x(int rootIdx, const RElem& t) const;
  GroupElem w(int rootIdx, const RElem& t) const;  // throws not_a_unit_error
  GroupElem h(int rootIdx, const RElem& t) const;  // throws not_a_unit_error
  GroupElem mul(const GroupElem& a, const GroupElem& b) const;
  GroupElem inverse(const GroupElem& g) const;
  // [g, h] = g h g^-1 h^-1.
  GroupElem commutator(const GroupElem& a, const GroupElem& b) const;
  // conjugate(g, s) = s g s^-1.
  GroupElem conjugate(const GroupElem& g, const GroupElem& s) const;
  bool commutes(const GroupElem& a, const GroupElem& b) const;
  bool is_identity(const GroupElem& g) const;

  RElem entry(const GroupElem& g, int r, int c) const;
  GroupElem from_entries(const std::vector<RElem>& entries) const;
  std::string to_string(const GroupElem& g) const;
  std::string fingerprint(const GroupElem& g) const;

  GroupElem eval_word(const std::vector<WordAtom>& atoms) const;
  // The inverse word (reversed letters, parameters negated/inverted):
  // no matrix inversion involved.
  std::vector<WordAtom> invert_word(const std::vector<WordAtom>& atoms) const;
  std::string print_word(const std::vector<WordAtom>& atoms) const;

 private:
  GroupContext(const RootSystem* rs, RepKind kind, const Ring* ring);
  const RootSystem* rs_;
  const Rep* rep_;
  const Ring* ring_;
  const ChevBasis* cb_;
  const CommTable* tab_;
  const FiniteRingOps* ops_ = nullptr;
  bool packed_ = false;
  mutable std::mutex xcache_mutex_;
  mutable std::map<std::pair<int, long long>, GroupElem> xcache_;
};

// Word parser for element literals: products of x(<root>;<t>), w(...),
// h(...), with ^-1 / integer powers, parentheses, and commutator sugar
// [A,B].  Roots are named a1..al or given in coordinates [1,-1,0].
std::vector<WordAtom> parse_group_word(const GroupContext* ctx, const std::string& text);

// A generator used by the breadth-first closure.
struct GenDesc {
  char kind;        // 'x' or 'h'
  int root;
  long long tIdx;   // canonical ring index of the parameter
};

// Complete enumeration of a finite context's group: breadth-first closure
// over all x_alpha(t), t != 0, and all h_alpha(u), u a unit != 1.
class GroupTable {
 public:
  GroupTable(const GroupContext* ctx, size_t cap = 2000000);

  const GroupContext& ctx() const { return *ctx_; }
  size_t size() const { return count_; }
  GroupElem element(size_t i) const;
  long long index_of(const GroupElem& g) const;  // -1 when absent
  const std::vector<GenDesc>& generators() const { return gens_; }
  GroupElem generator_element(size_t gi) const;
  // Word in generator indices reaching element i from the identity.
  std::vector<int> word_for(size_t i) const;

  std::vector<size_t> center() const;
  std::vector<size_t> centralizer(const std::vector<GroupElem>& s) const;

 private:
  const GroupContext* ctx_;
  size_t count_ = 0;
  int dim_ = 0;
  std::vector<uint8_t> arena_;  // count * dim * dim entries
  std::unordered_map<std::string, int> index_;
  std::vector<int> parent_;
  std::vector<int> genof_;
  std::vector<GenDesc> gens_;
  std::vector<GroupElem> genmats_;
};

// Interned accessor (tables are expensive; contexts own at most one).
const GroupTable* group_table(const GroupContext* ctx, size_t cap = 2000000);

// Relation report: one row per relation family.
struct RelationReport {
  struct Row {
    std::string relation;
    long long instances = 0;
    long long failures = 0;
    std::string note;
  };
  std::vector<Row> rows;
  bool all_passed() const;
};

// R1/R2 symbolically over Z[t,u]; R3-R6 and the torus character identity
// exhaustively in the unit parameters (finite rings only for the latter).
RelationReport verify_relations(const GroupContext* ctx);

}  // namespace chevdioph

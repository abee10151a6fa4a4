#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chevdioph/group.hpp"

namespace chevdioph {

// ---------------------------------------------------------------------------
// Torus of the generated group: closure of the h_alpha(u).
// ---------------------------------------------------------------------------

// All torus elements of a packed context, BFS order (identity first); cached.
const std::vector<GroupElem>& torus_elements(const GroupContext* ctx);
long long torus_index_of(const GroupContext* ctx, const GroupElem& g);  // -1 absent
// An h-word evaluating to torus element i.
std::vector<WordAtom> torus_word_for(const GroupContext* ctx, size_t i);

// ---------------------------------------------------------------------------
// Bruhat normal form over fields:
//   g = t * prod_{a>0} x_a(u[a]) * wrep(w) * prod_{a>0, w(a)<0} x_a(u2[a])
// with each product in the fixed (height, lex) root order and wrep(w) the
// product of w_s(1) along the stored reduced word of w.
// ---------------------------------------------------------------------------

struct BruhatForm {
  size_t weyl = 0;            // index into weyl_group(rs)->elements()
  long long torus = 0;        // index into torus_elements(ctx)
  std::vector<RElem> u;       // one entry per positive root
  std::vector<RElem> u2;      // one entry per positive root; zero when w(a) > 0
};

// The Weyl representative wrep(w) as a word of w_s(1) atoms.
std::vector<WordAtom> weyl_rep_word(const GroupContext* ctx, size_t weylIdx);
GroupElem bruhat_recompose(const GroupContext* ctx, const BruhatForm& f);

// Constructive decomposition: scans Weyl elements by increasing length and
// recovers the unipotent parts by height-ordered peeling; checks the result
// by recomposition.  Fields only.
BruhatForm bruhat_decompose(const GroupContext* ctx, const GroupElem& g,
                            long long budget = 10000000);

// Independent oracle: enumerates every (w, t, u, u2) tuple once, recording
// the product.  Serves exact lookups, a global uniqueness audit, and the
// cell census.  The tuple space must not exceed the budget.
class BruhatAtlas {
 public:
  BruhatAtlas(const GroupContext* ctx, long long budget = 10000000);
  const GroupContext& ctx() const { return *ctx_; }
  // Total number of tuples enumerated (= group order when Bruhat holds).
  long long tuples() const { return tuples_; }
  long long distinct() const { return static_cast<long long>(atlas_.size()); }
  // Number of products realized by more than one tuple (0 when unique).
  long long collisions() const { return collisions_; }
  const BruhatForm& lookup(const GroupElem& g) const;  // throws when absent
  // weyl index -> number of group elements in that cell.
  std::map<size_t, long long> census() const;

 private:
  const GroupContext* ctx_;
  std::map<std::string, BruhatForm> atlas_;
  long long tuples_ = 0;
  long long collisions_ = 0;
};

const BruhatAtlas* bruhat_atlas(const GroupContext* ctx, long long budget = 10000000);

// ---------------------------------------------------------------------------
// Big-cell normal form over local rings:
//   g = prod_{a>0} x_a(u[a]) * t * prod_{a>0} x_{-a}(v[a])
// where the u product runs in increasing (height, lex) order and the v
// product in the reversed order (highest first, so the rightmost factor is
// the lowest negative root).
// ---------------------------------------------------------------------------

enum class UTVStatus { Ok, NotInBigCell, RewriteDivergence };

struct UTVForm {
  UTVStatus status = UTVStatus::Ok;
  std::string note;
  std::vector<RElem> u;            // per positive root
  long long torus = -1;            // index into torus_elements (packed contexts)
  std::vector<WordAtom> torus_word;
  std::vector<RElem> v;            // per positive root a: parameter of x_{-a}
  long long steps = 0;             // rewrite work performed (word mode)
};

GroupElem utv_recompose(const GroupContext* ctx, const UTVForm& f);

// Matrix route: unit-pivot elimination on the weight-ordered matrix.
// Definitive over local rings: a non-unit pivot certifies NotInBigCell.
// Natural representations only.
UTVForm utv_decompose_matrix(const GroupContext* ctx, const GroupElem& g);

// Word route: rewrites the input word into u*t*v using only the defining
// relations plus the big-cell crossing identity; never inspects matrix
// entries.  Reports RewriteDivergence when the step budget runs out or a
// crossing parameter 1+st fails to be a unit.
UTVForm utv_decompose_word(const GroupContext* ctx, const std::vector<WordAtom>& word,
                           long long budget = 200000);

// The crossing identity (*):  x_{-g}(s) x_g(t) = h_g(1/(1+st)) *
// x_g(t(1+st)) * x_{-g}(s/(1+st)), defined when 1+st is a unit.  Returns
// (h-param, x-param, negative-x-param).
std::optional<std::array<RElem, 3>> star_cross(const GroupContext* ctx, int posRoot,
                                               const RElem& s, const RElem& t);

// The conjugation shift (**):  x_g(1) x_{-g}(s) x_g(1)^-1 =
// h_g(1/(1-s)) * x_g(s^2 - s) * x_{-g}(s/(1-s)), defined when 1-s is a unit.
std::optional<std::array<RElem, 3>> conj_shift(const GroupContext* ctx, int posRoot,
                                               const RElem& s);

// ---------------------------------------------------------------------------
// Chinese-remainder splitting of a context over Z/n.
// ---------------------------------------------------------------------------

struct CrtSplit {
  std::vector<const GroupContext*> components;
  std::vector<GroupElem> project(const GroupContext* ctx, const GroupElem& g) const;
  GroupElem lift(const GroupContext* ctx, const std::vector<GroupElem>& parts) const;
};

CrtSplit group_crt_split(const GroupContext* ctx);

}  // namespace chevdioph

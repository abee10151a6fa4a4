#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chevdioph {

struct illegal_rank_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct cap_exceeded_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An indecomposable root system in one of the families A..G, realized in
// the standard orthonormal coordinates with every coordinate doubled so
// that all vectors are integral (the F/E families use half-integers
// otherwise).  Roots are indexed 0..2m-1: positives first, sorted by
// (height, then lex on coordinates), then the negatives in the mirrored
// order, so neg(i) == i + m for a positive index i.
class RootSystem {
 public:
  RootSystem(char family, int rank);

  char family() const { return family_; }
  int rank() const { return rank_; }
  int ambient_dim() const { return dim_; }
  int num_positive() const { return npos_; }
  int num_roots() const { return static_cast<int>(roots_.size()); }

  const std::vector<long long>& root(int idx) const { return roots_.at(idx); }
  bool is_positive(int idx) const { return idx < npos_; }
  int negate(int idx) const { return idx < npos_ ? idx + npos_ : idx - npos_; }
  int height(int idx) const { return heights_.at(idx); }
  // Expansion of root idx in the simple-root basis (integer coefficients).
  const std::vector<long long>& simple_coords(int idx) const { return simple_coords_.at(idx); }
  int simple_root(int i) const { return simples_.at(i); }  // i in 0..rank-1
  bool is_simple(int idx) const;
  int highest_root() const { return highest_; }
  long long length_sq(int idx) const;  // (alpha, alpha) in doubled coordinates

  // Cartan pairing <a, b> = 2(a,b)/(b,b); always an integer.
  int pairing(int a, int b) const;
  // Index of w_b(a) = a - <a,b> b.
  int reflect(int a, int b) const;
  // Index of a+b when it is a root, else -1; a+b==0 gives -2.
  int sum_index(int a, int b) const;
  int index_of_coords(const std::vector<long long>& v) const;  // -1 when absent

  // p = max k with (b - k a) a root; the chain-down length used by the
  // structure constant magnitude |N(a,b)| = p+1.
  int chain_down(int a, int b) const;

  // Canonical names: simple roots print as a1..al, everything else as the
  // undoubled coordinate vector like [1,-1,0] or [1/2,-1/2,...].
  std::string root_name(int idx) const;
  int parse_root(const std::string& name) const;

 private:
  void build_roots(std::vector<std::vector<long long>> roots,
                   std::vector<std::vector<long long>> simples);
  char family_;
  int rank_;
  int dim_ = 0;
  int npos_ = 0;
  int highest_ = -1;
  std::vector<std::vector<long long>> roots_;
  std::vector<int> heights_;
  std::vector<std::vector<long long>> simple_coords_;
  std::vector<int> simples_;
  std::map<std::vector<long long>, int> index_;
};

struct WeylElement {
  std::vector<int> perm;   // action on root indices
  std::vector<int> word;   // reduced word in simple reflection indices (0-based)
};

class WeylGroup {
 public:
  // Breadth-first closure of the simple reflections; elements are ordered
  // by word length (identity first), ties in discovery order, which makes
  // the enumeration deterministic.  Throws cap_exceeded_error beyond cap.
  WeylGroup(const RootSystem& rs, size_t cap = 2000000);

  const RootSystem& root_system() const { return *rs_; }
  size_t order() const { return elements_.size(); }
  const WeylElement& element(size_t i) const { return elements_.at(i); }
  const std::vector<WeylElement>& elements() const { return elements_; }
  int longest_index() const { return longest_; }
  // Index of the element with the given action, -1 if absent.
  int find(const std::vector<int>& perm) const;
  // Compose permutation actions: (u * v)(x) = u(v(x)).
  static std::vector<int> compose(const std::vector<int>& u, const std::vector<int>& v);

 private:
  const RootSystem* rs_;
  std::vector<WeylElement> elements_;
  std::map<std::vector<int>, int> index_;
  int longest_ = 0;
};

// Parse "A2", "G2", "E8"... into a root system (interned per type).
const RootSystem* root_system(const std::string& name);
const RootSystem* root_system(char family, int rank);
const WeylGroup* weyl_group(const RootSystem* rs, size_t cap = 2000000);

}  // namespace chevdioph

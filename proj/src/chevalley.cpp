#include "chevdioph/chevalley.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include "chevdioph/checked.hpp"

namespace chevdioph {

// ---------------------------------------------------------------- MatZ ----

MatZ MatZ::identity(int n) {
  MatZ m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

MatZ MatZ::operator*(const MatZ& o) const {
  if (n != o.n) throw std::invalid_argument("MatZ: size mismatch");
  MatZ r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      long long v = at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < n; ++j) {
        long long w = o.at(k, j);
        if (w == 0) continue;
        r.at(i, j) = checked_add(r.at(i, j), checked_mul(v, w));
      }
    }
  return r;
}

MatZ MatZ::operator+(const MatZ& o) const {
  if (n != o.n) throw std::invalid_argument("MatZ: size mismatch");
  MatZ r(n);
  for (size_t i = 0; i < a.size(); ++i) r.a[i] = checked_add(a[i], o.a[i]);
  return r;
}

MatZ MatZ::scaled(long long k) const {
  MatZ r(n);
  for (size_t i = 0; i < a.size(); ++i) r.a[i] = checked_mul(a[i], k);
  return r;
}

bool MatZ::is_zero() const {
  for (long long v : a)
    if (v != 0) return false;
  return true;
}

namespace {

MatZ bracket(const MatZ& x, const MatZ& y) {
  MatZ xy = x * y;
  MatZ yx = y * x;
  MatZ r(x.n);
  for (size_t i = 0; i < xy.a.size(); ++i) r.a[i] = checked_sub(xy.a[i], yx.a[i]);
  return r;
}

long long dot_ll(const std::vector<long long>& a, const std::vector<long long>& b) {
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s = checked_add(s, checked_mul(a[i], b[i]));
  return s;
}

}  // namespace

// ----------------------------------------------------------- ChevBasis ----

ChevBasis::ChevBasis(const RootSystem* rs) : rs_(rs) {
  const int m = rs_->num_positive();
  const int nr = rs_->num_roots();
  N_.assign(nr, std::vector<long long>(nr, 0));
  coroot_.assign(nr, {});

  // Coroots: gamma = sum m_i alpha_i gives h_gamma with coefficient
  // m_i * (alpha_i, alpha_i) / (gamma, gamma) on h_{alpha_i}.
  for (int g = 0; g < nr; ++g) {
    std::vector<long long> mi = rs_->simple_coords(g);
    long long lg = rs_->length_sq(g);
    std::vector<long long> c(rs_->rank());
    for (int i = 0; i < rs_->rank(); ++i) {
      long long li = rs_->length_sq(rs_->simple_root(i));
      c[i] = checked_div_exact(checked_mul(mi[i], li), lg, "coroot coefficient");
    }
    coroot_[g] = std::move(c);
  }

  // Positive-positive constants, scanning positives in the fixed
  // (height, lex) index order.  The minimal decomposition of each
  // non-simple positive root gets N = +(p+1); all other decompositions of
  // the same root follow from the Jacobi identity against that pair.
  for (int g = 0; g < m; ++g) {
    if (rs_->is_simple(g)) continue;
    auto [a, b] = extraspecial(g);
    N_[a][b] = rs_->chain_down(a, b) + 1;
    N_[b][a] = -N_[a][b];
    long long ng_na = n_pos_neg(g, a);  // N(g, -a), nonzero
    for (int c = a + 1; c < m; ++c) {
      int d = rs_->sum_index(c, rs_->negate(g));
      if (d < 0) continue;
      d = rs_->negate(d);  // g - c as a positive root
      if (d <= c) continue;
      if (c == a) continue;
      // Jacobi on (e_{-a}, e_c, e_d), all three brackets landing on e_{g-a}:
      //   N(-a,c) N(c-a,d) + N(c,d) N(g,-a) + N(d,-a) N(d-a,c) = 0.
      long long rhs = 0;
      int ca = rs_->sum_index(c, rs_->negate(a));
      if (ca >= 0) rhs = checked_add(rhs, checked_mul(-n_pos_neg(c, a), N_[ca][d]));
      int da = rs_->sum_index(d, rs_->negate(a));
      if (da >= 0) rhs = checked_add(rhs, checked_mul(n_pos_neg(d, a), N_[da][c]));
      long long val = checked_div_exact(-rhs, ng_na, "special pair constant");
      N_[c][d] = val;
      N_[d][c] = -val;
    }
  }

  // Fill mixed and negative-negative constants.
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) {
      if (i == j || j == rs_->negate(i)) continue;
      if (rs_->sum_index(i, j) < 0) continue;
      bool pi = rs_->is_positive(i), pj = rs_->is_positive(j);
      if (pi && pj) continue;
      if (!pi && !pj)
        N_[i][j] = -N_[rs_->negate(i)][rs_->negate(j)];
      else if (pi && !pj)
        N_[i][j] = n_pos_neg(i, rs_->negate(j));
      else
        N_[i][j] = -n_pos_neg(j, rs_->negate(i));
    }

  // Construction-time sanity: antisymmetry, negation rule, and the chain
  // magnitude |N(a,b)| = p+1 for every pair summing to a root.
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) {
      if (i == j || j == rs_->negate(i)) continue;
      if (rs_->sum_index(i, j) < 0) {
        if (N_[i][j] != 0) throw std::logic_error("structure constant on a non-root sum");
        continue;
      }
      if (N_[i][j] != -N_[j][i]) throw std::logic_error("structure constants: antisymmetry");
      if (N_[i][j] != -N_[rs_->negate(i)][rs_->negate(j)])
        throw std::logic_error("structure constants: negation rule");
      long long mag = N_[i][j] < 0 ? -N_[i][j] : N_[i][j];
      if (mag != rs_->chain_down(i, j) + 1)
        throw std::logic_error("structure constants: chain magnitude");
    }
}

std::pair<int, int> ChevBasis::extraspecial(int g) const {
  if (!rs_->is_positive(g) || rs_->is_simple(g))
    throw std::invalid_argument("extraspecial: want a non-simple positive root");
  for (int a = 0; a < rs_->num_positive(); ++a) {
    int d = rs_->sum_index(g, rs_->negate(a));
    if (d >= 0 && rs_->is_positive(d)) return {a, d};
  }
  throw std::logic_error("extraspecial: no decomposition found");
}

// N(xi, -eta) for distinct positive roots whose difference is a root,
// reduced to positive-positive constants through the cyclic identity
// N(x,y)/(z,z) = N(y,z)/(x,x) for x+y+z = 0 plus the negation rule.
long long ChevBasis::n_pos_neg(int xi, int eta) const {
  int d = rs_->sum_index(xi, rs_->negate(eta));
  if (d < 0) return 0;
  if (rs_->is_positive(d)) {
    long long num = checked_mul(-N_[eta][d], rs_->length_sq(d));
    return checked_div_exact(num, rs_->length_sq(xi), "mixed constant");
  }
  int e = rs_->negate(d);  // eta - xi, positive
  long long num = checked_mul(-N_[xi][e], rs_->length_sq(e));
  return checked_div_exact(num, rs_->length_sq(eta), "mixed constant");
}

MatZ ChevBasis::ad_e(int g) const {
  const int l = rs_->rank(), nr = rs_->num_roots();
  MatZ m(l + nr);
  for (int b = 0; b < nr; ++b) {
    int s = rs_->sum_index(g, b);
    if (s >= 0) m.at(l + s, l + b) = N_[g][b];
  }
  int ng = rs_->negate(g);
  for (int i = 0; i < l; ++i) m.at(i, l + ng) = coroot_[g][i];
  for (int i = 0; i < l; ++i)
    m.at(l + g, i) = -rs_->pairing(g, rs_->simple_root(i));
  return m;
}

MatZ ChevBasis::ad_h(int i) const {
  const int l = rs_->rank(), nr = rs_->num_roots();
  MatZ m(l + nr);
  for (int b = 0; b < nr; ++b) m.at(l + b, l + b) = rs_->pairing(b, rs_->simple_root(i));
  return m;
}

void ChevBasis::verify_jacobi(bool full) const {
  const int nr = rs_->num_roots(), l = rs_->rank();
  std::vector<MatZ> ade(nr), adh(l);
  for (int r = 0; r < nr; ++r) ade[r] = ad_e(r);
  for (int i = 0; i < l; ++i) adh[i] = ad_h(i);
  // ad is a Lie homomorphism iff ad([x,y]) = [ad x, ad y] on all basis
  // pairs; with the h-columns included this is the full Jacobi identity.
  long long step = 1;
  if (!full) {
    long long total = static_cast<long long>(nr) * nr;
    step = std::max<long long>(1, total / 400);
  }
  long long count = 0;
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s) {
      if (r == s) continue;
      if ((count++) % step != 0) continue;
      MatZ lhs = bracket(ade[r], ade[s]);
      MatZ rhs(lhs.n);
      if (s == rs_->negate(r)) {
        for (int i = 0; i < l; ++i) rhs = rhs + adh[i].scaled(coroot_[r][i]);
      } else {
        int t = rs_->sum_index(r, s);
        if (t >= 0) rhs = ade[t].scaled(N_[r][s]);
      }
      if (!(lhs == rhs)) throw std::logic_error("adjoint Jacobi check failed");
    }
  for (int i = 0; i < l; ++i)
    for (int s = 0; s < nr; ++s) {
      MatZ lhs = bracket(adh[i], ade[s]);
      MatZ rhs = ade[s].scaled(rs_->pairing(s, rs_->simple_root(i)));
      if (!(lhs == rhs)) throw std::logic_error("adjoint torus action check failed");
    }
}

// ----------------------------------------------------------------- Rep ----

std::string rep_name(RepKind k) {
  switch (k) {
    case RepKind::Adjoint: return "ad";
    case RepKind::NaturalSL: return "sl";
    case RepKind::NaturalSp: return "sp";
  }
  return "?";
}

RepKind parse_rep(const std::string& s) {
  if (s == "ad" || s == "adjoint") return RepKind::Adjoint;
  if (s == "sl" || s == "natural-sl") return RepKind::NaturalSL;
  if (s == "sp" || s == "natural-sp") return RepKind::NaturalSp;
  throw std::invalid_argument("unknown representation '" + s + "' (want ad, sl or sp)");
}

Rep::Rep(const RootSystem* rs, const ChevBasis* cb, RepKind kind)
    : rs_(rs), cb_(cb), kind_(kind) {
  switch (kind) {
    case RepKind::Adjoint:
      if (rs_->num_roots() > 252)
        throw cap_exceeded_error("adjoint representation capped at 252 roots");
      build_adjoint();
      break;
    case RepKind::NaturalSL:
      if (rs_->family() != 'A')
        throw std::invalid_argument("sl representation requires a type A system");
      build_natural_sl();
      break;
    case RepKind::NaturalSp:
      if (rs_->family() != 'C')
        throw std::invalid_argument("sp representation requires a type C system");
      build_natural_sp();
      break;
  }
  align_and_verify();
  // Triangular basis order: weights sorted by decreasing pairing against
  // the sum of the positive roots.
  std::vector<long long> delta(rs_->ambient_dim(), 0);
  for (int p = 0; p < rs_->num_positive(); ++p) {
    const auto& v = rs_->root(p);
    for (int i = 0; i < rs_->ambient_dim(); ++i) delta[i] = checked_add(delta[i], v[i]);
  }
  wheight2_.resize(dim_);
  for (int b = 0; b < dim_; ++b) wheight2_[b] = dot_ll(weights_[b], delta);
  weight_order_.resize(dim_);
  for (int b = 0; b < dim_; ++b) weight_order_[b] = b;
  std::stable_sort(weight_order_.begin(), weight_order_.end(),
                   [&](int x, int y) { return wheight2_[x] > wheight2_[y]; });
}

void Rep::build_adjoint() {
  const int l = rs_->rank(), nr = rs_->num_roots();
  dim_ = l + nr;
  emat_.resize(nr);
  for (int r = 0; r < nr; ++r) emat_[r] = cb_->ad_e(r);
  weights_.assign(dim_, std::vector<long long>(rs_->ambient_dim(), 0));
  for (int r = 0; r < nr; ++r) weights_[l + r] = rs_->root(r);
}

void Rep::build_natural_sl() {
  const int l = rs_->rank(), nr = rs_->num_roots();
  dim_ = l + 1;
  emat_.assign(nr, MatZ(dim_));
  for (int r = 0; r < nr; ++r) {
    const auto& v = rs_->root(r);  // 2 e_i - 2 e_j
    int i = -1, j = -1;
    for (int c = 0; c < dim_; ++c) {
      if (v[c] == 2) i = c;
      if (v[c] == -2) j = c;
    }
    if (i < 0 || j < 0) throw std::logic_error("natural sl: unexpected root shape");
    emat_[r].at(i, j) = 1;
  }
  weights_.clear();
  for (int b = 0; b < dim_; ++b) {
    std::vector<long long> w(rs_->ambient_dim(), 0);
    w[b] = 2;
    weights_.push_back(std::move(w));
  }
}

void Rep::build_natural_sp() {
  const int l = rs_->rank(), nr = rs_->num_roots();
  dim_ = 2 * l;
  // Basis order: v_{e_1},...,v_{e_l}, v_{-e_l},...,v_{-e_1}.
  auto P = [&](int i) { return i - 1; };
  auto M = [&](int i) { return 2 * l - i; };
  emat_.assign(nr, MatZ(dim_));
  for (int r = 0; r < nr; ++r) {
    const auto& v = rs_->root(r);
    int ip = -1, im = -1, dbl = 0;
    for (int c = 0; c < l; ++c) {
      if (v[c] == 4) { ip = c + 1; dbl = 1; }
      if (v[c] == -4) { im = c + 1; dbl = -1; }
    }
    if (dbl == 1) {
      emat_[r].at(P(ip), M(ip)) = 1;
      continue;
    }
    if (dbl == -1) {
      emat_[r].at(M(im), P(im)) = 1;
      continue;
    }
    int pos1 = -1, pos2 = -1, neg1 = -1, neg2 = -1;
    for (int c = 0; c < l; ++c) {
      if (v[c] == 2) (pos1 < 0 ? pos1 : pos2) = c + 1;
      if (v[c] == -2) (neg1 < 0 ? neg1 : neg2) = c + 1;
    }
    if (pos1 >= 0 && neg1 >= 0 && pos2 < 0 && neg2 < 0) {
      // e_i - e_j
      emat_[r].at(P(pos1), P(neg1)) = 1;
      emat_[r].at(M(neg1), M(pos1)) = -1;
    } else if (pos2 >= 0) {
      // e_i + e_j, i < j
      emat_[r].at(P(pos1), M(pos2)) = 1;
      emat_[r].at(P(pos2), M(pos1)) = 1;
    } else if (neg2 >= 0) {
      // -e_i - e_j, i < j
      emat_[r].at(M(neg2), P(neg1)) = 1;
      emat_[r].at(M(neg1), P(neg2)) = 1;
    } else {
      throw std::logic_error("natural sp: unexpected root shape");
    }
  }
  weights_.clear();
  for (int b = 0; b < dim_; ++b) {
    std::vector<long long> w(rs_->ambient_dim(), 0);
    if (b < l)
      w[b] = 2;
    else
      w[2 * l - 1 - b] = -2;
    weights_.push_back(std::move(w));
  }
}

long long Rep::weight_pairing(int basisIdx, int rootIdx) const {
  const auto& g = rs_->root(rootIdx);
  long long num = checked_mul(2, dot_ll(weights_.at(basisIdx), g));
  return checked_div_exact(num, dot_ll(g, g), "weight pairing");
}

// Flip signs so the representation matrices satisfy exactly the abstract
// structure constants; the sign twist is propagated along the same
// minimal decompositions that defined the constants, then everything is
// verified pairwise.
void Rep::align_and_verify() {
  const int nr = rs_->num_roots(), m = rs_->num_positive(), l = rs_->rank();
  if (kind_ != RepKind::Adjoint) {
    std::vector<long long> eta(nr, 0);
    for (int g = 0; g < m; ++g) {
      if (rs_->is_simple(g)) {
        eta[g] = 1;
        continue;
      }
      auto [a, b] = cb_->extraspecial(g);
      MatZ br = bracket(emat_[a].scaled(eta[a]), emat_[b].scaled(eta[b]));
      long long k = 0;
      const MatZ& raw = emat_[g];
      for (size_t i = 0; i < raw.a.size() && k == 0; ++i)
        if (raw.a[i] != 0) k = checked_div_exact(br.a[i], raw.a[i], "sign twist");
      if (!(br == raw.scaled(k))) throw std::logic_error("sign twist: bracket not proportional");
      long long n = cb_->N(a, b);
      eta[g] = checked_div_exact(k, n, "sign twist");
      if (eta[g] != 1 && eta[g] != -1) throw std::logic_error("sign twist: not a unit");
    }
    for (int g = 0; g < m; ++g) eta[m + g] = eta[g];
    for (int r = 0; r < nr; ++r)
      if (eta[r] == -1) emat_[r] = emat_[r].scaled(-1);
  }

  // Torus matrices on this basis.
  std::vector<MatZ> hmat(l, MatZ(dim_));
  for (int i = 0; i < l; ++i)
    for (int b = 0; b < dim_; ++b) hmat[i].at(b, b) = weight_pairing(b, rs_->simple_root(i));

  long long step = 1;
  if (nr > 100) step = std::max<long long>(1, static_cast<long long>(nr) * nr / 2000);
  long long count = 0;
  for (int r = 0; r < nr; ++r)
    for (int s = 0; s < nr; ++s) {
      if (r == s) continue;
      if ((count++) % step != 0) continue;
      MatZ br = bracket(emat_[r], emat_[s]);
      MatZ want(dim_);
      if (s == rs_->negate(r)) {
        for (int i = 0; i < l; ++i) want = want + hmat[i].scaled(cb_->coroot(r)[i]);
      } else {
        int t = rs_->sum_index(r, s);
        if (t >= 0) want = emat_[t].scaled(cb_->N(r, s));
      }
      if (!(br == want)) throw std::logic_error("representation bracket check failed");
    }
  for (int i = 0; i < l; ++i)
    for (int s = 0; s < nr; ++s) {
      MatZ br = bracket(hmat[i], emat_[s]);
      if (!(br == emat_[s].scaled(rs_->pairing(s, rs_->simple_root(i)))))
        throw std::logic_error("representation torus check failed");
    }
}

const std::vector<MatZ>& Rep::divided_powers(int rootIdx) const {
  std::lock_guard<std::mutex> lk(dp_mutex_);
  auto it = dp_cache_.find(rootIdx);
  if (it != dp_cache_.end()) return it->second;
  std::vector<MatZ> dp;
  dp.push_back(MatZ::identity(dim_));
  const MatZ& e = emat_.at(rootIdx);
  for (int k = 1;; ++k) {
    if (k > 12) throw std::logic_error("divided powers: nilpotency bound exceeded");
    MatZ next = dp.back() * e;
    for (auto& v : next.a) v = checked_div_exact(v, k, "divided power");
    if (next.is_zero()) break;
    dp.push_back(std::move(next));
  }
  return dp_cache_.emplace(rootIdx, std::move(dp)).first->second;
}

// ------------------------------------------------- symbolic Z[t,u] work ----

namespace {

// Square matrix of two-variable integer polynomials.
struct MatP {
  int n = 0;
  std::vector<Poly> a;
  explicit MatP(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, Poly::constant(2, 0)) {}
  Poly& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
  const Poly& at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
  static MatP identity(int n) {
    MatP m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = Poly::constant(2, 1);
    return m;
  }
  MatP operator*(const MatP& o) const {
    MatP r(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const Poly& v = at(i, k);
        if (v.is_zero()) continue;
        for (int j = 0; j < n; ++j) {
          const Poly& w = o.at(k, j);
          if (w.is_zero()) continue;
          r.at(i, j) = r.at(i, j) + v * w;
        }
      }
    return r;
  }
  bool operator==(const MatP& o) const { return n == o.n && a == o.a; }
};

Poly poly_monom(long long c, uint32_t dt, uint32_t du) {
  Poly p = Poly::constant(2, 0);
  p.add_term({dt, du}, c);
  return p;
}

// x_gamma(arg) as a polynomial matrix, arg a monomial c t^i u^j.
MatP x_symbolic(const Rep& rep, int rootIdx, long long c, uint32_t dt, uint32_t du) {
  const auto& dp = rep.divided_powers(rootIdx);
  MatP m(rep.dim());
  for (size_t k = 0; k < dp.size(); ++k) {
    long long ck = 1;
    for (size_t q = 0; q < k; ++q) ck = checked_mul(ck, c);
    Poly mono = poly_monom(ck, dt * static_cast<uint32_t>(k), du * static_cast<uint32_t>(k));
    if (mono.is_zero() && k > 0) continue;
    for (int r = 0; r < m.n; ++r)
      for (int s = 0; s < m.n; ++s) {
        long long v = dp[k].at(r, s);
        if (v == 0) continue;
        m.at(r, s) = m.at(r, s) + mono.scaled(v);
      }
  }
  return m;
}

bool matp_is_zero(const MatP& m) {
  for (const auto& p : m.a)
    if (!p.is_zero()) return false;
  return true;
}

MatP matp_sub(const MatP& x, const MatP& y) {
  MatP r(x.n);
  for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] + (-y.a[i]);
  return r;
}

}  // namespace

std::vector<CommFactor> derive_commutator_pair(const Rep& rep, int a, int b) {
  const RootSystem& rs = rep.rs();
  if (a == b || b == rs.negate(a))
    throw std::invalid_argument("commutator pair must be linearly independent");

  std::vector<CommFactor> fac;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) {
      std::vector<long long> v(rs.ambient_dim());
      for (int c = 0; c < rs.ambient_dim(); ++c)
        v[c] = checked_add(checked_mul((long long)i, rs.root(a)[c]),
                           checked_mul((long long)j, rs.root(b)[c]));
      int idx = rs.index_of_coords(v);
      if (idx >= 0) fac.push_back({i, j, idx, 0});
    }
  std::sort(fac.begin(), fac.end(), [&](const CommFactor& x, const CommFactor& y) {
    int hx = rs.height(x.rootIdx), hy = rs.height(y.rootIdx);
    if (hx != hy) return hx < hy;
    return x.i < y.i;
  });

  // g = x_a(t) x_b(u) x_a(-t) x_b(-u) over Z[t,u].
  MatP g = x_symbolic(rep, a, 1, 1, 0) * x_symbolic(rep, b, 1, 0, 1);
  g = g * x_symbolic(rep, a, -1, 1, 0);
  g = g * x_symbolic(rep, b, -1, 0, 1);

  if (fac.empty()) {
    if (!(g == MatP::identity(rep.dim())))
      throw peel_failure_error("commuting pair produced a nontrivial commutator");
    return fac;
  }

  // Newton sweeps: compare g with the current product; the coefficient of
  // t^i u^j in the difference is, at the lowest unsettled degree, exactly
  // (missing coefficient) * pi(e_gamma); higher slots clean up in later
  // sweeps and the final difference must vanish identically.
  for (int sweep = 0; sweep < 8; ++sweep) {
    MatP prod = MatP::identity(rep.dim());
    for (const auto& f : fac)
      prod = prod * x_symbolic(rep, f.rootIdx, f.c, static_cast<uint32_t>(f.i),
                               static_cast<uint32_t>(f.j));
    MatP diff = matp_sub(g, prod);
    if (matp_is_zero(diff)) return fac;
    for (auto& f : fac) {
      const MatZ& d1 = rep.divided_powers(f.rootIdx)[1];
      int rr = -1, cc = -1;
      for (int r = 0; r < d1.n && rr < 0; ++r)
        for (int c = 0; c < d1.n; ++c)
          if (d1.at(r, c) != 0) {
            rr = r;
            cc = c;
            break;
          }
      long long num = diff.at(rr, cc).coeff_of(
          {static_cast<uint32_t>(f.i), static_cast<uint32_t>(f.j)});
      if (num == 0) continue;
      if (num % d1.at(rr, cc) != 0) continue;  // polluted slot; later sweep
      f.c = checked_add(f.c, num / d1.at(rr, cc));
    }
  }
  // Final hard check after the sweep budget.
  MatP prod = MatP::identity(rep.dim());
  for (const auto& f : fac)
    prod = prod * x_symbolic(rep, f.rootIdx, f.c, static_cast<uint32_t>(f.i),
                             static_cast<uint32_t>(f.j));
  if (!(prod == g)) throw peel_failure_error("commutator peel did not converge");
  return fac;
}

const std::vector<CommFactor>& CommTable::pair(int a, int b) const {
  std::lock_guard<std::mutex> lk(mutex_);
  auto it = table_.find({a, b});
  if (it != table_.end()) return it->second;
  auto fac = derive_commutator_pair(*rep_, a, b);
  return table_.emplace(std::make_pair(a, b), std::move(fac)).first->second;
}

void verify_r1_symbolic(const Rep& rep) {
  const int nr = rep.rs().num_roots();
  int step = nr > 60 ? 7 : 1;
  for (int r = 0; r < nr; r += step) {
    const auto& dp = rep.divided_powers(r);
    // x(t) x(u) == x(t+u): expand both over Z[t,u].
    MatP lhs = x_symbolic(rep, r, 1, 1, 0) * x_symbolic(rep, r, 1, 0, 1);
    MatP rhs(rep.dim());
    Poly tu = poly_monom(1, 1, 0) + poly_monom(1, 0, 1);
    Poly pow = Poly::constant(2, 1);
    for (size_t k = 0; k < dp.size(); ++k) {
      for (int i = 0; i < rep.dim(); ++i)
        for (int j = 0; j < rep.dim(); ++j) {
          long long v = dp[k].at(i, j);
          if (v == 0) continue;
          rhs.at(i, j) = rhs.at(i, j) + pow.scaled(v);
        }
      pow = pow * tu;
    }
    if (!(lhs == rhs)) throw std::logic_error("one-parameter additivity failed");
  }
}

void verify_r2_symbolic(const Rep& rep, const CommTable& tab) {
  const RootSystem& rs = rep.rs();
  const int nr = rs.num_roots();
  // Independent recomposition of each stored row; for large systems only
  // low-height pairs plus a fixed stride of the rest.
  long long count = 0;
  long long step = (rep.dim() > 10) ? 5 : 1;
  for (int a = 0; a < nr; ++a)
    for (int b = 0; b < nr; ++b) {
      if (a == b || b == rs.negate(a)) continue;
      bool low = rs.height(a) >= -2 && rs.height(a) <= 2 && rs.height(b) >= -2 && rs.height(b) <= 2;
      if (!low && (count++) % step != 0) continue;
      MatP g = x_symbolic(rep, a, 1, 1, 0) * x_symbolic(rep, b, 1, 0, 1);
      g = g * x_symbolic(rep, a, -1, 1, 0);
      g = g * x_symbolic(rep, b, -1, 0, 1);
      MatP prod = MatP::identity(rep.dim());
      for (const auto& f : tab.pair(a, b))
        prod = prod * x_symbolic(rep, f.rootIdx, f.c, static_cast<uint32_t>(f.i),
                                 static_cast<uint32_t>(f.j));
      if (!(g == prod)) throw std::logic_error("commutator recomposition failed");
    }
}

// ------------------------------------------------------------- chevtab ----

std::string chevtab_write(const RootSystem* rs, const ChevBasis& cb, const CommTable& tab) {
  std::ostringstream os;
  os << "chevtab v1 " << rs->family() << rs->rank() << " " << ChevBasis::convention() << "\n";
  const int nr = rs->num_roots();
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) {
      if (i == j || j == rs->negate(i)) continue;
      if (rs->sum_index(i, j) < 0) continue;
      os << "N " << rs->root_name(i) << " " << rs->root_name(j) << " " << cb.N(i, j) << "\n";
    }
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nr; ++j) {
      if (i == j || j == rs->negate(i)) continue;
      for (const auto& f : tab.pair(i, j))
        os << "C " << rs->root_name(i) << " " << rs->root_name(j) << " " << f.i << " " << f.j
           << " " << f.c << "\n";
    }
  return os.str();
}

std::vector<std::string> chevtab_verify(const std::string& text) {
  std::vector<std::string> bad;
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header)) return {"empty table"};
  std::istringstream hs(header);
  std::string magic, ver, sys, conv;
  hs >> magic >> ver >> sys >> conv;
  if (magic != "chevtab" || ver != "v1") return {"bad header: " + header};
  if (conv != ChevBasis::convention()) return {"unknown convention: " + conv};
  const RootSystem* rs = nullptr;
  try {
    rs = root_system(sys);
  } catch (const std::exception& e) {
    return {std::string("bad system: ") + e.what()};
  }
  const ChevBasis* cb = chev_basis(rs);
  const Rep* rep = representation(rs, RepKind::Adjoint);
  const CommTable* tab = comm_table(rep);
  std::string expect = chevtab_write(rs, *cb, *tab);

  // Line-set comparison in both directions.
  std::map<std::string, int> want;
  {
    std::istringstream es(expect);
    std::string line;
    std::getline(es, line);  // header
    while (std::getline(es, line))
      if (!line.empty()) want[line]++;
  }
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto it = want.find(line);
    if (it == want.end() || it->second == 0)
      bad.push_back("unexpected line: " + line);
    else
      it->second--;
  }
  for (const auto& [l, c] : want)
    if (c > 0) bad.push_back("missing line: " + l);
  return bad;
}

// ------------------------------------------------------------ interning ----

const ChevBasis* chev_basis(const RootSystem* rs) {
  static std::mutex mu;
  static std::map<const RootSystem*, std::unique_ptr<ChevBasis>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[rs];
  if (!slot) slot = std::make_unique<ChevBasis>(rs);
  return slot.get();
}

const Rep* representation(const RootSystem* rs, RepKind kind) {
  static std::mutex mu;
  static std::map<std::pair<const RootSystem*, RepKind>, std::unique_ptr<Rep>> cache;
  const ChevBasis* cb = chev_basis(rs);
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[{rs, kind}];
  if (!slot) slot = std::make_unique<Rep>(rs, cb, kind);
  return slot.get();
}

const CommTable* comm_table(const Rep* rep) {
  static std::mutex mu;
  static std::map<const Rep*, std::unique_ptr<CommTable>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[rep];
  if (!slot) slot = std::make_unique<CommTable>(*rep);
  return slot.get();
}

}  // namespace chevdioph

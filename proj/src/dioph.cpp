#include "chevdioph/dioph.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

#include "chevdioph/chevalley.hpp"
#include "chevdioph/rings.hpp"
#include "chevdioph/rootsys.hpp"

namespace chevdioph {

namespace {

bool is_short_root(const RootSystem& rs, int idx) {
  long long m = 0;
  for (int i = 0; i < rs.num_roots(); ++i) m = std::max(m, rs.length_sq(i));
  return rs.length_sq(idx) < m;
}

bool rank2_doubled(const RootSystem& rs) {
  return rs.rank() == 2 && (rs.family() == 'B' || rs.family() == 'C');
}

bool two_is_zero(const Ring& R) { return R.from_int(2) == R.zero(); }

// Whether the scalar center is trivial: the adjoint quotient is centerless
// by construction; the natural representations have Z = {lambda I} with
// lambda^m = 1 for m = rank+1 (special linear) or m = 2 (symplectic).
bool center_is_trivial(const GroupContext* ctx) {
  if (ctx->rep().kind() == RepKind::Adjoint) return true;
  const Ring& R = ctx->ring();
  if (!R.finite()) return false;  // conservative for infinite rings
  long long m = ctx->rep().kind() == RepKind::NaturalSL ? ctx->rs().rank() + 1 : 2;
  for (const RElem& u : R.units()) {
    if (R.is_one(R.pow_int(u, m)) && !R.is_one(u)) return false;
  }
  return true;
}

// Bourbaki number of a simple root, or a large sentinel.
int simple_number(const RootSystem& rs, int idx) {
  for (int i = 0; i < rs.rank(); ++i) {
    if (rs.simple_root(i) == idx) return i;
  }
  return 1 << 20;
}

// Coefficient of the single factor of [x_a(t), x_b(u)] when that
// commutator is exactly x_{a+b}(c t u); 0 otherwise.
long long single_pair_c(const CommTable& tab, const RootSystem& rs, int a, int b) {
  int s = rs.sum_index(a, b);
  if (s < 0) return 0;
  const std::vector<CommFactor>& fs = tab.pair(a, b);
  if (fs.size() != 1) return 0;
  const CommFactor& f = fs[0];
  if (f.i != 1 || f.j != 1 || f.rootIdx != s) return 0;
  return f.c;
}

// The two-factor chain [x_a(t), x_b(u)] = x_{a+b}(c11 t u) x_{a+2b}(c12 t u^2).
struct Chain2 {
  int g = -1, d = -1;
  long long c11 = 0, c12 = 0;
};
std::optional<Chain2> chain2(const CommTable& tab, const RootSystem& rs, int a, int b) {
  const std::vector<CommFactor>& fs = tab.pair(a, b);
  if (fs.size() != 2) return std::nullopt;
  Chain2 out;
  for (const CommFactor& f : fs) {
    if (f.i == 1 && f.j == 1) {
      out.g = f.rootIdx;
      out.c11 = f.c;
    } else if (f.i == 1 && f.j == 2) {
      out.d = f.rootIdx;
      out.c12 = f.c;
    } else {
      return std::nullopt;
    }
  }
  if (out.g < 0 || out.d < 0) return std::nullopt;
  if (out.g != rs.sum_index(a, b)) return std::nullopt;
  return out;
}

// Sign picked up by a unit root letter under conjugation by w_{wroot}(1).
// This is an integer fact about the representation, so it is probed once
// over the integers and reused for every ring.
int conj_sign(const GroupContext* ctx, int wroot, int from, int to) {
  const GroupContext* zc = GroupContext::get(&ctx->rs(), ctx->rep().kind(), ring_integers());
  const Ring& ZR = zc->ring();
  GroupElem wEl = zc->w(wroot, ZR.one());
  GroupElem img = zc->conjugate(zc->x(from, ZR.one()), wEl);
  if (img == zc->x(to, ZR.one())) return 1;
  if (img == zc->x(to, ZR.from_int(-1))) return -1;
  throw std::logic_error("conjugation by the Weyl letter missed the expected root subgroup");
}

// Matrix position at which the parameter of x_g(t) can be read off
// exactly: a strictly off-diagonal unit entry of the degree-one layer.
// Higher divided-power layers shift basis weights by multiples of g, so
// they can never contribute at a position whose weight shift is g itself.
struct ReadPos {
  int r = -1, c = -1;
  long long sgn = 1;
};
ReadPos clean_read_pos(const GroupContext* ctx, int rootIdx) {
  const MatZ& d1 = ctx->rep().divided_powers(rootIdx).at(1);
  for (int r = 0; r < d1.n; ++r) {
    for (int c = 0; c < d1.n; ++c) {
      if (r == c) continue;
      long long v = d1.at(r, c);
      if (v == 1 || v == -1) return {r, c, v};
    }
  }
  throw std::logic_error("no unit entry reads the parameter of this root letter");
}

GWord cat(GWord a, const GWord& b) {
  a *= b;
  return a;
}

GWord xa(int root, const RElem& t) { return GWord::atom('x', root, t); }

GWord xa1(const GroupContext* ctx, int root) { return xa(root, ctx->ring().one()); }

// w_root(1) spelled out in unit unipotent letters.
GWord w_letters(const GroupContext* ctx, int root) {
  const Ring& R = ctx->ring();
  GWord w = xa(root, R.one());
  w *= xa(ctx->rs().negate(root), R.from_int(-1));
  w *= xa(root, R.one());
  return w;
}

GWord conj_by(const GWord& inner, const GWord& by) {
  return cat(cat(by, inner), by.inversed());
}

void add_conjuncts(const GroupContext* ctx, PPFormula& f, const std::string& var,
                   const std::vector<int>& gammaRoots) {
  for (int m : gammaRoots) {
    f.equations.push_back(GWord::commutator(GWord::var(var), xa1(ctx, m)));
  }
}

void stamp(const GroupContext* ctx, PPFormula& f) {
  const RootSystem& rs = ctx->rs();
  f.system = std::string(1, rs.family()) + std::to_string(rs.rank());
  f.rep = rep_name(ctx->rep().kind());
  f.ringSpec = ctx->ring().spec_string();
}

// --- configuration searches -------------------------------------------------

// A pair (p, q) with p + q = target, commutator exactly x_target(+-t u),
// and a base p whose double centralizer has the plain form.  Prefers a
// simple-root base with the smallest Bourbaki number, then low indices.
struct PairCfg {
  int p = -1, q = -1;
  long long c = 0;
};
// When 2 = 0 in the ring every double centralizer takes the plain form
// (the commutation sets absorb the coefficient-2 partners), so passing
// allowExceptionalBase widens the base search accordingly.
std::optional<PairCfg> find_plain_pair(const GroupContext* ctx, int target,
                                       bool allowExceptionalBase = false) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  std::optional<PairCfg> best;
  long long bestKey[3] = {0, 0, 0};
  for (int a = 0; a < rs.num_roots(); ++a) {
    if (!allowExceptionalBase && dcent_exceptional(rs, a)) continue;
    for (int b = 0; b < rs.num_roots(); ++b) {
      if (rs.sum_index(a, b) != target) continue;
      long long c = single_pair_c(tab, rs, a, b);
      if (c != 1 && c != -1) continue;
      long long key[3] = {simple_number(rs, a), a, b};
      if (!best || std::lexicographical_compare(key, key + 3, bestKey, bestKey + 3)) {
        best = PairCfg{a, b, c};
        std::copy(key, key + 3, bestKey);
      }
    }
  }
  return best;
}

// The twisted-pair configuration around a doubled-length short root g:
// a long root l1 with beta = g - l1 a root and
// [x_{l1}(t), x_beta(u)] = x_g(c11 t u) x_{l2}(c12 t u^2), l2 = l1 + 2 beta.
struct TwistCfg {
  int l1 = -1, beta = -1, l2 = -1;
  long long c11 = 0, c12 = 0;
  int sigma = 1;  // exponent making the reflected copy cancel the l2 tail
};
TwistCfg find_twist(const GroupContext* ctx, int g) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  for (int l1 = 0; l1 < rs.num_roots(); ++l1) {
    if (rs.length_sq(l1) == rs.length_sq(g)) continue;
    int beta = rs.sum_index(g, rs.negate(l1));
    if (beta < 0) continue;
    auto ch = chain2(tab, rs, l1, beta);
    if (!ch || ch->g != g) continue;
    if (rs.reflect(l1, beta) != ch->d) continue;
    if (ch->c11 != 1 && ch->c11 != -1) continue;
    if (ch->c12 != 1 && ch->c12 != -1) continue;
    int cw = conj_sign(ctx, beta, l1, ch->d);
    TwistCfg out;
    out.l1 = l1;
    out.beta = beta;
    out.l2 = ch->d;
    out.c11 = ch->c11;
    out.c12 = ch->c12;
    out.sigma = -static_cast<int>(ch->c12) * cw;
    return out;
  }
  throw std::logic_error("no twisted pair lands on this short root");
}

// A short root g and partner bp with [x_g(t), x_bp(u)] = x_lam(+-2 t u),
// used to halve onto the long root lam.
struct HalfCfg {
  int g = -1, bp = -1;
  long long c = 0;
  TwistCfg inner;
};
HalfCfg find_half(const GroupContext* ctx, int lam) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  for (int g = 0; g < rs.num_roots(); ++g) {
    if (!dcent_exceptional(rs, g)) continue;
    int bp = rs.sum_index(lam, rs.negate(g));
    if (bp < 0) continue;
    long long c = single_pair_c(tab, rs, g, bp);
    if (c != 2 && c != -2) continue;
    HalfCfg out;
    out.g = g;
    out.bp = bp;
    out.c = c;
    out.inner = find_twist(ctx, g);
    return out;
  }
  throw std::logic_error("no halved pair lands on this long root");
}

// The canonical diagonal-carrier configuration of the rank-2
// doubled-length family: the positive short root whose two long
// companions are both positive, with L1 the taller companion and
// q = g - L1.
struct DiagCfg {
  int g = -1, L1 = -1, L2 = -1, q = -1;
  long long c11 = 0, c12 = 0;
};
DiagCfg canonical_diag_cfg(const GroupContext* ctx) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  if (!rank2_doubled(rs)) {
    throw target_unavailable_error(
        "the diagonal carrier only exists in the rank-2 doubled-length family");
  }
  for (int g = 0; g < rs.num_positive(); ++g) {
    if (!dcent_exceptional(rs, g)) continue;
    std::vector<int> comps = dcent_companions(rs, g);
    if (comps.size() != 2) continue;
    if (!rs.is_positive(comps[0]) || !rs.is_positive(comps[1])) continue;
    DiagCfg out;
    out.g = g;
    out.L1 = comps[0];
    out.L2 = comps[1];
    out.q = rs.sum_index(g, rs.negate(out.L1));
    if (out.q < 0) continue;
    auto ch = chain2(tab, rs, out.L1, out.q);
    if (!ch || ch->g != g || ch->d != out.L2) continue;
    out.c11 = ch->c11;
    out.c12 = ch->c12;
    return out;
  }
  throw std::logic_error("no positive short root with two positive companions");
}

// The double-commutator chain that carves out a short root subgroup in
// the long symplectic family: y ranges over the centralizer of the
// commutation set of p, and [[y, x_q(1)], x_r(1)] sweeps X_target as the
// second-companion coordinate of y varies.
struct ChainCfg {
  int p = -1, q = -1, r = -1;
  int l1 = -1, l2 = -1;  // companions of p: l2 reacts with q, l1 does not
  int j1 = -1, j2 = -1;  // the two factor roots of [x_{l2}, x_q]
};
ChainCfg find_chain(const GroupContext* ctx, int target) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  for (int p = 0; p < rs.num_roots(); ++p) {
    if (!dcent_exceptional(rs, p)) continue;
    int q = rs.sum_index(target, rs.negate(p));
    if (q < 0) continue;
    if (rs.length_sq(q) != rs.length_sq(p)) continue;
    long long cpq = single_pair_c(tab, rs, p, q);
    if (cpq != 1 && cpq != -1) continue;
    std::vector<int> comps = dcent_companions(rs, p);
    if (comps.size() != 2) continue;
    int l2 = -1, l1 = -1;
    for (int m : comps) {
      if (!tab.pair(m, q).empty()) {
        l2 = m;
      } else {
        l1 = m;
      }
    }
    if (l1 < 0 || l2 < 0) continue;
    auto ch = chain2(tab, rs, l2, q);
    if (!ch) continue;
    int j1 = ch->g, j2 = ch->d;
    // The first commutator [y, x_q(1)] must be a commuting product of
    // target-, j1- and j2-letters.
    if (!tab.pair(target, j1).empty() || !tab.pair(target, j2).empty() ||
        !tab.pair(j1, j2).empty()) {
      continue;
    }
    for (int r = 0; r < rs.num_roots(); ++r) {
      if (rs.sum_index(j1, r) != target) continue;
      long long cjr = single_pair_c(tab, rs, j1, r);
      if (cjr != 1 && cjr != -1) continue;
      // The second commutator must kill everything except the j1 letter.
      if (!tab.pair(target, r).empty()) continue;
      if (!tab.pair(j2, r).empty()) continue;
      ChainCfg out;
      out.p = p;
      out.q = q;
      out.r = r;
      out.l1 = l1;
      out.l2 = l2;
      out.j1 = j1;
      out.j2 = j2;
      return out;
    }
  }
  throw std::logic_error("no double-commutator chain lands on this short root");
}

// --- formula builders -------------------------------------------------------

PPFormula build_direct(const GroupContext* ctx, int g) {
  PPFormula f;
  stamp(ctx, f);
  f.note = "direct-commutation";
  f.freeVars = {"x"};
  add_conjuncts(ctx, f, "x", gamma_set(ctx, g).members);
  return f;
}

PPFormula build_pair_image(const GroupContext* ctx, int g,
                           bool allowExceptionalBase = false) {
  auto cfg = find_plain_pair(ctx, g, allowExceptionalBase);
  if (!cfg) throw std::logic_error("no unit commutator pair lands on this root");
  PPFormula f;
  stamp(ctx, f);
  f.note = "commutator-image";
  f.freeVars = {"x"};
  f.existVars = {"y"};
  add_conjuncts(ctx, f, "y", gamma_set(ctx, cfg->p).members);
  f.equations.push_back(
      cat(GWord::var("x", true), GWord::commutator(GWord::var("y"), xa1(ctx, cfg->q))));
  return f;
}

// Short roots of the odd orthogonal family: the product of a long image
// and a long correction, intersected with the commutation conjuncts of
// the target, pins down exactly the short root subgroup.
PPFormula build_short_product(const GroupContext* ctx, int g) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  for (int a = 0; a < rs.num_roots(); ++a) {
    if (rs.length_sq(a) <= rs.length_sq(g)) continue;  // long letter
    int b = rs.sum_index(g, rs.negate(a));
    if (b < 0) continue;
    auto ch = chain2(tab, rs, a, b);
    if (!ch || ch->g != g) continue;
    int dd = ch->d;
    auto sA = find_plain_pair(ctx, a);
    auto sD = find_plain_pair(ctx, dd);
    if (!sA || !sD) continue;
    PPFormula f;
    stamp(ctx, f);
    f.note = "short-product-intersection";
    f.freeVars = {"x"};
    f.existVars = {"y", "y2"};
    add_conjuncts(ctx, f, "x", gamma_set(ctx, g).members);
    add_conjuncts(ctx, f, "y", gamma_set(ctx, sA->p).members);
    add_conjuncts(ctx, f, "y2", gamma_set(ctx, sD->p).members);
    GWord img = GWord::commutator(GWord::commutator(GWord::var("y"), xa1(ctx, sA->q)),
                                  xa1(ctx, b));
    img *= GWord::commutator(GWord::var("y2"), xa1(ctx, sD->q));
    f.equations.push_back(cat(GWord::var("x", true), img));
    return f;
  }
  throw std::logic_error("no long chain lands on this short root");
}

PPFormula build_chain(const GroupContext* ctx, int g) {
  ChainCfg cfg = find_chain(ctx, g);
  PPFormula f;
  stamp(ctx, f);
  f.note = "double-commutator-chain";
  f.freeVars = {"x"};
  f.existVars = {"y"};
  add_conjuncts(ctx, f, "y", gamma_set(ctx, cfg.p).members);
  GWord img = GWord::commutator(
      GWord::commutator(GWord::var("y"), xa1(ctx, cfg.q)), xa1(ctx, cfg.r));
  f.equations.push_back(cat(GWord::var("x", true), img));
  return f;
}

// Long roots of the long symplectic family: a long image plus a
// chain-built short correction, intersected with the target conjuncts.
PPFormula build_long_product(const GroupContext* ctx, int lam) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  for (int b = 0; b < rs.num_roots(); ++b) {
    if (!is_short_root(rs, b)) continue;
    std::vector<long long> av = rs.root(lam);
    const std::vector<long long>& bv = rs.root(b);
    for (size_t i = 0; i < av.size(); ++i) av[i] -= 2 * bv[i];
    int a = rs.index_of_coords(av);
    if (a < 0 || is_short_root(rs, a)) continue;
    auto ch = chain2(tab, rs, a, b);
    if (!ch || ch->d != lam) continue;
    int g2 = ch->g;
    ChainCfg inner = find_chain(ctx, g2);
    PPFormula f;
    stamp(ctx, f);
    f.note = "long-product-intersection";
    f.freeVars = {"x"};
    f.existVars = {"y", "y2"};
    add_conjuncts(ctx, f, "x", gamma_set(ctx, lam).members);
    add_conjuncts(ctx, f, "y", gamma_set(ctx, a).members);
    add_conjuncts(ctx, f, "y2", gamma_set(ctx, inner.p).members);
    GWord img = GWord::commutator(GWord::var("y"), xa1(ctx, b));
    img *= GWord::commutator(
        GWord::commutator(GWord::var("y2"), xa1(ctx, inner.q)), xa1(ctx, inner.r));
    f.equations.push_back(cat(GWord::var("x", true), img));
    return f;
  }
  throw std::logic_error("no chain configuration lands on this long root");
}

// The twisted product [y, x_beta(1)] * w y^sigma w^-1 with w = w_beta(1):
// the reflected copy cancels the tail letter of the two-factor chain.
GWord twisted_word(const GroupContext* ctx, const GWord& y, const TwistCfg& t) {
  GWord w = GWord::commutator(y, xa1(ctx, t.beta));
  GWord yexp = (t.sigma == 1) ? y : y.inversed();
  w *= conj_by(yexp, w_letters(ctx, t.beta));
  return w;
}

PPFormula build_twisted_pair(const GroupContext* ctx, int g) {
  TwistCfg t = find_twist(ctx, g);
  PPFormula f;
  stamp(ctx, f);
  f.note = "twisted-pair";
  f.freeVars = {"x"};
  f.existVars = {"y"};
  add_conjuncts(ctx, f, "y", gamma_set(ctx, t.l1).members);
  f.equations.push_back(cat(GWord::var("x", true), twisted_word(ctx, GWord::var("y"), t)));
  return f;
}

PPFormula build_halved_pair(const GroupContext* ctx, int lam) {
  const Ring& R = ctx->ring();
  HalfCfg h = find_half(ctx, lam);
  RElem half = R.inv(R.from_int(2));
  PPFormula f;
  stamp(ctx, f);
  f.note = "halved-pair";
  f.freeVars = {"x"};
  f.existVars = {"y"};
  add_conjuncts(ctx, f, "y", gamma_set(ctx, h.inner.l1).members);
  GWord w0 = twisted_word(ctx, GWord::var("y"), h.inner);
  GWord img = GWord::commutator(w0, xa(h.bp, half));
  f.equations.push_back(cat(GWord::var("x", true), img));
  return f;
}

PPFormula build_halved_twisted_pair(const GroupContext* ctx, int g) {
  const Ring& R = ctx->ring();
  TwistCfg outer = find_twist(ctx, g);
  HalfCfg mid = find_half(ctx, outer.l1);
  RElem half = R.inv(R.from_int(2));
  PPFormula f;
  stamp(ctx, f);
  f.note = "halved-twisted-pair";
  f.freeVars = {"x"};
  f.existVars = {"y"};
  add_conjuncts(ctx, f, "y", gamma_set(ctx, mid.inner.l1).members);
  // A center-free sweep of X_{outer.l1} ...
  GWord w1 = GWord::commutator(twisted_word(ctx, GWord::var("y"), mid.inner),
                               xa(mid.bp, half));
  // ... pushed through the twisted pair of the target.
  f.equations.push_back(cat(GWord::var("x", true), twisted_word(ctx, w1, outer)));
  return f;
}

PPFormula build_diagonal(const GroupContext* ctx) {
  const Ring& R = ctx->ring();
  DiagCfg dc = canonical_diag_cfg(ctx);
  PPFormula f;
  stamp(ctx, f);
  f.note = "diagonal-pair";
  f.freeVars = {"x"};
  f.existVars = {"y"};
  add_conjuncts(ctx, f, "y", gamma_set(ctx, dc.L1).members);
  RElem u0 = R.from_int(dc.c11 * dc.c12);
  f.equations.push_back(
      cat(GWord::var("x", true), GWord::commutator(GWord::var("y"), xa(dc.q, u0))));
  return f;
}

// --- shape-driven evaluation ------------------------------------------------

// Precompiled word: constants evaluated once, variables as slots.
struct CompiledSym {
  bool isVar = false;
  size_t slot = 0;
  bool inv = false;
  GroupElem c;
};
struct CompiledWord {
  std::vector<CompiledSym> syms;
};
CompiledWord compile_word(const GroupContext* ctx, const GWord& w,
                          const std::vector<std::string>& varOrder) {
  CompiledWord out;
  for (const GWordSym& s : w.syms) {
    CompiledSym cs;
    if (s.isVar) {
      cs.isVar = true;
      cs.inv = s.vinv;
      auto it = std::find(varOrder.begin(), varOrder.end(), s.var);
      if (it == varOrder.end()) throw std::logic_error("unbound variable in word");
      cs.slot = static_cast<size_t>(it - varOrder.begin());
    } else {
      cs.c = ctx->eval_word({s.atom});
    }
    out.syms.push_back(std::move(cs));
  }
  return out;
}
GroupElem eval_compiled(const GroupContext* ctx, const CompiledWord& w,
                        const std::vector<GroupElem>& vals,
                        const std::vector<GroupElem>& invs) {
  GroupElem acc = ctx->identity();
  for (const CompiledSym& s : w.syms) {
    acc = ctx->mul(acc, s.isVar ? (s.inv ? invs[s.slot] : vals[s.slot]) : s.c);
  }
  return acc;
}

// Recognize [v, const] = v c v^-1 c^-1.
bool match_conjunct(const GWord& w, std::string& var, WordAtom& atom) {
  if (w.syms.size() != 4) return false;
  const auto& s0 = w.syms[0];
  const auto& s1 = w.syms[1];
  const auto& s2 = w.syms[2];
  const auto& s3 = w.syms[3];
  if (!s0.isVar || s0.vinv || !s2.isVar || s2.var != s0.var || !s2.vinv) return false;
  if (s1.isVar || s3.isVar) return false;
  if (s1.atom.kind != s3.atom.kind || s1.atom.root != s3.atom.root) return false;
  if (!(s1.atom.param == s3.atom.param)) return false;
  if (s1.atom.inv || !s3.atom.inv) return false;
  var = s0.var;
  atom = s1.atom;
  return true;
}

std::vector<long long> eval_pp_by_shape(const GroupContext* ctx, const PPFormula& f,
                                        size_t cap) {
  if (f.freeVars.size() != 1) throw std::invalid_argument("expected one free variable");
  const std::string& freeVar = f.freeVars[0];
  const GroupTable* tab = group_table(ctx, cap);

  std::map<std::string, std::vector<GroupElem>> conjGens;
  const GWord* defining = nullptr;
  for (const GWord& eq : f.equations) {
    std::string v;
    WordAtom a;
    if (match_conjunct(eq, v, a)) {
      conjGens[v].push_back(ctx->eval_word({a}));
      continue;
    }
    if (!eq.syms.empty() && eq.syms[0].isVar && eq.syms[0].var == freeVar &&
        eq.syms[0].vinv) {
      if (defining) throw std::logic_error("two defining equations in one formula");
      defining = &eq;
      continue;
    }
    throw std::logic_error("unexpected equation shape in emitted formula");
  }

  if (!defining) {
    auto it = conjGens.find(freeVar);
    if (it == conjGens.end()) throw std::logic_error("formula constrains nothing");
    std::vector<size_t> idxs = tab->centralizer(it->second);
    return std::vector<long long>(idxs.begin(), idxs.end());
  }

  GWord image;
  image.syms.assign(defining->syms.begin() + 1, defining->syms.end());
  for (const std::string& v : image.vars_used()) {
    if (v == freeVar) throw std::logic_error("free variable inside the image word");
  }

  std::vector<std::vector<GroupElem>> ranges;
  for (const std::string& v : f.existVars) {
    auto it = conjGens.find(v);
    if (it == conjGens.end()) {
      throw std::logic_error("existential variable without commutation conjuncts");
    }
    std::vector<size_t> idxs = tab->centralizer(it->second);
    std::vector<GroupElem> elems;
    elems.reserve(idxs.size());
    for (size_t i : idxs) elems.push_back(tab->element(i));
    ranges.push_back(std::move(elems));
  }

  std::vector<GroupElem> xGens;
  if (auto it = conjGens.find(freeVar); it != conjGens.end()) xGens = it->second;

  CompiledWord cw = compile_word(ctx, image, f.existVars);
  std::set<long long> sol;
  std::vector<size_t> odo(ranges.size(), 0);
  std::vector<GroupElem> vals(ranges.size()), invs(ranges.size());
  while (true) {
    for (size_t i = 0; i < ranges.size(); ++i) {
      vals[i] = ranges[i][odo[i]];
      invs[i] = ctx->inverse(vals[i]);
    }
    GroupElem e = eval_compiled(ctx, cw, vals, invs);
    bool ok = true;
    for (const GroupElem& gEl : xGens) {
      if (!ctx->commutes(e, gEl)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      long long idx = tab->index_of(e);
      if (idx < 0) throw std::logic_error("image element escaped the group table");
      sol.insert(idx);
    }
    size_t k = 0;
    while (k < odo.size() && ++odo[k] == ranges[k].size()) odo[k++] = 0;
    if (k == odo.size()) break;
    if (ranges.empty()) break;
  }
  return std::vector<long long>(sol.begin(), sol.end());
}

}  // namespace

// --- commutation sets --------------------------------------------------------

bool GammaSet::contains(int rootIdx) const {
  return std::binary_search(members.begin(), members.end(), rootIdx);
}

GammaSet gamma_set(const GroupContext* ctx, int alphaIdx) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  GammaSet out;
  out.alpha = alphaIdx;
  GroupElem a1 = ctx->x(alphaIdx, R.one());
  for (int b = 0; b < rs.num_roots(); ++b) {
    if (ctx->commutes(a1, ctx->x(b, R.one()))) out.members.push_back(b);
  }
  return out;
}

bool dcent_exceptional(const RootSystem& rs, int alphaIdx) {
  if (!is_short_root(rs, alphaIdx)) return false;
  char fam = rs.family();
  return fam == 'C' || (fam == 'B' && rs.rank() == 2);
}

std::vector<int> dcent_companions(const RootSystem& rs, int alphaIdx) {
  std::vector<int> out;
  for (int l = 0; l < rs.num_roots(); ++l) {
    if (rs.length_sq(l) == rs.length_sq(alphaIdx)) continue;
    if (rs.sum_index(l, rs.negate(alphaIdx)) < 0) continue;
    out.push_back(l);
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    if (rs.height(a) != rs.height(b)) return rs.height(a) > rs.height(b);
    return a < b;
  });
  return out;
}

// --- double centralizer audit -------------------------------------------------

CentralizerReport double_centralizer_report(const GroupContext* ctx, int alphaIdx,
                                            size_t cap) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  if (!R.finite()) throw std::invalid_argument("centralizer audit needs a finite ring");
  CentralizerReport rep;
  rep.alpha = alphaIdx;
  rep.gamma = gamma_set(ctx, alphaIdx);
  const GroupTable* tab = group_table(ctx, cap);

  std::vector<GroupElem> gens;
  for (int m : rep.gamma.members) gens.push_back(ctx->x(m, R.one()));
  std::vector<size_t> cz = tab->centralizer(gens);
  rep.computed.assign(cz.begin(), cz.end());

  std::vector<int> parts{alphaIdx};
  // The companion factors only survive when 2 is nonzero in the ring: when
  // 2 = 0 the commutation set of alpha absorbs the roots whose commutator
  // coefficient is 2, and centralizing those forces both companion
  // parameters to vanish.  (Established empirically by this very report,
  // then checked exhaustively in the tests.)
  if (dcent_exceptional(rs, alphaIdx) && !(R.from_int(2) == R.zero())) {
    std::vector<int> comps = dcent_companions(rs, alphaIdx);
    parts.insert(parts.end(), comps.begin(), comps.end());
  }
  std::string form = "Z(G)";
  for (int p : parts) form += " * X[" + rs.root_name(p) + "]";
  rep.predicted_form = form;

  std::vector<size_t> zc = tab->center();
  rep.center_size = zc.size();

  std::set<long long> pred;
  size_t n = R.size();
  std::vector<size_t> odo(parts.size(), 0);
  while (true) {
    GroupElem u = ctx->identity();
    for (size_t i = 0; i < parts.size(); ++i) {
      u = ctx->mul(u, ctx->x(parts[i], R.from_index(odo[i])));
    }
    for (size_t zi : zc) {
      GroupElem e = ctx->mul(tab->element(zi), u);
      long long idx = tab->index_of(e);
      if (idx < 0) throw std::logic_error("predicted element escaped the group table");
      pred.insert(idx);
    }
    size_t k = 0;
    while (k < odo.size() && ++odo[k] == n) odo[k++] = 0;
    if (k == odo.size()) break;
  }
  rep.predicted.assign(pred.begin(), pred.end());
  rep.equal = rep.computed == rep.predicted;
  if (!rep.equal) {
    std::set<long long> comp(rep.computed.begin(), rep.computed.end());
    size_t shown = 0;
    for (long long i : comp) {
      if (!pred.count(i) && shown < 4) {
        rep.witnesses.push_back("computed only: " + ctx->to_string(tab->element(i)));
        ++shown;
      }
    }
    shown = 0;
    for (long long i : pred) {
      if (!comp.count(i) && shown < 4) {
        rep.witnesses.push_back("predicted only: " + ctx->to_string(tab->element(i)));
        ++shown;
      }
    }
  }
  return rep;
}

// --- word machinery ------------------------------------------------------------

GWord& GWord::operator*=(const GWord& o) {
  syms.insert(syms.end(), o.syms.begin(), o.syms.end());
  return *this;
}

GWord GWord::inversed() const {
  GWord out;
  out.syms.reserve(syms.size());
  for (auto it = syms.rbegin(); it != syms.rend(); ++it) {
    GWordSym s = *it;
    if (s.isVar) {
      s.vinv = !s.vinv;
    } else {
      s.atom.inv = !s.atom.inv;
    }
    out.syms.push_back(std::move(s));
  }
  return out;
}

GWord GWord::var(const std::string& name, bool inv) {
  GWord w;
  GWordSym s;
  s.isVar = true;
  s.var = name;
  s.vinv = inv;
  w.syms.push_back(std::move(s));
  return w;
}

GWord GWord::atom(char kind, int root, const RElem& t, bool inv) {
  GWord w;
  GWordSym s;
  s.atom.kind = kind;
  s.atom.root = root;
  s.atom.param = t;
  s.atom.inv = inv;
  w.syms.push_back(std::move(s));
  return w;
}

GWord GWord::commutator(const GWord& a, const GWord& b) {
  GWord w = a;
  w *= b;
  w *= a.inversed();
  w *= b.inversed();
  return w;
}

std::vector<std::string> GWord::vars_used() const {
  std::vector<std::string> out;
  for (const GWordSym& s : syms) {
    if (s.isVar && std::find(out.begin(), out.end(), s.var) == out.end()) {
      out.push_back(s.var);
    }
  }
  return out;
}

GroupElem eval_gword(const GroupContext* ctx, const GWord& w,
                     const std::map<std::string, GroupElem>& assignment) {
  GroupElem acc = ctx->identity();
  for (const GWordSym& s : w.syms) {
    if (s.isVar) {
      auto it = assignment.find(s.var);
      if (it == assignment.end()) throw std::invalid_argument("unassigned variable " + s.var);
      acc = ctx->mul(acc, s.vinv ? ctx->inverse(it->second) : it->second);
    } else {
      acc = ctx->mul(acc, ctx->eval_word({s.atom}));
    }
  }
  return acc;
}

std::string print_gword(const GroupContext* ctx, const GWord& w) {
  if (w.syms.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < w.syms.size(); ++i) {
    if (i) out += " * ";
    const GWordSym& s = w.syms[i];
    if (s.isVar) {
      out += s.var;
      if (s.vinv) out += "^-1";
    } else {
      out += ctx->print_word({s.atom});
    }
  }
  return out;
}

void pp_collect_constants(const GroupContext* ctx, PPFormula& f) {
  const Ring& R = ctx->ring();
  f.constants.clear();
  std::set<std::string> seen;
  for (const GWord& eq : f.equations) {
    for (const GWordSym& s : eq.syms) {
      if (s.isVar) continue;
      WordAtom a = s.atom;
      a.inv = false;
      std::string key = std::string(1, a.kind) + "|" + std::to_string(a.root) + "|" +
                        R.to_string(a.param);
      if (seen.insert(key).second) f.constants.push_back(a);
    }
  }
}

PPFormula pp_rename(const PPFormula& f, const std::map<std::string, std::string>& m) {
  PPFormula out = f;
  auto ren = [&](std::string& v) {
    auto it = m.find(v);
    if (it != m.end()) v = it->second;
  };
  for (std::string& v : out.freeVars) ren(v);
  for (std::string& v : out.existVars) ren(v);
  for (GWord& eq : out.equations) {
    for (GWordSym& s : eq.syms) {
      if (s.isVar) ren(s.var);
    }
  }
  return out;
}

std::string print_pp_formula(const GroupContext* ctx, const PPFormula& f) {
  std::ostringstream os;
  os << "# definition: " << f.note << "\n";
  os << "group " << f.system << " " << f.rep << " " << f.ringSpec << ";\n";
  os << "# free:";
  for (const std::string& v : f.freeVars) os << " " << v;
  os << "; exists:";
  for (const std::string& v : f.existVars) os << " " << v;
  os << "\n";
  os << "var";
  bool first = true;
  for (const std::string& v : f.freeVars) {
    os << (first ? " " : ", ") << v;
    first = false;
  }
  for (const std::string& v : f.existVars) {
    os << (first ? " " : ", ") << v;
    first = false;
  }
  os << ";\n";
  for (const GWord& eq : f.equations) {
    os << "eq " << print_gword(ctx, eq) << " = 1;\n";
  }
  return os.str();
}

// --- equation definitions ------------------------------------------------------

PPFormula e_define_subgroup(const GroupContext* ctx, const EDefineTarget& target) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  PPFormula f;
  if (target.isY) {
    if (!rank2_doubled(rs)) {
      throw target_unavailable_error(
          "the diagonal carrier only exists in the rank-2 doubled-length family");
    }
    f = build_diagonal(ctx);
  } else {
    int g = target.root;
    if (g < 0 || g >= rs.num_roots()) throw std::invalid_argument("bad root index");
    if (rs.rank() < 2) {
      throw target_unavailable_error("rank-1 systems have no equation definitions");
    }
    if (rank2_doubled(rs)) {
      bool ad = ctx->rep().kind() == RepKind::Adjoint;
      if (!ad && !R.has_half()) {
        throw target_unavailable_error(
            "root subgroups of the rank-2 doubled-length family need the adjoint "
            "quotient or an invertible 2");
      }
      if (ad) {
        f = dcent_exceptional(rs, g) ? build_twisted_pair(ctx, g) : build_direct(ctx, g);
      } else {
        f = dcent_exceptional(rs, g) ? build_halved_twisted_pair(ctx, g)
                                     : build_halved_pair(ctx, g);
      }
    } else if (rs.family() == 'G') {
      f = build_direct(ctx, g);
    } else if (find_plain_pair(ctx, g, two_is_zero(R))) {
      f = build_pair_image(ctx, g, two_is_zero(R));
    } else if (rs.family() == 'C') {
      if (two_is_zero(R)) {
        // 2 = 0 collapses every double centralizer to the plain form, so
        // the companion witnesses that the chain and the long product
        // range over vanish.  The plain pair above already covers the
        // short roots here; the long ones commute into nothing, so the
        // conjunct-only route is exact exactly when the center is trivial.
        if (!center_is_trivial(ctx)) {
          throw target_unavailable_error(
              "no definition for a doubled root over a ring where 2 = 0 and the "
              "center is nontrivial");
        }
        f = build_direct(ctx, g);
      } else {
        f = is_short_root(rs, g) ? build_chain(ctx, g) : build_long_product(ctx, g);
      }
    } else if (rs.family() == 'B') {
      f = build_short_product(ctx, g);
    } else {
      throw std::logic_error("no definition strategy for this target");
    }
  }
  pp_collect_constants(ctx, f);
  return f;
}

std::vector<long long> e_define_solution_set(const GroupContext* ctx,
                                             const EDefineTarget& target, size_t cap) {
  return eval_pp_by_shape(ctx, e_define_subgroup(ctx, target), cap);
}

std::vector<long long> intended_subgroup(const GroupContext* ctx,
                                         const EDefineTarget& target, size_t cap) {
  const Ring& R = ctx->ring();
  if (!R.finite()) throw std::invalid_argument("subgroup enumeration needs a finite ring");
  const GroupTable* tab = group_table(ctx, cap);
  std::set<long long> out;
  size_t n = R.size();
  if (target.isY) {
    DiagCfg dc = canonical_diag_cfg(ctx);
    for (size_t i = 0; i < n; ++i) {
      RElem t = R.from_index(i);
      long long idx = tab->index_of(ctx->mul(ctx->x(dc.g, t), ctx->x(dc.L2, t)));
      if (idx < 0) throw std::logic_error("diagonal element escaped the group table");
      out.insert(idx);
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      long long idx = tab->index_of(ctx->x(target.root, R.from_index(i)));
      if (idx < 0) throw std::logic_error("root element escaped the group table");
      out.insert(idx);
    }
  }
  return std::vector<long long>(out.begin(), out.end());
}

std::vector<long long> pp_enumerate_solutions(const GroupContext* ctx, const PPFormula& f,
                                              size_t budget, size_t cap) {
  if (f.freeVars.size() != 1) throw std::invalid_argument("expected one free variable");
  if (f.existVars.size() > 2) {
    throw std::invalid_argument(
        "brute-force evaluation supports at most two existential variables");
  }
  const GroupTable* tab = group_table(ctx, cap);
  size_t n = tab->size();

  // Variables in loop order: existentials outer, the free variable inner.
  std::vector<std::string> order = f.existVars;
  order.push_back(f.freeVars[0]);
  size_t depth = order.size();

  // Each equation is checked at the shallowest level where all its
  // variables are bound.
  std::vector<std::vector<CompiledWord>> perLevel(depth);
  for (const GWord& eq : f.equations) {
    size_t lvl = 0;
    for (const std::string& v : eq.vars_used()) {
      auto it = std::find(order.begin(), order.end(), v);
      if (it == order.end()) throw std::invalid_argument("equation uses unknown variable");
      lvl = std::max(lvl, static_cast<size_t>(it - order.begin()));
    }
    perLevel[lvl].push_back(compile_word(ctx, eq, order));
  }

  std::vector<GroupElem> vals(depth), invs(depth);
  std::set<long long> sol;
  size_t spent = 0;
  GroupElem idElem = ctx->identity();

  auto recurse = [&](auto&& self, size_t lvl) -> void {
    for (size_t i = 0; i < n; ++i) {
      vals[lvl] = tab->element(i);
      invs[lvl] = ctx->inverse(vals[lvl]);
      bool ok = true;
      for (const CompiledWord& w : perLevel[lvl]) {
        if (++spent > budget) throw budget_exceeded_error("word evaluation budget exhausted");
        if (!(eval_compiled(ctx, w, vals, invs) == idElem)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (lvl + 1 == depth) {
        sol.insert(static_cast<long long>(i));
      } else {
        self(self, lvl + 1);
      }
    }
  };
  recurse(recurse, 0);
  return std::vector<long long>(sol.begin(), sol.end());
}

// --- the interpreted ring -------------------------------------------------------

namespace {
RElem sign_apply(const Ring& R, long long sgn, const RElem& v) {
  return sgn < 0 ? R.neg(v) : v;
}
}  // namespace

GroupElem InterpretedRing::phi(const RElem& a) const {
  const Ring& R = ctx->ring();
  GroupElem e = ctx->x(g, sign_apply(R, phiSign, a));
  if (caseId == 4) e = ctx->mul(e, ctx->x(L2, a));
  return e;
}

RElem InterpretedRing::read(const GroupElem& x) const {
  const Ring& R = ctx->ring();
  RElem raw = ctx->entry(x, rr, rc);
  raw = sign_apply(R, rsgn, raw);
  return sign_apply(R, phiSign, raw);
}

bool InterpretedRing::in_carrier(const GroupElem& x) const {
  if (carrier_.empty()) throw std::invalid_argument("carrier set needs a finite ring");
  return cindex_.count(ctx->fingerprint(x)) != 0;
}

GroupElem InterpretedRing::oplus(const GroupElem& x, const GroupElem& y) const {
  return ctx->mul(x, y);
}

GroupElem InterpretedRing::mu_of(const GroupElem& e) const {
  const Ring& R = ctx->ring();
  RElem raw = ctx->entry(e, rr, rc);
  return ctx->x(g, sign_apply(R, rsgn, raw));
}

GroupElem InterpretedRing::otimes(const GroupElem& x, const GroupElem& y) const {
  const Ring& R = ctx->ring();
  switch (caseId) {
    case 1: {
      GroupElem x1 = ctx->x(p, read(x));
      GroupElem y1 = ctx->x(q, read(y));
      return ctx->commutator(x1, y1);
    }
    case 2: {
      RElem a = read(x), b = read(y);
      GroupElem x2 = ctx->x(p2, a);
      GroupElem y2 = ctx->x(q2, b);
      GroupElem zL = ctx->commutator(x2, y2);  // the long witness x_p(ab)
      GroupElem A = ctx->commutator(zL, ctx->x(q, R.one()));
      return mu_of(A);
    }
    case 3: {
      RElem t0 = sign_apply(R, c11, read(x));
      GroupElem x1 = ctx->x(p, t0);
      GroupElem wEl = ctx->w(wroot, R.one());
      GroupElem y2 = ctx->conjugate(sigma < 0 ? ctx->inverse(y) : y, wEl);
      GroupElem C = ctx->commutator(x1, y2);
      return mu_of(C);
    }
    case 4: {
      RElem t0 = sign_apply(R, c12, read(x));
      GroupElem x1 = ctx->x(L1, t0);
      GroupElem wEl = ctx->w(L1, R.one());
      GroupElem y2 = ctx->conjugate(sigmaP < 0 ? ctx->inverse(y) : y, wEl);
      GroupElem C = ctx->commutator(x1, y2);
      RElem raw = ctx->entry(C, rr, rc);
      return phi(sign_apply(R, rsgn, raw));
    }
    default:
      throw case_unavailable_error("no interpreted multiplication configured");
  }
}

const std::vector<std::string>& InterpretedRing::junk_set() const {
  if (!junkset_.empty()) return junkset_;
  const Ring& R = ctx->ring();
  if (!R.finite()) throw std::invalid_argument("search route needs a finite ring");
  size_t n = R.size();
  if (caseId == 3) {
    for (size_t i = 0; i < n; ++i) {
      junkset_.push_back(ctx->fingerprint(ctx->x(d, R.from_index(i))));
    }
  } else if (caseId == 2) {
    if (n * n * n > 500000) {
      throw budget_exceeded_error("tail subgroup too large to enumerate");
    }
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        for (size_t k = 0; k < n; ++k) {
          GroupElem e = ctx->mul(
              ctx->mul(ctx->x(d1, R.from_index(i)), ctx->x(d2, R.from_index(j))),
              ctx->x(d3, R.from_index(k)));
          junkset_.push_back(ctx->fingerprint(e));
        }
      }
    }
  }
  std::sort(junkset_.begin(), junkset_.end());
  junkset_.erase(std::unique(junkset_.begin(), junkset_.end()), junkset_.end());
  return junkset_;
}

GroupElem InterpretedRing::mu_search_of(const GroupElem& e) const {
  const std::vector<std::string>& junk = junk_set();
  GroupElem einv = ctx->inverse(e);
  for (const GroupElem& m : carrier_) {
    std::string fp = ctx->fingerprint(ctx->mul(einv, m));
    if (std::binary_search(junk.begin(), junk.end(), fp)) return m;
  }
  throw std::logic_error("no carrier element matches the commutator image");
}

GroupElem InterpretedRing::otimes_search(const GroupElem& x, const GroupElem& y) const {
  const Ring& R = ctx->ring();
  if (!R.finite()) throw std::invalid_argument("search route needs a finite ring");
  size_t n = R.size();
  auto find_param = [&](auto&& pred) -> GroupElem {
    for (size_t i = 0; i < n; ++i) {
      GroupElem cand = pred(R.from_index(i));
      if (!cand.sb.empty() || !cand.pb.empty()) return cand;
    }
    throw std::logic_error("witness search failed");
  };
  switch (caseId) {
    case 1: {
      GroupElem xq1 = ctx->x(q, R.one());
      GroupElem xp1 = ctx->x(p, R.one());
      GroupElem x1 = find_param([&](const RElem& t) {
        GroupElem cand = ctx->x(p, t);
        return ctx->commutator(cand, xq1) == x ? cand : GroupElem{};
      });
      GroupElem y1 = find_param([&](const RElem& u) {
        GroupElem cand = ctx->x(q, u);
        return ctx->commutator(xp1, cand) == y ? cand : GroupElem{};
      });
      return ctx->commutator(x1, y1);
    }
    case 2: {
      GroupElem xq1 = ctx->x(q, R.one());
      GroupElem xq21 = ctx->x(q2, R.one());
      GroupElem xp21 = ctx->x(p2, R.one());
      // A long letter x_p(t) hits the carrier through [x_p(t), x_q(1)],
      // which lands on x_g(c11 t) modulo the tail subgroup; extract the
      // carrier component by scanning against the tail residues.
      auto mu_match = [&](const RElem& t, const GroupElem& want) {
        GroupElem cand = ctx->x(p, t);
        GroupElem img = ctx->commutator(cand, xq1);
        return mu_search_of(img) == want ? cand : GroupElem{};
      };
      GroupElem x1 = find_param([&](const RElem& t) { return mu_match(t, x); });
      GroupElem y1 = find_param([&](const RElem& t) { return mu_match(t, y); });
      GroupElem x2 = find_param([&](const RElem& t) {
        GroupElem cand = ctx->x(p2, t);
        return ctx->commutator(cand, xq21) == x1 ? cand : GroupElem{};
      });
      GroupElem y2 = find_param([&](const RElem& u) {
        GroupElem cand = ctx->x(q2, u);
        return ctx->commutator(xp21, cand) == y1 ? cand : GroupElem{};
      });
      GroupElem zL = ctx->commutator(x2, y2);
      return mu_search_of(ctx->commutator(zL, xq1));
    }
    case 3: {
      const std::vector<std::string>& junk = junk_set();
      GroupElem xb1 = ctx->x(q, R.one());
      GroupElem x1 = find_param([&](const RElem& t) {
        GroupElem cand = ctx->x(p, t);
        GroupElem res = ctx->mul(ctx->inverse(ctx->commutator(cand, xb1)), x);
        return std::binary_search(junk.begin(), junk.end(), ctx->fingerprint(res))
                   ? cand
                   : GroupElem{};
      });
      GroupElem wEl = ctx->w(wroot, R.one());
      GroupElem y2 = ctx->conjugate(sigma < 0 ? ctx->inverse(y) : y, wEl);
      GroupElem C = ctx->commutator(x1, y2);
      GroupElem Cinv = ctx->inverse(C);
      for (const GroupElem& m : carrier_) {
        std::string fp = ctx->fingerprint(ctx->mul(Cinv, m));
        if (std::binary_search(junk.begin(), junk.end(), fp)) return m;
      }
      throw std::logic_error("no carrier element matches the twisted image");
    }
    case 4: {
      GroupElem xqu = ctx->x(q, u0);
      GroupElem x1 = find_param([&](const RElem& t) {
        GroupElem cand = ctx->x(L1, t);
        return ctx->commutator(cand, xqu) == x ? cand : GroupElem{};
      });
      GroupElem wEl = ctx->w(L1, R.one());
      GroupElem y2 = ctx->conjugate(sigmaP < 0 ? ctx->inverse(y) : y, wEl);
      GroupElem C = ctx->commutator(x1, y2);
      GroupElem Cinv = ctx->inverse(C);
      for (const GroupElem& m : carrier_) {
        GroupElem res = ctx->mul(Cinv, m);
        bool ok = true;
        for (const GroupElem& gEl : gamL2_) {
          if (!ctx->commutes(res, gEl)) {
            ok = false;
            break;
          }
        }
        if (ok) return m;
      }
      throw std::logic_error("no diagonal element matches the twisted image");
    }
    default:
      throw case_unavailable_error("no interpreted multiplication configured");
  }
}

InterpretedRing interpreted_ring_ops(const GroupContext* ctx, const EDefineTarget& carrier) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  const CommTable& tab = ctx->table();
  InterpretedRing ir;
  ir.ctx = ctx;
  ir.carrier = carrier;

  if (carrier.isY) {
    if (!rank2_doubled(rs)) {
      throw case_unavailable_error(
          "the diagonal carrier only exists in the rank-2 doubled-length family");
    }
    DiagCfg dc = canonical_diag_cfg(ctx);
    ir.caseId = 4;
    ir.g = dc.g;
    ir.L1 = dc.L1;
    ir.L2 = dc.L2;
    ir.q = dc.q;
    ir.c11 = dc.c11;
    ir.c12 = dc.c12;
    ir.u0 = R.from_int(dc.c11 * dc.c12);
    int eps1 = conj_sign(ctx, dc.L1, dc.g, dc.q);
    ir.sigmaP = static_cast<int>(dc.c11 * dc.c12) * eps1;
    for (int m : gamma_set(ctx, dc.L2).members) ir.gamL2_.push_back(ctx->x(m, R.one()));
  } else {
    int gma = carrier.root;
    if (gma < 0 || gma >= rs.num_roots()) throw std::invalid_argument("bad root index");
    ir.g = gma;
    if (rank2_doubled(rs)) {
      bool ad = ctx->rep().kind() == RepKind::Adjoint;
      if (!ad && !R.has_half()) {
        throw case_unavailable_error(
            "no interpreted ring on a root carrier here: need the adjoint quotient or "
            "an invertible 2");
      }
      if (!dcent_exceptional(rs, gma)) {
        throw case_unavailable_error(
            "use a short-root carrier in the rank-2 doubled-length family");
      }
      TwistCfg t = find_twist(ctx, gma);
      ir.caseId = 3;
      ir.p = t.l1;
      ir.q = t.beta;
      ir.d = t.l2;
      ir.c11 = t.c11;
      ir.wroot = t.l1;
      // w_{p}(1) reflects the carrier root onto the partner root.
      if (rs.reflect(gma, t.l1) != t.beta) {
        throw std::logic_error("the long reflection does not swap carrier and partner");
      }
      ir.sigma = conj_sign(ctx, t.l1, gma, t.beta);
    } else {
      std::optional<PairCfg> best;
      for (int a = 0; a < rs.num_roots(); ++a) {
        for (int b = 0; b < rs.num_roots(); ++b) {
          if (rs.sum_index(a, b) != gma) continue;
          if (single_pair_c(tab, rs, a, b) != 1) continue;
          best = PairCfg{a, b, 1};
          break;
        }
        if (best) break;
      }
      if (best) {
        ir.caseId = 1;
        ir.p = best->p;
        ir.q = best->q;
        ir.c11 = 1;
      } else if (rs.family() == 'G' && is_short_root(rs, gma)) {
        // Long letter p, short letter q, four-factor chain onto the carrier.
        bool found = false;
        for (int pass = 0; pass < 2 && !found; ++pass) {
          for (int a = 0; a < rs.num_roots() && !found; ++a) {
            if (rs.length_sq(a) <= rs.length_sq(gma)) continue;
            int b = rs.sum_index(gma, rs.negate(a));
            if (b < 0) continue;
            const std::vector<CommFactor>& fs = tab.pair(a, b);
            if (fs.size() != 4) continue;
            long long c11v = 0;
            int e1 = -1, e2 = -1, e3 = -1;
            for (const CommFactor& fc : fs) {
              if (fc.i == 1 && fc.j == 1) c11v = fc.c;
              if (fc.i == 1 && fc.j == 2) e1 = fc.rootIdx;
              if (fc.i == 1 && fc.j == 3) e2 = fc.rootIdx;
              if (fc.i == 2 && fc.j == 3) e3 = fc.rootIdx;
            }
            if (!c11v || e1 < 0 || e2 < 0 || e3 < 0) continue;
            if (pass == 0 && c11v != 1) continue;  // prefer a plus-one chain
            ir.caseId = 2;
            ir.p = a;
            ir.q = b;
            ir.c11 = c11v;
            ir.phiSign = c11v;
            ir.d1 = e1;
            ir.d2 = e2;
            ir.d3 = e3;
            found = true;
          }
        }
        if (!found) throw case_unavailable_error("no chain produces this short carrier");
        // Inner long pair with unit plus-one coefficient.
        bool inner = false;
        for (int a = 0; a < rs.num_roots() && !inner; ++a) {
          if (is_short_root(rs, a)) continue;
          for (int b = 0; b < rs.num_roots(); ++b) {
            if (is_short_root(rs, b)) continue;
            if (rs.sum_index(a, b) != ir.p) continue;
            if (single_pair_c(tab, rs, a, b) != 1) continue;
            ir.p2 = a;
            ir.q2 = b;
            inner = true;
            break;
          }
        }
        if (!inner) throw std::logic_error("no long pair produces the long witness root");
      } else {
        throw case_unavailable_error(
            "no commutator pair with unit coefficient produces this carrier");
      }
    }
  }

  ReadPos rp = clean_read_pos(ctx, ir.g);
  ir.rr = rp.r;
  ir.rc = rp.c;
  ir.rsgn = rp.sgn;

  if (R.finite() && R.size() <= 4096) {
    size_t n = R.size();
    for (size_t i = 0; i < n; ++i) {
      GroupElem e = ir.phi(R.from_index(i));
      ir.cindex_[ctx->fingerprint(e)] = static_cast<long long>(i);
      ir.carrier_.push_back(std::move(e));
    }
  }
  return ir;
}

EDefineTarget default_carrier(const GroupContext* ctx) {
  const RootSystem& rs = ctx->rs();
  const CommTable& tab = ctx->table();
  if (rank2_doubled(rs)) {
    bool ad = ctx->rep().kind() == RepKind::Adjoint;
    if (ad || ctx->ring().has_half()) return EDefineTarget::X(canonical_diag_cfg(ctx).g);
    return EDefineTarget::Y();
  }
  for (int g = 0; g < rs.num_positive(); ++g) {
    for (int a = 0; a < rs.num_positive(); ++a) {
      for (int b = 0; b < rs.num_positive(); ++b) {
        if (rs.sum_index(a, b) != g) continue;
        long long c = single_pair_c(tab, rs, a, b);
        if (c == 1 || c == -1) return EDefineTarget::X(g);
      }
    }
  }
  throw case_unavailable_error("no sum of positive roots carries a unit pair");
}

RingIsoReport verify_ring_isomorphism(const GroupContext* ctx, const EDefineTarget& carrier) {
  const Ring& R = ctx->ring();
  if (!R.finite()) throw std::invalid_argument("isomorphism check needs a finite ring");
  InterpretedRing ir = interpreted_ring_ops(ctx, carrier);
  RingIsoReport rep;
  size_t n = R.size();

  std::set<std::string> fps;
  for (size_t i = 0; i < n; ++i) fps.insert(ctx->fingerprint(ir.phi(R.from_index(i))));
  rep.injective = fps.size() == n;
  if (!rep.injective) rep.witnesses.push_back("phi is not injective");

  auto note = [&](const std::string& s) {
    if (rep.witnesses.size() < 8) rep.witnesses.push_back(s);
  };
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      RElem a = R.from_index(i), b = R.from_index(j);
      ++rep.pairs;
      GroupElem ga = ir.phi(a), gb = ir.phi(b);
      if (!(ir.oplus(ga, gb) == ir.phi(R.add(a, b)))) {
        ++rep.addFailures;
        note("sum mismatch at (" + R.to_string(a) + ", " + R.to_string(b) + ")");
      }
      GroupElem prod = ir.otimes(ga, gb);
      if (!(prod == ir.phi(R.mul(a, b)))) {
        ++rep.mulFailures;
        note("product mismatch at (" + R.to_string(a) + ", " + R.to_string(b) + ")");
      }
      if (!(ir.otimes_search(ga, gb) == prod)) {
        ++rep.searchDisagreements;
        note("witness-search disagreement at (" + R.to_string(a) + ", " + R.to_string(b) +
             ")");
      }
    }
  }
  return rep;
}

}  // namespace chevdioph

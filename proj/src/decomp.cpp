#include "chevdioph/decomp.hpp"

#include <algorithm>
#include <array>
#include <deque>

namespace chevdioph {

namespace {

// Cached torus closures, one per context.
struct TorusTable {
  std::vector<GroupElem> elems;
  std::map<std::string, long long> index;
  std::vector<int> parent;
  std::vector<std::pair<int, RElem>> genof;  // (root, unit)
};

const TorusTable& torus_table(const GroupContext* ctx) {
  static std::mutex mu;
  static std::map<const GroupContext*, std::unique_ptr<TorusTable>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(ctx);
  if (it != cache.end()) return *it->second;
  if (!ctx->packed())
    throw std::runtime_error("torus enumeration needs a finite ring of at most 256 elements");
  auto tt = std::make_unique<TorusTable>();
  const Ring& R = ctx->ring();
  std::vector<std::pair<int, RElem>> gens;
  for (int a = 0; a < ctx->rs().num_roots(); ++a)
    for (const RElem& u : R.units())
      if (!R.is_one(u)) gens.emplace_back(a, u);
  tt->elems.push_back(ctx->identity());
  tt->index.emplace(ctx->fingerprint(tt->elems[0]), 0);
  tt->parent.push_back(-1);
  tt->genof.emplace_back(-1, R.one());
  for (size_t head = 0; head < tt->elems.size(); ++head) {
    for (const auto& [root, u] : gens) {
      GroupElem n = ctx->mul(tt->elems[head], ctx->h(root, u));
      std::string key = ctx->fingerprint(n);
      if (tt->index.emplace(key, static_cast<long long>(tt->elems.size())).second) {
        tt->elems.push_back(std::move(n));
        tt->parent.push_back(static_cast<int>(head));
        tt->genof.emplace_back(root, u);
      }
    }
  }
  auto& ref = *tt;
  cache.emplace(ctx, std::move(tt));
  return ref;
}

// All |vals|^k assignments in odometer order (first slot fastest).
struct Odometer {
  size_t slots;
  size_t base;
  std::vector<size_t> digits;
  bool done = false;
  Odometer(size_t slots_, size_t base_) : slots(slots_), base(base_), digits(slots_, 0) {
    if (base == 0 && slots > 0) done = true;
  }
  bool next() {
    for (size_t i = 0; i < slots; ++i) {
      if (++digits[i] < base) return true;
      digits[i] = 0;
    }
    done = true;
    return false;
  }
};

// Parameter of the leading x_g factor of M, read from a matrix entry the
// first-order term alone can reach (weight grading makes it exact).
std::optional<RElem> extract_param(const GroupContext* ctx, const GroupElem& m, int rootIdx) {
  const MatZ& d1 = ctx->rep().divided_powers(rootIdx)[1];
  const Ring& R = ctx->ring();
  const int n = ctx->dim();
  for (int pass = 0; pass < 2; ++pass) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const long long d = d1.at(r, c);
        if (d == 0) continue;
        if (pass == 0 && d != 1 && d != -1) continue;
        const RElem dr = R.from_int(d);
        if (!R.is_unit(dr)) continue;
        return R.mul(ctx->entry(m, r, c), R.inv(dr));
      }
    }
  }
  return std::nullopt;
}

// Peel M as an ordered product of positive root elements (increasing root
// index); returns one parameter per positive root, or nullopt.
std::optional<std::vector<RElem>> peel_positive(const GroupContext* ctx, GroupElem m) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  std::vector<RElem> params;
  for (int a = 0; a < rs.num_positive(); ++a) {
    auto p = extract_param(ctx, m, a);
    if (!p) return std::nullopt;
    params.push_back(*p);
    if (!R.is_zero(*p)) m = ctx->mul(ctx->x(a, R.neg(*p)), m);
  }
  if (!ctx->is_identity(m)) return std::nullopt;
  return params;
}

// Peel M as a product of negative root elements in decreasing-height order
// (the rightmost factor is the lowest root, so peeling goes right-to-left).
std::optional<std::vector<RElem>> peel_negative(const GroupContext* ctx, GroupElem m) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  std::vector<RElem> params;
  for (int a = 0; a < rs.num_positive(); ++a) {
    const int na = rs.negate(a);
    auto p = extract_param(ctx, m, na);
    if (!p) return std::nullopt;
    params.push_back(*p);
    if (!R.is_zero(*p)) m = ctx->mul(m, ctx->x(na, R.neg(*p)));
  }
  if (!ctx->is_identity(m)) return std::nullopt;
  return params;
}

// Diagonal part of M in the torus candidate sense: zero off-diagonal
// entries are not required here; the caller validates via membership and
// recomposition.
GroupElem diagonal_of(const GroupContext* ctx, const GroupElem& m) {
  const int n = ctx->dim();
  std::vector<RElem> ent(static_cast<size_t>(n) * n, ctx->ring().zero());
  for (int i = 0; i < n; ++i) ent[static_cast<size_t>(i) * n + i] = ctx->entry(m, i, i);
  return ctx->from_entries(ent);
}

GroupElem diagonal_inverse(const GroupContext* ctx, const GroupElem& m) {
  const int n = ctx->dim();
  const Ring& R = ctx->ring();
  std::vector<RElem> ent(static_cast<size_t>(n) * n, R.zero());
  for (int i = 0; i < n; ++i) {
    const RElem d = ctx->entry(m, i, i);
    if (!R.is_unit(d)) throw not_a_unit_error("non-unit diagonal entry");
    ent[static_cast<size_t>(i) * n + i] = R.inv(d);
  }
  return ctx->from_entries(ent);
}

}  // namespace

const std::vector<GroupElem>& torus_elements(const GroupContext* ctx) {
  return torus_table(ctx).elems;
}

long long torus_index_of(const GroupContext* ctx, const GroupElem& g) {
  const TorusTable& tt = torus_table(ctx);
  auto it = tt.index.find(ctx->fingerprint(g));
  return it == tt.index.end() ? -1 : it->second;
}

std::vector<WordAtom> torus_word_for(const GroupContext* ctx, size_t i) {
  const TorusTable& tt = torus_table(ctx);
  std::vector<WordAtom> out;
  long long cur = static_cast<long long>(i);
  while (cur > 0) {
    out.push_back({'h', tt.genof[cur].first, tt.genof[cur].second, false});
    cur = tt.parent[cur];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<WordAtom> weyl_rep_word(const GroupContext* ctx, size_t weylIdx) {
  const WeylGroup* W = weyl_group(&ctx->rs());
  const WeylElement& w = W->element(weylIdx);
  std::vector<WordAtom> out;
  for (int s : w.word) out.push_back({'w', ctx->rs().simple_root(s), ctx->ring().one(), false});
  return out;
}

GroupElem bruhat_recompose(const GroupContext* ctx, const BruhatForm& f) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  GroupElem g = torus_elements(ctx).at(f.torus);
  for (int a = 0; a < rs.num_positive(); ++a)
    if (!R.is_zero(f.u[a])) g = ctx->mul(g, ctx->x(a, f.u[a]));
  g = ctx->mul(g, ctx->eval_word(weyl_rep_word(ctx, f.weyl)));
  for (int a = 0; a < rs.num_positive(); ++a)
    if (!R.is_zero(f.u2[a])) g = ctx->mul(g, ctx->x(a, f.u2[a]));
  return g;
}

BruhatForm bruhat_decompose(const GroupContext* ctx, const GroupElem& g, long long budget) {
  const Ring& R = ctx->ring();
  if (!R.is_field()) throw std::invalid_argument("Bruhat decomposition needs a field");
  const RootSystem& rs = ctx->rs();
  const WeylGroup* W = weyl_group(&rs);
  const auto& torus = torus_elements(ctx);
  std::map<std::string, long long> torusIdx;
  for (size_t i = 0; i < torus.size(); ++i) torusIdx.emplace(ctx->fingerprint(torus[i]), i);
  const auto all = R.enumerate();
  const int m = rs.num_positive();

  long long spent = 0;
  for (size_t wi = 0; wi < W->order(); ++wi) {
    const WeylElement& w = W->element(wi);
    std::vector<int> sw;  // positive roots sent negative by w
    for (int a = 0; a < m; ++a)
      if (!rs.is_positive(w.perm[a])) sw.push_back(a);
    const GroupElem wrep = ctx->eval_word(weyl_rep_word(ctx, wi));
    const GroupElem wrepInv = ctx->eval_word(ctx->invert_word(weyl_rep_word(ctx, wi)));

    Odometer od(sw.size(), all.size());
    while (!od.done) {
      if (++spent > budget)
        throw budget_exceeded_error("Bruhat search exceeded its budget of " +
                                    std::to_string(budget));
      // M = g * B^-1 * wrep^-1 must lie in T * U.
      GroupElem M = g;
      for (size_t i = sw.size(); i-- > 0;) {
        const RElem& b = all[od.digits[i]];
        if (!R.is_zero(b)) M = ctx->mul(M, ctx->x(sw[i], R.neg(b)));
      }
      M = ctx->mul(M, wrepInv);
      do {
        GroupElem tcand = diagonal_of(ctx, M);
        auto ti = torusIdx.find(ctx->fingerprint(tcand));
        if (ti == torusIdx.end()) break;
        auto a = peel_positive(ctx, ctx->mul(diagonal_inverse(ctx, tcand), M));
        if (!a) break;
        BruhatForm f;
        f.weyl = wi;
        f.torus = ti->second;
        f.u = std::move(*a);
        f.u2.assign(m, R.zero());
        for (size_t i = 0; i < sw.size(); ++i) f.u2[sw[i]] = all[od.digits[i]];
        if (bruhat_recompose(ctx, f) == g) return f;
      } while (false);
      if (od.slots == 0) break;
      od.next();
    }
  }
  throw std::runtime_error("no Bruhat cell matched; the input is outside the generated group");
}

BruhatAtlas::BruhatAtlas(const GroupContext* ctx, long long budget) : ctx_(ctx) {
  const Ring& R = ctx->ring();
  if (!R.is_field()) throw std::invalid_argument("Bruhat decomposition needs a field");
  const RootSystem& rs = ctx->rs();
  const WeylGroup* W = weyl_group(&rs);
  const auto& torus = torus_elements(ctx);
  const auto all = R.enumerate();
  const int m = rs.num_positive();

  // Budget estimate before any work: |T| * |R|^m * sum_w |R|^{l(w)}.
  long double est = 0;
  for (size_t wi = 0; wi < W->order(); ++wi) {
    long double c = 1;
    for (size_t i = 0; i < W->element(wi).word.size(); ++i) c *= all.size();
    est += c;
  }
  long double uCount = 1;
  for (int i = 0; i < m; ++i) uCount *= all.size();
  est *= uCount * torus.size();
  if (est > static_cast<long double>(budget))
    throw budget_exceeded_error("Bruhat atlas tuple space exceeds its budget");

  // Every t * U(a) prefix, reused across cells.
  std::vector<std::pair<GroupElem, std::pair<long long, std::vector<size_t>>>> prefixes;
  for (size_t ti = 0; ti < torus.size(); ++ti) {
    Odometer od(m, all.size());
    while (!od.done) {
      GroupElem p = torus[ti];
      for (int a = 0; a < m; ++a)
        if (!R.is_zero(all[od.digits[a]])) p = ctx->mul(p, ctx->x(a, all[od.digits[a]]));
      prefixes.push_back({std::move(p), {static_cast<long long>(ti), od.digits}});
      if (m == 0) break;
      od.next();
    }
  }

  for (size_t wi = 0; wi < W->order(); ++wi) {
    const WeylElement& w = W->element(wi);
    std::vector<int> sw;
    for (int a = 0; a < m; ++a)
      if (!rs.is_positive(w.perm[a])) sw.push_back(a);
    const GroupElem wrep = ctx->eval_word(weyl_rep_word(ctx, wi));
    Odometer od(sw.size(), all.size());
    while (!od.done) {
      GroupElem suffix = wrep;
      for (size_t i = 0; i < sw.size(); ++i)
        if (!R.is_zero(all[od.digits[i]])) suffix = ctx->mul(suffix, ctx->x(sw[i], all[od.digits[i]]));
      for (const auto& [p, key] : prefixes) {
        ++tuples_;
        GroupElem g = ctx->mul(p, suffix);
        BruhatForm f;
        f.weyl = wi;
        f.torus = key.first;
        f.u.clear();
        for (int a = 0; a < m; ++a) f.u.push_back(all[key.second[a]]);
        f.u2.assign(m, R.zero());
        for (size_t i = 0; i < sw.size(); ++i) f.u2[sw[i]] = all[od.digits[i]];
        auto [it, fresh] = atlas_.emplace(ctx->fingerprint(g), std::move(f));
        if (!fresh) ++collisions_;
      }
      if (od.slots == 0) break;
      od.next();
    }
  }
}

const BruhatForm& BruhatAtlas::lookup(const GroupElem& g) const {
  auto it = atlas_.find(ctx_->fingerprint(g));
  if (it == atlas_.end())
    throw std::runtime_error("element not covered by any Bruhat cell of the generated group");
  return it->second;
}

std::map<size_t, long long> BruhatAtlas::census() const {
  std::map<size_t, long long> out;
  for (const auto& [key, f] : atlas_) ++out[f.weyl];
  return out;
}

const BruhatAtlas* bruhat_atlas(const GroupContext* ctx, long long budget) {
  static std::mutex mu;
  static std::map<const GroupContext*, std::unique_ptr<BruhatAtlas>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(ctx);
  if (it == cache.end())
    it = cache.emplace(ctx, std::make_unique<BruhatAtlas>(ctx, budget)).first;
  return it->second.get();
}

// ---------------------------------------------------------------------------
// Big cell.
// ---------------------------------------------------------------------------

GroupElem utv_recompose(const GroupContext* ctx, const UTVForm& f) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  GroupElem g = ctx->identity();
  for (int a = 0; a < rs.num_positive(); ++a)
    if (!R.is_zero(f.u[a])) g = ctx->mul(g, ctx->x(a, f.u[a]));
  if (!f.torus_word.empty()) {
    g = ctx->mul(g, ctx->eval_word(f.torus_word));
  } else if (f.torus >= 0) {
    g = ctx->mul(g, torus_elements(ctx).at(f.torus));
  }
  for (int a = rs.num_positive(); a-- > 0;)
    if (!R.is_zero(f.v[a])) g = ctx->mul(g, ctx->x(rs.negate(a), f.v[a]));
  return g;
}

UTVForm utv_decompose_matrix(const GroupContext* ctx, const GroupElem& g) {
  if (ctx->rep().kind() == RepKind::Adjoint)
    throw std::invalid_argument("the matrix route works on the natural representations");
  if (!ctx->packed())
    throw std::invalid_argument("the matrix route needs a finite ring of at most 256 elements");
  const Ring& R = ctx->ring();
  const int n = ctx->dim();
  const auto& ord = ctx->rep().weight_order();

  // Weight-ordered copy (highest weight first); eliminate from the lowest
  // diagonal position upward, demanding a unit pivot at every step.
  auto idx = [n](int r, int c) { return static_cast<size_t>(r) * n + c; };
  std::vector<RElem> A(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) A[idx(r, c)] = ctx->entry(g, ord[r], ord[c]);
  std::vector<RElem> umat(A.size(), R.zero()), vmat(A.size(), R.zero());
  for (int i = 0; i < n; ++i) umat[idx(i, i)] = vmat[idx(i, i)] = R.one();

  UTVForm f;
  f.u.assign(ctx->rs().num_positive(), R.zero());
  f.v.assign(ctx->rs().num_positive(), R.zero());
  for (int p = n - 1; p >= 0; --p) {
    const RElem piv = A[idx(p, p)];
    if (!R.is_unit(piv)) {
      f.status = UTVStatus::NotInBigCell;
      f.note = "non-unit pivot at weight position " + std::to_string(p);
      return f;
    }
    const RElem pinv = R.inv(piv);
    for (int r = 0; r < p; ++r) {
      const RElem fr = R.mul(A[idx(r, p)], pinv);
      if (R.is_zero(fr)) continue;
      for (int c = 0; c <= p; ++c) A[idx(r, c)] = R.sub(A[idx(r, c)], R.mul(fr, A[idx(p, c)]));
      // umat *= (I + fr E_{rp}): column p gains fr * column r.
      for (int rr = 0; rr < n; ++rr)
        umat[idx(rr, p)] = R.add(umat[idx(rr, p)], R.mul(fr, umat[idx(rr, r)]));
    }
    for (int c = 0; c < p; ++c) {
      const RElem fc = R.mul(A[idx(p, c)], pinv);
      if (R.is_zero(fc)) continue;
      for (int r = 0; r <= p; ++r) A[idx(r, c)] = R.sub(A[idx(r, c)], R.mul(fc, A[idx(r, p)]));
      // vmat = (I + fc E_{pc}) * vmat: row p gains fc * row c.
      for (int cc = 0; cc < n; ++cc)
        vmat[idx(p, cc)] = R.add(vmat[idx(p, cc)], R.mul(fc, vmat[idx(c, cc)]));
    }
  }

  // Back to the representation basis.
  auto unorder = [&](const std::vector<RElem>& M) {
    std::vector<RElem> out(M.size(), R.zero());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out[static_cast<size_t>(ord[r]) * n + ord[c]] = M[idx(r, c)];
    return out;
  };
  GroupElem uElem = ctx->from_entries(unorder(umat));
  GroupElem vElem = ctx->from_entries(unorder(vmat));
  std::vector<RElem> tent(static_cast<size_t>(n) * n, R.zero());
  for (int i = 0; i < n; ++i) tent[static_cast<size_t>(ord[i]) * n + ord[i]] = A[idx(i, i)];
  GroupElem tElem = ctx->from_entries(tent);

  const long long ti = torus_index_of(ctx, tElem);
  if (ti < 0) {
    f.status = UTVStatus::NotInBigCell;
    f.note = "diagonal part lies outside the generated torus";
    return f;
  }
  auto up = peel_positive(ctx, uElem);
  auto vp = peel_negative(ctx, vElem);
  if (!up || !vp) {
    f.status = UTVStatus::NotInBigCell;
    f.note = "unipotent peel failed";
    return f;
  }
  f.u = std::move(*up);
  f.v = std::move(*vp);
  f.torus = ti;
  f.torus_word = torus_word_for(ctx, static_cast<size_t>(ti));
  if (utv_recompose(ctx, f) != g)
    throw std::runtime_error("big-cell recomposition mismatch after elimination");
  return f;
}

std::optional<std::array<RElem, 3>> star_cross(const GroupContext* ctx, int posRoot,
                                               const RElem& s, const RElem& t) {
  (void)posRoot;
  const Ring& R = ctx->ring();
  const RElem d = R.add(R.one(), R.mul(s, t));
  if (!R.is_unit(d)) return std::nullopt;
  const RElem di = R.inv(d);
  return std::array<RElem, 3>{di, R.mul(t, d), R.mul(s, di)};
}

std::optional<std::array<RElem, 3>> conj_shift(const GroupContext* ctx, int posRoot,
                                               const RElem& s) {
  (void)posRoot;
  const Ring& R = ctx->ring();
  const RElem d = R.sub(R.one(), s);
  if (!R.is_unit(d)) return std::nullopt;
  const RElem di = R.inv(d);
  return std::array<RElem, 3>{di, R.sub(R.mul(s, s), s), R.mul(s, di)};
}

namespace {

// Canonical-order rank of an atom inside the u * t * v word: positive x's
// ascending by root index, then h's, then negative x's descending by the
// positive counterpart.
std::pair<int, int> atom_rank(const RootSystem& rs, const WordAtom& a) {
  if (a.kind == 'h') return {1, 0};
  if (rs.is_positive(a.root)) return {0, a.root};
  return {2, -rs.negate(a.root)};
}

}  // namespace

UTVForm utv_decompose_word(const GroupContext* ctx, const std::vector<WordAtom>& word,
                           long long budget) {
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();
  const CommTable& tab = ctx->table();
  UTVForm f;
  const int m = rs.num_positive();
  f.u.assign(m, R.zero());
  f.v.assign(m, R.zero());

  // Normalize the input into plain x/h letters.
  std::deque<WordAtom> w;
  for (const WordAtom& a : word) {
    if (a.kind == 'x') {
      w.push_back({'x', a.root, a.inv ? R.neg(a.param) : a.param, false});
    } else if (a.kind == 'h') {
      w.push_back({'h', a.root, a.inv ? R.inv(a.param) : a.param, false});
    } else if (a.kind == 'w') {
      const RElem c = a.inv ? R.neg(a.param) : a.param;
      if (!R.is_unit(c)) throw not_a_unit_error("w_alpha parameter must be a unit");
      w.push_back({'x', a.root, c, false});
      w.push_back({'x', rs.negate(a.root), R.neg(R.inv(c)), false});
      w.push_back({'x', a.root, c, false});
    } else {
      throw std::invalid_argument("unknown word atom kind");
    }
  }
  std::vector<WordAtom> list(w.begin(), w.end());

  auto fail = [&](const std::string& why) {
    f.status = UTVStatus::RewriteDivergence;
    f.note = why;
    return f;
  };

  size_t pos = 0;
  while (pos + 1 <= list.size()) {
    // Drop trivial letters in place.
    if (pos < list.size()) {
      const WordAtom& a = list[pos];
      if ((a.kind == 'x' && R.is_zero(a.param)) || (a.kind == 'h' && R.is_one(a.param))) {
        list.erase(list.begin() + pos);
        if (pos > 0) --pos;
        continue;
      }
    }
    if (pos + 1 >= list.size()) break;
    if (++f.steps > budget) return fail("rewrite budget exhausted");
    if (list.size() > 1000) return fail("intermediate word grew past the rewrite bound");
    WordAtom L = list[pos];
    WordAtom Rt = list[pos + 1];
    const auto rl = atom_rank(rs, L);
    const auto rr = atom_rank(rs, Rt);

    // Merge equal letters.
    if (L.kind == 'x' && Rt.kind == 'x' && L.root == Rt.root) {
      list[pos].param = R.add(L.param, Rt.param);
      list.erase(list.begin() + pos + 1);
      if (pos > 0) --pos;
      continue;
    }
    if (L.kind == 'h' && Rt.kind == 'h' && L.root == Rt.root) {
      list[pos].param = R.mul(L.param, Rt.param);
      list.erase(list.begin() + pos + 1);
      if (pos > 0) --pos;
      continue;
    }
    if (rl <= rr) {  // already in canonical order
      ++pos;
      continue;
    }

    // h * x_b  ->  x_b(scaled) * h   (R6).
    if (L.kind == 'h' && Rt.kind == 'x') {
      const RElem scale = R.pow_int(L.param, rs.pairing(Rt.root, L.root));
      list[pos] = {'x', Rt.root, R.mul(scale, Rt.param), false};
      list[pos + 1] = L;
      if (pos > 0) --pos;
      continue;
    }
    // x_b * h  ->  h * x_b(scaled back), used when b is negative and h must
    // move left of it.
    if (L.kind == 'x' && Rt.kind == 'h') {
      const RElem scale = R.pow_int(Rt.param, -rs.pairing(L.root, Rt.root));
      list[pos] = Rt;
      list[pos + 1] = {'x', L.root, R.mul(scale, L.param), false};
      if (pos > 0) --pos;
      continue;
    }
    if (L.kind == 'x' && Rt.kind == 'x') {
      if (L.root == rs.negate(Rt.root) && rs.is_positive(Rt.root)) {
        // x_{-g}(s) x_g(t): the big-cell crossing identity.
        auto sc = star_cross(ctx, Rt.root, L.param, Rt.param);
        if (!sc)
          return fail("crossing parameter 1+st is not a unit at root " +
                      rs.root_name(Rt.root));
        list[pos] = {'h', Rt.root, (*sc)[0], false};
        list[pos + 1] = {'x', Rt.root, (*sc)[1], false};
        list.insert(list.begin() + pos + 2, {'x', L.root, (*sc)[2], false});
        if (pos > 0) --pos;
        continue;
      }
      // General swap: L R = [L, R] R L with the commutator expansion.
      const auto& factors = tab.pair(L.root, Rt.root);
      std::vector<WordAtom> ins;
      for (const CommFactor& cf : factors) {
        RElem p = R.from_int(cf.c);
        p = R.mul(p, R.pow_int(L.param, cf.i));
        p = R.mul(p, R.pow_int(Rt.param, cf.j));
        if (!R.is_zero(p)) ins.push_back({'x', cf.rootIdx, p, false});
      }
      list[pos] = Rt;
      list[pos + 1] = L;
      list.insert(list.begin() + pos, ins.begin(), ins.end());
      if (pos > 0) --pos;
      continue;
    }
    return fail("no rewrite rule applies");
  }

  // Read the canonical word off into the form.
  size_t i = 0;
  int last = -1;
  while (i < list.size() && list[i].kind == 'x' && rs.is_positive(list[i].root)) {
    if (list[i].root <= last) return fail("canonical order violated in the positive block");
    last = list[i].root;
    f.u[list[i].root] = list[i].param;
    ++i;
  }
  while (i < list.size() && list[i].kind == 'h') {
    f.torus_word.push_back(list[i]);
    ++i;
  }
  last = rs.num_positive();
  while (i < list.size() && list[i].kind == 'x' && !rs.is_positive(list[i].root)) {
    const int a = rs.negate(list[i].root);
    if (a >= last) return fail("canonical order violated in the negative block");
    last = a;
    f.v[a] = list[i].param;
    ++i;
  }
  if (i != list.size()) return fail("letters remain after the canonical blocks");
  if (ctx->packed()) {
    GroupElem t = ctx->eval_word(f.torus_word);
    f.torus = torus_index_of(ctx, t);
    if (f.torus < 0) return fail("torus word lies outside the generated torus");
  }
  f.status = UTVStatus::Ok;
  return f;
}

CrtSplit group_crt_split(const GroupContext* ctx) {
  const Ring& R = ctx->ring();
  CrtSplit out;
  for (const Ring* comp : R.crt_components())
    out.components.push_back(GroupContext::get(&ctx->rs(), ctx->rep().kind(), comp));
  return out;
}

std::vector<GroupElem> CrtSplit::project(const GroupContext* ctx, const GroupElem& g) const {
  std::vector<GroupElem> out;
  const int n = ctx->dim();
  for (const GroupContext* comp : components) {
    std::vector<RElem> ent(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        ent[static_cast<size_t>(r) * n + c] =
            ctx->ring().crt_project(ctx->entry(g, r, c), &comp->ring());
    out.push_back(comp->from_entries(ent));
  }
  return out;
}

GroupElem CrtSplit::lift(const GroupContext* ctx, const std::vector<GroupElem>& parts) const {
  const int n = ctx->dim();
  std::vector<RElem> ent(static_cast<size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::vector<RElem> coords;
      for (size_t i = 0; i < components.size(); ++i)
        coords.push_back(components[i]->entry(parts[i], r, c));
      ent[static_cast<size_t>(r) * n + c] = ctx->ring().crt_lift(coords);
    }
  }
  return ctx->from_entries(ent);
}

}  // namespace chevdioph

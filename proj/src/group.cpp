#include "chevdioph/group.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "chevdioph/checked.hpp"

namespace chevdioph {

bool GroupElem::operator==(const GroupElem& o) const {
  if (dim != o.dim || packed != o.packed) return false;
  return packed ? pb == o.pb : sb == o.sb;
}

namespace {

// C += A * B over the packed byte encoding; index 0 is the ring zero in
// both the Z/n and GF codings, so zero entries can be skipped.
void pmul_acc(const FiniteRingOps* ops, int n, const uint8_t* A, const uint8_t* B, uint8_t* C) {
  const uint8_t* add = ops->add.data();
  const uint8_t* mul = ops->mul.data();
  const size_t S = static_cast<size_t>(ops->size);
  for (int i = 0; i < n; ++i) {
    uint8_t* Crow = C + static_cast<size_t>(i) * n;
    for (int k = 0; k < n; ++k) {
      const uint8_t a = A[static_cast<size_t>(i) * n + k];
      if (a == 0) continue;
      const uint8_t* mrow = mul + a * S;
      const uint8_t* Brow = B + static_cast<size_t>(k) * n;
      for (int j = 0; j < n; ++j) {
        const uint8_t prod = mrow[Brow[j]];
        if (prod != 0) Crow[j] = add[Crow[j] * S + prod];
      }
    }
  }
}

std::vector<uint8_t> pmul(const FiniteRingOps* ops, int n, const std::vector<uint8_t>& A,
                          const std::vector<uint8_t>& B) {
  std::vector<uint8_t> C(static_cast<size_t>(n) * n, 0);
  pmul_acc(ops, n, A.data(), B.data(), C.data());
  return C;
}

// Gauss-Jordan inverse over a ring in which every invertible matrix has a
// unit pivot in each remaining column (fields and local rings such as
// Z/p^k).  Throws when no unit pivot exists.
std::vector<RElem> gauss_inverse(const Ring* R, int n, std::vector<RElem> m) {
  std::vector<RElem> inv(static_cast<size_t>(n) * n, R->zero());
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + i] = R->one();
  auto at = [n](std::vector<RElem>& v, int r, int c) -> RElem& {
    return v[static_cast<size_t>(r) * n + c];
  };
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r) {
      if (R->is_unit(at(m, r, col))) { piv = r; break; }
    }
    if (piv < 0) throw std::runtime_error("matrix not invertible (no unit pivot)");
    if (piv != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(at(m, piv, c), at(m, col, c));
        std::swap(at(inv, piv, c), at(inv, col, c));
      }
    }
    const RElem s = R->inv(at(m, col, col));
    for (int c = 0; c < n; ++c) {
      at(m, col, c) = R->mul(s, at(m, col, c));
      at(inv, col, c) = R->mul(s, at(inv, col, c));
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const RElem f = at(m, r, col);
      if (R->is_zero(f)) continue;
      for (int c = 0; c < n; ++c) {
        at(m, r, c) = R->sub(at(m, r, c), R->mul(f, at(m, col, c)));
        at(inv, r, c) = R->sub(at(inv, r, c), R->mul(f, at(inv, col, c)));
      }
    }
  }
  return inv;
}

bool is_prime_power(long long n) {
  for (long long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      while (n % d == 0) n /= d;
      return n == 1;
    }
  }
  return n > 1;
}

}  // namespace

GroupContext::GroupContext(const RootSystem* rs, RepKind kind, const Ring* ring)
    : rs_(rs), rep_(representation(rs, kind)), ring_(ring), cb_(chev_basis(rs)),
      tab_(comm_table(rep_)) {
  if (ring_->finite() && ring_->size() <= 256) {
    ops_ = finite_ops(ring_);
    packed_ = true;
  }
}

const GroupContext* GroupContext::get(const RootSystem* rs, RepKind kind, const Ring* ring) {
  static std::mutex mu;
  static std::map<std::tuple<const RootSystem*, RepKind, const Ring*>,
                  std::unique_ptr<GroupContext>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple(rs, kind, ring);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::unique_ptr<GroupContext>(new GroupContext(rs, kind, ring))).first;
  }
  return it->second.get();
}

const GroupContext* GroupContext::get(const std::string& system, const std::string& rep,
                                      const std::string& ringSpec) {
  return get(root_system(system), parse_rep(rep), ring_parse_spec(ringSpec));
}

std::string GroupContext::spec_string() const {
  return std::string(1, rs_->family()) + std::to_string(rs_->rank()) + " " +
         rep_name(rep_->kind()) + " " + ring_->spec_string();
}

GroupElem GroupContext::identity() const {
  GroupElem g;
  g.dim = dim();
  g.packed = packed_;
  const int n = g.dim;
  if (packed_) {
    g.pb.assign(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) g.pb[static_cast<size_t>(i) * n + i] = ops_->one;
  } else {
    g.sb.assign(static_cast<size_t>(n) * n, ring_->zero());
    for (int i = 0; i < n; ++i) g.sb[static_cast<size_t>(i) * n + i] = ring_->one();
  }
  return g;
}

GroupElem GroupContext::x(int rootIdx, const RElem& t) const {
  long long tIdx = -1;
  if (packed_) {
    tIdx = ring_->index_of(t);
    std::lock_guard<std::mutex> lk(xcache_mutex_);
    auto it = xcache_.find({rootIdx, tIdx});
    if (it != xcache_.end()) return it->second;
  }
  const auto& dps = rep_->divided_powers(rootIdx);
  const int n = dim();
  std::vector<RElem> m(static_cast<size_t>(n) * n, ring_->zero());
  RElem tp = ring_->one();
  for (size_t k = 0; k < dps.size(); ++k) {
    if (k > 0) tp = ring_->mul(tp, t);
    if (ring_->is_zero(tp) && k > 0) break;
    const MatZ& d = dps[k];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const long long e = d.at(i, j);
        if (e == 0) continue;
        m[static_cast<size_t>(i) * n + j] = ring_->add(
            m[static_cast<size_t>(i) * n + j], ring_->mul(tp, ring_->from_int(e)));
      }
    }
  }
  GroupElem g = from_entries(m);
  if (packed_) {
    std::lock_guard<std::mutex> lk(xcache_mutex_);
    xcache_.emplace(std::make_pair(rootIdx, tIdx), g);
  }
  return g;
}

GroupElem GroupContext::w(int rootIdx, const RElem& t) const {
  if (!ring_->is_unit(t)) throw not_a_unit_error("w_alpha parameter must be a unit");
  const RElem ti = ring_->inv(t);
  GroupElem a = x(rootIdx, t);
  GroupElem b = x(rs_->negate(rootIdx), ring_->neg(ti));
  return mul(mul(a, b), a);
}

GroupElem GroupContext::h(int rootIdx, const RElem& t) const {
  if (!ring_->is_unit(t)) throw not_a_unit_error("h_alpha parameter must be a unit");
  // h_a(t) = w_a(t) w_a(1)^-1 and w_a(1)^-1 = w_a(-1).
  return mul(w(rootIdx, t), w(rootIdx, ring_->neg(ring_->one())));
}

GroupElem GroupContext::mul(const GroupElem& a, const GroupElem& b) const {
  const int n = dim();
  GroupElem g;
  g.dim = n;
  g.packed = packed_;
  if (packed_) {
    g.pb = pmul(ops_, n, a.pb, b.pb);
  } else {
    g.sb.assign(static_cast<size_t>(n) * n, ring_->zero());
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const RElem& v = a.sb[static_cast<size_t>(i) * n + k];
        if (ring_->is_zero(v)) continue;
        for (int j = 0; j < n; ++j) {
          const RElem& w = b.sb[static_cast<size_t>(k) * n + j];
          if (ring_->is_zero(w)) continue;
          g.sb[static_cast<size_t>(i) * n + j] =
              ring_->add(g.sb[static_cast<size_t>(i) * n + j], ring_->mul(v, w));
        }
      }
    }
  }
  return g;
}

GroupElem GroupContext::inverse(const GroupElem& g) const {
  const int n = dim();
  // Work entrywise over the ring; split Z/n into local factors first when
  // the modulus is not a prime power (a unit pivot may not exist globally).
  if (ring_->kind == RingKind::ModN && !is_prime_power(ring_->n)) {
    auto comps = ring_->crt_components();
    std::vector<std::vector<RElem>> partInv;
    for (const Ring* C : comps) {
      std::vector<RElem> cm(static_cast<size_t>(n) * n, C->zero());
      for (size_t i = 0; i < cm.size(); ++i) {
        cm[i] = ring_->crt_project(entry(g, static_cast<int>(i) / n, static_cast<int>(i) % n), C);
      }
      partInv.push_back(gauss_inverse(C, n, std::move(cm)));
    }
    std::vector<RElem> m(static_cast<size_t>(n) * n, ring_->zero());
    for (size_t i = 0; i < m.size(); ++i) {
      std::vector<RElem> parts;
      parts.reserve(comps.size());
      for (size_t c = 0; c < comps.size(); ++c) parts.push_back(partInv[c][i]);
      m[i] = ring_->crt_lift(parts);
    }
    return from_entries(m);
  }
  if (ring_->kind == RingKind::PolyZ) {
    throw std::runtime_error("matrix inverse over ZPoly is not supported; invert the word instead");
  }
  std::vector<RElem> m(static_cast<size_t>(n) * n, ring_->zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<size_t>(i) * n + j] = entry(g, i, j);
  if (ring_->kind == RingKind::Integers) {
    // Lift to Q, invert, and check the result is integral.
    const Ring* Q = ring_rationals();
    std::vector<RElem> qm(m.size());
    for (size_t i = 0; i < m.size(); ++i) qm[i] = Q->from_int(m[i].raw_a());
    auto qi = gauss_inverse(Q, n, std::move(qm));
    for (size_t i = 0; i < qi.size(); ++i) {
      if (qi[i].raw_b() != 1) throw std::runtime_error("matrix not invertible over Z");
      m[i] = ring_->from_int(qi[i].raw_a());
    }
    return from_entries(m);
  }
  return from_entries(gauss_inverse(ring_, n, std::move(m)));
}

GroupElem GroupContext::commutator(const GroupElem& a, const GroupElem& b) const {
  return mul(mul(a, b), mul(inverse(a), inverse(b)));
}

GroupElem GroupContext::conjugate(const GroupElem& g, const GroupElem& s) const {
  return mul(mul(s, g), inverse(s));
}

bool GroupContext::commutes(const GroupElem& a, const GroupElem& b) const {
  return mul(a, b) == mul(b, a);
}

bool GroupContext::is_identity(const GroupElem& g) const { return g == identity(); }

RElem GroupContext::entry(const GroupElem& g, int r, int c) const {
  const size_t idx = static_cast<size_t>(r) * g.dim + c;
  if (g.packed) return ring_->from_index(g.pb[idx]);
  return g.sb[idx];
}

GroupElem GroupContext::from_entries(const std::vector<RElem>& entries) const {
  const int n = dim();
  if (entries.size() != static_cast<size_t>(n) * n)
    throw std::invalid_argument("entry count does not match the representation dimension");
  GroupElem g;
  g.dim = n;
  g.packed = packed_;
  if (packed_) {
    g.pb.resize(entries.size());
    for (size_t i = 0; i < entries.size(); ++i)
      g.pb[i] = static_cast<uint8_t>(ring_->index_of(entries[i]));
  } else {
    g.sb = entries;
  }
  return g;
}

std::string GroupContext::to_string(const GroupElem& g) const {
  std::string out = "[";
  for (int i = 0; i < g.dim; ++i) {
    out += (i ? "; " : "");
    for (int j = 0; j < g.dim; ++j) {
      if (j) out += ", ";
      out += ring_->to_string(entry(g, i, j));
    }
  }
  out += "]";
  return out;
}

std::string GroupContext::fingerprint(const GroupElem& g) const {
  if (g.packed) return std::string(g.pb.begin(), g.pb.end());
  std::string out;
  for (const RElem& e : g.sb) ring_->serialize(e, out);
  return out;
}

GroupElem GroupContext::eval_word(const std::vector<WordAtom>& atoms) const {
  GroupElem g = identity();
  for (const WordAtom& a : atoms) {
    GroupElem f;
    switch (a.kind) {
      case 'x': f = x(a.root, a.inv ? ring_->neg(a.param) : a.param); break;
      case 'w': f = w(a.root, a.inv ? ring_->neg(a.param) : a.param); break;
      case 'h': f = h(a.root, a.inv ? ring_->inv(a.param) : a.param); break;
      default: throw std::invalid_argument("unknown word atom kind");
    }
    g = mul(g, f);
  }
  return g;
}

std::vector<WordAtom> GroupContext::invert_word(const std::vector<WordAtom>& atoms) const {
  std::vector<WordAtom> out(atoms.rbegin(), atoms.rend());
  for (WordAtom& a : out) a.inv = !a.inv;
  return out;
}

std::string GroupContext::print_word(const std::vector<WordAtom>& atoms) const {
  if (atoms.empty()) return "e";
  std::string out;
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += "*";
    const WordAtom& a = atoms[i];
    out += a.kind;
    out += "(" + rs_->root_name(a.root) + ";" + ring_->to_string(a.param) + ")";
    if (a.inv) out += "^-1";
  }
  return out;
}

namespace {

struct WordParser {
  const GroupContext* ctx;
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("group word parse error at offset " + std::to_string(pos) +
                                ": " + what);
  }

  std::vector<WordAtom> parse_word() {
    std::vector<WordAtom> out;
    skip_ws();
    if (pos < s.size() && s[pos] == 'e' &&
        (pos + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[pos + 1])))) {
      // The bare identity literal.
      ++pos;
      skip_ws();
      if (pos == s.size() || s[pos] == ',' || s[pos] == ']' || s[pos] == ')') return out;
      fail("identity literal cannot be followed by factors without '*'");
    }
    while (true) {
      auto f = parse_factor();
      out.insert(out.end(), f.begin(), f.end());
      skip_ws();
      if (pos >= s.size() || s[pos] == ',' || s[pos] == ']' || s[pos] == ')') break;
      if (s[pos] == '*') { ++pos; continue; }
      // Juxtaposition: the next factor starts directly.
      if (s[pos] == 'x' || s[pos] == 'w' || s[pos] == 'h' || s[pos] == '[' || s[pos] == '(')
        continue;
      fail("expected '*', a factor, or end of word");
    }
    return out;
  }

  std::vector<WordAtom> parse_factor() {
    std::vector<WordAtom> base = parse_primary();
    skip_ws();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      skip_ws();
      bool negp = false;
      if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) negp = (s[pos++] == '-');
      size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) fail("expected an integer exponent");
      long long e = std::stoll(s.substr(start, pos - start));
      std::vector<WordAtom> body = negp ? ctx->invert_word(base) : base;
      std::vector<WordAtom> out;
      for (long long i = 0; i < e; ++i) out.insert(out.end(), body.begin(), body.end());
      return out;
    }
    return base;
  }

  std::vector<WordAtom> parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of word");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      auto inner = parse_word();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (c == '[') {
      ++pos;
      auto a = parse_word();
      if (!eat(',')) fail("expected ',' inside commutator");
      auto b = parse_word();
      if (!eat(']')) fail("expected ']' closing commutator");
      // [A, B] = A B A^-1 B^-1 at the word level.
      std::vector<WordAtom> out = a;
      out.insert(out.end(), b.begin(), b.end());
      auto ai = ctx->invert_word(a);
      auto bi = ctx->invert_word(b);
      out.insert(out.end(), ai.begin(), ai.end());
      out.insert(out.end(), bi.begin(), bi.end());
      return out;
    }
    if (c == 'x' || c == 'w' || c == 'h') return {parse_atom()};
    fail("expected x(..), w(..), h(..), '[', or '('");
  }

  WordAtom parse_atom() {
    WordAtom a;
    a.kind = s[pos++];
    if (!eat('(')) fail("expected '(' after generator letter");
    skip_ws();
    size_t start = pos;
    int depth = 0;
    while (pos < s.size() && (depth > 0 || s[pos] != ';')) {
      if (s[pos] == '[') ++depth;
      if (s[pos] == ']') --depth;
      ++pos;
    }
    if (pos >= s.size()) fail("expected ';' separating root and parameter");
    std::string rootTxt = s.substr(start, pos - start);
    ++pos;  // ';'
    skip_ws();
    start = pos;
    depth = 0;
    while (pos < s.size() && (depth > 0 || s[pos] != ')')) {
      if (s[pos] == '[') ++depth;
      if (s[pos] == ']') --depth;
      ++pos;
    }
    if (pos >= s.size()) fail("expected ')' closing generator");
    std::string paramTxt = s.substr(start, pos - start);
    ++pos;  // ')'
    while (!rootTxt.empty() && std::isspace(static_cast<unsigned char>(rootTxt.back())))
      rootTxt.pop_back();
    while (!paramTxt.empty() && std::isspace(static_cast<unsigned char>(paramTxt.back())))
      paramTxt.pop_back();
    a.root = ctx->rs().parse_root(rootTxt);
    a.param = ctx->ring().parse_literal(paramTxt);
    return a;
  }
};

}  // namespace

std::vector<WordAtom> parse_group_word(const GroupContext* ctx, const std::string& text) {
  WordParser p{ctx, text};
  auto out = p.parse_word();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input after word");
  return out;
}

GroupTable::GroupTable(const GroupContext* ctx, size_t cap) : ctx_(ctx), dim_(ctx->dim()) {
  if (!ctx->packed())
    throw std::runtime_error("group enumeration needs a finite ring of at most 256 elements");
  const Ring& R = ctx->ring();
  // Generating set: every root subgroup element and every nontrivial
  // semisimple generator h_alpha(u).
  for (int a = 0; a < ctx->rs().num_roots(); ++a) {
    for (const RElem& t : R.enumerate()) {
      if (R.is_zero(t)) continue;
      gens_.push_back({'x', a, R.index_of(t)});
      genmats_.push_back(ctx->x(a, t));
    }
  }
  for (int a = 0; a < ctx->rs().num_roots(); ++a) {
    for (const RElem& u : R.units()) {
      if (R.is_one(u)) continue;
      gens_.push_back({'h', a, R.index_of(u)});
      genmats_.push_back(ctx->h(a, u));
    }
  }

  const size_t cell = static_cast<size_t>(dim_) * dim_;
  const GroupElem id = ctx->identity();
  arena_.insert(arena_.end(), id.pb.begin(), id.pb.end());
  index_.emplace(ctx->fingerprint(id), 0);
  parent_.push_back(-1);
  genof_.push_back(-1);
  count_ = 1;

  const FiniteRingOps* ops = finite_ops(&R);
  std::vector<uint8_t> prod(cell);
  size_t head = 0;
  while (head < count_) {
    // The arena may reallocate on growth; index arithmetic stays valid.
    for (size_t gi = 0; gi < gens_.size(); ++gi) {
      std::fill(prod.begin(), prod.end(), 0);
      pmul_acc(ops, dim_, arena_.data() + head * cell, genmats_[gi].pb.data(), prod.data());
      std::string key(prod.begin(), prod.end());
      auto it = index_.find(key);
      if (it == index_.end()) {
        if (count_ >= cap)
          throw budget_exceeded_error("group enumeration exceeded the element cap of " +
                                      std::to_string(cap));
        index_.emplace(std::move(key), static_cast<int>(count_));
        arena_.insert(arena_.end(), prod.begin(), prod.end());
        parent_.push_back(static_cast<int>(head));
        genof_.push_back(static_cast<int>(gi));
        ++count_;
      }
    }
    ++head;
  }
}

GroupElem GroupTable::element(size_t i) const {
  const size_t cell = static_cast<size_t>(dim_) * dim_;
  GroupElem g;
  g.dim = dim_;
  g.packed = true;
  g.pb.assign(arena_.begin() + i * cell, arena_.begin() + (i + 1) * cell);
  return g;
}

long long GroupTable::index_of(const GroupElem& g) const {
  auto it = index_.find(ctx_->fingerprint(g));
  return it == index_.end() ? -1 : it->second;
}

GroupElem GroupTable::generator_element(size_t gi) const { return genmats_.at(gi); }

std::vector<int> GroupTable::word_for(size_t i) const {
  std::vector<int> out;
  long long cur = static_cast<long long>(i);
  while (cur > 0) {
    out.push_back(genof_[cur]);
    cur = parent_[cur];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<size_t> GroupTable::center() const {
  // Commuting with every generator suffices.
  std::vector<GroupElem> gens = genmats_;
  return centralizer(gens);
}

std::vector<size_t> GroupTable::centralizer(const std::vector<GroupElem>& s) const {
  const size_t cell = static_cast<size_t>(dim_) * dim_;
  const FiniteRingOps* ops = finite_ops(&ctx_->ring());
  std::vector<size_t> out;
  std::vector<uint8_t> ab(cell), ba(cell);
  for (size_t i = 0; i < count_; ++i) {
    const uint8_t* g = arena_.data() + i * cell;
    bool ok = true;
    for (const GroupElem& e : s) {
      std::fill(ab.begin(), ab.end(), 0);
      std::fill(ba.begin(), ba.end(), 0);
      pmul_acc(ops, dim_, g, e.pb.data(), ab.data());
      pmul_acc(ops, dim_, e.pb.data(), g, ba.data());
      if (ab != ba) { ok = false; break; }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

const GroupTable* group_table(const GroupContext* ctx, size_t cap) {
  static std::mutex mu;
  static std::map<const GroupContext*, std::unique_ptr<GroupTable>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(ctx);
  if (it == cache.end()) {
    it = cache.emplace(ctx, std::make_unique<GroupTable>(ctx, cap)).first;
  }
  return it->second.get();
}

bool RelationReport::all_passed() const {
  for (const auto& r : rows)
    if (r.failures != 0) return false;
  return true;
}

RelationReport verify_relations(const GroupContext* ctx) {
  RelationReport rep;
  const RootSystem& rs = ctx->rs();
  const Ring& R = ctx->ring();

  {
    RelationReport::Row row{"R1", 0, 0, "x_a(t)x_a(u) = x_a(t+u), symbolic over Z[t,u]"};
    row.instances = rs.num_roots();
    try {
      verify_r1_symbolic(ctx->rep());
    } catch (const std::exception& e) {
      row.failures = row.instances;
      row.note += std::string(" [") + e.what() + "]";
    }
    rep.rows.push_back(row);
  }
  {
    RelationReport::Row row{"R2", 0, 0,
                            "commutator formula with integer coefficients, symbolic over Z[t,u]"};
    row.instances = static_cast<long long>(rs.num_roots()) * (rs.num_roots() - 1);
    try {
      verify_r2_symbolic(ctx->rep(), ctx->table());
    } catch (const std::exception& e) {
      row.failures = 1;
      row.note += std::string(" [") + e.what() + "]";
    }
    rep.rows.push_back(row);
  }

  if (!R.finite()) {
    RelationReport::Row row{"R3-R6", 0, 0, "skipped: unit-parameter sweeps need a finite ring"};
    rep.rows.push_back(row);
    return rep;
  }

  const auto units = R.units();
  const auto all = R.enumerate();
  const RElem one = R.one();

  {
    // R3: w_a := w_a(1); companion identities w_a(t)w_a(-t) = e and
    // w_a(t) = w_{-a}(-t^-1) pin the section of N over W.
    RelationReport::Row row{"R3", 0, 0, "w_a(t)w_a(-t) = e and w_a(t) = w_{-a}(-1/t)"};
    for (int a = 0; a < rs.num_roots(); ++a) {
      for (const RElem& t : units) {
        ++row.instances;
        const GroupElem wa = ctx->w(a, t);
        if (!ctx->is_identity(ctx->mul(wa, ctx->w(a, R.neg(t))))) ++row.failures;
        if (wa != ctx->w(rs.negate(a), R.neg(R.inv(t)))) ++row.failures;
      }
    }
    rep.rows.push_back(row);
  }
  {
    RelationReport::Row row{"R4", 0, 0, "w_a h_b(t) w_a^-1 = h_{w_a(b)}(t)"};
    for (int a = 0; a < rs.num_roots(); ++a) {
      const GroupElem wa = ctx->w(a, one);
      const GroupElem wai = ctx->w(a, R.neg(one));
      for (int b = 0; b < rs.num_roots(); ++b) {
        const int wb = rs.reflect(b, a);
        for (const RElem& t : units) {
          ++row.instances;
          const GroupElem lhs = ctx->mul(ctx->mul(wa, ctx->h(b, t)), wai);
          if (lhs != ctx->h(wb, t)) ++row.failures;
        }
      }
    }
    rep.rows.push_back(row);
  }
  {
    RelationReport::Row row{"R5", 0, 0, "w_a x_b(t) w_a^-1 = x_{w_a(b)}(ct), c = +-1"};
    bool signs_ok = true;
    for (int a = 0; a < rs.num_roots(); ++a) {
      const GroupElem wa = ctx->w(a, one);
      const GroupElem wai = ctx->w(a, R.neg(one));
      for (int b = 0; b < rs.num_roots(); ++b) {
        const int wb = rs.reflect(b, a);
        // Extract the sign from t = 1, then confirm it for every t.
        const GroupElem probe = ctx->mul(ctx->mul(wa, ctx->x(b, one)), wai);
        int c = 0;
        if (probe == ctx->x(wb, one)) c = 1;
        else if (probe == ctx->x(wb, R.neg(one))) c = -1;
        if (c == 0) {
          signs_ok = false;
          row.failures += static_cast<long long>(all.size());
          row.instances += static_cast<long long>(all.size());
          continue;
        }
        for (const RElem& t : all) {
          ++row.instances;
          const GroupElem lhs = ctx->mul(ctx->mul(wa, ctx->x(b, t)), wai);
          const RElem ct = (c == 1) ? t : R.neg(t);
          if (lhs != ctx->x(wb, ct)) ++row.failures;
        }
      }
    }
    if (!signs_ok) row.note += " [sign extraction failed on some pair]";
    rep.rows.push_back(row);
  }
  {
    RelationReport::Row row{"R6", 0, 0, "h_a(t) x_b(u) h_a(t)^-1 = x_b(t^<b,a> u)"};
    for (int a = 0; a < rs.num_roots(); ++a) {
      for (const RElem& t : units) {
        const GroupElem ha = ctx->h(a, t);
        const GroupElem hai = ctx->h(a, R.inv(t));
        for (int b = 0; b < rs.num_roots(); ++b) {
          const RElem scale = R.pow_int(t, rs.pairing(b, a));
          for (const RElem& u : all) {
            ++row.instances;
            const GroupElem lhs = ctx->mul(ctx->mul(ha, ctx->x(b, u)), hai);
            if (lhs != ctx->x(b, R.mul(scale, u))) ++row.failures;
          }
        }
      }
    }
    rep.rows.push_back(row);
  }
  {
    // Torus character action: for h = h_g1(u1) h_g2(u2) over simple g1, g2,
    // h x_b(s) h^-1 = x_b(chi(b) s) with chi(b) = u1^<b,g1> u2^<b,g2>.
    RelationReport::Row row{"torus-character", 0, 0,
                            "h(chi) x_b(s) h(chi)^-1 = x_b(chi(b) s) for products of two h's"};
    std::vector<int> simples;
    for (int a = 0; a < rs.num_positive(); ++a)
      if (rs.height(a) == 1) simples.push_back(a);
    for (int g1 : simples) {
      for (int g2 : simples) {
        for (const RElem& u1 : units) {
          for (const RElem& u2 : units) {
            const GroupElem hh = ctx->mul(ctx->h(g1, u1), ctx->h(g2, u2));
            const GroupElem hhi = ctx->mul(ctx->h(g2, R.inv(u2)), ctx->h(g1, R.inv(u1)));
            for (int b = 0; b < rs.num_roots(); ++b) {
              const RElem chi = R.mul(R.pow_int(u1, rs.pairing(b, g1)),
                                      R.pow_int(u2, rs.pairing(b, g2)));
              for (const RElem& s : all) {
                ++row.instances;
                const GroupElem lhs = ctx->mul(ctx->mul(hh, ctx->x(b, s)), hhi);
                if (lhs != ctx->x(b, R.mul(chi, s))) ++row.failures;
              }
            }
          }
        }
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace chevdioph

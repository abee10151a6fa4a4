#include "chevdioph/reduce.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace chevdioph {

// ---------------------------------------------------------------------------
// Straight-line circuits

namespace {

bool op_is_imm(const CircOp& o, long long v) { return o.kind == CircOp::Imm && o.imm == v; }

CircOp emit_add(std::vector<CircGate>& gates, const CircOp& a, const CircOp& b) {
  if (op_is_imm(a, 0)) return b;
  if (op_is_imm(b, 0)) return a;
  if (a.kind == CircOp::Imm && b.kind == CircOp::Imm) return CircOp::immediate(a.imm + b.imm);
  gates.push_back({'+', a, b});
  return CircOp::gate(static_cast<int>(gates.size()) - 1);
}

CircOp emit_mul(std::vector<CircGate>& gates, const CircOp& a, const CircOp& b) {
  if (op_is_imm(a, 0) || op_is_imm(b, 0)) return CircOp::immediate(0);
  if (op_is_imm(a, 1)) return b;
  if (op_is_imm(b, 1)) return a;
  if (a.kind == CircOp::Imm && b.kind == CircOp::Imm) return CircOp::immediate(a.imm * b.imm);
  gates.push_back({'*', a, b});
  return CircOp::gate(static_cast<int>(gates.size()) - 1);
}

// Lowest variable index with a positive exponent; -1 for a constant.
int lowest_var(const Poly& p) {
  for (size_t v = 0; v < p.nvars(); ++v)
    for (const auto& t : p.terms())
      if (t.exps[v] > 0) return static_cast<int>(v);
  return -1;
}

// Coefficient polynomials of the powers of variable v.
std::vector<Poly> coeffs_in_var(const Poly& p, size_t v) {
  uint32_t d = 0;
  for (const auto& t : p.terms()) d = std::max(d, t.exps[v]);
  std::vector<Poly> cs(static_cast<size_t>(d) + 1, Poly(p.nvars()));
  for (const auto& t : p.terms()) {
    auto e = t.exps;
    uint32_t k = e[v];
    e[v] = 0;
    cs[k].add_term(e, t.coeff);
  }
  return cs;
}

CircOp horner(const Poly& p, std::vector<CircGate>& gates) {
  int v = lowest_var(p);
  if (v < 0) return CircOp::immediate(p.is_zero() ? 0 : p.constant_value());
  auto cs = coeffs_in_var(p, static_cast<size_t>(v));
  CircOp acc = horner(cs.back(), gates);
  for (int k = static_cast<int>(cs.size()) - 2; k >= 0; --k) {
    acc = emit_mul(gates, acc, CircOp::input(v));
    if (!cs[static_cast<size_t>(k)].is_zero())
      acc = emit_add(gates, acc, horner(cs[static_cast<size_t>(k)], gates));
  }
  return acc;
}

}  // namespace

Circuit polynomial_to_circuit(const Poly& p, const std::vector<std::string>& inputs) {
  if (p.nvars() != inputs.size())
    throw std::invalid_argument("circuit: input list does not match the polynomial");
  Circuit c;
  c.inputs = inputs;
  CircOp out = horner(p, c.gates);
  if (out.kind == CircOp::Imm) {  // constant polynomial: one const gate
    c.gates.push_back({'k', out, CircOp::immediate(0)});
    out = CircOp::gate(static_cast<int>(c.gates.size()) - 1);
  }
  c.output = out;
  return c;
}

RElem eval_circuit(const Circuit& c, const Ring& R, const std::vector<RElem>& inputs) {
  if (inputs.size() != c.inputs.size())
    throw std::invalid_argument("circuit: wrong number of inputs");
  std::vector<RElem> g;
  g.reserve(c.gates.size());
  auto val = [&](const CircOp& o) -> RElem {
    switch (o.kind) {
      case CircOp::Input: return inputs.at(static_cast<size_t>(o.idx));
      case CircOp::Gate: return g.at(static_cast<size_t>(o.idx));
      default: return R.from_int(o.imm);
    }
  };
  for (const auto& gt : c.gates) {
    if (gt.kind == 'k') g.push_back(val(gt.a));
    else if (gt.kind == '+') g.push_back(R.add(val(gt.a), val(gt.b)));
    else g.push_back(R.mul(val(gt.a), val(gt.b)));
  }
  return val(c.output);
}

// ---------------------------------------------------------------------------
// Ring system -> group system

namespace {

RElem signed_val(const Ring& R, int sgn, const RElem& a) { return sgn < 0 ? R.neg(a) : a; }

// The constant word representing phi(c) on the carrier.
GWord phi_word(const GroupContext* ctx, const InterpretedRing& ir, const RElem& c) {
  const Ring& R = ctx->ring();
  GWord w = GWord::atom('x', ir.g, signed_val(R, static_cast<int>(ir.phiSign), c));
  if (ir.caseId == 4) w *= GWord::atom('x', ir.L2, c);
  return w;
}

}  // namespace

ReductionOutput compile_ring_to_group(const RingSystem& rsys, const GroupContext* ctx) {
  const Ring& R = ctx->ring();
  if (ring_parse_spec(rsys.ringSpec) != &R)
    throw std::invalid_argument("compile: the system's ring differs from the context's ring");

  EDefineTarget carrier = default_carrier(ctx);
  InterpretedRing ir = interpreted_ring_ops(ctx, carrier);
  PPFormula block = e_define_subgroup(ctx, carrier);

  ReductionOutput out;
  GroupSystem gs;
  gs.system = std::string(1, ctx->rs().family()) + std::to_string(ctx->rs().rank());
  gs.rep = rep_name(ctx->rep().kind());
  gs.ringSpec = R.spec_string();

  int wc = 0;
  auto fresh = [&wc]() { return "w" + std::to_string(wc++); };
  auto declare = [&gs](const std::string& name) { gs.vars.push_back(name); };

  // Inline the carrier membership formula with its free variable renamed
  // to `name` and fresh existential witnesses.
  auto member_block = [&](const std::string& name) {
    std::map<std::string, std::string> ren;
    ren[block.freeVars.at(0)] = name;
    for (const auto& ev : block.existVars) ren[ev] = fresh();
    PPFormula f = pp_rename(block, ren);
    for (const auto& ev : f.existVars) declare(ev);
    for (const auto& eq : f.equations) gs.equations.push_back(eq);
  };

  // Commutation conjuncts binding `name` into the centralizer of the
  // commutation set of root a.
  auto conj_block = [&](const std::string& name, int a) {
    for (int m : gamma_set(ctx, a).members)
      gs.equations.push_back(
          GWord::commutator(GWord::var(name), GWord::atom('x', m, R.one())));
  };

  // Defining pin: target^-1 * rhs * junk... = 1.
  auto pin = [&](const std::string& target, const GWord& rhs,
                 const std::vector<std::string>& junk = {}) {
    GWord w = GWord::var(target, true);
    w *= rhs;
    for (const auto& j : junk) w *= GWord::var(j);
    gs.equations.push_back(w);
  };

  auto unit_x = [&](int root) { return GWord::atom('x', root, R.one()); };

  for (const auto& xi : rsys.vars) {
    std::string v = "v_" + xi;
    declare(v);
    member_block(v);
    out.provenance[xi] = {v};
  }

  int tc = 0;
  auto gate_name = [&tc]() { return "t" + std::to_string(tc++); };
  auto const_pin = [&](const std::string& vg, long long imm) {
    pin(vg, phi_word(ctx, ir, R.from_int(imm)));
  };

  // Multiplication gate vg = va (x) vb, mirroring the interpreted ring's
  // witness-search semantics case by case.
  auto otimes_gate = [&](const std::string& vg, const std::string& va, const std::string& vb) {
    switch (ir.caseId) {
      case 1: {
        // [u1, x_q(1)] = va, [x_p(1), u2] = vb, vg = [u1, u2].
        std::string u1 = fresh();
        declare(u1);
        conj_block(u1, ir.p);
        std::string u2 = fresh();
        declare(u2);
        conj_block(u2, ir.q);
        pin(va, GWord::commutator(GWord::var(u1), unit_x(ir.q)));
        pin(vb, GWord::commutator(unit_x(ir.p), GWord::var(u2)));
        pin(vg, GWord::commutator(GWord::var(u1), GWord::var(u2)));
        break;
      }
      case 2: {
        // Long lifts of both factors are matched modulo the three junk
        // subgroups, split through the inner long pair, and the final
        // chain commutator is matched back onto the carrier.
        auto mu_pin = [&](const std::string& target, const GWord& rhs) {
          std::string ja = fresh();
          declare(ja);
          conj_block(ja, ir.d3);
          std::string jb = fresh();
          declare(jb);
          conj_block(jb, ir.d2);
          std::string jc = fresh();
          declare(jc);
          conj_block(jc, ir.d1);
          pin(target, rhs, {ja, jb, jc});
        };
        std::string uA = fresh();
        declare(uA);
        conj_block(uA, ir.p);
        mu_pin(va, GWord::commutator(GWord::var(uA), unit_x(ir.q)));
        std::string uB = fresh();
        declare(uB);
        conj_block(uB, ir.p);
        mu_pin(vb, GWord::commutator(GWord::var(uB), unit_x(ir.q)));
        std::string u2 = fresh();
        declare(u2);
        conj_block(u2, ir.p2);
        pin(uA, GWord::commutator(GWord::var(u2), unit_x(ir.q2)));
        std::string u3 = fresh();
        declare(u3);
        conj_block(u3, ir.q2);
        pin(uB, GWord::commutator(unit_x(ir.p2), GWord::var(u3)));
        member_block(vg);
        mu_pin(vg, GWord::commutator(GWord::commutator(GWord::var(u2), GWord::var(u3)),
                                     unit_x(ir.q)));
        break;
      }
      case 3: {
        // Long lift of va modulo the tail subgroup, conjugated second
        // factor, and the result matched back onto the carrier.
        std::string u1 = fresh();
        declare(u1);
        conj_block(u1, ir.p);
        std::string j1 = fresh();
        declare(j1);
        conj_block(j1, ir.d);
        pin(va, GWord::commutator(GWord::var(u1), unit_x(ir.q)), {j1});
        member_block(vg);
        std::string j2 = fresh();
        declare(j2);
        conj_block(j2, ir.d);
        GWord conj = GWord::atom('w', ir.wroot, R.one());
        conj *= GWord::var(vb, ir.sigma < 0);
        conj *= GWord::atom('w', ir.wroot, R.one(), true);
        pin(vg, GWord::commutator(GWord::var(u1), conj), {j2});
        break;
      }
      case 4: {
        // Diagonal carrier: exact long lift of va, conjugated second
        // factor, and the product pinned by commutation against the
        // companion root's commutation set.
        std::string u1 = fresh();
        declare(u1);
        conj_block(u1, ir.L1);
        pin(va, GWord::commutator(GWord::var(u1), GWord::atom('x', ir.q, ir.u0)));
        member_block(vg);
        GWord conj = GWord::atom('w', ir.L1, R.one());
        conj *= GWord::var(vb, ir.sigmaP < 0);
        conj *= GWord::atom('w', ir.L1, R.one(), true);
        GWord lhs = GWord::commutator(GWord::var(u1), conj).inversed();
        lhs *= GWord::var(vg);
        for (int m : gamma_set(ctx, ir.L2).members)
          gs.equations.push_back(GWord::commutator(lhs, GWord::atom('x', m, R.one())));
        break;
      }
      default:
        throw case_unavailable_error("no multiplication encoding in this context");
    }
  };

  const Ring* PZ = ring_polyz(rsys.vars);
  for (const auto& poly : rsys.polys) {
    Circuit c = polynomial_to_circuit(poly, rsys.vars);
    {  // symbolic audit: the circuit reproduces the polynomial exactly
      std::vector<RElem> ins;
      for (size_t i = 0; i < rsys.vars.size(); ++i) ins.push_back(PZ->var(i));
      if (!(eval_circuit(c, *PZ, ins) == PZ->from_poly(poly)))
        throw std::logic_error("compile: circuit does not reproduce the source polynomial");
    }
    std::vector<std::string> gateVar(c.gates.size());
    auto opvar = [&](const CircOp& o) -> std::string {
      if (o.kind == CircOp::Input) return "v_" + rsys.vars.at(static_cast<size_t>(o.idx));
      if (o.kind == CircOp::Gate) return gateVar.at(static_cast<size_t>(o.idx));
      std::string v = gate_name();
      declare(v);
      const_pin(v, o.imm);
      return v;
    };
    for (size_t gi = 0; gi < c.gates.size(); ++gi) {
      const CircGate& gt = c.gates[gi];
      if (gt.kind == 'k') {
        std::string vg = gate_name();
        declare(vg);
        const_pin(vg, gt.a.imm);
        gateVar[gi] = vg;
        continue;
      }
      std::string va = opvar(gt.a);
      std::string vb = opvar(gt.b);
      std::string vg = gate_name();
      declare(vg);
      if (gt.kind == '+') {
        GWord w = GWord::var(vg, true);
        w *= GWord::var(va);
        w *= GWord::var(vb);
        gs.equations.push_back(w);
      } else {
        otimes_gate(vg, va, vb);
      }
      gateVar[gi] = vg;
    }
    std::string ov = (c.output.kind == CircOp::Input)
                         ? "v_" + rsys.vars.at(static_cast<size_t>(c.output.idx))
                         : gateVar.at(static_cast<size_t>(c.output.idx));
    gs.equations.push_back(GWord::var(ov));
  }

  std::set<std::string> seen;
  for (const auto& eq : gs.equations)
    for (const auto& s : eq.syms)
      if (!s.isVar) {
        WordAtom a = s.atom;
        a.inv = false;
        std::string p = ctx->print_word({a});
        if (seen.insert(p).second) out.constantLedger.push_back(p);
      }
  out.groupSystem = std::move(gs);
  return out;
}

// ---------------------------------------------------------------------------
// Group system -> ring system

namespace {

long long lift_int(const Ring& R, const RElem& e) {
  if (R.kind == RingKind::Integers) return e.raw_a();
  if (R.finite())
    for (long long k = 0; k < R.size(); ++k)
      if (R.from_int(k) == e) return k;
  throw std::invalid_argument(
      "group->ring: a constant entry lies outside the image of the integers");
}

using PMat = std::vector<Poly>;  // n*n, row-major

PMat pmat_identity(int n, size_t nv) {
  PMat I(static_cast<size_t>(n) * n, Poly(nv));
  for (int i = 0; i < n; ++i) I[static_cast<size_t>(i) * n + i] = Poly::constant(nv, 1);
  return I;
}

PMat pmat_mul(const PMat& A, const PMat& B, int n, size_t nv) {
  PMat C(static_cast<size_t>(n) * n, Poly(nv));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k < n; ++k) {
      const Poly& a = A[static_cast<size_t>(r) * n + k];
      if (a.is_zero()) continue;
      for (int c = 0; c < n; ++c) {
        const Poly& b = B[static_cast<size_t>(k) * n + c];
        if (b.is_zero()) continue;
        C[static_cast<size_t>(r) * n + c] = C[static_cast<size_t>(r) * n + c] + a * b;
      }
    }
  return C;
}

Poly pmat_det(const PMat& M, int n, size_t nv, std::vector<int> rows, std::vector<int> cols) {
  if (rows.size() == 1) return M[static_cast<size_t>(rows[0]) * n + cols[0]];
  Poly det(nv);
  int r = rows[0];
  std::vector<int> subRows(rows.begin() + 1, rows.end());
  for (size_t j = 0; j < cols.size(); ++j) {
    const Poly& pivot = M[static_cast<size_t>(r) * n + cols[j]];
    if (pivot.is_zero()) continue;
    std::vector<int> subCols;
    for (size_t k = 0; k < cols.size(); ++k)
      if (k != j) subCols.push_back(cols[k]);
    Poly minor = pmat_det(M, n, nv, subRows, subCols);
    Poly term = pivot * minor;
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// The invariant bilinear form preserved by the natural symplectic
// representation: antidiagonal, +1 on the first l antidiagonal entries
// and -1 on the last l.
std::vector<long long> sp_form(int n) {
  std::vector<long long> Q(static_cast<size_t>(n) * n, 0);
  for (int a = 0; a < n; ++a) Q[static_cast<size_t>(a) * n + (n - 1 - a)] = a < n / 2 ? 1 : -1;
  return Q;
}

// Bracket structure tensor c[i][j] -> coordinates of [b_i, b_j] on the
// adjoint basis (h_1..h_l, e_0..e_{2m-1}).
std::vector<std::vector<std::vector<long long>>> bracket_tensor(const GroupContext* ctx) {
  const RootSystem& rs = ctx->rs();
  int l = rs.rank();
  int nr = rs.num_roots();
  int d = l + nr;
  std::vector<std::vector<std::vector<long long>>> c(
      static_cast<size_t>(d),
      std::vector<std::vector<long long>>(static_cast<size_t>(d),
                                          std::vector<long long>(static_cast<size_t>(d), 0)));
  for (int i = 0; i < l; ++i)
    for (int r = 0; r < nr; ++r)
      c[static_cast<size_t>(i)][static_cast<size_t>(l + r)][static_cast<size_t>(l + r)] =
          rs.pairing(r, rs.simple_root(i));
  for (int r = 0; r < nr; ++r) {
    MatZ A = ctx->basis().ad_e(r);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        c[static_cast<size_t>(l + r)][static_cast<size_t>(j)][static_cast<size_t>(k)] = A.at(k, j);
  }
  return c;
}

std::string claim_name(std::set<std::string>& used, std::string s) {
  while (used.count(s)) s = "x" + s;
  used.insert(s);
  return s;
}

}  // namespace

ReductionOutput compile_group_to_ring(const GroupSystem& gsys) {
  const GroupContext* ctx = gsys.context();
  const Ring& R = ctx->ring();
  int n = ctx->dim();

  ReductionOutput out;
  RingSystem rt;
  rt.ringSpec = gsys.ringSpec;

  std::set<std::string> used;
  std::map<std::string, std::vector<std::string>> ent, inv;
  for (const auto& v : gsys.vars) {
    auto& E = ent[v];
    E.resize(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        E[static_cast<size_t>(r) * n + c] =
            claim_name(used, v + "_" + std::to_string(r + 1) + "_" + std::to_string(c + 1));
        rt.vars.push_back(E[static_cast<size_t>(r) * n + c]);
      }
    auto& I = inv[v];
    I.resize(static_cast<size_t>(n) * n);
    for (int c = 0; c < n; ++c)  // companions declared column-major
      for (int r = 0; r < n; ++r) {
        I[static_cast<size_t>(r) * n + c] = claim_name(
            used, v + "_inv_" + std::to_string(r + 1) + "_" + std::to_string(c + 1));
        rt.vars.push_back(I[static_cast<size_t>(r) * n + c]);
      }
    out.provenance[v] = E;
  }
  const size_t NV = rt.vars.size();
  std::map<std::string, size_t> vidx;
  for (size_t i = 0; i < NV; ++i) vidx[rt.vars[i]] = i;
  auto matOf = [&](const std::vector<std::string>& names) {
    PMat M;
    M.reserve(names.size());
    for (const auto& nm : names) M.push_back(Poly::variable(NV, vidx.at(nm)));
    return M;
  };

  std::set<std::string> seenC;
  auto notice = [&](long long k) {
    std::string s = std::to_string(k);
    if (seenC.insert(s).second) out.constantLedger.push_back(s);
  };

  // Per-variable scheme and inverse equations.
  for (const auto& v : gsys.vars) {
    PMat V = matOf(ent[v]);
    switch (ctx->rep().kind()) {
      case RepKind::NaturalSL: {
        std::vector<int> idx(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
        rt.polys.push_back(pmat_det(V, n, NV, idx, idx) - Poly::constant(NV, 1));
        break;
      }
      case RepKind::NaturalSp: {
        auto Q = sp_form(n);
        // (V Q V^T - Q)_{rc}: all n*n entries of the matrix identity.
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) {
            Poly p(NV);
            for (int a = 0; a < n; ++a) {
              long long q = Q[static_cast<size_t>(a) * n + (n - 1 - a)];
              p = p + (V[static_cast<size_t>(r) * n + a] *
                       V[static_cast<size_t>(c) * n + (n - 1 - a)])
                          .scaled(q);
            }
            p = p - Poly::constant(NV, Q[static_cast<size_t>(r) * n + c]);
            rt.polys.push_back(p);
          }
        break;
      }
      case RepKind::Adjoint: {
        auto ct = bracket_tensor(ctx);
        int d = n;
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j)
            for (int m = 0; m < d; ++m) {
              Poly p(NV);
              for (int k = 0; k < d; ++k) {
                long long cc = ct[static_cast<size_t>(i)][static_cast<size_t>(j)]
                                 [static_cast<size_t>(k)];
                if (cc)
                  p = p + V[static_cast<size_t>(m) * n + k].scaled(cc);
              }
              for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) {
                  long long cc = ct[static_cast<size_t>(a)][static_cast<size_t>(b)]
                                   [static_cast<size_t>(m)];
                  if (cc)
                    p = p - (V[static_cast<size_t>(a) * n + i] *
                             V[static_cast<size_t>(b) * n + j])
                                .scaled(cc);
                }
              if (!p.is_zero()) rt.polys.push_back(p);
            }
        break;
      }
    }
    PMat W = matOf(inv[v]);
    PMat VW = pmat_mul(V, W, n, NV);
    for (int c = 0; c < n; ++c)  // column-major, matching companion declaration
      for (int r = 0; r < n; ++r)
        rt.polys.push_back(VW[static_cast<size_t>(r) * n + c] -
                           Poly::constant(NV, r == c ? 1 : 0));
  }

  // Word equations: entrywise polynomial identities of the matrix product.
  for (const auto& eq : gsys.equations) {
    PMat W = pmat_identity(n, NV);
    for (const auto& s : eq.syms) {
      if (s.isVar) {
        W = pmat_mul(W, matOf(s.vinv ? inv.at(s.var) : ent.at(s.var)), n, NV);
      } else {
        GroupElem g = ctx->eval_word({s.atom});
        PMat M(static_cast<size_t>(n) * n, Poly(NV));
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) {
            long long k = lift_int(R, ctx->entry(g, r, c));
            if (k) notice(k);
            M[static_cast<size_t>(r) * n + c] = Poly::constant(NV, k);
          }
        W = pmat_mul(W, M, n, NV);
      }
    }
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        rt.polys.push_back(W[static_cast<size_t>(r) * n + c] -
                           Poly::constant(NV, r == c ? 1 : 0));
  }

  out.ringSystem = std::move(rt);
  return out;
}

BoundedElemSubstitution encode_bounded_elementary(const std::string& var, int L,
                                                  const GroupContext* ctx) {
  if (L < 1) throw std::invalid_argument("bounded elementary encoding needs L >= 1");
  BoundedElemSubstitution s;
  s.var = var;
  s.L = L;
  const RootSystem& rs = ctx->rs();
  int k = 0;
  for (int sweep = 0; sweep < L; ++sweep)
    for (int r = 0; r < rs.num_roots(); ++r) {
      s.rootSeq.push_back(r);
      s.params.push_back(var + "_t" + std::to_string(k++));
    }
  return s;
}

ReductionOutput compile_group_to_ring_bounded(const GroupSystem& gsys, int L) {
  const GroupContext* ctx = gsys.context();
  const Ring& R = ctx->ring();
  int n = ctx->dim();

  ReductionOutput out;
  out.boundedL = L;
  RingSystem rt;
  rt.ringSpec = gsys.ringSpec;

  std::set<std::string> used;
  std::map<std::string, BoundedElemSubstitution> subst;
  for (const auto& v : gsys.vars) {
    auto s = encode_bounded_elementary(v, L, ctx);
    for (auto& p : s.params) {
      p = claim_name(used, p);
      rt.vars.push_back(p);
    }
    out.provenance[v] = s.params;
    subst[v] = std::move(s);
  }
  const size_t NV = rt.vars.size();
  std::map<std::string, size_t> vidx;
  for (size_t i = 0; i < NV; ++i) vidx[rt.vars[i]] = i;

  const Ring* PZ = ring_polyz(rt.vars);
  const GroupContext* ctxZ = GroupContext::get(&ctx->rs(), ctx->rep().kind(), PZ);

  auto pmat_of_elem = [&](const GroupContext* c2, const GroupElem& g) {
    PMat M(static_cast<size_t>(n) * n, Poly(NV));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        M[static_cast<size_t>(r) * n + c] = c2->entry(g, r, c).raw_poly();
    return M;
  };

  std::set<std::string> seenC;
  auto notice = [&](long long k) {
    std::string s = std::to_string(k);
    if (seenC.insert(s).second) out.constantLedger.push_back(s);
  };

  for (const auto& eq : gsys.equations) {
    PMat W = pmat_identity(n, NV);
    for (const auto& s : eq.syms) {
      if (s.isVar) {
        const auto& sub = subst.at(s.var);
        size_t m = sub.params.size();
        for (size_t k = 0; k < m; ++k) {
          size_t kk = s.vinv ? m - 1 - k : k;  // inverse: reversed, negated
          RElem t = PZ->var(vidx.at(sub.params[kk]));
          if (s.vinv) t = PZ->neg(t);
          W = pmat_mul(W, pmat_of_elem(ctxZ, ctxZ->x(sub.rootSeq[kk], t)), n, NV);
        }
      } else {
        GroupElem g = ctx->eval_word({s.atom});
        PMat M(static_cast<size_t>(n) * n, Poly(NV));
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) {
            long long k = lift_int(R, ctx->entry(g, r, c));
            if (k) notice(k);
            M[static_cast<size_t>(r) * n + c] = Poly::constant(NV, k);
          }
        W = pmat_mul(W, M, n, NV);
      }
    }
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        rt.polys.push_back(W[static_cast<size_t>(r) * n + c] -
                           Poly::constant(NV, r == c ? 1 : 0));
  }

  out.ringSystem = std::move(rt);
  return out;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

std::vector<int> poly_vars(const Poly& p) {
  std::vector<int> out;
  for (size_t v = 0; v < p.nvars(); ++v)
    for (const auto& t : p.terms())
      if (t.exps[v] > 0) {
        out.push_back(static_cast<int>(v));
        break;
      }
  return out;
}

}  // namespace

RingSolution solve_ring_system(const RingSystem& rsys, const SolveBudget& budget,
                               bool countAll) {
  const Ring* R = rsys.ring();
  if (!R->finite()) throw std::invalid_argument("solver: the ring must be finite");
  const size_t n = rsys.vars.size();
  const long long sz = R->size();

  RingSolution res;
  res.count = countAll ? 0 : -1;

  std::vector<std::vector<const Poly*>> unary(n), checks(n);
  std::vector<RElem> vals(n, R->zero());
  for (const auto& p : rsys.polys) {
    auto vs = poly_vars(p);
    if (vs.empty()) {
      if (!R->is_zero(eval_poly(*R, p, vals))) return res;  // constant contradiction
      continue;
    }
    (vs.size() == 1 ? unary : checks)[static_cast<size_t>(vs.back())].push_back(&p);
  }

  std::vector<std::vector<RElem>> cand(n);
  for (size_t v = 0; v < n; ++v) {
    for (long long i = 0; i < sz; ++i) {
      RElem x = R->from_index(i);
      vals[v] = x;
      bool ok = true;
      for (const auto* p : unary[v])
        if (!R->is_zero(eval_poly(*R, *p, vals))) {
          ok = false;
          break;
        }
      if (ok) cand[v].push_back(x);
    }
    vals[v] = R->zero();
    if (cand[v].empty()) return res;
  }

  size_t nodes = 0;
  std::function<bool(size_t)> dfs = [&](size_t v) -> bool {
    if (v == n) {
      if (countAll) {
        ++res.count;
        if (!res.sat) {
          res.sat = true;
          for (size_t i = 0; i < n; ++i) res.witness[rsys.vars[i]] = vals[i];
        }
        return false;
      }
      res.sat = true;
      for (size_t i = 0; i < n; ++i) res.witness[rsys.vars[i]] = vals[i];
      return true;
    }
    for (const auto& x : cand[v]) {
      if (++nodes > budget.nodes) throw budget_exceeded_error("ring solver budget exceeded");
      vals[v] = x;
      bool ok = true;
      for (const auto* p : checks[v])
        if (!R->is_zero(eval_poly(*R, *p, vals))) {
          ok = false;
          break;
        }
      if (ok && dfs(v + 1)) return true;
    }
    return false;
  };
  dfs(0);
  return res;
}

GroupSolution solve_group_system(const GroupSystem& gsys, const SolveBudget& budget,
                                 bool countAll) {
  const GroupContext* ctx = gsys.context();
  const GroupTable* tab = group_table(ctx, budget.tableCap);
  const size_t n = gsys.vars.size();
  const size_t gcount = tab->size();

  std::map<std::string, size_t> vidx;
  for (size_t i = 0; i < n; ++i) vidx[gsys.vars[i]] = i;

  // Compiled equation: variables interleaved with folded constants.
  struct CSym {
    int var = -1;
    bool inv = false;
    bool isCst = false;
    GroupElem cst;
  };
  struct CEq {
    std::vector<CSym> syms;
    std::vector<size_t> vars;  // ascending, deduped
  };

  GroupSolution res;
  res.count = countAll ? 0 : -1;

  std::vector<std::vector<CEq>> unary(n), checks(n);
  for (const auto& eq : gsys.equations) {
    CEq ce;
    std::set<size_t> vs;
    for (const auto& s : eq.syms) {
      if (s.isVar) {
        auto it = vidx.find(s.var);
        if (it == vidx.end()) throw std::invalid_argument("solver: undeclared variable " + s.var);
        ce.syms.push_back({static_cast<int>(it->second), s.vinv, false, {}});
        vs.insert(it->second);
      } else {
        GroupElem m = ctx->eval_word({s.atom});
        if (!ce.syms.empty() && ce.syms.back().isCst)
          ce.syms.back().cst = ctx->mul(ce.syms.back().cst, m);
        else
          ce.syms.push_back({-1, false, true, std::move(m)});
      }
    }
    ce.vars.assign(vs.begin(), vs.end());
    if (ce.vars.empty()) {
      GroupElem acc = ctx->identity();
      for (const auto& cs : ce.syms) acc = ctx->mul(acc, cs.cst);
      if (!ctx->is_identity(acc)) return res;  // constant contradiction
      continue;
    }
    (ce.vars.size() == 1 ? unary : checks)[ce.vars.back()].push_back(std::move(ce));
  }

  std::vector<GroupElem> vals(n, ctx->identity()), invs(n, ctx->identity());
  auto eval_eq = [&](const CEq& ce) {
    GroupElem acc = ctx->identity();
    for (const auto& cs : ce.syms)
      acc = ctx->mul(acc, cs.isCst ? cs.cst
                                   : (cs.inv ? invs[static_cast<size_t>(cs.var)]
                                             : vals[static_cast<size_t>(cs.var)]));
    return acc;
  };

  // Candidate table indices per variable, filtered by its single-variable
  // equations; identical equation blocks share one scan.
  auto block_key = [&](const std::vector<CEq>& eqs) {
    std::string key;
    for (const auto& ce : eqs) {
      for (const auto& cs : ce.syms)
        key += cs.isCst ? "C" + ctx->fingerprint(cs.cst) : (cs.inv ? "V-" : "V+");
      key += "|";
    }
    return key;
  };
  std::map<std::string, std::vector<long long>> scanCache;
  std::vector<const std::vector<long long>*> cand(n);
  for (size_t v = 0; v < n; ++v) {
    std::string key = block_key(unary[v]);
    auto it = scanCache.find(key);
    if (it == scanCache.end()) {
      std::vector<long long> list;
      for (size_t gi = 0; gi < gcount; ++gi) {
        vals[v] = tab->element(gi);
        invs[v] = ctx->inverse(vals[v]);
        bool ok = true;
        for (const auto& ce : unary[v])
          if (!ctx->is_identity(eval_eq(ce))) {
            ok = false;
            break;
          }
        if (ok) list.push_back(static_cast<long long>(gi));
      }
      it = scanCache.emplace(std::move(key), std::move(list)).first;
    }
    cand[v] = &it->second;
    if (cand[v]->empty()) return res;
  }

  size_t nodes = 0;
  std::function<bool(size_t)> dfs = [&](size_t v) -> bool {
    if (v == n) {
      if (countAll) {
        ++res.count;
        if (!res.sat) {
          res.sat = true;
          for (size_t i = 0; i < n; ++i) res.witness[gsys.vars[i]] = vals[i];
        }
        return false;
      }
      res.sat = true;
      for (size_t i = 0; i < n; ++i) res.witness[gsys.vars[i]] = vals[i];
      return true;
    }
    for (long long gi : *cand[v]) {
      if (++nodes > budget.nodes) throw budget_exceeded_error("group solver budget exceeded");
      vals[v] = tab->element(static_cast<size_t>(gi));
      invs[v] = ctx->inverse(vals[v]);
      bool ok = true;
      for (const auto& ce : checks[v])
        if (!ctx->is_identity(eval_eq(ce))) {
          ok = false;
          break;
        }
      if (ok && dfs(v + 1)) return true;
    }
    return false;
  };
  dfs(0);
  return res;
}

// ---------------------------------------------------------------------------
// Equisolvability

bool EquisolvReport::all_passed() const {
  for (const auto& r : rows)
    if (!r.agree || (r.targetSat && !r.pullbackOk)) return false;
  return true;
}

EquisolvReport verify_equisolvability(const std::vector<ReductionPair>& pairs,
                                      const SolveBudget& budget) {
  EquisolvReport rep;
  for (const auto& pr : pairs) {
    EquisolvReport::Row row;
    row.name = pr.name;
    if (pr.ringSource && pr.compiled.groupSystem) {
      RingSolution src = solve_ring_system(*pr.ringSource, budget);
      GroupSolution tgt = solve_group_system(*pr.compiled.groupSystem, budget);
      row.sourceSat = src.sat;
      row.targetSat = tgt.sat;
      row.agree = src.sat == tgt.sat;
      if (tgt.sat) {
        const GroupContext* ctx = pr.compiled.groupSystem->context();
        const Ring& R = ctx->ring();
        InterpretedRing ir = interpreted_ring_ops(ctx, default_carrier(ctx));
        std::vector<RElem> vals;
        std::string pulled;
        for (const auto& xi : pr.ringSource->vars) {
          RElem v = ir.read(tgt.witness.at(pr.compiled.provenance.at(xi).at(0)));
          if (!pulled.empty()) pulled += ", ";
          pulled += xi + "=" + R.to_string(v);
          vals.push_back(v);
        }
        row.pullbackOk = true;
        for (const auto& p : pr.ringSource->polys)
          if (!R.is_zero(eval_poly(R, p, vals))) row.pullbackOk = false;
        row.note = "pulled back " + pulled;
      }
    } else if (pr.groupSource && pr.compiled.ringSystem) {
      GroupSolution src = solve_group_system(*pr.groupSource, budget);
      RingSolution tgt = solve_ring_system(*pr.compiled.ringSystem, budget);
      row.sourceSat = src.sat;
      row.targetSat = tgt.sat;
      row.agree = src.sat == tgt.sat;
      if (tgt.sat) {
        const GroupContext* ctx = pr.groupSource->context();
        std::map<std::string, GroupElem> w;
        for (const auto& v : pr.groupSource->vars) {
          const auto& tvs = pr.compiled.provenance.at(v);
          if (pr.compiled.boundedL > 0) {
            auto sub = encode_bounded_elementary(v, pr.compiled.boundedL, ctx);
            GroupElem g = ctx->identity();
            for (size_t k = 0; k < tvs.size(); ++k)
              g = ctx->mul(g, ctx->x(sub.rootSeq.at(k), tgt.witness.at(tvs[k])));
            w[v] = g;
          } else {
            std::vector<RElem> entries;
            for (const auto& nm : tvs) entries.push_back(tgt.witness.at(nm));
            w[v] = ctx->from_entries(entries);
          }
        }
        row.pullbackOk = true;
        for (const auto& eq : pr.groupSource->equations)
          if (!ctx->is_identity(eval_gword(ctx, eq, w))) row.pullbackOk = false;
        row.note = "pulled back group witness";
      }
    } else {
      row.agree = false;
      row.note = "pair lacks a source/target combination";
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string ReductionOutput::target_text() const {
  std::string s;
  if (groupSystem) s = print_group_system(*groupSystem);
  else if (ringSystem) s = print_ring_system(*ringSystem);
  for (const auto& [src, tvs] : provenance) {
    s += "# map " + src + " -> ";
    for (size_t i = 0; i < tvs.size(); ++i) {
      if (i) s += ",";
      s += tvs[i];
    }
    s += "\n";
  }
  if (boundedL > 0) s += "# bounded-elementary L=" + std::to_string(boundedL) + "\n";
  return s;
}

}  // namespace chevdioph

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chevdioph/eqn.hpp"
#include "chevdioph/reduce.hpp"
#include "doctest.h"

using namespace chevdioph;

namespace {

bool big_enabled() { return std::getenv("CHEVDIOPH_BIG") != nullptr; }

RingSystem ring_sys(const std::string& text) { return parse_ring_system(text); }
GroupSystem group_sys(const std::string& text) { return parse_group_system(text); }

// Rebuilds the group element a ring witness describes through the
// row-major entry variables of a matrix variable.
GroupElem pull_back_matrix(const GroupContext* ctx, const std::string& var,
                           const std::map<std::string, RElem>& witness) {
  int n = ctx->dim();
  std::vector<RElem> entries;
  for (int r = 1; r <= n; ++r)
    for (int c = 1; c <= n; ++c)
      entries.push_back(witness.at(var + "_" + std::to_string(r) + "_" +
                                   std::to_string(c)));
  return ctx->from_entries(entries);
}

}  // namespace

TEST_CASE("circuits: staged construction folds trivial operations") {
  const Ring* Z = ring_parse_spec("Z");

  // x^2 + x + 1 needs two multiplications shape-wise collapsed by the
  // staged form ((x + 1) * x + 1): one add-with-immediate, one product,
  // one more add-with-immediate.
  Poly x = Poly::variable(1, 0);
  Poly p = x * x + x + Poly::constant(1, 1);
  Circuit c = polynomial_to_circuit(p, {"x"});
  CHECK(c.inputs == std::vector<std::string>{"x"});
  CHECK(c.gates.size() == 3);

  // x*y + 2: one product and one add-with-immediate.
  Poly xy = Poly::variable(2, 0) * Poly::variable(2, 1) + Poly::constant(2, 2);
  Circuit c2 = polynomial_to_circuit(xy, {"x", "y"});
  CHECK(c2.gates.size() == 2);

  // A constant polynomial needs exactly one constant gate.
  Circuit c3 = polynomial_to_circuit(Poly::constant(1, 5), {"x"});
  CHECK(c3.gates.size() == 1);
  CHECK(c3.gates[0].kind == 'k');

  // A bare variable needs no gates at all: the output is the input wire.
  Circuit c4 = polynomial_to_circuit(Poly::variable(1, 0), {"x"});
  CHECK(c4.gates.empty());
  CHECK(c4.output.kind == CircOp::Input);

  (void)Z;
}

TEST_CASE("circuits: evaluation agrees with direct polynomial evaluation") {
  // Symbolic check: evaluating the circuit over the polynomial ring at the
  // variables themselves must reproduce the source polynomial exactly.
  std::vector<std::string> names{"x", "y"};
  const Ring* PZ = ring_polyz(names);
  std::vector<RElem> gens{PZ->var(0), PZ->var(1)};

  std::vector<Poly> samples;
  {
    Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
    samples.push_back(x * x * x - y * y + Poly::constant(2, 7));
    samples.push_back(x * y * y + x * y + x + Poly::constant(2, -3));
    samples.push_back(Poly::constant(2, 0));
    samples.push_back(y - x);
  }
  for (const Poly& p : samples) {
    Circuit c = polynomial_to_circuit(p, names);
    RElem symbolic = eval_circuit(c, *PZ, gens);
    CHECK(symbolic == eval_poly(*PZ, p, gens));
  }

  // Exhaustive check over a small modular ring.
  const Ring* Z4 = ring_parse_spec("Z/4");
  Poly q = Poly::variable(2, 0) * Poly::variable(2, 0) -
           Poly::variable(2, 1) + Poly::constant(2, 3);
  Circuit cq = polynomial_to_circuit(q, names);
  for (long long i = 0; i < 4; ++i)
    for (long long j = 0; j < 4; ++j) {
      std::vector<RElem> vals{Z4->from_int(i), Z4->from_int(j)};
      CHECK(eval_circuit(cq, *Z4, vals) == eval_poly(*Z4, q, vals));
    }
}

TEST_CASE("ring to group: quadratics over GF(3) transfer to the special linear group") {
  const GroupContext* ctx = GroupContext::get("A2", "sl", "GF(3)");

  std::vector<ReductionPair> pairs;
  {
    ReductionPair p;
    p.name = "x^2 = 1 over GF(3)";
    p.ringSource = ring_sys("ring GF(3); var x; eq x^2 = 1;");
    p.compiled = compile_ring_to_group(*p.ringSource, ctx);
    pairs.push_back(std::move(p));
  }
  {
    ReductionPair p;
    p.name = "x^2 = 2 over GF(3)";
    p.ringSource = ring_sys("ring GF(3); var x; eq x^2 = 2;");
    p.compiled = compile_ring_to_group(*p.ringSource, ctx);
    pairs.push_back(std::move(p));
  }

  EquisolvReport rep = verify_equisolvability(pairs);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].sourceSat);
  CHECK(rep.rows[0].targetSat);
  CHECK(rep.rows[0].pullbackOk);
  CHECK_FALSE(rep.rows[1].sourceSat);  // 2 is not a square mod 3
  CHECK_FALSE(rep.rows[1].targetSat);
  CHECK(rep.all_passed());
}

TEST_CASE("ring to group: irreducible quadratic splits over the quartic field") {
  // x^2 + x + 1 factors over GF(4) (its roots are the cube roots of unity
  // outside the prime field), so both sides must be solvable there.
  const GroupContext* ctx = GroupContext::get("A2", "sl", "GF(2^2;f=[1,1,1])");
  ReductionPair p;
  p.name = "x^2 + x + 1 = 0 over GF(4)";
  p.ringSource = ring_sys("ring GF(2^2;f=[1,1,1]); var x; eq x^2 + x + 1 = 0;");
  p.compiled = compile_ring_to_group(*p.ringSource, ctx);

  EquisolvReport rep = verify_equisolvability({p});
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].sourceSat);
  CHECK(rep.rows[0].targetSat);
  CHECK(rep.rows[0].pullbackOk);
  CHECK(rep.all_passed());
}

TEST_CASE("ring to group: symplectic context routes products through short roots") {
  const GroupContext* ctx = GroupContext::get("C2", "sp", "GF(3)");
  std::vector<ReductionPair> pairs;
  {
    ReductionPair p;
    p.name = "x^2 = 1 over GF(3), symplectic target";
    p.ringSource = ring_sys("ring GF(3); var x; eq x^2 = 1;");
    p.compiled = compile_ring_to_group(*p.ringSource, ctx);
    pairs.push_back(std::move(p));
  }
  {
    ReductionPair p;
    p.name = "x^2 = 2 over GF(3), symplectic target";
    p.ringSource = ring_sys("ring GF(3); var x; eq x^2 = 2;");
    p.compiled = compile_ring_to_group(*p.ringSource, ctx);
    pairs.push_back(std::move(p));
  }
  EquisolvReport rep = verify_equisolvability(pairs);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].agree);
  CHECK(rep.rows[0].sourceSat);
  CHECK(rep.rows[1].agree);
  CHECK_FALSE(rep.rows[1].sourceSat);
  CHECK(rep.all_passed());
}

TEST_CASE("ring to group: characteristic-two adjoint context uses the paired-root gadget") {
  const GroupContext* ctx = GroupContext::get("G2", "ad", "GF(2)");
  std::vector<ReductionPair> pairs;
  {
    ReductionPair p;
    p.name = "x*y = 1 over GF(2)";
    p.ringSource = ring_sys("ring GF(2); var x, y; eq x*y = 1;");
    p.compiled = compile_ring_to_group(*p.ringSource, ctx);
    pairs.push_back(std::move(p));
  }
  {
    ReductionPair p;
    p.name = "x^2 + x + 1 = 0 over GF(2)";
    p.ringSource = ring_sys("ring GF(2); var x; eq x^2 + x + 1 = 0;");
    p.compiled = compile_ring_to_group(*p.ringSource, ctx);
    pairs.push_back(std::move(p));
  }
  EquisolvReport rep = verify_equisolvability(pairs);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].sourceSat);
  CHECK(rep.rows[0].targetSat);
  CHECK(rep.rows[0].pullbackOk);
  CHECK_FALSE(rep.rows[1].sourceSat);  // no root of x^2+x+1 in GF(2)
  CHECK_FALSE(rep.rows[1].targetSat);
  CHECK(rep.all_passed());
}

TEST_CASE("ring to group: compilation is deterministic and linear in circuit size") {
  const GroupContext* sl = GroupContext::get("A2", "sl", "GF(3)");
  RingSystem rsys = ring_sys("ring GF(3); var x, y; eq x^2*y + y = 2; eq x + y = 1;");

  ReductionOutput a = compile_ring_to_group(rsys, sl);
  ReductionOutput b = compile_ring_to_group(rsys, sl);
  REQUIRE(a.groupSystem.has_value());
  CHECK(a.target_text() == b.target_text());
  CHECK(a.boundedL == 0);
  for (const auto& v : rsys.vars) {
    REQUIRE(a.provenance.count(v) == 1);
    CHECK_FALSE(a.provenance.at(v).empty());
  }

  // The non-local case over Z/4 compiles without enumerating the group and
  // stays within a fixed constant number of variables per circuit node.
  const GroupContext* spz4 = GroupContext::get("C2", "sp", "Z/4");
  RingSystem small = ring_sys("ring Z/4; var x; eq x^2 = 1;");
  ReductionOutput oz = compile_ring_to_group(small, spz4);
  REQUIRE(oz.groupSystem.has_value());
  Circuit c = polynomial_to_circuit(small.polys[0], small.vars);
  size_t units = small.vars.size() + c.gates.size();
  CHECK(oz.groupSystem->vars.size() <= 40 * units);

  // Doubling the circuit roughly doubles the target, never worse.
  RingSystem bigger = ring_sys("ring Z/4; var x; eq x^4 + x^2 = 1;");
  ReductionOutput oz2 = compile_ring_to_group(bigger, spz4);
  Circuit c2 = polynomial_to_circuit(bigger.polys[0], bigger.vars);
  size_t units2 = bigger.vars.size() + c2.gates.size();
  CHECK(oz2.groupSystem->vars.size() <= 40 * units2);
}

TEST_CASE("group to ring: special linear words become entry polynomials with a determinant pin") {
  GroupSystem gsys = group_sys("group A2 sl GF(2); var v; eq v*v = x(a1;1);");
  ReductionOutput out = compile_group_to_ring(gsys);
  REQUIRE(out.ringSystem.has_value());
  const RingSystem& rt = *out.ringSystem;

  // Nine entry variables plus nine companion-inverse variables.
  CHECK(rt.vars.size() == 18);
  // Nine inverse-product pins, one determinant equation, nine word entries.
  CHECK(rt.polys.size() == 19);
  // The determinant pin is the unique cubic: six signed permutation
  // monomials plus the constant normalizing the determinant to one.
  int cubics = 0;
  for (const auto& p : rt.polys)
    if (p.degree() == 3) {
      ++cubics;
      CHECK(p.terms().size() == 7);
    }
  CHECK(cubics == 1);
  // Provenance lists the row-major entry variables of v.
  REQUIRE(out.provenance.count("v") == 1);
  CHECK(out.provenance.at("v").size() == 9);
  CHECK(out.provenance.at("v")[0] == "v_1_1");
  CHECK(out.provenance.at("v")[1] == "v_1_2");

  // Transvections admit square roots in this group, so both sides are
  // solvable, and the witness pulls back to an actual square root.
  RingSolution rsol = solve_ring_system(rt);
  REQUIRE(rsol.sat);
  const GroupContext* ctx = gsys.context();
  GroupElem v = pull_back_matrix(ctx, "v", rsol.witness);
  GroupElem target = ctx->x(ctx->rs().parse_root("a1"), ctx->ring().one());
  CHECK(ctx->mul(v, v) == target);

  // Counting agrees with brute force over the full group: the companion
  // inverse entries are determined, so assignments biject with solutions.
  RingSolution rcount = solve_ring_system(rt, SolveBudget{}, true);
  GroupSolution gcount = solve_group_system(gsys, SolveBudget{}, true);
  long long brute = 0;
  const GroupTable* tab = group_table(ctx);
  for (size_t i = 0; i < tab->size(); ++i) {
    GroupElem g = tab->element(i);
    if (ctx->mul(g, g) == target) ++brute;
  }
  CHECK(gcount.count == brute);
  CHECK(rcount.count == brute);
}

TEST_CASE("group to ring: the symplectic form contributes one equation per matrix entry") {
  GroupSystem gsys = group_sys("group C2 sp GF(3); var v; eq v*v = 1;");
  ReductionOutput out = compile_group_to_ring(gsys);
  REQUIRE(out.ringSystem.has_value());
  const RingSystem& rt = *out.ringSystem;
  CHECK(rt.vars.size() == 32);
  // 16 inverse pins + 16 form-preservation entries + 16 word entries.
  CHECK(rt.polys.size() == 48);

  RingSolution sol = solve_ring_system(rt);
  REQUIRE(sol.sat);  // the identity is an involution
  const GroupContext* ctx = gsys.context();
  GroupElem v = pull_back_matrix(ctx, "v", sol.witness);
  CHECK(ctx->is_identity(ctx->mul(v, v)));
}

TEST_CASE("group to ring: a negative-identity square root transfers over GF(3)") {
  // h(a1;-1) is -1 on every natural basis vector in the rank-two
  // symplectic group, and w(a1;1) squares to it.
  GroupSystem gsys = group_sys("group C2 sp GF(3); var v; eq v*v = h([1,-1];-1);");
  const GroupContext* ctx = gsys.context();
  GroupElem minusI = ctx->eval_word(parse_group_word(ctx, "h([1,-1];-1)"));
  const Ring& R = ctx->ring();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(ctx->entry(minusI, r, c) ==
            (r == c ? R.from_int(-1) : R.zero()));

  ReductionOutput out = compile_group_to_ring(gsys);
  RingSolution sol = solve_ring_system(*out.ringSystem);
  REQUIRE(sol.sat);
  GroupElem v = pull_back_matrix(ctx, "v", sol.witness);
  CHECK(ctx->mul(v, v) == minusI);

  GroupSolution gs = solve_group_system(gsys);
  CHECK(gs.sat);
}

TEST_CASE("group to ring: transvection scaling by a non-square is undetectable by conjugation") {
  // Long-root transvections x(2e1; t) and x(2e1; 2t) lie in different
  // conjugacy classes over GF(3) because the parameter is only defined up
  // to squares; both routes must report unsolvable.
  GroupSystem gsys =
      group_sys("group C2 sp GF(3); var v; eq v*x([2,0];1)*v^-1 = x([2,0];2);");
  GroupSolution gsol = solve_group_system(gsys);
  CHECK_FALSE(gsol.sat);

  ReductionOutput out = compile_group_to_ring(gsys);
  RingSolution rsol = solve_ring_system(*out.ringSystem);
  CHECK_FALSE(rsol.sat);
}

TEST_CASE("group to ring: bounded elementary encodings enumerate root-letter parameters") {
  const GroupContext* sp = GroupContext::get("C2", "sp", "GF(3)");
  BoundedElemSubstitution s1 = encode_bounded_elementary("v", 1, sp);
  CHECK(s1.params.size() == 8);  // one sweep over all eight roots
  CHECK(s1.rootSeq.size() == 8);
  BoundedElemSubstitution s2 = encode_bounded_elementary("v", 2, sp);
  CHECK(s2.params.size() == 16);

  const GroupContext* sl = GroupContext::get("A2", "sl", "GF(2)");
  CHECK(encode_bounded_elementary("v", 1, sl).params.size() == 6);
  CHECK_THROWS_AS(encode_bounded_elementary("v", 0, sl), std::invalid_argument);
}

TEST_CASE("group to ring: bounded compilation finds covered witnesses") {
  GroupSystem gsys =
      group_sys("group A2 sl GF(2); var v; eq v*x(a1;1)*v^-1*x(a1;1)^-1 = 1;");
  ReductionOutput out = compile_group_to_ring_bounded(gsys, 1);
  REQUIRE(out.ringSystem.has_value());
  CHECK(out.boundedL == 1);
  CHECK(out.ringSystem->vars.size() == 6);
  CHECK(out.target_text().find("bounded-elementary L=1") != std::string::npos);

  RingSolution sol = solve_ring_system(*out.ringSystem);
  REQUIRE(sol.sat);

  // Rebuild the witness as a product of root letters and check it commutes.
  const GroupContext* ctx = gsys.context();
  BoundedElemSubstitution s = encode_bounded_elementary("v", 1, ctx);
  GroupElem v = ctx->identity();
  const auto& names = out.provenance.at("v");
  REQUIRE(names.size() == s.rootSeq.size());
  for (size_t i = 0; i < names.size(); ++i)
    v = ctx->mul(v, ctx->x(s.rootSeq[i], sol.witness.at(names[i])));
  GroupElem u = ctx->x(ctx->rs().parse_root("a1"), ctx->ring().one());
  CHECK(ctx->commutes(v, u));
}

TEST_CASE("group to ring: two elementary sweeps cover the rank-two symplectic group over GF(2)") {
  const GroupContext* ctx = GroupContext::get("C2", "sp", "GF(2)");
  BoundedElemSubstitution s = encode_bounded_elementary("v", 2, ctx);
  REQUIRE(s.rootSeq.size() == 16);

  // Precompute the nontrivial letter of each position, then enumerate all
  // 2^16 parameter assignments by prefix products.
  std::vector<GroupElem> letters;
  for (int r : s.rootSeq) letters.push_back(ctx->x(r, ctx->ring().one()));

  std::set<std::string> seen;
  std::vector<std::pair<size_t, GroupElem>> stack;
  stack.emplace_back(0, ctx->identity());
  while (!stack.empty()) {
    auto [depth, g] = stack.back();
    stack.pop_back();
    if (depth == s.rootSeq.size()) {
      seen.insert(ctx->fingerprint(g));
      continue;
    }
    stack.emplace_back(depth + 1, g);  // parameter zero: letter is trivial
    stack.emplace_back(depth + 1, ctx->mul(g, letters[depth]));
  }
  CHECK(seen.size() == 720);  // every element is a product of two sweeps
}

TEST_CASE("solvers: counts and witnesses match brute force over the group table") {
  GroupSystem gsys =
      group_sys("group A2 sl GF(2); var v; eq v*x(a1;1)*v^-1*x(a1;1)^-1 = 1;");
  const GroupContext* ctx = gsys.context();
  const GroupTable* tab = group_table(ctx);
  GroupElem u = ctx->x(ctx->rs().parse_root("a1"), ctx->ring().one());
  long long brute = 0;
  for (size_t i = 0; i < tab->size(); ++i)
    if (ctx->commutes(tab->element(i), u)) ++brute;
  // Centralizer of a transvection: block-unipotent part with matching
  // diagonal, eight elements over GF(2).
  CHECK(brute == 8);

  GroupSolution counted = solve_group_system(gsys, SolveBudget{}, true);
  CHECK(counted.count == brute);

  GroupSolution w1 = solve_group_system(gsys);
  GroupSolution w2 = solve_group_system(gsys);
  REQUIRE(w1.sat);
  REQUIRE(w2.sat);
  CHECK(w1.witness.at("v") == w2.witness.at("v"));  // deterministic witness

  // The empty system is trivially solvable with the empty assignment.
  RingSystem empty = ring_sys("ring GF(3);");
  RingSolution esol = solve_ring_system(empty);
  CHECK(esol.sat);
  CHECK(esol.witness.empty());
  RingSolution ecount = solve_ring_system(empty, SolveBudget{}, true);
  CHECK(ecount.count == 1);
}

TEST_CASE("solvers: the node budget aborts oversized searches") {
  GroupSystem gsys = group_sys("group A2 sl GF(2); var v; eq v*v = x(a1;1);");
  ReductionOutput out = compile_group_to_ring(gsys);
  SolveBudget tiny;
  tiny.nodes = 3;
  CHECK_THROWS_AS(solve_ring_system(*out.ringSystem, tiny), budget_exceeded_error);
}

TEST_CASE("verifier: dropping a compiled equation is reported as disagreement") {
  const GroupContext* ctx = GroupContext::get("A2", "sl", "GF(3)");
  ReductionPair p;
  p.name = "tampered x^2 = 2 over GF(3)";
  p.ringSource = ring_sys("ring GF(3); var x; eq x^2 = 2;");
  p.compiled = compile_ring_to_group(*p.ringSource, ctx);
  REQUIRE(p.compiled.groupSystem.has_value());
  REQUIRE_FALSE(p.compiled.groupSystem->equations.empty());
  // Drop the final output pin: the mutilated target accepts the trivial
  // assignment even though the source is unsolvable.
  p.compiled.groupSystem->equations.pop_back();

  EquisolvReport rep = verify_equisolvability({p});
  REQUIRE(rep.rows.size() == 1);
  CHECK_FALSE(rep.rows[0].agree);
  CHECK_FALSE(rep.all_passed());
  CHECK_FALSE(rep.rows[0].note.empty());
}

TEST_CASE("verifier: mixed batteries agree in both directions with pulled-back witnesses") {
  std::vector<ReductionPair> pairs;
  {
    ReductionPair p;
    p.name = "x + 1 = 0 over GF(2)";
    p.ringSource = ring_sys("ring GF(2); var x; eq x + 1 = 0;");
    p.compiled =
        compile_ring_to_group(*p.ringSource, GroupContext::get("A2", "sl", "GF(2)"));
    pairs.push_back(std::move(p));
  }
  {
    ReductionPair p;
    p.name = "square root of a transvection";
    p.groupSource = group_sys("group A2 sl GF(2); var v; eq v*v = x(a1;1);");
    p.compiled = compile_group_to_ring(*p.groupSource);
    pairs.push_back(std::move(p));
  }
  {
    ReductionPair p;
    p.name = "conjugating between scaled transvections";
    p.groupSource =
        group_sys("group C2 sp GF(3); var v; eq v*x([2,0];1)*v^-1 = x([2,0];2);");
    p.compiled = compile_group_to_ring(*p.groupSource);
    pairs.push_back(std::move(p));
  }
  EquisolvReport rep = verify_equisolvability(pairs);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CAPTURE(row.name);
    CHECK(row.agree);
    CHECK(row.pullbackOk);
  }
  CHECK(rep.rows[0].sourceSat);
  CHECK(rep.rows[1].sourceSat);
  CHECK_FALSE(rep.rows[2].sourceSat);
  CHECK(rep.all_passed());
}

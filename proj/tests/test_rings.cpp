#include "doctest.h"

#include <set>

#include "chevdioph/rings.hpp"

using namespace chevdioph;

TEST_CASE("modular rings: units, fields, canonical indexing") {
  const Ring* z6 = ring_parse_spec("Z/6");
  CHECK(z6->size() == 6);
  CHECK_FALSE(z6->is_field());
  CHECK(z6->units().size() == 2);
  CHECK_FALSE(z6->has_half());

  const Ring* z5 = ring_modn(5);
  CHECK(z5->is_field());
  CHECK(z5->has_half());
  RElem two = z5->from_int(2);
  CHECK(z5->to_string(z5->inv(two)) == "3");

  for (long long i = 0; i < z6->size(); ++i)
    CHECK(z6->index_of(z6->from_index(i)) == i);
  RElem bad = z6->from_int(2);
  CHECK_THROWS_AS(z6->inv(bad), not_a_unit_error);
}

TEST_CASE("galois fields use the canonical modulus and behave like fields") {
  const Ring* f4 = ring_gf(2, 2);
  CHECK(f4->size() == 4);
  CHECK(f4->is_field());
  CHECK(f4->spec_string() == "GF(2^2;f=[1,1,1])");  // x^2 + x + 1
  CHECK(ring_parse_spec("GF(4)") == f4);

  // Every nonzero element has an inverse; multiplicative group is cyclic
  // of order 3.
  for (const RElem& x : f4->units()) {
    CHECK(f4->is_one(f4->mul(x, f4->inv(x))));
    CHECK(f4->is_one(f4->pow_int(x, 3)));
  }

  const Ring* f9 = ring_parse_spec("GF(9)");
  CHECK(f9->size() == 9);
  CHECK(f9->spec_string() == "GF(3^2;f=[1,0,1])");  // x^2 + 1
  CHECK(f9->units().size() == 8);
  const Ring* f8 = ring_parse_spec("GF(2^3)");
  CHECK(f8->spec_string() == "GF(2^3;f=[1,1,0,1])");  // x^3 + x + 1

  // Explicit modulus other than the canonical one gives a distinct,
  // isomorphic presentation.
  const Ring* f9b = ring_parse_spec("GF(9;f=[2,1,1])");
  CHECK(f9b != f9);
  CHECK(f9b->size() == 9);
  CHECK(f9b->units().size() == 8);
}

TEST_CASE("infinite rings: integers, rationals, integer polynomials") {
  const Ring* z = ring_parse_spec("Z");
  CHECK_FALSE(z->finite());
  CHECK(z->is_unit(z->from_int(-1)));
  CHECK_FALSE(z->is_unit(z->from_int(2)));

  const Ring* q = ring_parse_spec("Q");
  RElem half = q->from_rational(1, 2);
  CHECK(q->is_one(q->add(half, half)));
  CHECK(q->to_string(q->inv(q->from_rational(-2, 3))) == "-3/2");

  const Ring* zp = ring_parse_spec("ZPoly[t,u]");
  RElem t = zp->var(0), u = zp->var(1);
  RElem w = zp->add(zp->mul(t, u), zp->from_int(1));
  CHECK(zp->to_string(w) == "t*u + 1");
  CHECK_FALSE(zp->is_unit(t));
}

TEST_CASE("ring literals parse and round-trip") {
  const Ring* z6 = ring_modn(6);
  CHECK(z6->to_string(z6->parse_literal("-1")) == "5");
  const Ring* f4 = ring_gf(2, 2);
  RElem g = f4->parse_literal("g");
  CHECK(f4->index_of(g) == 2);  // digits (0,1)
  CHECK(f4->parse_literal("[0,1]") == g);
  const Ring* q = ring_rationals();
  CHECK(q->parse_literal("2/4") == q->from_rational(1, 2));
}

TEST_CASE("chinese remainder split of Z/n") {
  const Ring* z12 = ring_modn(12);
  auto comps = z12->crt_components();
  REQUIRE(comps.size() == 2);
  CHECK(comps[0]->spec_string() == "Z/4");
  CHECK(comps[1]->spec_string() == "Z/3");
  for (long long i = 0; i < 12; ++i) {
    RElem x = z12->from_index(i);
    std::vector<RElem> parts;
    for (const Ring* c : comps) parts.push_back(z12->crt_project(x, c));
    CHECK(z12->crt_lift(parts) == x);
  }
  // A field is its own unique component.
  CHECK(ring_modn(7)->crt_components().size() == 1);
}

TEST_CASE("packed operation tables match the ring operations") {
  for (const char* spec : {"Z/6", "GF(4)", "Z/4", "GF(9)"}) {
    const Ring* r = ring_parse_spec(spec);
    const FiniteRingOps* ops = finite_ops(r);
    std::set<int> unit_idx;
    for (const RElem& u : r->units()) unit_idx.insert((int)r->index_of(u));
    for (long long i = 0; i < r->size(); ++i)
      for (long long j = 0; j < r->size(); ++j) {
        RElem x = r->from_index(i), y = r->from_index(j);
        CHECK(ops->addi((uint8_t)i, (uint8_t)j) == r->index_of(r->add(x, y)));
        CHECK(ops->muli((uint8_t)i, (uint8_t)j) == r->index_of(r->mul(x, y)));
      }
    for (long long i = 0; i < r->size(); ++i) {
      bool isu = unit_idx.count((int)i) > 0;
      CHECK((ops->invt[i] >= 0) == isu);
      if (isu) CHECK(ops->muli((uint8_t)i, (uint8_t)ops->invt[i]) == ops->one);
    }
  }
}

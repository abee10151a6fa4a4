#include "doctest.h"

#include <algorithm>
#include <cstdlib>

#include "chevdioph/chevalley.hpp"

using namespace chevdioph;

namespace {
long long mag(long long v) { return v < 0 ? -v : v; }

// Look up the factor for slot (i,j); fails the test when absent.
const CommFactor& slot(const std::vector<CommFactor>& fac, int i, int j) {
  for (const auto& f : fac)
    if (f.i == i && f.j == j) return f;
  REQUIRE(false);
  static CommFactor dummy;
  return dummy;
}
}  // namespace

TEST_CASE("structure constants satisfy the Jacobi identity") {
  for (const char* name : {"A2", "B2", "C2", "G2", "A3", "B3", "C3"}) {
    const RootSystem* rs = root_system(name);
    const ChevBasis* cb = chev_basis(rs);
    CHECK_NOTHROW(cb->verify_jacobi(true));
  }
  // Larger systems: sampled bilinearity check.
  CHECK_NOTHROW(chev_basis(root_system("F4"))->verify_jacobi(false));
  CHECK_NOTHROW(chev_basis(root_system("D4"))->verify_jacobi(false));
}

TEST_CASE("extraspecial pairs carry positive chain magnitude") {
  const RootSystem* g2 = root_system("G2");
  const ChevBasis* cb = chev_basis(g2);
  int a1 = g2->simple_root(0), a2 = g2->simple_root(1);
  int ab = g2->sum_index(a2, a1);
  REQUIRE(ab >= 0);
  auto [x, y] = cb->extraspecial(ab);
  CHECK(x == std::min(a1, a2));  // minimal positive in the fixed index order
  CHECK(cb->N(x, y) > 0);

  const RootSystem* a2sys = root_system("A2");
  const ChevBasis* cba = chev_basis(a2sys);
  int s0 = a2sys->simple_root(0), s1 = a2sys->simple_root(1);
  // The minimal pair in the fixed index order carries +1; the other
  // ordering and the negated pair follow by antisymmetry and negation.
  int lo = std::min(s0, s1), hi = std::max(s0, s1);
  CHECK(cba->N(lo, hi) == 1);
  CHECK(cba->N(hi, lo) == -1);
  CHECK(cba->N(a2sys->negate(lo), a2sys->negate(hi)) == -1);
}

TEST_CASE("coroots of long and short roots") {
  const RootSystem* c2 = root_system("C2");
  const ChevBasis* cb = chev_basis(c2);
  // Highest root 2e1 = 2a1 + a2 is long: coroot coefficients (1, 1).
  CHECK(cb->coroot(c2->highest_root()) == std::vector<long long>{1, 1});
  // Short root e1+e2 = a1 + a2: coroot coefficients (1, 2).
  int s = c2->parse_root("[1,1]");
  CHECK(cb->coroot(s) == std::vector<long long>{1, 2});
}

TEST_CASE("representations: dimensions and nilpotency") {
  const Rep* sl3 = representation(root_system("A2"), RepKind::NaturalSL);
  CHECK(sl3->dim() == 3);
  const Rep* sp4 = representation(root_system("C2"), RepKind::NaturalSp);
  CHECK(sp4->dim() == 4);
  const Rep* g2ad = representation(root_system("G2"), RepKind::Adjoint);
  CHECK(g2ad->dim() == 14);

  // x_alpha in the natural sl representation is I + t E_{ij}.
  const RootSystem* a2 = root_system("A2");
  const auto& dp = sl3->divided_powers(a2->simple_root(0));
  CHECK(dp.size() == 2);
  CHECK(dp[1].at(0, 1) == 1);

  // Adjoint divided powers stop at the cube.
  const Rep* a2ad = representation(a2, RepKind::Adjoint);
  CHECK(a2ad->divided_powers(a2->simple_root(0)).size() == 3);

  CHECK_THROWS_AS(representation(root_system("B3"), RepKind::NaturalSL), std::invalid_argument);
  CHECK_THROWS_AS(representation(root_system("A2"), RepKind::NaturalSp), std::invalid_argument);
}

TEST_CASE("one-parameter subgroups are additive") {
  verify_r1_symbolic(*representation(root_system("A2"), RepKind::NaturalSL));
  verify_r1_symbolic(*representation(root_system("C2"), RepKind::NaturalSp));
  verify_r1_symbolic(*representation(root_system("G2"), RepKind::Adjoint));
}

TEST_CASE("commutator coefficients: type A2") {
  const RootSystem* rs = root_system("A2");
  const Rep* rep = representation(rs, RepKind::NaturalSL);
  const CommTable* tab = comm_table(rep);
  const ChevBasis* cb = chev_basis(rs);
  int s0 = rs->simple_root(0), s1 = rs->simple_root(1);
  auto fac = tab->pair(s0, s1);
  REQUIRE(fac.size() == 1);
  CHECK(fac[0].i == 1);
  CHECK(fac[0].j == 1);
  // The derived leading coefficient is exactly the structure constant.
  CHECK(fac[0].c == cb->N(s0, s1));
  CHECK(mag(fac[0].c) == 1);
  auto rev = tab->pair(s1, s0);
  REQUIRE(rev.size() == 1);
  CHECK(rev[0].c == -fac[0].c);
  // Mixed pair: [x_{s0+s1}(t), x_{-s1}(u)] lands on x_{s0}.
  int g = rs->sum_index(s0, s1);
  auto mixed = tab->pair(g, rs->negate(s1));
  REQUIRE(mixed.size() == 1);
  CHECK(mixed[0].rootIdx == s0);
  CHECK(mag(mixed[0].c) == 1);
  // Genuinely commuting pair: [x_{s0}(t), x_{-s1}(u)] = e.
  CHECK(tab->pair(s0, rs->negate(s1)).empty());
}

TEST_CASE("commutator coefficients: type C2 in two representations") {
  const RootSystem* rs = root_system("C2");
  int lng = rs->parse_root("[2,0]");     // 2e1, long
  int sht = rs->parse_root("[-1,1]");    // e2-e1, short
  int mid = rs->parse_root("[1,1]");     // e1+e2
  for (RepKind k : {RepKind::NaturalSp, RepKind::Adjoint}) {
    const CommTable* tab = comm_table(representation(rs, k));
    auto fac = tab->pair(lng, sht);
    REQUIRE(fac.size() == 2);
    CHECK(mag(slot(fac, 1, 1).c) == 1);
    CHECK(mag(slot(fac, 1, 2).c) == 1);
    auto fac2 = tab->pair(mid, sht);
    REQUIRE(fac2.size() == 1);
    CHECK(mag(slot(fac2, 1, 1).c) == 2);
  }
  // The two representations must produce identical signed tables.
  const CommTable* t1 = comm_table(representation(rs, RepKind::NaturalSp));
  const CommTable* t2 = comm_table(representation(rs, RepKind::Adjoint));
  for (int a = 0; a < rs->num_roots(); ++a)
    for (int b = 0; b < rs->num_roots(); ++b) {
      if (a == b || b == rs->negate(a)) continue;
      auto f1 = t1->pair(a, b);
      auto f2 = t2->pair(a, b);
      REQUIRE(f1.size() == f2.size());
      for (size_t i = 0; i < f1.size(); ++i) {
        CHECK(f1[i].rootIdx == f2[i].rootIdx);
        CHECK(f1[i].c == f2[i].c);
      }
    }
}

TEST_CASE("commutator coefficients: type G2 magnitudes") {
  const RootSystem* rs = root_system("G2");
  const CommTable* tab = comm_table(representation(rs, RepKind::Adjoint));
  int b = rs->simple_root(0);             // short
  int a = rs->simple_root(1);             // long
  int ab = rs->sum_index(a, b);           // a+b
  int a2b = rs->sum_index(ab, b);         // a+2b
  int a3b = rs->sum_index(a2b, b);        // a+3b
  REQUIRE(a3b >= 0);

  auto f1 = tab->pair(a, b);
  REQUIRE(f1.size() == 4);
  CHECK(mag(slot(f1, 1, 1).c) == 1);
  CHECK(mag(slot(f1, 1, 2).c) == 1);
  CHECK(mag(slot(f1, 1, 3).c) == 1);
  CHECK(mag(slot(f1, 2, 3).c) == 1);

  auto f2 = tab->pair(ab, b);
  REQUIRE(f2.size() == 3);
  CHECK(mag(slot(f2, 1, 1).c) == 2);
  CHECK(mag(slot(f2, 1, 2).c) == 3);
  CHECK(mag(slot(f2, 2, 1).c) == 3);

  auto f3 = tab->pair(a, a3b);
  REQUIRE(f3.size() == 1);
  CHECK(mag(slot(f3, 1, 1).c) == 1);

  auto f4 = tab->pair(a2b, b);
  REQUIRE(f4.size() == 1);
  CHECK(mag(slot(f4, 1, 1).c) == 3);

  auto f5 = tab->pair(ab, a2b);
  REQUIRE(f5.size() == 1);
  CHECK(mag(slot(f5, 1, 1).c) == 3);
}

TEST_CASE("commutator recomposition sweep") {
  verify_r2_symbolic(*representation(root_system("A2"), RepKind::NaturalSL),
                     *comm_table(representation(root_system("A2"), RepKind::NaturalSL)));
  verify_r2_symbolic(*representation(root_system("C2"), RepKind::NaturalSp),
                     *comm_table(representation(root_system("C2"), RepKind::NaturalSp)));
  verify_r2_symbolic(*representation(root_system("G2"), RepKind::Adjoint),
                     *comm_table(representation(root_system("G2"), RepKind::Adjoint)));
}

TEST_CASE("chevtab text round-trips and detects corruption") {
  const RootSystem* rs = root_system("A2");
  const ChevBasis* cb = chev_basis(rs);
  const CommTable* tab = comm_table(representation(rs, RepKind::Adjoint));
  std::string text = chevtab_write(rs, *cb, *tab);
  CHECK(text.rfind("chevtab v1 A2 extraspecial-v1", 0) == 0);
  CHECK(chevtab_verify(text).empty());

  std::string bad = text;
  auto pos = bad.find("\nN ");
  REQUIRE(pos != std::string::npos);
  bad.insert(pos + 1, "N a1 a1 7\n");
  CHECK_FALSE(chevtab_verify(bad).empty());
}

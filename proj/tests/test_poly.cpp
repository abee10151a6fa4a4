#include "doctest.h"

#include "chevdioph/checked.hpp"
#include "chevdioph/poly.hpp"

using namespace chevdioph;

TEST_CASE("polynomial arithmetic is exact and canonical") {
  Poly t = Poly::variable(2, 0);
  Poly u = Poly::variable(2, 1);
  Poly s = t + u;
  Poly sq = s * s;

  Poly want = Poly::constant(2, 0);
  want.add_term({2, 0}, 1);
  want.add_term({1, 1}, 2);
  want.add_term({0, 2}, 1);
  CHECK(sq == want);
  CHECK(sq.coeff_of({1, 1}) == 2);
  CHECK(sq.coeff_of({3, 0}) == 0);

  Poly z = sq + (-sq);
  CHECK(z.is_zero());
  CHECK((t * u - u * t).is_zero());

  CHECK(sq.eval_ll({3, 4}) == 49);
  CHECK(sq.degree() == 2);
}

TEST_CASE("polynomial printing") {
  Poly t = Poly::variable(2, 0);
  Poly u = Poly::variable(2, 1);
  Poly p = t * t * u.scaled(3) + u.scaled(-2) + Poly::constant(2, 1);
  CHECK(p.to_string({"t", "u"}) == "3*t^2*u - 2*u + 1");
  CHECK(Poly::constant(2, 0).to_string({"t", "u"}) == "0");
}

TEST_CASE("checked arithmetic traps overflow and bad division") {
  CHECK(checked_add(2, 3) == 5);
  CHECK(checked_mul(-4, 5) == -20);
  CHECK(checked_div_exact(12, 3, "test") == 4);
  CHECK_THROWS_AS(checked_div_exact(7, 2, "test"), std::runtime_error);
  long long big = 1;
  for (int i = 0; i < 62; ++i) big = checked_mul(big, 2);
  CHECK_THROWS_AS(checked_mul(big, 4), overflow_error);
  CHECK(mod_canonical(-1, 5) == 4);
  CHECK(mod_canonical(12, 5) == 2);
}

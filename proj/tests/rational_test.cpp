#include "doctest.h"

#include "lexmarket/rational.hpp"

using namespace lexmarket;

TEST_SUITE("rational") {

TEST_CASE("string round trips keep canonical form") {
  CHECK(rat_to_string(rat_from_string("3/6")) == "1/2");
  CHECK(rat_to_string(rat_from_string("-4/2")) == "-2");
  CHECK(rat_to_string(rat_from_string("0/7")) == "0");
  CHECK(rat_to_string(Rat(7)) == "7");
  CHECK(rat_from_string("11/10") == Rat(11, 10));
}

TEST_CASE("malformed strings are rejected") {
  CHECK_THROWS(rat_from_string(""));
  CHECK_THROWS(rat_from_string("1/0"));
  CHECK_THROWS(rat_from_string("a/b"));
  CHECK_THROWS(rat_from_string("1.5"));
}

TEST_CASE("rationalize recovers coarse fractions from doubles") {
  CHECK(rationalize(0.5, 1000000) == Rat(1, 2));
  CHECK(rationalize(1.0 / 3.0, 1000000) == Rat(1, 3));
  CHECK(rationalize(-2.0 / 7.0, 1000000) == Rat(-2, 7));
  CHECK(rationalize(0.0, 1000000) == 0);
  // Cap forces the best small-denominator approximation.
  CHECK(rationalize(1.0 / 3.0, 2) == Rat(1, 2));
}

TEST_CASE("vector helpers are exact") {
  RatVec a{Rat(1, 2), Rat(1, 3), Rat(0)};
  RatVec b{Rat(1, 2), Rat(-1, 3), Rat(2)};
  CHECK(dot(a, b) == Rat(1, 4) - Rat(1, 9));
  CHECK(vec_sum(a) == Rat(5, 6));
  CHECK(is_zero_vec(vec_sub(a, a)));
  RatVec s = vec_add(a, b);
  CHECK(s[0] == 1);
  CHECK(s[1] == 0);
  CHECK(s[2] == 2);
  RatVec sc = vec_scale(Rat(3), a);
  CHECK(sc[0] == Rat(3, 2));
}

TEST_CASE("lexicographic comparison uses the first differing entry") {
  RatVec a{Rat(1), Rat(0)};
  RatVec b{Rat(1), Rat(1, 10)};
  CHECK(lex_less(a, b));
  CHECK(!lex_less(b, a));
  CHECK(!lex_less(a, a));
}

}  // TEST_SUITE

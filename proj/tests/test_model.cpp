#include "parafee/model.hpp"
#include "parafee/rational.hpp"

#include <doctest.h>

#include <random>

using namespace parafee;

namespace {

bool has(const ValidationResult& r, const std::string& msg) {
  for (const auto& v : r.violations) {
    if (v == msg) return true;
  }
  return false;
}

ObjectSet random_set(std::mt19937_64& rng, int universe) {
  ObjectSet out;
  for (int i = 0; i < universe; ++i) {
    if (rng() % 3 == 0) out.insert(ObjectId("o" + std::to_string(i)));
  }
  return out;
}

}  // namespace

TEST_CASE("rational parsing and rendering") {
  CHECK(parse_rational("8/3") == Rational(8, 3));
  CHECK(parse_rational("-6/4") == Rational(-3, 2));
  CHECK(parse_rational("42") == Rational(42));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-2.5E2") == Rational(-250));
  CHECK(to_string(Rational(137, 60)) == "137/60");
  CHECK(to_string(Rational(4)) == "4");
  CHECK(to_decimal_string(Rational(2, 3), 4) == "0.6667");
  CHECK(to_decimal_string(Rational(-1, 8), 2) == "-0.13");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("decimal rounding keeps thirty significant digits") {
  const auto third = round_to_rational(to_decimal(Rational(1, 3)));
  CHECK(third == parse_rational("0.333333333333333333333333333333"));
  CHECK(round_to_rational(to_decimal(Rational(5, 4))) == Rational(5, 4));
}

TEST_CASE("transaction validation") {
  Transaction tx = Transaction::simple("tx", 3, {"o1"});
  CHECK(validate_transaction(tx).ok());

  tx.contingent_reads = {"o2"};
  CHECK(has(validate_transaction(tx), "contingent read not declared"));

  Transaction c = Transaction::simple("c", 3, {"o1"});
  c.t_base = 1;
  c.contingent_writes = {"o1"};
  CHECK(validate_transaction(c).ok());

  c.contingent_writes = {"o9"};
  CHECK(has(validate_transaction(c), "contingent write not declared"));

  Transaction plain = Transaction::simple("p", 3, {"o1"});
  plain.t_base = 2;
  CHECK(has(validate_transaction(plain), "non-contingent transaction must have t_base = t"));

  Transaction big = c;
  big.contingent_writes = {"o1"};
  big.t_base = 4;
  CHECK(has(validate_transaction(big), "t_base exceeds t"));

  Transaction low = Transaction::simple("l", 1, {"o1"});
  low.pi = Rational(1, 2);
  CHECK(has(validate_transaction(low), "priority pi must be at least 1"));
}

TEST_CASE("machine and retention validation") {
  CHECK(validate_machine({2, 400, LimitMode::Makespan}).ok());
  CHECK_FALSE(validate_machine({0, 400, LimitMode::Makespan}).ok());
  CHECK(validate_retention({Rational(1, 2)}).ok());
  CHECK(validate_retention({1}).ok());
  CHECK_FALSE(validate_retention({0}).ok());
  CHECK(parse_limit_mode("total") == LimitMode::TotalCompute);
  CHECK_THROWS_AS(parse_limit_mode("other"), Error);
}

TEST_CASE("conflict examples") {
  Transaction r1;
  r1.id = "r1";
  r1.reads = {"o1"};
  Transaction r2 = r1;
  r2.id = "r2";
  CHECK_FALSE(conflicts(r1, r2));

  Transaction w = Transaction::simple("w", 1, {"o1"});
  CHECK(conflicts(w, r2));

  const auto tx1 = Transaction::simple("tx1", 200, {"o1", "o3"}, 4);
  const auto tx2 = Transaction::simple("tx2", 150, {"o1", "o2"}, 3);
  CHECK(conflicts(tx1, tx2));
  CHECK_THROWS_AS(conflicts(tx1, tx1), Error);
}

TEST_CASE("conflict properties on random access sets") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto ra = random_set(rng, 5), wa = random_set(rng, 5);
    const auto rb = random_set(rng, 5), wb = random_set(rng, 5);
    const bool c = conflicts(ra, wa, rb, wb);
    CHECK(c == conflicts(rb, wb, ra, wa));
    // Growing a set never removes a conflict.
    const auto extra = random_set(rng, 5);
    if (c) {
      CHECK(conflicts(set_union(ra, extra), wa, rb, wb));
      CHECK(conflicts(ra, set_union(wa, extra), rb, wb));
    }
    // Used subsets conflict only if the declared sets do.
    ObjectSet ua, ub;
    for (const auto& o : wa) {
      if (rng() % 2) ua.insert(o);
    }
    for (const auto& o : rb) {
      if (rng() % 2) ub.insert(o);
    }
    if (conflicts(ObjectSet{}, ua, ub, ObjectSet{})) CHECK(c);
  }
}

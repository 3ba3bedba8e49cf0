#include "oracles.hpp"

#include "parafee/gcm.hpp"
#include "parafee/scheduling.hpp"

#include <doctest.h>

#include <random>

using namespace parafee;

namespace {

std::vector<Transaction> shapley_four() {
  return {Transaction::simple("tx1", 1, {"o1"}), Transaction::simple("tx2", 1, {"o1"}),
          Transaction::simple("tx3", 2, {"o2"}), Transaction::simple("tx4", 3, {"o1"})};
}

std::vector<Transaction> tpm_pair() {
  return {Transaction::simple("tx1", 6, {"o1"}), Transaction::simple("tx2", 6, {"o2"})};
}

}  // namespace

TEST_CASE("shapley gas examples") {
  auto txs = shapley_four();
  CHECK(shapley_gas(txs, "tx4", 2) == Rational(8, 3));
  txs.push_back(Transaction::simple("tx5", 1, {"o2"}));
  CHECK(shapley_gas(txs, "tx4", 2) == Rational(137, 60));
  CHECK(shapley_gas(txs, "tx5", 2) == Rational(11, 30));
  CHECK(shapley_gas(txs, "tx4", 2) + shapley_gas(txs, "tx5", 2) == Rational(53, 20));
  CHECK_THROWS_AS(shapley_gas(txs, "nope", 2), Error);

  std::vector<Transaction> eleven;
  for (int i = 0; i < 11; ++i) eleven.push_back(Transaction::simple("x" + std::to_string(i), 1, {"o"}));
  CHECK_THROWS_AS(shapley_gas(eleven, "x0", 2), CapExceeded);
}

TEST_CASE("tpm gas examples") {
  auto txs = tpm_pair();
  CHECK(tpm_gas(txs, "tx1", 2) == 3);
  CHECK(tpm_gas(txs, "tx2", 2) == 3);
  txs.push_back(Transaction::simple("tx3", 6, {"o1", "o2"}));
  for (const auto& tx : txs) CHECK(tpm_gas(txs, tx.id, 2) == 4);
}

TEST_CASE("shapley matches the permutation average") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 40; ++round) {
    const auto count = 1 + rng() % 5;
    const auto n = static_cast<std::int64_t>(1 + rng() % 2);
    const auto txs = oracle::random_instance(rng, count, 3, 4);
    const auto expected = oracle::shapley(txs, n);
    const auto gas = gas_assignment(Mechanism::Shapley, txs, n);
    CAPTURE(round);
    for (std::size_t i = 0; i < txs.size(); ++i) CHECK(gas.at(txs[i].id) == expected[i]);
    CHECK(gas.total == makespan_exact(txs, n));
  }
}

TEST_CASE("tpm proportionality and efficiency") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 60; ++round) {
    const auto txs = oracle::random_instance(rng, 2 + rng() % 6, 4, 9);
    const auto gas = gas_assignment(Mechanism::Tpm, txs, 2);
    for (const auto& a : txs) {
      CHECK(gas.at(a.id) >= 0);
      for (const auto& b : txs) CHECK(gas.at(a.id) * b.t == gas.at(b.id) * a.t);
    }
    CHECK(efficiency_check(Mechanism::Tpm, txs, 2).efficient);
    CHECK(efficiency_check(Mechanism::Shapley, txs, 2).efficient);
  }
}

TEST_CASE("efficiency examples") {
  const auto four = efficiency_check(Mechanism::Shapley, shapley_four(), 2);
  CHECK(four.efficient);
  CHECK(four.total_gas == 5);

  auto three = tpm_pair();
  three.push_back(Transaction::simple("tx3", 6, {"o1", "o2"}));
  const auto tpm = efficiency_check(Mechanism::Tpm, three, 2);
  CHECK(tpm.efficient);
  CHECK(tpm.total_gas == 12);
  CHECK(tpm.makespan == 12);

  const std::vector<Transaction> spam{Transaction::simple("a", 1, {"x1"}), Transaction::simple("b", 1, {"x2"}),
                                      Transaction::simple("c", 1, {"x3"})};
  const auto flat = efficiency_check(Mechanism::ComputeTime, spam, 2);
  CHECK_FALSE(flat.efficient);
  CHECK(flat.residual == 1);

  CHECK_THROWS_AS(gas_assignment(Mechanism::Tpm, std::vector<Transaction>{tpm_pair()[0], tpm_pair()[0]}, 2), Error);
}

TEST_CASE("user shill search") {
  const auto txs = shapley_four();
  const std::vector<Transaction> pool{Transaction::simple("tx5", 1, {"o2"})};
  const auto found = user_shill_search(Mechanism::Shapley, txs, "tx4", pool, 1, 2);
  REQUIRE(found.report.has_value());
  CHECK(found.report->profit == Rational(1, 60));
  CHECK(found.report->baseline == Rational(8, 3));
  CHECK(found.report->attacked == Rational(53, 20));
  CHECK(found.subsets_searched == 1);

  const auto none = user_shill_search(Mechanism::Shapley, txs, "tx4", {}, 1, 2);
  CHECK_FALSE(none.report.has_value());
  CHECK(none.subsets_searched == 0);

  const std::vector<Transaction> tpm_pool{Transaction::simple("tx3", 6, {"o1", "o2"}),
                                          Transaction::simple("tx4", 2, {"o1"}),
                                          Transaction::simple("tx5", 3, {"o3"})};
  CHECK_FALSE(user_shill_search(Mechanism::Tpm, tpm_pair(), "tx1", tpm_pool, 3, 2).report.has_value());
}

TEST_CASE("scheduler shill search") {
  const std::vector<Transaction> pool{Transaction::simple("tx3", 6, {"o1", "o2"})};
  const auto tpm = scheduler_shill_search(Mechanism::Tpm, tpm_pair(), pool, 1, 2);
  REQUIRE(tpm.report.has_value());
  CHECK(tpm.report->baseline == 6);
  CHECK(tpm.report->attacked == 8);
  CHECK(tpm.report->profit == 2);

  CHECK_FALSE(scheduler_shill_search(Mechanism::Shapley, tpm_pair(), pool, 1, 2).report.has_value());
  CHECK_FALSE(scheduler_shill_search(Mechanism::Tpm, tpm_pair(), {}, 1, 2).report.has_value());
}

TEST_CASE("search budget") {
  std::vector<Transaction> pool;
  for (int i = 0; i < 8; ++i) pool.push_back(Transaction::simple("f" + std::to_string(i), 6, {"o1", "o2"}));
  try {
    scheduler_shill_search(Mechanism::Tpm, tpm_pair(), pool, 8, 2, 10);
    FAIL("expected the budget to run out");
  } catch (const SearchBudgetExceeded& e) {
    CHECK(e.explored() == 10);
    REQUIRE(e.best_so_far().has_value());
    CHECK(e.best_so_far()->profit > 0);
  }
}

TEST_CASE("set inclusion") {
  const auto base = tpm_pair();
  const std::vector<Transaction> t1{Transaction::simple("f1", 2, {"o1"})};
  const std::vector<Transaction> t2{Transaction::simple("f1", 2, {"o1"}), Transaction::simple("f2", 3, {"o2"})};
  for (const auto mech : {Mechanism::Shapley, Mechanism::Tpm, Mechanism::ComputeTime}) {
    const auto r = set_inclusion_check(mech, base, t1, t2, 2);
    CHECK(r.holds == (r.lhs <= r.rhs));
  }
  CHECK(set_inclusion_check(Mechanism::ComputeTime, base, t1, t2, 2).holds);
}

TEST_CASE("spam efficiency witness") {
  const auto a = spam_efficiency_witness(2, 1);
  CHECK(a.subset_makespan == 1);
  CHECK(a.subsets_uniform);
  CHECK(a.full_makespan == 2);
  CHECK(a.required_total == 3);
  CHECK(a.contradiction);

  const auto b = spam_efficiency_witness(1, 1);
  CHECK(b.required_total == 2);
  CHECK(b.full_makespan == 2);
  CHECK_FALSE(b.contradiction);

  const auto c = spam_efficiency_witness(4, 5);
  CHECK(c.required_total == 25);
  CHECK(c.full_makespan == 10);
  CHECK(c.contradiction);
}

TEST_CASE("mechanism names round trip") {
  for (const auto m : {Mechanism::Shapley, Mechanism::Tpm, Mechanism::ComputeTime}) {
    CHECK(parse_mechanism(to_string(m)) == m);
  }
  CHECK(parse_attacker("scheduler") == Attacker::Scheduler);
  CHECK_THROWS_AS(parse_mechanism("vcg"), Error);
}

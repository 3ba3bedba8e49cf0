#include "oracles.hpp"

#include "parafee/scheduling.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace parafee;

namespace {

std::vector<Transaction> priority_example() {
  return {Transaction::simple("tx1", 200, {"o1", "o3"}, 4), Transaction::simple("tx2", 150, {"o1", "o2"}, 3),
          Transaction::simple("tx3", 100, {"o2"}, 2), Transaction::simple("tx4", 100, {"o3"}, 1)};
}

std::vector<Transaction> shapley_four() {
  return {Transaction::simple("tx1", 1, {"o1"}), Transaction::simple("tx2", 1, {"o1"}),
          Transaction::simple("tx3", 2, {"o2"}), Transaction::simple("tx4", 3, {"o1"})};
}

std::vector<std::size_t> identity(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<std::string> ids(std::span<const Transaction> txs) {
  std::vector<std::string> out;
  for (const auto& tx : txs) out.push_back(tx.id);
  return out;
}

const MachineConfig kPriorityCfg{2, 400, LimitMode::Makespan};

}  // namespace

TEST_CASE("exact makespan examples") {
  const std::vector<Transaction> pair{Transaction::simple("tx1", 6, {"o1"}), Transaction::simple("tx2", 6, {"o2"})};
  CHECK(makespan_exact(pair, 2) == 6);
  CHECK(makespan_exact(shapley_four(), 2) == 5);
  CHECK(makespan_exact(std::vector<Transaction>{}, 2) == 0);

  std::vector<Transaction> big;
  for (int i = 0; i < 13; ++i) big.push_back(Transaction::simple("x" + std::to_string(i), 1, {"o"}));
  CHECK_THROWS_WITH_AS(makespan_exact(big, 2), doctest::Contains("instance too large for exact solver"), CapExceeded);
}

TEST_CASE("greedy makespan examples") {
  const std::vector<Transaction> one{Transaction::simple("a", 7, {"o1"})};
  CHECK(makespan_greedy(one, 2, identity(1)) == 7);
  const std::vector<Transaction> pair{Transaction::simple("tx1", 6, {"o1"}), Transaction::simple("tx2", 6, {"o2"})};
  CHECK(makespan_greedy(pair, 2, identity(2)) == 6);
  CHECK(makespan_greedy(shapley_four(), 2, identity(4)) == 5);
}

TEST_CASE("exact makespan agrees with the permutation oracle") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 150; ++round) {
    const auto count = 1 + rng() % 6;
    const auto n = static_cast<std::int64_t>(1 + rng() % 3);
    const auto txs = oracle::random_instance(rng, count, 4);
    const auto exact = makespan_exact(txs, n);
    CAPTURE(round);
    CHECK(exact == oracle::makespan(txs, n));
    CHECK(exact >= makespan_lower_bound(txs, n));
    // Exact never loses to any list order.
    auto order = identity(count);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(exact <= makespan_greedy(txs, n, order));
    }
  }
}

TEST_CASE("every policy emits a valid schedule") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 80; ++round) {
    const auto count = 1 + rng() % 7;
    const auto txs = oracle::random_instance(rng, count, 3, 8);
    const MachineConfig cfg{static_cast<std::int64_t>(1 + rng() % 3), static_cast<std::int64_t>(4 + rng() % 12),
                            rng() % 4 == 0 ? LimitMode::TotalCompute : LimitMode::Makespan};
    CAPTURE(round);
    const auto greedy = schedule_greedy(txs, cfg);
    const auto opt = schedule_opt(txs, cfg);
    CHECK(validate_schedule(greedy, cfg).ok());
    CHECK(validate_schedule(opt, cfg).ok());
    CHECK(opt.revenue >= greedy.revenue);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto rnd = schedule_random(txs, cfg, seed);
      CHECK(validate_schedule(rnd, cfg).ok());
      CHECK(opt.revenue >= rnd.revenue);
    }
  }
}

TEST_CASE("validator rejects broken schedules") {
  const auto txs = priority_example();
  auto sched = schedule_greedy(txs, kPriorityCfg);
  REQUIRE(validate_schedule(sched, kPriorityCfg).ok());
  auto overlap = sched;
  overlap.placement[1].start = 0;
  overlap.placement[1].finish = overlap.txs[1].t;
  CHECK_FALSE(validate_schedule(overlap, kPriorityCfg).ok());
  auto stale = sched;
  stale.makespan += 1;
  CHECK_FALSE(validate_schedule(stale, kPriorityCfg).ok());
}

TEST_CASE("greedy on the priority example") {
  const auto sched = schedule_greedy(priority_example(), kPriorityCfg);
  CHECK(sched.makespan == 350);
  CHECK(sched.revenue == 1350);
  CHECK(sched.contains("tx1"));
  CHECK(sched.contains("tx2"));
  CHECK(sched.contains("tx4"));
  CHECK_FALSE(sched.contains("tx3"));
  REQUIRE(sched.dropped.size() == 1);
  CHECK(sched.dropped[0].id == "tx3");
  CHECK(ids(fee_order(priority_example())) == std::vector<std::string>{"tx1", "tx2", "tx3", "tx4"});
}

TEST_CASE("greedy edge cases") {
  const std::vector<Transaction> indep{Transaction::simple("a", 3, {"o1"}), Transaction::simple("b", 4, {"o2"}),
                                       Transaction::simple("c", 2, {"o3"})};
  const MachineConfig ample{2, 100, LimitMode::Makespan};
  const auto all = schedule_greedy(indep, ample);
  CHECK(all.dropped.empty());
  const auto order = std::vector<std::size_t>{0, 1, 2};
  CHECK(all.makespan == makespan_greedy(indep, 2, order));

  const std::vector<Transaction> huge{Transaction::simple("h", 500, {"o1"})};
  const auto none = schedule_greedy(huge, kPriorityCfg);
  CHECK(none.txs.empty());
  CHECK(none.makespan == 0);
  CHECK(none.dropped.size() == 1);
}

TEST_CASE("random policy") {
  const auto txs = priority_example();
  const auto a = schedule_random(txs, kPriorityCfg, 17);
  const auto b = schedule_random(txs, kPriorityCfg, 17);
  CHECK(ids(a.txs) == ids(b.txs));
  CHECK(a.revenue == b.revenue);
  CHECK(a.precedence == b.precedence);
  CHECK(schedule_random(std::vector<Transaction>{}, kPriorityCfg, 3).txs.empty());

  // Some arrival order admits all four transactions.
  auto perm = txs;
  bool all_in = false;
  std::sort(perm.begin(), perm.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  int perms = 0;
  do {
    ++perms;
    if (schedule_in_order(perm, kPriorityCfg).dropped.empty()) all_in = true;
  } while (std::next_permutation(perm.begin(), perm.end(), [](const auto& x, const auto& y) { return x.id < y.id; }));
  CHECK(perms == 24);
  CHECK(all_in);

  // The fee order is one of RANDOM's permutations, so RANDOM can do as badly as GREEDY.
  const auto greedy_ids = ids(fee_order(txs));
  bool found = false;
  for (std::uint64_t seed = 0; seed < 5000 && !found; ++seed) {
    if (ids(seeded_permutation(txs, seed)) == greedy_ids) {
      found = true;
      CHECK(schedule_random(txs, kPriorityCfg, seed).revenue == schedule_greedy(txs, kPriorityCfg).revenue);
    }
  }
  CHECK(found);
}

TEST_CASE("opt on the priority example") {
  const auto txs = priority_example();
  const auto opt = schedule_opt(txs, kPriorityCfg);
  CHECK(opt.dropped.empty());
  CHECK(opt.makespan == 350);
  CHECK(opt.revenue == 1550);
  CHECK(alpha_ratio(Policy::Greedy, txs, kPriorityCfg) == Rational(27, 31));
  CHECK(alpha_ratio(Policy::Opt, txs, kPriorityCfg) == 1);

  const std::vector<Transaction> single{Transaction::simple("s", 5, {"o1"}, 2)};
  const auto one = schedule_opt(single, kPriorityCfg);
  CHECK(ids(one.txs) == std::vector<std::string>{"s"});

  const std::vector<Transaction> free_tx{Transaction::simple("z", 5, {"o1"}, 0)};
  CHECK_THROWS_WITH_AS(alpha_ratio(Policy::Greedy, free_tx, kPriorityCfg), doctest::Contains("ratio undefined"), Error);
}

TEST_CASE("worst-case construction approaches the bound") {
  const Rational bound(3, 8);
  Rational previous = 1;
  for (const auto& eps : {Rational(1, 10), Rational(1, 100), Rational(1, 1000)}) {
    const auto inst = gen_greedy_worstcase(400, 100, 2, 3, eps);
    CHECK(inst.bound == bound);
    const auto ratio = alpha_ratio(Policy::Greedy, inst.txs, inst.cfg);
    CHECK(ratio > bound);
    CHECK(ratio < previous);
    previous = ratio;
  }
  // Oracle values: GREEDY keeps the chain at 1+eps plus the blocker,
  // OPT keeps the chain and fills the remaining cores, all in scaled units.
  CHECK(previous == Rational(300301, 799800));
  CHECK(abs(previous - bound) < Rational(1, 100));

  const auto single = gen_greedy_worstcase(400, 100, 2, 1, Rational(1, 10));
  CHECK(single.bound == Rational(3, 4));
  CHECK(alpha_ratio(Policy::Greedy, single.txs, single.cfg) >= single.bound);

  CHECK_THROWS_AS(gen_greedy_worstcase(400, 150, 2, 3, Rational(1, 10)), Error);
}

TEST_CASE("greedy revenue exceeds G minus Tmax once it drops something") {
  // Uniform unit pricing: any drop happens at a start time that is the end of
  // a gapless included chain.
  std::mt19937_64 rng(5);
  int drops = 0;
  for (int round = 0; round < 300; ++round) {
    const std::int64_t t_max = 6;
    auto txs = oracle::random_instance(rng, 3 + rng() % 9, 3, static_cast<int>(t_max));
    for (auto& tx : txs) tx.g = 1;
    const MachineConfig cfg{static_cast<std::int64_t>(1 + rng() % 3), 12, LimitMode::Makespan};
    const auto sched = schedule_greedy(txs, cfg);
    if (sched.dropped.empty()) continue;
    ++drops;
    CHECK(sched.revenue > cfg.block_limit - t_max);
  }
  CHECK(drops > 50);
}

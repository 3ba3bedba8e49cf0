#include "parafee/owtfm.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

using namespace parafee;

namespace {

// Independent reference: 50 digits of p·exp(x).
double reference_exp(double p, const Rational& x) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  const Big v = Big(p) * boost::multiprecision::exp(Big(numerator(x)) / Big(denominator(x)));
  return v.convert_to<double>();
}

bool close(const Rational& a, const Rational& b, const Rational& tol) { return abs(a - b) <= tol; }

Transaction contingent_reader() {
  Transaction tx;
  tx.id = "c";
  tx.t = 10;
  tx.t_base = 5;
  tx.pi = 2;
  tx.reads = {"o"};
  tx.contingent_reads = {"o"};
  return tx;
}

}  // namespace

TEST_CASE("utilization sums declared compute") {
  const std::vector<Transaction> one{Transaction::simple("a", 10, {"o1", "o2"})};
  const auto u = utilization(one);
  CHECK(u.at("o1") == 10);
  CHECK(u.at("o2") == 10);
  CHECK(u.at("o3") == 0);
  CHECK(utilization(std::vector<Transaction>{}).per_object.empty());
  const std::vector<Transaction> two{Transaction::simple("a", 6, {"o1"}), Transaction::simple("b", 6, {"o1"})};
  CHECK(utilization(two).at("o1") == 12);

  const auto tx = contingent_reader();
  const std::vector<Transaction> block{tx};
  const auto realized = realized_utilization(block, {{"c", under_outcome(tx)}});
  CHECK(realized.at("o") == 0);
  CHECK(utilization(block).at("o") == 10);
}

TEST_CASE("price update examples") {
  const Rational eta(1, 8);
  for (const auto v : {UpdateVariant::Exponential, UpdateVariant::Linear}) {
    CHECK(price_update(100, 50, 50, eta, v) == 100);
  }
  CHECK(price_update(100, 100, 50, eta, UpdateVariant::Linear) == Rational(225, 2));
  CHECK(price_update(100, 0, 50, eta, UpdateVariant::Linear) == Rational(175, 2));

  const auto up = price_update(100, 100, 50, eta, UpdateVariant::Exponential);
  const auto down = price_update(100, 0, 50, eta, UpdateVariant::Exponential);
  CHECK(up.convert_to<double>() == doctest::Approx(reference_exp(100, eta)).epsilon(1e-15));
  CHECK(down.convert_to<double>() == doctest::Approx(reference_exp(100, -eta)).epsilon(1e-15));
  CHECK(close(up, parse_rational("113.314845306682631682900722781179"), Rational(1, boost::multiprecision::pow(BigInt(10), 27))));
  CHECK(close(down, parse_rational("88.2496902584595402864892143229"), Rational(1, boost::multiprecision::pow(BigInt(10), 27))));

  CHECK_THROWS_WITH_AS(price_update(1, 0, 10, 1, UpdateVariant::Linear), "linear update underflow", Error);
  CHECK_THROWS_WITH_AS(price_update(1, 0, 10, 2, UpdateVariant::Linear), "linear update underflow", Error);
}

TEST_CASE("exponential updates compose") {
  const Rational eta(1, 8);
  const Rational target = 40;
  const Rational tol(1, boost::multiprecision::pow(BigInt(10), 24));
  for (const std::int64_t u1 : {0, 25, 40, 70}) {
    for (const std::int64_t u2 : {10, 40, 80}) {
      const auto twice = price_update(price_update(3, u1, target, eta, UpdateVariant::Exponential), u2, target, eta,
                                      UpdateVariant::Exponential);
      // Same total deviation in one step: U = U1 + U2 − U*.
      const auto once = price_update(3, u1 + u2 - 40, target, eta, UpdateVariant::Exponential);
      CHECK(close(twice, once, tol));
    }
  }
}

TEST_CASE("ow_fee contributions") {
  const auto tx = contingent_reader();
  const auto book = ObjectPriceBook::uniform({"o"}, 10, Rational(1, 8), UpdateVariant::Linear, 3);

  const auto used = ow_fee(tx, full_outcome(tx), book, Rational(1, 2));
  CHECK(used.f_att == 60);
  CHECK(used.f_act == 60);
  CHECK(used.f_base == 0);

  const auto half = ow_fee(tx, under_outcome(tx), book, Rational(1, 2), Rational(1, 4));
  CHECK(half.f_ui == 0);
  CHECK(half.f_act == 30);
  CHECK(half.r_act == Rational(15, 2));
  CHECK(ow_fee(tx, under_outcome(tx), book, 0).f_act == 0);

  const auto missing = ObjectPriceBook::uniform({"x"}, 10, Rational(1, 8), UpdateVariant::Linear);
  CHECK_THROWS_AS(ow_fee(tx, full_outcome(tx), missing, 0), Error);

  Transaction mixed = Transaction::simple("m", 4, {"a", "b"});
  mixed.pi = 3;
  mixed.t_base = 2;
  mixed.contingent_writes = {"b"};
  ObjectPriceBook two;
  two.prices = {{ObjectId("a"), 1}, {ObjectId("b"), 5}};
  two.targets = {{ObjectId("a"), 10}, {ObjectId("b"), 10}};
  for (const auto& alpha : {Rational(0), Rational(1, 3), Rational(1)}) {
    for (const auto& out : {full_outcome(mixed), under_outcome(mixed)}) {
      const auto q = ow_fee(mixed, out, two, alpha);
      CHECK(q.f_base <= q.f_ui);
      CHECK(q.f_ui <= q.f_att);
      CHECK(q.f_act == alpha * q.f_att + (1 - alpha) * q.f_ui);
    }
  }
  CHECK(ow_fee(mixed, under_outcome(mixed), two, 0).f_base == 12);
}

TEST_CASE("alpha bound") {
  const auto low = shill_alpha_bound(Rational(1, 8), Rational(1, 10), 5);
  CHECK(low.value == Rational(5, 72));
  CHECK(low.feasible);
  CHECK(shill_alpha_bound(Rational(1, 8), Rational(1, 2), 5).value == Rational(5, 8));
  CHECK(shill_alpha_bound(Rational(1, 8), Rational(1, 1000000), 5).value < Rational(1, 1000000));
  CHECK_FALSE(shill_alpha_bound(1, Rational(9, 10), 5).feasible);
  CHECK_THROWS_WITH_AS(shill_alpha_bound(Rational(1, 8), 1, 5), "all fees retained; bound diverges", Error);
}

TEST_CASE("two-block shill evaluation") {
  const auto sc = default_lemma_scenario();
  CHECK(average_priority(sc) == 5);
  const Rational eta(1, 8), gamma(1, 10);
  auto fake = Transaction::simple("fake", 10, {sc.object});
  const auto bound = shill_alpha_bound(eta, gamma, 5).value;

  // Hand oracle: linear update at U_b = U* raises the price by p·η·t_s/U*,
  // victims pay that on Σ π·t; the fake burns its share of α·p·t_s.
  Rational victims_weight = 0;
  for (const auto& v : sc.victims) victims_weight += v.pi * v.t;
  const auto oracle_profit = [&](const Rational& alpha) {
    const Rational delta = sc.price * eta * fake.t / sc.target * victims_weight;
    return gamma * delta - (1 - gamma) * alpha * sc.price * fake.t;
  };

  const auto at = owtfm_sched_shill_eval(sc, fake, eta, gamma, bound);
  CHECK(at.profit == 0);
  CHECK(at.pi_o == 5);
  CHECK(at.bound.value == bound);
  CHECK(owtfm_sched_shill_eval(sc, fake, eta, gamma, bound / 2).profit > 0);

  Rational previous = owtfm_sched_shill_eval(sc, fake, eta, gamma, 0).profit;
  CHECK(previous == oracle_profit(0));
  for (int k = 1; k <= 20; ++k) {
    const Rational alpha = bound * k / 10;
    const auto eval = owtfm_sched_shill_eval(sc, fake, eta, gamma, alpha);
    CHECK(eval.profit == oracle_profit(alpha));
    CHECK(eval.profit < previous);
    CHECK(eval.gain - eval.burn_cost == eval.profit);
    previous = eval.profit;
  }
  CHECK(owtfm_sched_shill_eval(sc, fake, eta, gamma, bound * Rational(99, 100)).profit == Rational(3, 160));

  fake.t = 0;
  fake.t_base = 0;
  CHECK(owtfm_sched_shill_eval(sc, fake, eta, gamma, bound).profit == 0);
}

TEST_CASE("simulation fixed points and growth") {
  const ObjectSet objs{"o1", "o2"};
  const auto book = ObjectPriceBook::uniform(objs, 10, Rational(1, 8), UpdateVariant::Exponential);
  SimConfig cfg;
  cfg.machine = {2, 40, LimitMode::Makespan};
  cfg.blocks = 6;

  const std::vector<SimBlock> steady{{{Transaction::simple("a", 10, {"o1"}), Transaction::simple("b", 10, {"o2"})}, {}}};
  const auto flat = simulate_blocks(steady, cfg, book);
  REQUIRE(flat.blocks.size() == 6);
  for (const auto& rec : flat.blocks) {
    CHECK(rec.prices.at("o1") == 1);
    CHECK(rec.prices.at("o2") == 1);
    CHECK(rec.fees_collected == 20);
    CHECK(rec.burned == 0);
  }

  const std::vector<SimBlock> hot{{{Transaction::simple("a", 20, {"o1"}), Transaction::simple("b", 10, {"o2"})}, {}}};
  const auto grow = simulate_blocks(hot, cfg, book);
  for (std::size_t b = 0; b < grow.blocks.size(); ++b) {
    const auto expected = reference_exp(1, Rational(static_cast<std::int64_t>(b), 8));
    CHECK(grow.blocks[b].prices.at("o1").convert_to<double>() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(grow.blocks[b].prices.at("o2") == 1);
  }

  CHECK(simulate_blocks(std::vector<SimBlock>{}, cfg, book).blocks.empty());

  auto burn = cfg;
  burn.gamma = Rational(1, 4);
  const auto burnt = simulate_blocks(steady, burn, book);
  CHECK(burnt.blocks[0].retained == 5);
  CHECK(burnt.blocks[0].burned == 15);
}

TEST_CASE("random policy simulation is reproducible") {
  const auto book = ObjectPriceBook::uniform({"o1", "o2"}, 10, Rational(1, 8), UpdateVariant::Linear);
  SimConfig cfg;
  cfg.machine = {1, 15, LimitMode::Makespan};
  cfg.policy = Policy::Random;
  cfg.seed = 9;
  cfg.blocks = 5;
  const std::vector<SimBlock> demand{{{Transaction::simple("a", 10, {"o1"}), Transaction::simple("b", 8, {"o2"}),
                                       Transaction::simple("c", 4, {"o1", "o2"})}, {}}};
  CHECK(trajectory_csv(simulate_blocks(demand, cfg, book)) == trajectory_csv(simulate_blocks(demand, cfg, book)));
}

TEST_CASE("convergence trends over fifty blocks") {
  const auto trend = [](ConvergenceMode mode, ConvergenceDemand demand) {
    const auto traj = convergence_scenario(mode, demand, 400, Rational(1, 8), Rational(1, 10), 50);
    REQUIRE(traj.blocks.size() == 50);
    int up = 0, down = 0, same = 0;
    for (std::size_t b = 1; b < traj.blocks.size(); ++b) {
      for (const auto& [o, p] : traj.blocks[b].prices) {
        const auto& prev = traj.blocks[b - 1].prices.at(o);
        (p > prev ? up : p < prev ? down : same) += 1;
      }
    }
    return std::array<int, 3>{up, down, same};
  };
  const auto single_sub = trend(ConvergenceMode::SingleDim, ConvergenceDemand::Substitutes);
  CHECK(single_sub[0] == 0);
  CHECK(single_sub[1] == 0);
  const auto multi_sub = trend(ConvergenceMode::MultiDim, ConvergenceDemand::Substitutes);
  CHECK(multi_sub[0] == 0);
  CHECK(multi_sub[2] == 0);
  CHECK(multi_sub[1] == 2 * 49);
  const auto multi_at = trend(ConvergenceMode::MultiDim, ConvergenceDemand::AtTarget);
  CHECK(multi_at[0] + multi_at[1] == 0);
  const auto single_at = trend(ConvergenceMode::SingleDim, ConvergenceDemand::AtTarget);
  CHECK(single_at[1] + single_at[2] == 0);

  const auto csv = trajectory_csv(convergence_scenario(ConvergenceMode::MultiDim, ConvergenceDemand::AtTarget, 400,
                                                       Rational(1, 8), Rational(1, 10), 2));
  CHECK(csv.rfind("block,object,price,utilization,target,fees_collected,burned", 0) == 0);
}

TEST_CASE("owtfm pricing is independent within a block") {
  const auto book = ObjectPriceBook::uniform({"o1", "o2"}, 12, Rational(1, 8), UpdateVariant::Linear, 2);
  const std::vector<IndependenceInstance> family{
      {"pair",
       {Transaction::simple("tx1", 6, {"o1"}), Transaction::simple("tx2", 6, {"o2"})},
       {2, 100, LimitMode::Makespan},
       {{Transaction::simple("tx3", 6, {"o1", "o2"})}}}};
  const auto verdict = independence_check(OwTfmRule(book), family);
  CHECK(verdict.independent);
  CHECK(verdict.shill_checks_pass);
}

TEST_CASE("book validation and names") {
  auto book = ObjectPriceBook::uniform({"o"}, 10, Rational(1, 8), UpdateVariant::Linear);
  CHECK(validate_book(book).ok());
  book.prices[ObjectId("o")] = 0;
  CHECK_FALSE(validate_book(book).ok());
  CHECK(parse_variant("linear") == UpdateVariant::Linear);
  CHECK(parse_variant("exp") == UpdateVariant::Exponential);
  CHECK(parse_convergence_mode("multi") == ConvergenceMode::MultiDim);
  CHECK(parse_convergence_demand("at-target") == ConvergenceDemand::AtTarget);
  CHECK_THROWS_AS(parse_variant("cubic"), Error);
}

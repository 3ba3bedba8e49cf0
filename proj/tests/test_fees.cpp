#include "parafee/fees.hpp"

#include <doctest.h>

#include <random>

using namespace parafee;

namespace {

// Ten per touched object: monotone and easy to evaluate by hand.
class PerObjectRule final : public PricingRule {
 public:
  std::string name() const override { return "per-object"; }
  Rational price(const PricingContext&, const Transaction&, const ObjectSet& reads,
                 const ObjectSet& writes) const override {
    return 10 * static_cast<std::int64_t>(set_union(reads, writes).size());
  }
};

// Cheaper the more it touches.
class ShrinkingRule final : public PricingRule {
 public:
  std::string name() const override { return "shrinking"; }
  Rational price(const PricingContext&, const Transaction&, const ObjectSet& reads,
                 const ObjectSet& writes) const override {
    return Rational(100) / (1 + static_cast<std::int64_t>(set_union(reads, writes).size()));
  }
};

Transaction contingent_tx() {
  Transaction tx;
  tx.id = "swap";
  tx.t = 6;
  tx.t_base = 2;
  tx.reads = {"o1"};
  tx.writes = {"o2"};
  tx.contingent_writes = {"o2"};
  return tx;
}

std::vector<Transaction> tpm_pair() {
  return {Transaction::simple("tx1", 6, {"o1"}), Transaction::simple("tx2", 6, {"o2"})};
}

Rational random_rational(std::mt19937_64& rng) {
  return Rational(static_cast<std::int64_t>(rng() % 200), static_cast<std::int64_t>(1 + rng() % 12));
}

}  // namespace

TEST_CASE("quote from a pricing rule") {
  const auto tx = contingent_tx();
  const std::vector<Transaction> block{tx};
  const PricingContext ctx{block, {1, 10, LimitMode::Makespan}};
  const PerObjectRule rule;

  const auto full = quote(rule, ctx, tx, full_outcome(tx), RiskDivision::even_steven(), Rational(1, 2));
  CHECK(full.f_ui == full.f_att);
  CHECK(full.f_act == full.f_att);
  CHECK(full.f_base == 10);

  const auto under = under_outcome(tx);
  const auto uf = quote(rule, ctx, tx, under, RiskDivision::user_friendly(), 1);
  CHECK(uf.f_act == uf.f_ui);
  CHECK(uf.f_ui == 10);
  CHECK(uf.f_att == 20);
  const auto es = quote(rule, ctx, tx, under, RiskDivision::even_steven(), Rational(1, 4));
  CHECK(es.f_act == 15);
  CHECK(es.r_act == Rational(15, 4));

  CHECK_THROWS_WITH_AS(quote(ShrinkingRule{}, ctx, tx, under, RiskDivision::even_steven(), 1),
                       "pricing rule non-monotone", Error);
}

TEST_CASE("quote arithmetic and risks") {
  const auto q = make_quote(2, 4, 10, RiskDivision::even_steven(), 1);
  CHECK(q.f_act == 7);
  CHECK(user_risk(q) == 3);
  CHECK(scheduler_risk(q) == 3);
  const auto exact = make_quote(2, 4, 4, RiskDivision::even_steven(), 1);
  CHECK(user_risk(exact) == 0);
  CHECK_THROWS_AS(make_quote(5, 3, 10, RiskDivision::even_steven(), 1), Error);
  CHECK_FALSE(validate_division({Rational(3, 2)}).ok());
  CHECK(validate_division({Rational(1, 3)}).ok());
}

TEST_CASE("risk sum is constant and presets zero one side") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    Rational a = random_rational(rng), b = random_rational(rng), c = random_rational(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const RiskDivision d{Rational(static_cast<std::int64_t>(rng() % 9), 8)};
    const Rational gamma(static_cast<std::int64_t>(1 + rng() % 4), 4);
    const auto q = make_quote(a, b, c, d, gamma);
    CHECK(user_risk(q) + scheduler_risk(q) == q.f_att - q.f_ui);
    CHECK(user_risk(q) >= 0);
    CHECK(scheduler_risk(q) >= 0);
    CHECK(q.r_act == gamma * q.f_act);
    CHECK(user_risk(make_quote(a, b, c, RiskDivision::user_friendly(), gamma)) == 0);
    CHECK(scheduler_risk(make_quote(a, b, c, RiskDivision::scheduler_friendly(), gamma)) == 0);
    // A genuinely contingent quote leaves risk on someone for every alpha.
    if (c > b) {
      for (const auto& alpha : {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)}) {
        const auto r = make_quote(a, b, c, {alpha}, gamma);
        CHECK_FALSE((user_risk(r) == 0 && scheduler_risk(r) == 0));
      }
    }
  }
}

TEST_CASE("prior expected fees") {
  CHECK(prior_expected_fee(SchedulerPrior::Pessimistic, RiskDivision::user_friendly(), 10, 4) == 4);
  CHECK(prior_expected_fee(SchedulerPrior::Median, RiskDivision::even_steven(), 10, 4) == Rational(34, 4));
  for (const auto& alpha : {Rational(0), Rational(1, 3), Rational(1)}) {
    CHECK(prior_expected_fee(SchedulerPrior::Optimistic, {alpha}, 10, 4) == 10);
  }
  CHECK(render_coefficients(prior_coefficients(SchedulerPrior::Median, RiskDivision::even_steven())) ==
        "(3f_att+f_base)/4");
}

TEST_CASE("prior table cells") {
  using C = PriorCoefficients;
  const C att{1, 0};
  const C base{0, 1};
  const C half{Rational(1, 2), Rational(1, 2)};
  const C three_quarters{Rational(3, 4), Rational(1, 4)};
  const auto table = prior_table();
  REQUIRE(table.size() == 3);
  CHECK(table[0].division == "User-Friendly");
  CHECK(table[0].cells == std::array<C, 3>{att, base, half});
  CHECK(table[1].division == "Scheduler-Friendly");
  CHECK(table[1].cells == std::array<C, 3>{att, att, att});
  CHECK(table[2].division == "Even-Steven");
  CHECK(table[2].cells == std::array<C, 3>{att, half, three_quarters});
  CHECK(render_coefficients(att) == "f_att");
  CHECK(render_coefficients(base) == "f_base");
}

TEST_CASE("fee-based user shill check") {
  const MachineConfig cfg{2, 100, LimitMode::Makespan};
  const std::vector<Transaction> four{Transaction::simple("tx1", 1, {"o1"}), Transaction::simple("tx2", 1, {"o1"}),
                                      Transaction::simple("tx3", 2, {"o2"}), Transaction::simple("tx4", 3, {"o1"})};
  const std::vector<Transaction> fake{Transaction::simple("tx5", 1, {"o2"})};

  const auto compute = fee_user_shill_check(ComputeProportionalRule{}, four, "tx4", fake, cfg,
                                            RiskDivision::even_steven(), 1);
  CHECK(compute.pass);
  CHECK(compute.margin == Rational(1, 2));

  // TPM fee of tx4 drops from 15/7 to 15/8 and the fake pays nothing.
  const auto tpm = fee_user_shill_check(TpmRule{}, four, "tx4", fake, cfg, RiskDivision::user_friendly(), 1);
  CHECK_FALSE(tpm.pass);
  CHECK(tpm.lhs == Rational(15, 7));
  CHECK(tpm.rhs == Rational(15, 8));

  CHECK(fee_user_shill_check(TpmRule{}, four, "tx4", fake, cfg, RiskDivision::scheduler_friendly(), 1).pass);
}

TEST_CASE("fee-based scheduler shill check") {
  const MachineConfig cfg{2, 100, LimitMode::Makespan};
  const std::vector<Transaction> fake{Transaction::simple("tx3", 6, {"o1", "o2"})};

  const auto compute = fee_sched_shill_check(ComputeProportionalRule{}, tpm_pair(), "tx1", fake, cfg,
                                             RiskDivision::user_friendly(), Rational(1, 2));
  CHECK(compute.pass);
  CHECK(compute.lhs == 0);

  const auto tpm = fee_sched_shill_check(TpmRule{}, tpm_pair(), "tx1", fake, cfg,
                                         RiskDivision::scheduler_friendly(), Rational(1, 2));
  CHECK(tpm.lhs == Rational(1, 2));
  CHECK(tpm.rhs == 2);
  CHECK(tpm.pass);

  // With alpha = 0 only the victim fee matters.
  CHECK_FALSE(fee_sched_shill_check(TpmRule{}, tpm_pair(), "tx1", fake, cfg, RiskDivision::user_friendly(),
                                    Rational(1, 2)).pass);
  CHECK_FALSE(fee_sched_shill_check(TpmRule{}, tpm_pair(), "tx1", fake, cfg, RiskDivision::scheduler_friendly(),
                                    1).pass);
}

TEST_CASE("independence on a family") {
  const std::vector<IndependenceInstance> family{
      {"tpm", tpm_pair(), {2, 100, LimitMode::Makespan}, {{Transaction::simple("tx3", 6, {"o1", "o2"})}}}};

  const auto compute = independence_check(ComputeProportionalRule{}, family);
  CHECK(compute.independent);
  CHECK(compute.shill_checks_pass);
  CHECK(compute.comparisons > 0);

  const auto tpm = independence_check(TpmRule{}, family);
  CHECK_FALSE(tpm.independent);
  CHECK_FALSE(tpm.shill_checks_pass);
  REQUIRE(tpm.counterexample.has_value());
  CHECK(tpm.counterexample->tx_id == "tx1");
  CHECK(tpm.counterexample->before == 3);
  CHECK(tpm.counterexample->after == 4);
}

TEST_CASE("prior names") {
  for (const auto p : {SchedulerPrior::Optimistic, SchedulerPrior::Pessimistic, SchedulerPrior::Median}) {
    CHECK(parse_prior(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_prior("random"), Error);
}

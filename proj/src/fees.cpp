#include "parafee/fees.hpp"

#include "parafee/gcm.hpp"

#include <sstream>

namespace parafee {

namespace {

// Copy of the block with tx's access sets replaced.
std::vector<Transaction> with_sets(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                                   const ObjectSet& writes) {
  std::vector<Transaction> out(ctx.txs.begin(), ctx.txs.end());
  bool found = false;
  for (auto& other : out) {
    if (other.id != tx.id) continue;
    other.reads = reads;
    other.writes = writes;
    found = true;
  }
  if (!found) throw Error("transaction '" + tx.id + "' is not in the pricing context");
  return out;
}

std::vector<Transaction> merged(std::span<const Transaction> txs, std::span<const Transaction> fakes) {
  std::vector<Transaction> out(txs.begin(), txs.end());
  out.insert(out.end(), fakes.begin(), fakes.end());
  return out;
}

Rational attainable(const PricingRule& rule, std::span<const Transaction> block, const MachineConfig& cfg,
                    const Transaction& tx) {
  return rule.price(PricingContext{block, cfg}, tx, tx.reads, tx.writes);
}

const Transaction& find_tx(std::span<const Transaction> txs, const std::string& id) {
  for (const auto& tx : txs) {
    if (tx.id == id) return tx;
  }
  throw Error("transaction '" + id + "' is not in the set");
}

struct ShillParts {
  Rational before;
  Rational after;
  Rational fakes_att;
};

ShillParts shill_parts(const PricingRule& rule, std::span<const Transaction> txs, const std::string& victim_id,
                       std::span<const Transaction> fakes, const MachineConfig& cfg) {
  const auto& victim = find_tx(txs, victim_id);
  const auto attacked = merged(txs, fakes);
  ShillParts parts;
  parts.before = attainable(rule, txs, cfg, victim);
  parts.after = attainable(rule, attacked, cfg, victim);
  parts.fakes_att = 0;
  for (const auto& f : fakes) parts.fakes_att += attainable(rule, attacked, cfg, f);
  return parts;
}

}  // namespace

ValidationResult validate_division(const RiskDivision& division) {
  ValidationResult r;
  if (division.alpha < 0 || division.alpha > 1) r.violations.emplace_back("alpha must lie in [0, 1]");
  return r;
}

std::string to_string(SchedulerPrior prior) {
  switch (prior) {
    case SchedulerPrior::Optimistic: return "optimistic";
    case SchedulerPrior::Pessimistic: return "pessimistic";
    case SchedulerPrior::Median: return "median";
  }
  return "?";
}

SchedulerPrior parse_prior(std::string_view text) {
  if (text == "optimistic") return SchedulerPrior::Optimistic;
  if (text == "pessimistic") return SchedulerPrior::Pessimistic;
  if (text == "median") return SchedulerPrior::Median;
  throw Error("unknown prior '" + std::string(text) + "'");
}

Rational ComputeProportionalRule::price(const PricingContext&, const Transaction& tx, const ObjectSet&,
                                        const ObjectSet&) const {
  return tx.g * tx.t;
}

Rational TpmRule::price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                        const ObjectSet& writes) const {
  const auto block = with_sets(ctx, tx, reads, writes);
  return tx.g * tpm_gas(block, tx.id, ctx.cfg.n_cores);
}

Rational ShapleyRule::price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                            const ObjectSet& writes) const {
  const auto block = with_sets(ctx, tx, reads, writes);
  return tx.g * shapley_gas(block, tx.id, ctx.cfg.n_cores);
}

FeeQuote make_quote(const Rational& f_base, const Rational& f_ui, const Rational& f_att,
                    const RiskDivision& division, const Rational& gamma) {
  if (!validate_division(division).ok()) throw Error("alpha must lie in [0, 1]");
  if (!(f_base <= f_ui && f_ui <= f_att)) throw Error("pricing rule non-monotone");
  FeeQuote q;
  q.f_base = f_base;
  q.f_ui = f_ui;
  q.f_att = f_att;
  q.f_act = division.alpha * f_att + (1 - division.alpha) * f_ui;
  q.r_act = gamma * q.f_act;
  return q;
}

FeeQuote quote(const PricingRule& rule, const PricingContext& ctx, const Transaction& tx,
               const ExecOutcome& outcome, const RiskDivision& division, const Rational& gamma) {
  if (!is_subset(outcome.used_reads, tx.reads) || !is_subset(outcome.used_writes, tx.writes)) {
    throw Error("outcome was not produced for '" + tx.id + "'");
  }
  const auto f_base = rule.price(ctx, tx, tx.deterministic_reads(), tx.deterministic_writes());
  const auto f_att = rule.price(ctx, tx, tx.reads, tx.writes);
  const auto f_ui = rule.price(ctx, tx, outcome.used_reads, outcome.used_writes);
  return make_quote(f_base, f_ui, f_att, division, gamma);
}

Rational user_risk(const FeeQuote& q) { return q.f_act - q.f_ui; }
Rational scheduler_risk(const FeeQuote& q) { return q.f_att - q.f_act; }

PriorCoefficients prior_coefficients(SchedulerPrior prior, const RiskDivision& division) {
  const auto& a = division.alpha;
  switch (prior) {
    case SchedulerPrior::Optimistic: return {1, 0};
    case SchedulerPrior::Pessimistic: return {a, 1 - a};
    case SchedulerPrior::Median: return {(1 + a) / 2, (1 - a) / 2};
  }
  return {};
}

Rational prior_expected_fee(SchedulerPrior prior, const RiskDivision& division, const Rational& f_att,
                            const Rational& f_base) {
  if (f_base > f_att) throw Error("prior fee needs f_base <= f_att");
  const auto c = prior_coefficients(prior, division);
  return c.att * f_att + c.base * f_base;
}

std::vector<PriorTableRow> prior_table() {
  const std::pair<const char*, RiskDivision> rows[] = {
      {"User-Friendly", RiskDivision::user_friendly()},
      {"Scheduler-Friendly", RiskDivision::scheduler_friendly()},
      {"Even-Steven", RiskDivision::even_steven()},
  };
  std::vector<PriorTableRow> out;
  for (const auto& [label, division] : rows) {
    PriorTableRow row{label, division, {}};
    row.cells[0] = prior_coefficients(SchedulerPrior::Optimistic, division);
    row.cells[1] = prior_coefficients(SchedulerPrior::Pessimistic, division);
    row.cells[2] = prior_coefficients(SchedulerPrior::Median, division);
    out.push_back(row);
  }
  return out;
}

std::string render_coefficients(const PriorCoefficients& c) {
  // Common denominator form: (a·f_att + b·f_base)/d.
  const BigInt d = boost::multiprecision::lcm(denominator(c.att), denominator(c.base));
  const BigInt a = numerator(c.att) * (d / denominator(c.att));
  const BigInt b = numerator(c.base) * (d / denominator(c.base));
  auto term = [](const BigInt& k, const char* name) {
    if (k == 1) return std::string(name);
    return k.str() + name;
  };
  std::string body;
  if (a != 0) body += term(a, "f_att");
  if (b != 0) body += (body.empty() ? "" : "+") + term(b, "f_base");
  if (body.empty()) body = "0";
  if (d == 1) return body;
  return "(" + body + ")/" + d.str();
}

ShillCheck fee_user_shill_check(const PricingRule& rule, std::span<const Transaction> txs,
                                const std::string& victim_id, std::span<const Transaction> fakes,
                                const MachineConfig& cfg, const RiskDivision& division,
                                const Rational&) {
  const auto parts = shill_parts(rule, txs, victim_id, fakes, cfg);
  ShillCheck c;
  c.lhs = parts.before;
  c.rhs = parts.after + division.alpha * parts.fakes_att;
  c.margin = c.rhs - c.lhs;
  c.pass = c.margin >= 0;
  return c;
}

ShillCheck fee_sched_shill_check(const PricingRule& rule, std::span<const Transaction> txs,
                                 const std::string& victim_id, std::span<const Transaction> fakes,
                                 const MachineConfig& cfg, const RiskDivision& division,
                                 const Rational& gamma) {
  const auto parts = shill_parts(rule, txs, victim_id, fakes, cfg);
  ShillCheck c;
  c.lhs = gamma * (parts.after - parts.before);
  c.rhs = (1 - gamma) * division.alpha * parts.fakes_att;
  c.margin = c.rhs - c.lhs;
  c.pass = gamma == 1 ? c.lhs <= 0 : c.margin >= 0;
  return c;
}

IndependenceVerdict independence_check(const PricingRule& rule, std::span<const IndependenceInstance> family,
                                       const Rational& gamma) {
  IndependenceVerdict v;
  v.independent = true;
  v.shill_checks_pass = true;
  const auto uf = RiskDivision::user_friendly();
  for (const auto& inst : family) {
    for (const auto& fakes : inst.fake_sets) {
      for (const auto& tx : inst.txs) {
        const auto parts = shill_parts(rule, inst.txs, tx.id, fakes, inst.cfg);
        ++v.comparisons;
        if (parts.before != parts.after && !v.counterexample) {
          v.independent = false;
          IndependenceCounterexample cx{inst.name, tx.id, {}, parts.before, parts.after};
          for (const auto& f : fakes) cx.fake_ids.push_back(f.id);
          v.counterexample = cx;
        }
        const bool user_ok = fee_user_shill_check(rule, inst.txs, tx.id, fakes, inst.cfg, uf, gamma).pass;
        const bool sched_ok = fee_sched_shill_check(rule, inst.txs, tx.id, fakes, inst.cfg, uf, gamma).pass;
        if (!user_ok || !sched_ok) v.shill_checks_pass = false;
      }
    }
  }
  return v;
}

}  // namespace parafee

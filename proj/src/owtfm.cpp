#include "parafee/owtfm.hpp"

#include <sstream>

namespace parafee {

std::string to_string(UpdateVariant variant) {
  return variant == UpdateVariant::Exponential ? "exp" : "linear";
}

UpdateVariant parse_variant(std::string_view text) {
  if (text == "exp" || text == "exponential") return UpdateVariant::Exponential;
  if (text == "linear") return UpdateVariant::Linear;
  throw Error("unknown update variant '" + std::string(text) + "'");
}

const Rational& ObjectPriceBook::price(const ObjectId& o) const {
  const auto it = prices.find(o);
  if (it == prices.end()) throw Error("object '" + o.value + "' has no posted price");
  return it->second;
}

const Rational& ObjectPriceBook::target(const ObjectId& o) const {
  const auto it = targets.find(o);
  if (it == targets.end()) throw Error("object '" + o.value + "' has no utilization target");
  return it->second;
}

ObjectPriceBook ObjectPriceBook::uniform(const ObjectSet& objects, const Rational& target,
                                         const Rational& eta, UpdateVariant variant, const Rational& price) {
  ObjectPriceBook book;
  book.eta = eta;
  book.variant = variant;
  for (const auto& o : objects) {
    book.prices[o] = price;
    book.targets[o] = target;
  }
  return book;
}

ValidationResult validate_book(const ObjectPriceBook& book) {
  ValidationResult r;
  if (book.eta <= 0) r.violations.emplace_back("eta must be positive");
  for (const auto& [o, p] : book.prices) {
    if (p <= 0) r.violations.emplace_back("price of '" + o.value + "' must be positive");
    if (!book.targets.contains(o)) r.violations.emplace_back("object '" + o.value + "' has no target");
  }
  for (const auto& [o, u] : book.targets) {
    if (u <= 0) r.violations.emplace_back("target of '" + o.value + "' must be positive");
    if (!book.prices.contains(o)) r.violations.emplace_back("object '" + o.value + "' has no price");
  }
  return r;
}

std::int64_t UtilizationRecord::at(const ObjectId& o) const {
  const auto it = per_object.find(o);
  return it == per_object.end() ? 0 : it->second;
}

UtilizationRecord utilization(std::span<const Transaction> block_txs, std::int64_t block) {
  UtilizationRecord r;
  r.block = block;
  for (const auto& tx : block_txs) {
    for (const auto& o : tx.declared()) r.per_object[o] += tx.t;
  }
  return r;
}

UtilizationRecord realized_utilization(std::span<const Transaction> block_txs,
                                       const std::map<std::string, ExecOutcome>& outcomes,
                                       std::int64_t block) {
  UtilizationRecord r;
  r.block = block;
  for (const auto& tx : block_txs) {
    const auto it = outcomes.find(tx.id);
    if (it == outcomes.end()) throw Error("no outcome for '" + tx.id + "'");
    for (const auto& o : it->second.used()) r.per_object[o] += it->second.compute_used;
  }
  return r;
}

Rational price_update(const Rational& p, std::int64_t U, const Rational& U_star, const Rational& eta,
                      UpdateVariant variant) {
  if (p <= 0) throw Error("price must be positive");
  if (U_star <= 0) throw Error("target utilization must be positive");
  const Rational deviation = eta * (Rational(U) - U_star) / U_star;
  if (deviation == 0) return p;
  if (variant == UpdateVariant::Linear) {
    const Rational next = p * (1 + deviation);
    if (next <= 0) throw Error("linear update underflow");
    return next;
  }
  return round_to_rational(to_decimal(p) * boost::multiprecision::exp(to_decimal(deviation)));
}

ObjectPriceBook advance(const ObjectPriceBook& book, const UtilizationRecord& record) {
  for (const auto& [o, u] : record.per_object) {
    if (u > 0 && !book.prices.contains(o)) throw Error("object '" + o.value + "' has no posted price");
  }
  ObjectPriceBook next = book;
  for (auto& [o, p] : next.prices) p = price_update(p, record.at(o), book.target(o), book.eta, book.variant);
  return next;
}

Rational OwTfmRule::price(const PricingContext&, const Transaction& tx, const ObjectSet& reads,
                          const ObjectSet& writes) const {
  Rational sum = 0;
  for (const auto& o : set_union(reads, writes)) sum += tx.pi * book_.price(o) * tx.t;
  return sum;
}

FeeQuote ow_fee(const Transaction& tx, const ExecOutcome& outcome, const ObjectPriceBook& book,
                const Rational& alpha, const Rational& gamma) {
  auto charge = [&](const ObjectSet& objects) {
    Rational sum = 0;
    for (const auto& o : objects) sum += tx.pi * book.price(o) * tx.t;
    return sum;
  };
  const auto declared = tx.declared();
  const auto f_att = charge(declared);
  const auto f_ui = charge(outcome.used());
  const auto f_base = charge(set_difference(declared, set_union(tx.contingent_reads, tx.contingent_writes)));
  return make_quote(f_base, f_ui, f_att, RiskDivision{alpha}, gamma);
}

AlphaBound shill_alpha_bound(const Rational& eta, const Rational& gamma, const Rational& pi_o) {
  if (gamma == 1) throw Error("all fees retained; bound diverges");
  if (gamma < 0 || gamma > 1) throw Error("gamma must lie in [0, 1)");
  if (eta <= 0) throw Error("eta must be positive");
  if (pi_o < 1) throw Error("average priority must be at least 1");
  AlphaBound b;
  b.value = pi_o * eta * gamma / (1 - gamma);
  b.feasible = b.value <= 1;
  return b;
}

LemmaScenario default_lemma_scenario() {
  LemmaScenario s;
  s.price = 3;
  s.target = 100;
  s.base_utilization = 100;
  auto victim = [&](std::string id, std::int64_t t, Rational pi) {
    Transaction tx = Transaction::simple(std::move(id), t, {s.object});
    tx.pi = std::move(pi);
    return tx;
  };
  s.victims = {victim("v1", 60, 6), victim("v2", 40, Rational(7, 2))};
  return s;
}

Rational average_priority(const LemmaScenario& scenario) {
  if (scenario.victims.empty()) return 1;
  Rational weighted = 0;
  Rational weight = 0;
  for (const auto& v : scenario.victims) {
    const Rational w = scenario.averaging == PriorityAverage::ComputeWeighted ? Rational(v.t) : Rational(1);
    weighted += w * v.pi;
    weight += w;
  }
  return weighted / weight;
}

SchedShillEval owtfm_sched_shill_eval(const LemmaScenario& scenario, const Transaction& fake,
                                      const Rational& eta, const Rational& gamma, const Rational& alpha) {
  if (!fake.declared().contains(scenario.object)) {
    throw Error("fake '" + fake.id + "' does not declare '" + scenario.object.value + "'");
  }
  SchedShillEval e;
  e.pi_o = average_priority(scenario);
  e.bound = shill_alpha_bound(eta, gamma, e.pi_o);
  const auto honest = price_update(scenario.price, scenario.base_utilization, scenario.target, eta,
                                   UpdateVariant::Linear);
  const auto attacked = price_update(scenario.price, scenario.base_utilization + fake.t, scenario.target, eta,
                                     UpdateVariant::Linear);
  for (const auto& v : scenario.victims) {
    e.victim_fee_before += v.pi * honest * v.t;
    e.victim_fee_after += v.pi * attacked * v.t;
  }
  e.fee_delta = e.victim_fee_after - e.victim_fee_before;
  e.fake_attainable = fake.pi * scenario.price * fake.t;
  e.fake_charge = alpha * e.fake_attainable;
  e.burn_cost = (1 - gamma) * e.fake_charge;
  e.gain = gamma * e.fee_delta;
  e.profit = e.gain - e.burn_cost;
  return e;
}

namespace {

Schedule build_schedule(std::span<const Transaction> txs, const SimConfig& cfg, std::int64_t block) {
  switch (cfg.policy) {
    case Policy::Greedy: return schedule_greedy(txs, cfg.machine);
    case Policy::Random: return schedule_random(txs, cfg.machine, cfg.seed + static_cast<std::uint64_t>(block));
    case Policy::Opt: return schedule_opt(txs, cfg.machine);
  }
  throw Error("unknown policy");
}

}  // namespace

SimTrajectory simulate_blocks(std::span<const SimBlock> demand, const SimConfig& cfg,
                              const ObjectPriceBook& book0) {
  if (const auto check = validate_book(book0); !check.ok()) throw Error(check.violations.front());
  SimTrajectory traj;
  traj.final_book = book0;
  if (demand.empty()) return traj;
  ObjectPriceBook book = book0;
  State state = cfg.initial_state;
  for (std::int64_t b = 0; b < cfg.blocks; ++b) {
    const auto& input = demand[static_cast<std::size_t>(b) % demand.size()];
    const auto schedule = build_schedule(input.txs, cfg, b);
    auto applied = apply_schedule(state, schedule, input.rules);
    state = std::move(applied.state);

    ObjectPriceBook fee_book = book;
    if (cfg.aggregate) {
      const auto p = book.price(*cfg.aggregate);
      for (const auto& tx : schedule.txs) {
        for (const auto& o : tx.declared()) fee_book.prices[o] = p;
      }
    }

    BlockRecord rec;
    rec.block = b;
    rec.prices = book.prices;
    rec.targets = book.targets;
    for (const auto& tx : schedule.txs) {
      const auto q = ow_fee(tx, applied.outcomes.at(tx.id), fee_book, cfg.alpha, cfg.gamma);
      rec.fees_collected += q.f_act;
      rec.retained += q.r_act;
      rec.quotes[tx.id] = q;
      rec.included.push_back(tx.id);
    }
    rec.burned = rec.fees_collected - rec.retained;

    auto record = cfg.basis == UtilizationBasis::Declared
                      ? utilization(schedule.txs, b)
                      : realized_utilization(schedule.txs, applied.outcomes, b);
    if (cfg.aggregate) {
      std::int64_t total = 0;
      for (const auto& [o, u] : record.per_object) total += u;
      record.per_object = {{*cfg.aggregate, total}};
    }
    for (const auto& [o, p] : book.prices) rec.utilization[o] = record.at(o);
    book = advance(book, record);
    traj.blocks.push_back(std::move(rec));
  }
  traj.final_book = book;
  return traj;
}

std::string to_string(ConvergenceMode mode) { return mode == ConvergenceMode::SingleDim ? "single" : "multi"; }

ConvergenceMode parse_convergence_mode(std::string_view text) {
  if (text == "single") return ConvergenceMode::SingleDim;
  if (text == "multi") return ConvergenceMode::MultiDim;
  throw Error("unknown convergence mode '" + std::string(text) + "'");
}

std::string to_string(ConvergenceDemand demand) {
  return demand == ConvergenceDemand::Substitutes ? "substitutes" : "at-target";
}

ConvergenceDemand parse_convergence_demand(std::string_view text) {
  if (text == "substitutes") return ConvergenceDemand::Substitutes;
  if (text == "at-target") return ConvergenceDemand::AtTarget;
  throw Error("unknown convergence demand '" + std::string(text) + "'");
}

ConvergenceSetup convergence_setup(ConvergenceMode mode, ConvergenceDemand demand, std::int64_t G,
                                   const Rational& eta, const Rational& eps, std::int64_t blocks,
                                   UpdateVariant variant) {
  if (G <= 0) throw Error("G must be positive");
  if (!(eps > 0 && eps < Rational(G, 2))) throw Error("eps must lie in (0, G/2)");
  ConvergenceSetup setup;
  // Quarters and halves of eps stay integral in these units.
  setup.scale = 4 * static_cast<std::int64_t>(denominator(eps));
  const auto units = [&](const Rational& nominal) {
    const Rational v = nominal * setup.scale;
    if (denominator(v) != 1) throw Error("convergence quantities are not integral");
    return static_cast<std::int64_t>(numerator(v));
  };
  const ObjectId r1("r1");
  const ObjectId r2("r2");
  SimBlock block;
  if (demand == ConvergenceDemand::Substitutes) {
    const auto small = units(eps / 2);
    const auto big = units(Rational(G, 4) - eps / 2);
    block.txs = {Transaction::simple("tx1", big, {r1}), Transaction::simple("tx2", big, {r2}),
                 Transaction::simple("tx3", small, {r1, r2})};
  } else {
    const auto half = units(Rational(G, 2));
    block.txs = {Transaction::simple("tx1", half, {r1}), Transaction::simple("tx2", half, {r2})};
  }
  setup.demand = {block};
  setup.cfg.machine = MachineConfig{2, units(Rational(G)), LimitMode::Makespan};
  setup.cfg.blocks = blocks;
  const Rational target = Rational(units(Rational(G, 2)));
  if (mode == ConvergenceMode::SingleDim) {
    setup.cfg.aggregate = ObjectId("gas");
    setup.book = ObjectPriceBook::uniform({ObjectId("gas")}, target, eta, variant);
  } else {
    setup.book = ObjectPriceBook::uniform({r1, r2}, target, eta, variant);
  }
  return setup;
}

SimTrajectory convergence_scenario(ConvergenceMode mode, ConvergenceDemand demand, std::int64_t G,
                                   const Rational& eta, const Rational& eps, std::int64_t blocks,
                                   UpdateVariant variant) {
  const auto setup = convergence_setup(mode, demand, G, eta, eps, blocks, variant);
  return simulate_blocks(setup.demand, setup.cfg, setup.book);
}

std::string trajectory_csv(const SimTrajectory& trajectory) {
  std::ostringstream out;
  out << "block,object,price,utilization,target,fees_collected,burned\n";
  for (const auto& rec : trajectory.blocks) {
    for (const auto& [o, p] : rec.prices) {
      out << rec.block << ',' << o.value << ',' << to_string(p) << ',' << rec.utilization.at(o) << ','
          << to_string(rec.targets.at(o)) << ',' << to_string(rec.fees_collected) << ','
          << to_string(rec.burned) << '\n';
    }
  }
  return out.str();
}

}  // namespace parafee

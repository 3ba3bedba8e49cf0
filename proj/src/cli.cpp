#include "parafee/cli.hpp"

#include "parafee/execution.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>

#ifndef PARAFEE_DEFAULT_CORPUS
#define PARAFEE_DEFAULT_CORPUS "corpus"
#endif

namespace parafee {

namespace {

namespace fs = std::filesystem;

std::string r2s(const Rational& r) { return to_string(r); }

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : " ") + id;
  return out;
}

std::string join_tx_ids(std::span<const Transaction> txs) {
  std::vector<std::string> ids;
  for (const auto& tx : txs) ids.push_back(tx.id);
  return join_ids(ids);
}

const Scenario& need(const Scenario* sc, const std::string& command) {
  if (!sc) throw Error("command '" + command + "' needs a scenario");
  return *sc;
}

Schedule run_policy(Policy policy, std::span<const Transaction> txs, const MachineConfig& cfg, std::uint64_t seed) {
  switch (policy) {
    case Policy::Greedy: return schedule_greedy(txs, cfg);
    case Policy::Random: return schedule_random(txs, cfg, seed);
    case Policy::Opt: return schedule_opt(txs, cfg);
  }
  throw Error("unknown policy");
}

std::uint64_t seed_for(const Scenario& sc, const RunFlags& flags) {
  if (flags.seed) return *flags.seed;
  return sc.seeds.empty() ? 0 : sc.seeds.front();
}

Report cmd_schedule(const Scenario& sc, const RunFlags& flags) {
  Report rep;
  const auto policy = flags.policy.value_or(Policy::Greedy);
  const auto txs = sc.honest();
  const auto schedule = run_policy(policy, txs, sc.machine, seed_for(sc, flags));

  Table placements{"placements", {"tx_id", "core", "start", "finish", "included", "g", "revenue"}, {}};
  for (std::size_t i = 0; i < schedule.txs.size(); ++i) {
    const auto& tx = schedule.txs[i];
    const auto& p = schedule.placement[i];
    placements.rows.push_back({tx.id, std::to_string(p.core), std::to_string(p.start), std::to_string(p.finish),
                               "yes", r2s(tx.g), r2s(tx.g * tx.t)});
  }
  for (const auto& tx : schedule.dropped) placements.rows.push_back({tx.id, "", "", "", "no", r2s(tx.g), "0"});
  Table edges{"precedence", {"parent", "child"}, {}};
  for (const auto& [a, b] : schedule.precedence) edges.rows.push_back({schedule.txs[a].id, schedule.txs[b].id});

  std::vector<std::string> dropped;
  for (const auto& tx : schedule.dropped) dropped.push_back(tx.id);
  Table summary{"summary", {"policy", "makespan", "total_compute", "revenue", "dropped"}, {}};
  summary.rows.push_back({to_string(policy), std::to_string(schedule.makespan), std::to_string(schedule.total_compute),
                          r2s(schedule.revenue), join_ids(dropped)});
  rep.tables = {summary, placements, edges};

  const auto valid = validate_schedule(schedule, sc.machine);
  rep.check("schedule valid (" + to_string(policy) + ")", valid.ok(),
            valid.ok() ? "" : valid.violations.front());

  if (const auto it = sc.expect.schedules.find(policy); it != sc.expect.schedules.end()) {
    const auto& e = it->second;
    if (e.makespan) {
      rep.check("makespan = " + std::to_string(*e.makespan), schedule.makespan == *e.makespan,
                "got " + std::to_string(schedule.makespan));
    }
    if (e.revenue) rep.check("revenue = " + r2s(*e.revenue), schedule.revenue == *e.revenue, "got " + r2s(schedule.revenue));
    if (e.dropped) {
      auto want = *e.dropped;
      auto got = dropped;
      std::sort(want.begin(), want.end());
      std::sort(got.begin(), got.end());
      rep.check("dropped = {" + join_ids(want) + "}", want == got, "got {" + join_ids(got) + "}");
    }
  }
  if (policy == Policy::Greedy && sc.expect.greedy_ratio) {
    const auto ratio = alpha_ratio(Policy::Greedy, txs, sc.machine);
    rep.check("alpha(GREEDY) = " + r2s(*sc.expect.greedy_ratio), ratio == *sc.expect.greedy_ratio, "got " + r2s(ratio));
  }
  return rep;
}

Report cmd_gas(const Scenario& sc, const RunFlags& flags) {
  Report rep;
  const auto mech = flags.mechanism.value_or(Mechanism::Shapley);
  const auto honest = sc.honest();
  const auto n = sc.machine.n_cores;
  const auto gas_h = gas_assignment(mech, honest, n);
  const auto gas_a = gas_assignment(mech, sc.txs, n);
  const bool has_fakes = !sc.fake_ids.empty();
  Table t{"gas (" + to_string(mech) + ")", {"tx", "fake", "gas_honest", "gas_all", "gas_all_decimal"}, {}};
  for (const auto& tx : sc.txs) {
    const bool fake = sc.fake_ids.contains(tx.id);
    t.rows.push_back({tx.id, fake ? "yes" : "no", fake ? "" : r2s(gas_h.at(tx.id)), r2s(gas_a.at(tx.id)),
                      to_decimal_string(gas_a.at(tx.id))});
  }
  const auto v_h = makespan_exact(honest, n);
  const auto v_a = makespan_exact(sc.txs, n);
  t.rows.push_back({"total", "", r2s(gas_h.total), r2s(gas_a.total), to_decimal_string(gas_a.total)});
  t.rows.push_back({"makespan", "", std::to_string(v_h), std::to_string(v_a), std::to_string(v_a)});
  rep.tables.push_back(t);

  if (mech != Mechanism::ComputeTime) {
    rep.check(to_string(mech) + " efficient on honest set", gas_h.total == v_h, r2s(gas_h.total) + " vs " + std::to_string(v_h));
    if (has_fakes) rep.check(to_string(mech) + " efficient on full set", gas_a.total == v_a, r2s(gas_a.total) + " vs " + std::to_string(v_a));
  }
  auto expect = [&](const auto& table, const GasAssignment& gas, const char* label) {
    const auto it = table.find(mech);
    if (it == table.end()) return;
    for (const auto& [id, value] : it->second) {
      const auto got = gas.per_tx.contains(id) ? gas.per_tx.at(id) : Rational(-1);
      rep.check(std::string(label) + " gas(" + id + ") = " + r2s(value), got == value, "got " + r2s(got));
    }
  };
  expect(sc.expect.gas_honest, gas_h, "honest");
  expect(sc.expect.gas_all, gas_a, "all");
  return rep;
}

Report cmd_shill(const Scenario& sc, const RunFlags& flags) {
  Report rep;
  const auto honest = sc.honest();
  Table t{"shill search",
          {"pool", "attacker", "victim", "mechanism", "kmax", "searched", "fakes", "baseline", "attacked", "profit"},
          {}};
  for (std::size_t i = 0; i < sc.shill_pools.size(); ++i) {
    const auto& pool = sc.shill_pools[i];
    const auto mech = flags.mechanism.value_or(pool.mechanism.value_or(Mechanism::Shapley));
    const auto result = pool.attacker == Attacker::User
                            ? user_shill_search(mech, honest, pool.victim, pool.pool, pool.kmax, sc.machine.n_cores)
                            : scheduler_shill_search(mech, honest, pool.pool, pool.kmax, sc.machine.n_cores);
    const auto profit = result.report ? result.report->profit : Rational(0);
    t.rows.push_back({std::to_string(i), to_string(pool.attacker), pool.victim, to_string(mech),
                      std::to_string(pool.kmax), std::to_string(result.subsets_searched),
                      result.report ? join_tx_ids(result.report->fake_txs) : "",
                      result.report ? r2s(result.report->baseline) : "",
                      result.report ? r2s(result.report->attacked) : "", r2s(profit)});
    if (pool.expect_profit && (!flags.mechanism || flags.mechanism == pool.mechanism)) {
      rep.check("pool " + std::to_string(i) + " max profit = " + r2s(*pool.expect_profit),
                profit == *pool.expect_profit, "got " + r2s(profit));
    }
  }
  rep.tables.push_back(t);
  return rep;
}

std::unique_ptr<PricingRule> make_rule(const std::string& name, const Scenario& sc) {
  if (name == "compute") return std::make_unique<ComputeProportionalRule>();
  if (name == "tpm") return std::make_unique<TpmRule>();
  if (name == "shapley") return std::make_unique<ShapleyRule>();
  if (name == "owtfm") return std::make_unique<OwTfmRule>(sc.price_book());
  throw Error("unknown pricing rule '" + name + "'");
}

Report cmd_risk(const Scenario& sc, const RunFlags& flags) {
  Report rep;
  const RiskDivision division{flags.alpha.value_or(sc.division.alpha)};
  const auto gamma = flags.gamma.value_or(sc.retention.gamma);
  if (!validate_division(division).ok()) throw Error("alpha must lie in [0, 1]");
  const auto rule = make_rule(flags.rule, sc);
  const auto txs = sc.honest();
  const auto schedule = schedule_greedy(txs, sc.machine);
  const auto applied = apply_schedule(sc.initial_state, schedule, sc.rules);
  const PricingContext ctx{schedule.txs, sc.machine};

  Table t{"risk (" + rule->name() + ", alpha " + r2s(division.alpha) + ", gamma " + r2s(gamma) + ")",
          {"tx", "executed", "f_base", "f_ui", "f_att", "f_act", "r_act", "UR", "SR"},
          {}};
  bool risk_sum = true;
  bool nonneg = true;
  bool presets = true;
  bool impossibility = true;
  const Rational grid[] = {0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  for (const auto& id : applied.order) {
    const auto& tx = *std::find_if(schedule.txs.begin(), schedule.txs.end(), [&](const auto& x) { return x.id == id; });
    const auto& outcome = applied.outcomes.at(id);
    const auto q = quote(*rule, ctx, tx, outcome, division, gamma);
    const auto ur = user_risk(q);
    const auto sr = scheduler_risk(q);
    t.rows.push_back({id, outcome.fully_executed ? "full" : "under", r2s(q.f_base), r2s(q.f_ui), r2s(q.f_att),
                      r2s(q.f_act), r2s(q.r_act), r2s(ur), r2s(sr)});
    risk_sum = risk_sum && ur + sr == q.f_att - q.f_ui;
    nonneg = nonneg && ur >= 0 && sr >= 0;
    const auto q0 = quote(*rule, ctx, tx, outcome, RiskDivision::user_friendly(), gamma);
    const auto q1 = quote(*rule, ctx, tx, outcome, RiskDivision::scheduler_friendly(), gamma);
    presets = presets && user_risk(q0) == 0 && scheduler_risk(q1) == 0;
    if (q.f_att > q.f_ui) {
      for (const auto& a : grid) {
        const auto qa = quote(*rule, ctx, tx, outcome, RiskDivision{a}, gamma);
        if (user_risk(qa) == 0 && scheduler_risk(qa) == 0) impossibility = false;
      }
    }
  }
  rep.tables.push_back(t);
  const auto tag = "[" + rule->name() + " alpha=" + r2s(division.alpha) + "] ";
  rep.check(tag + "UR + SR = f_att - f_ui on every quote", risk_sum);
  rep.check(tag + "UR >= 0 and SR >= 0", nonneg);
  rep.check(tag + "alpha=0 gives UR=0, alpha=1 gives SR=0", presets);
  rep.check(tag + "no alpha zeroes both risks on a contingent shortfall", impossibility);
  return rep;
}

const char* kPriorColumns[] = {"Optimistic", "Pessimistic", "Median"};

// Reference cells as (att, base) coefficient pairs.
const PriorCoefficients kReferenceTable[3][3] = {
    {{1, 0}, {0, 1}, {Rational(1, 2), Rational(1, 2)}},
    {{1, 0}, {1, 0}, {1, 0}},
    {{1, 0}, {Rational(1, 2), Rational(1, 2)}, {Rational(3, 4), Rational(1, 4)}},
};

Report cmd_prior_table(const RunFlags& flags) {
  Report rep;
  const auto table = prior_table();
  Table sym{"prior table", {"division", kPriorColumns[0], kPriorColumns[1], kPriorColumns[2]}, {}};
  bool match = true;
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::vector<std::string> row{table[r].division};
    for (std::size_t c = 0; c < 3; ++c) {
      row.push_back(render_coefficients(table[r].cells[c]));
      match = match && table[r].cells[c] == kReferenceTable[r][c];
    }
    sym.rows.push_back(row);
  }
  rep.tables.push_back(sym);
  rep.check("nine cells match the reference table", match);

  const auto f_att = flags.f_att.value_or(10);
  const auto f_base = flags.f_base.value_or(4);
  Table num{"prior table at f_att=" + r2s(f_att) + ", f_base=" + r2s(f_base),
            {"division", kPriorColumns[0], kPriorColumns[1], kPriorColumns[2]},
            {}};
  const SchedulerPrior priors[] = {SchedulerPrior::Optimistic, SchedulerPrior::Pessimistic, SchedulerPrior::Median};
  for (const auto& row : table) {
    std::vector<std::string> cells{row.division};
    for (const auto p : priors) cells.push_back(r2s(prior_expected_fee(p, row.value, f_att, f_base)));
    num.rows.push_back(cells);
  }
  rep.tables.push_back(num);
  return rep;
}

Table trajectory_table(const SimTrajectory& traj) {
  Table t{"trajectory", {"block", "object", "price", "utilization", "target", "fees_collected", "burned"}, {}};
  for (const auto& rec : traj.blocks) {
    for (const auto& [o, p] : rec.prices) {
      t.rows.push_back({std::to_string(rec.block), o.value, r2s(p), std::to_string(rec.utilization.at(o)),
                        r2s(rec.targets.at(o)), r2s(rec.fees_collected), r2s(rec.burned)});
    }
  }
  return t;
}

void burn_checks(Report& rep, const SimTrajectory& traj, const Rational& gamma) {
  bool burn = true;
  bool positive = true;
  for (const auto& rec : traj.blocks) {
    burn = burn && rec.burned == (1 - gamma) * rec.fees_collected;
    for (const auto& [o, p] : rec.prices) positive = positive && p > 0;
  }
  rep.check("burned = (1 - gamma) * fees every block", burn);
  rep.check("prices stay positive", positive);
}

Report cmd_owtfm_sim(const Scenario& sc, const RunFlags& flags) {
  Report rep;
  SimConfig cfg;
  cfg.machine = sc.machine;
  cfg.policy = flags.policy.value_or(Policy::Greedy);
  cfg.seed = seed_for(sc, flags);
  cfg.alpha = flags.alpha.value_or(sc.division.alpha);
  cfg.gamma = flags.gamma.value_or(sc.retention.gamma);
  cfg.blocks = flags.blocks.value_or(sc.owtfm ? sc.owtfm->blocks : 10);
  cfg.basis = sc.owtfm ? sc.owtfm->basis : UtilizationBasis::Declared;
  cfg.initial_state = sc.initial_state;
  auto book = sc.price_book();
  if (flags.eta) book.eta = *flags.eta;
  if (flags.variant) book.variant = *flags.variant;
  const std::vector<SimBlock> demand{SimBlock{sc.honest(), sc.rules}};
  const auto traj = simulate_blocks(sc.honest().empty() ? std::vector<SimBlock>{} : demand, cfg, book);
  rep.tables.push_back(trajectory_table(traj));
  burn_checks(rep, traj, cfg.gamma);
  return rep;
}

enum class Trend { Constant, Decreasing, Increasing, Mixed };

Trend trend_of(const SimTrajectory& traj) {
  bool constant = true;
  bool decreasing = true;
  bool increasing = true;
  for (std::size_t b = 1; b < traj.blocks.size(); ++b) {
    for (const auto& [o, p] : traj.blocks[b].prices) {
      const auto& prev = traj.blocks[b - 1].prices.at(o);
      constant = constant && p == prev;
      decreasing = decreasing && p < prev;
      increasing = increasing && p > prev;
    }
  }
  if (constant) return Trend::Constant;
  if (decreasing) return Trend::Decreasing;
  if (increasing) return Trend::Increasing;
  return Trend::Mixed;
}

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::Constant: return "constant";
    case Trend::Decreasing: return "strictly decreasing";
    case Trend::Increasing: return "strictly increasing";
    case Trend::Mixed: return "mixed";
  }
  return "?";
}

Report cmd_convergence(const RunFlags& flags) {
  Report rep;
  const auto blocks = flags.blocks.value_or(50);
  const auto eta = flags.eta.value_or(Rational(1, 8));
  const auto variant = flags.variant.value_or(UpdateVariant::Exponential);
  const auto traj = convergence_scenario(flags.mode, flags.demand, flags.G, eta, flags.eps, blocks, variant);
  rep.tables.push_back(trajectory_table(traj));
  Trend expected = Trend::Constant;
  if (flags.demand == ConvergenceDemand::Substitutes && flags.mode == ConvergenceMode::MultiDim) {
    expected = Trend::Decreasing;
  }
  if (flags.demand == ConvergenceDemand::AtTarget && flags.mode == ConvergenceMode::SingleDim) {
    expected = Trend::Increasing;
  }
  const auto got = trend_of(traj);
  rep.check(to_string(flags.mode) + "/" + to_string(flags.demand) + " prices " + trend_name(expected), got == expected,
            std::string("observed ") + trend_name(got));
  return rep;
}

Report cmd_bounds(const RunFlags& flags) {
  Report rep;
  Table wc{"greedy worst case (G=" + std::to_string(flags.G) + ", Tmax=" + std::to_string(flags.t_max) +
               ", n=" + std::to_string(flags.n_cores) + ", O=" + std::to_string(flags.objects) + ")",
           {"eps", "txs", "greedy_revenue", "opt_revenue", "alpha", "alpha_decimal", "bound", "gap"},
           {}};
  std::vector<std::pair<Rational, Rational>> gaps;
  for (const auto& eps : flags.eps_list) {
    const auto inst = gen_greedy_worstcase(flags.G, flags.t_max, flags.n_cores, flags.objects, eps);
    const auto greedy = schedule_greedy(inst.txs, inst.cfg);
    const auto opt = schedule_opt(inst.txs, inst.cfg);
    const auto alpha = greedy.revenue / opt.revenue;
    const auto gap = abs(alpha - inst.bound);
    gaps.emplace_back(eps, gap);
    wc.rows.push_back({r2s(eps), std::to_string(inst.txs.size()), r2s(greedy.revenue / inst.scale),
                       r2s(opt.revenue / inst.scale), r2s(alpha), to_decimal_string(alpha), r2s(inst.bound),
                       to_decimal_string(gap)});
  }
  rep.tables.push_back(wc);
  std::sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) monotone = monotone && gaps[i].second < gaps[i - 1].second;
  if (!gaps.empty()) {
    rep.check("gap to bound < 1/100 at smallest eps", gaps.back().second < Rational(1, 100),
              to_decimal_string(gaps.back().second));
    rep.check("gap shrinks as eps shrinks", monotone);
  }

  const auto eta = flags.eta.value_or(Rational(1, 8));
  const auto gamma = flags.gamma.value_or(Rational(1, 10));
  const auto bound = shill_alpha_bound(eta, gamma, flags.pi_o);
  Table sb{"owtfm shill alpha bound", {"eta", "gamma", "pi_o", "alpha_min", "alpha_min_decimal", "feasible"}, {}};
  sb.rows.push_back({r2s(eta), r2s(gamma), r2s(flags.pi_o), r2s(bound.value), to_decimal_string(bound.value),
                     bound.feasible ? "yes" : "no feasible alpha"});
  rep.tables.push_back(sb);

  const auto spam = spam_efficiency_witness(flags.n_cores, 1);
  Table sp{"spam efficiency witness", {"n", "t", "subset_makespan", "full_makespan", "required_total", "contradiction"}, {}};
  sp.rows.push_back({std::to_string(spam.n_cores), std::to_string(spam.t), std::to_string(spam.subset_makespan),
                     std::to_string(spam.full_makespan), std::to_string(spam.required_total),
                     spam.contradiction ? "yes" : "no"});
  rep.tables.push_back(sp);
  rep.check("spam witness contradicts efficiency", spam.contradiction && spam.subsets_uniform);
  return rep;
}

Report owtfm_boundary_report() {
  Report rep;
  const auto scenario = default_lemma_scenario();
  const Rational eta(1, 8);
  const Rational gamma(1, 10);
  auto fake = Transaction::simple("fake", 10, {scenario.object});
  const auto bound = shill_alpha_bound(eta, gamma, average_priority(scenario)).value;
  const auto at = owtfm_sched_shill_eval(scenario, fake, eta, gamma, bound).profit;
  const auto below = owtfm_sched_shill_eval(scenario, fake, eta, gamma, bound * Rational(99, 100)).profit;
  const auto above = owtfm_sched_shill_eval(scenario, fake, eta, gamma, bound * Rational(101, 100)).profit;
  Table t{"owtfm shill boundary", {"alpha", "profit"}, {}};
  t.rows.push_back({r2s(bound * Rational(99, 100)), r2s(below)});
  t.rows.push_back({r2s(bound), r2s(at)});
  t.rows.push_back({r2s(bound * Rational(101, 100)), r2s(above)});
  rep.tables.push_back(t);
  rep.check("profit is zero at the bound", at == 0, r2s(at));
  rep.check("profit positive just below the bound", below > 0, r2s(below));
  rep.check("profit negative just above the bound", above < 0, r2s(above));
  return rep;
}

Report independence_report(const std::vector<Scenario>& scenarios) {
  Report rep;
  const auto family = independence_family(scenarios);
  const ComputeProportionalRule compute;
  const OwTfmRule owtfm(family_book(family));
  const TpmRule tpm;
  Table t{"independence", {"rule", "verdict", "comparisons", "counterexample"}, {}};
  auto row = [&](const PricingRule& rule) {
    const auto v = independence_check(rule, family);
    std::string cx;
    if (v.counterexample) {
      cx = v.counterexample->instance + ":" + v.counterexample->tx_id + " " + r2s(v.counterexample->before) + "->" +
           r2s(v.counterexample->after) + " with {" + join_ids(v.counterexample->fake_ids) + "}";
    }
    t.rows.push_back({rule.name(), v.independent ? "independent on family" : "dependent", std::to_string(v.comparisons), cx});
    rep.check(rule.name() + ": independence agrees with both shill checks at alpha=0",
              v.independent == v.shill_checks_pass);
    return v;
  };
  const auto vc = row(compute);
  const auto vo = row(owtfm);
  const auto vt = row(tpm);
  rep.tables.push_back(t);
  // First counterexample per instance, so every dependent instance is visible.
  Table per{"tpm counterexamples by instance", {"instance", "tx", "before", "after", "fakes"}, {}};
  for (const auto& inst : family) {
    const auto v = independence_check(tpm, std::span(&inst, 1));
    if (!v.counterexample) continue;
    const auto& c = *v.counterexample;
    per.rows.push_back({inst.name, c.tx_id, r2s(c.before), r2s(c.after), "{" + join_ids(c.fake_ids) + "}"});
  }
  rep.tables.push_back(per);
  rep.check("compute-proportional pricing is independent", vc.independent);
  rep.check("owtfm pricing is independent", vo.independent);
  rep.check("tpm pricing has a counterexample", !vt.independent);
  return rep;
}

Report cmd_check_all(const RunFlags& flags) {
  Report rep;
  const auto dir = flags.corpus_dir.empty() ? default_corpus_dir() : flags.corpus_dir;
  std::vector<Scenario> scenarios;
  Table inventory{"corpus", {"file", "name", "txs", "hash"}, {}};
  for (const auto& path : corpus_files(dir)) {
    const auto file = fs::path(path).filename().string();
    try {
      auto sc = load_scenario(path);
      inventory.rows.push_back({file, sc.name, std::to_string(sc.txs.size()), sc.hash});
      rep.check(file + ": loads", true);
      scenarios.push_back(std::move(sc));
    } catch (const Error& e) {
      rep.check(file + ": loads", false, e.what());
    }
  }
  rep.tables.push_back(inventory);
  RunFlags plain;
  for (const auto& sc : scenarios) {
    const auto prefix = sc.name + ": ";
    auto guarded = [&](const std::string& label, const std::function<Report()>& body) {
      try {
        rep.merge(body(), prefix);
      } catch (const Error& e) {
        rep.check(prefix + label, false, e.what());
      }
    };
    std::set<Policy> policies{Policy::Greedy};
    for (const auto& [p, e] : sc.expect.schedules) policies.insert(p);
    for (const auto p : policies) {
      guarded("schedule", [&] {
        RunFlags f = plain;
        f.policy = p;
        return cmd_schedule(sc, f);
      });
    }
    if (sc.txs.size() <= kShapleyCap) {
      for (const auto mech : {Mechanism::Shapley, Mechanism::Tpm}) {
        guarded("gas", [&] {
          RunFlags f = plain;
          f.mechanism = mech;
          return cmd_gas(sc, f);
        });
      }
    }
    if (!sc.shill_pools.empty()) guarded("shill", [&] { return cmd_shill(sc, plain); });
    for (const auto& a : {Rational(0), Rational(1, 2), Rational(1)}) {
      guarded("risk", [&] {
        RunFlags f = plain;
        f.alpha = a;
        return cmd_risk(sc, f);
      });
    }
  }
  rep.merge(cmd_prior_table(plain), "prior: ");
  rep.merge(owtfm_boundary_report(), "owtfm: ");
  rep.merge(independence_report(scenarios), "independence: ");
  for (const auto mode : {ConvergenceMode::SingleDim, ConvergenceMode::MultiDim}) {
    for (const auto demand : {ConvergenceDemand::Substitutes, ConvergenceDemand::AtTarget}) {
      RunFlags f = plain;
      f.mode = mode;
      f.demand = demand;
      auto conv = cmd_convergence(f);
      conv.tables.clear();
      rep.merge(conv, "convergence: ");
    }
  }
  auto bounds = cmd_bounds(plain);
  rep.merge(bounds, "bounds: ");
  return rep;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"schedule", "gas",         "shill",  "risk",     "prior-table",
                                              "owtfm-sim", "convergence", "bounds", "check-all"};
  return names;
}

bool command_needs_scenario(const std::string& command) {
  return command == "schedule" || command == "gas" || command == "shill" || command == "risk" ||
         command == "owtfm-sim";
}

Report run(const std::string& command, const Scenario* scenario, const RunFlags& flags) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  if (command == "schedule") rep = cmd_schedule(need(scenario, command), flags);
  else if (command == "gas") rep = cmd_gas(need(scenario, command), flags);
  else if (command == "shill") rep = cmd_shill(need(scenario, command), flags);
  else if (command == "risk") rep = cmd_risk(need(scenario, command), flags);
  else if (command == "prior-table") rep = cmd_prior_table(flags);
  else if (command == "owtfm-sim") rep = cmd_owtfm_sim(need(scenario, command), flags);
  else if (command == "convergence") rep = cmd_convergence(flags);
  else if (command == "bounds") rep = cmd_bounds(flags);
  else if (command == "check-all") rep = cmd_check_all(flags);
  else throw Error("unknown command '" + command + "'");
  rep.command = command;
  if (scenario && command_needs_scenario(command)) {
    rep.scenario = scenario->name;
    rep.scenario_hash = scenario->hash;
  }
  rep.timings.emplace_back(command,
                           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return rep;
}

std::string default_corpus_dir() {
  if (const char* env = std::getenv("PARAFEE_CORPUS"); env && *env) return env;
  return PARAFEE_DEFAULT_CORPUS;
}

std::vector<std::string> corpus_files(const std::string& dir) {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path().string());
  }
  if (ec) throw Error("cannot read corpus directory '" + dir + "': " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

std::string resolve_scenario_path(const std::string& arg, const std::string& corpus_dir) {
  if (fs::exists(arg)) return arg;
  for (const auto& candidate : {fs::path(corpus_dir) / arg, fs::path(corpus_dir) / (arg + ".json")}) {
    if (fs::exists(candidate)) return candidate.string();
  }
  return arg;
}

std::vector<IndependenceInstance> independence_family(const std::vector<Scenario>& scenarios) {
  std::vector<IndependenceInstance> family;
  for (const auto& sc : scenarios) {
    if (sc.fake_ids.empty() || sc.txs.size() > kShapleyCap) continue;
    IndependenceInstance inst{sc.name, sc.honest(), sc.machine, {sc.fakes()}};
    family.push_back(std::move(inst));
  }
  return family;
}

ObjectPriceBook family_book(std::span<const IndependenceInstance> family) {
  ObjectSet objects;
  for (const auto& inst : family) {
    for (const auto& tx : inst.txs) objects = set_union(objects, tx.declared());
    for (const auto& fakes : inst.fake_sets) {
      for (const auto& tx : fakes) objects = set_union(objects, tx.declared());
    }
  }
  return ObjectPriceBook::uniform(objects, 1, Rational(1, 8), UpdateVariant::Linear);
}

}  // namespace parafee

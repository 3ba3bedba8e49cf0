#include "parafee/execution.hpp"

#include <functional>
#include <sstream>

namespace parafee {

namespace {

std::string join(const ObjectSet& objects) {
  std::string out;
  for (const auto& o : objects) {
    if (!out.empty()) out += ",";
    out += o.value;
  }
  return out;
}

std::string digest(const ExecOutcome& outcome) {
  std::ostringstream out;
  out << (outcome.fully_executed ? "full" : "under") << "|R:" << join(outcome.used_reads)
      << "|W:" << join(outcome.used_writes) << "|E:";
  bool first = true;
  for (const auto& e : outcome.effects) {
    out << (first ? "" : ",") << e.object.value << "=" << e.value;
    first = false;
  }
  return out.str();
}

ObjectSet touched(const std::vector<WriteEffect>& effects, bool& duplicate) {
  ObjectSet out;
  duplicate = false;
  for (const auto& e : effects) {
    if (!out.insert(e.object).second) duplicate = true;
  }
  return out;
}

}  // namespace

std::string to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
    case Comparator::Equal: return "==";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Greater: return ">";
  }
  return "?";
}

Comparator parse_comparator(std::string_view text) {
  if (text == "<") return Comparator::Less;
  if (text == "<=" || text == "≤") return Comparator::LessEqual;
  if (text == "=" || text == "==") return Comparator::Equal;
  if (text == ">=" || text == "≥") return Comparator::GreaterEqual;
  if (text == ">") return Comparator::Greater;
  throw Error("unknown comparator '" + std::string(text) + "'");
}

bool Guard::holds(const State& state) const {
  const auto v = state.value(object);
  switch (cmp) {
    case Comparator::Less: return v < constant;
    case Comparator::LessEqual: return v <= constant;
    case Comparator::Equal: return v == constant;
    case Comparator::GreaterEqual: return v >= constant;
    case Comparator::Greater: return v > constant;
  }
  return false;
}

ContingencyRule ContingencyRule::unconditional(const Transaction& tx) {
  ContingencyRule rule;
  rule.tx_id = tx.id;
  for (const auto& o : tx.writes) rule.on_full.push_back(WriteEffect{o, 1});
  for (const auto& o : tx.deterministic_writes()) rule.on_under.push_back(WriteEffect{o, 1});
  return rule;
}

ValidationResult validate_rule(const Transaction& tx, const ContingencyRule& rule) {
  ValidationResult result;
  auto& v = result.violations;
  if (rule.tx_id != tx.id) v.emplace_back("rule belongs to '" + rule.tx_id + "', not '" + tx.id + "'");
  if (rule.guard) {
    if (!tx.reads.contains(rule.guard->object)) v.emplace_back("guard object not in read set");
    if (!tx.has_contingency()) v.emplace_back("guard on a transaction without contingent objects");
  }
  bool dup = false;
  if (touched(rule.on_full, dup) != tx.writes) v.emplace_back("on_full must touch exactly W");
  if (dup) v.emplace_back("on_full writes an object twice");
  if (touched(rule.on_under, dup) != tx.deterministic_writes()) {
    v.emplace_back("on_under must touch exactly W \\ C_W");
  }
  if (dup) v.emplace_back("on_under writes an object twice");
  return result;
}

ExecOutcome full_outcome(const Transaction& tx) {
  ExecOutcome out;
  out.used_reads = tx.reads;
  out.used_writes = tx.writes;
  out.compute_used = tx.t;
  out.fully_executed = true;
  out.output_digest = digest(out);
  return out;
}

ExecOutcome under_outcome(const Transaction& tx) {
  ExecOutcome out;
  out.used_reads = tx.deterministic_reads();
  out.used_writes = tx.deterministic_writes();
  out.compute_used = tx.t_base;
  out.fully_executed = false;
  out.output_digest = digest(out);
  return out;
}

ExecOutcome exec(const State& state, const Transaction& tx, const ContingencyRule& rule) {
  if (const auto check = validate_rule(tx, rule); !check.ok()) {
    throw Error("rule/tx mismatch for '" + tx.id + "': " + check.violations.front());
  }
  const bool full = !rule.guard || rule.guard->holds(state);
  ExecOutcome out = full ? full_outcome(tx) : under_outcome(tx);
  out.effects = full ? rule.on_full : rule.on_under;
  out.output_digest = digest(out);
  return out;
}

State apply_effects(State state, const std::vector<WriteEffect>& effects) {
  for (const auto& e : effects) state.values[e.object] = e.value;
  return state;
}

ApplyResult apply_schedule(const State& state, const Schedule& schedule, const RuleMap& rules) {
  const auto& txs = schedule.txs;
  std::vector<std::size_t> indegree(txs.size(), 0);
  std::vector<std::vector<std::size_t>> children(txs.size());
  for (const auto& [p, c] : schedule.precedence) {
    if (p >= txs.size() || c >= txs.size()) throw Error("precedence edge references unknown transaction");
    children[p].push_back(c);
    ++indegree[c];
  }
  std::set<std::pair<std::string, std::size_t>> ready;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (indegree[i] == 0) ready.emplace(txs[i].id, i);
  }
  ApplyResult result{state, {}, {}};
  while (!ready.empty()) {
    const auto i = ready.begin()->second;
    ready.erase(ready.begin());
    const auto& tx = txs[i];
    const auto it = rules.find(tx.id);
    const auto outcome =
        exec(result.state, tx, it != rules.end() ? it->second : ContingencyRule::unconditional(tx));
    result.state = apply_effects(std::move(result.state), outcome.effects);
    result.outcomes[tx.id] = outcome;
    result.order.push_back(tx.id);
    for (const auto c : children[i]) {
      if (--indegree[c] == 0) ready.emplace(txs[c].id, c);
    }
  }
  if (result.order.size() != txs.size()) throw Error("cyclic precedence in schedule");
  return result;
}

ApplyResult apply_sequence(const State& state, std::span<const Transaction> txs, const RuleMap& rules) {
  ApplyResult result{state, {}, {}};
  for (const auto& tx : txs) {
    const auto it = rules.find(tx.id);
    const auto outcome =
        exec(result.state, tx, it != rules.end() ? it->second : ContingencyRule::unconditional(tx));
    result.state = apply_effects(std::move(result.state), outcome.effects);
    result.outcomes[tx.id] = outcome;
    result.order.push_back(tx.id);
  }
  return result;
}

namespace {

// Visits every ordered prefix (no repetition) of length <= k; the visitor
// returns true to stop.
void for_each_prefix(const Transaction& tx, std::span<const PoolEntry> pool, std::size_t k,
                     const State& initial,
                     const std::function<bool(const std::vector<std::string>&, const State&)>& visit) {
  if (k > kContingencySearchCap) {
    throw CapExceeded("exhaustive search cap exceeded (k = " + std::to_string(k) + " > " +
                      std::to_string(kContingencySearchCap) + ")");
  }
  std::vector<const PoolEntry*> usable;
  for (const auto& entry : pool) {
    if (entry.tx.id != tx.id) usable.push_back(&entry);
  }
  std::vector<bool> taken(usable.size(), false);
  std::vector<std::string> prefix;
  std::function<bool(const State&)> rec = [&](const State& state) {
    if (visit(prefix, state)) return true;
    if (prefix.size() == k) return false;
    for (std::size_t i = 0; i < usable.size(); ++i) {
      if (taken[i]) continue;
      taken[i] = true;
      prefix.push_back(usable[i]->tx.id);
      const auto out = exec(state, usable[i]->tx, usable[i]->rule);
      const bool stop = rec(apply_effects(state, out.effects));
      prefix.pop_back();
      taken[i] = false;
      if (stop) return true;
    }
    return false;
  };
  rec(initial);
}

}  // namespace

bool is_contingent_object(const Transaction& tx, const ContingencyRule& rule, const ObjectId& o,
                          std::span<const PoolEntry> pool, std::size_t k, const State& initial) {
  if (!tx.reads.contains(o) && !tx.writes.contains(o)) {
    throw Error("object '" + o.value + "' is not declared by '" + tx.id + "'");
  }
  bool seen_used = false;
  bool seen_unused = false;
  for_each_prefix(tx, pool, k, initial, [&](const std::vector<std::string>&, const State& state) {
    const auto out = exec(state, tx, rule);
    const bool used = out.used_reads.contains(o) || out.used_writes.contains(o);
    (used ? seen_used : seen_unused) = true;
    return seen_used && seen_unused;
  });
  return seen_used && seen_unused;
}

std::optional<ContingencyWitness> find_contingency_witness(const Transaction& tx,
                                                           const ContingencyRule& rule,
                                                           std::span<const PoolEntry> pool,
                                                           std::size_t k, const State& initial) {
  std::optional<std::pair<std::vector<std::string>, ExecOutcome>> first;
  std::optional<ContingencyWitness> witness;
  for_each_prefix(tx, pool, k, initial, [&](const std::vector<std::string>& prefix, const State& state) {
    auto out = exec(state, tx, rule);
    if (!first) {
      first.emplace(prefix, std::move(out));
      return false;
    }
    if (out.output_digest != first->second.output_digest) {
      witness = ContingencyWitness{first->first, prefix, first->second, std::move(out)};
      return true;
    }
    return false;
  });
  return witness;
}

}  // namespace parafee

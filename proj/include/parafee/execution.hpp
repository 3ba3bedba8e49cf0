#pragma once

#include "parafee/model.hpp"
#include "parafee/scheduling.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace parafee {

/// Object values; absent objects read as 0. Applying transactions yields a
/// new State.
struct State {
  std::map<ObjectId, std::int64_t> values;

  std::int64_t value(const ObjectId& o) const {
    const auto it = values.find(o);
    return it == values.end() ? 0 : it->second;
  }

  friend bool operator==(const State&, const State&) = default;
};

enum class Comparator { Less, LessEqual, Equal, GreaterEqual, Greater };

std::string to_string(Comparator cmp);
Comparator parse_comparator(std::string_view text);

struct Guard {
  ObjectId object;
  Comparator cmp = Comparator::Equal;
  std::int64_t constant = 0;

  bool holds(const State& state) const;
};

struct WriteEffect {
  ObjectId object;
  std::int64_t value = 0;

  friend bool operator==(const WriteEffect&, const WriteEffect&) = default;
};

/// Two-branch contingency: guard true runs on_full (covering W), guard false
/// runs on_under (covering W \ C_W). No guard means the guard is always true.
struct ContingencyRule {
  std::string tx_id;
  std::optional<Guard> guard;
  std::vector<WriteEffect> on_full;
  std::vector<WriteEffect> on_under;

  /// Always-true rule that writes 1 to every written object.
  static ContingencyRule unconditional(const Transaction& tx);
};

/// Itemized rule/transaction mismatches; empty means the rule fits the tx.
ValidationResult validate_rule(const Transaction& tx, const ContingencyRule& rule);

struct ExecOutcome {
  ObjectSet used_reads;
  ObjectSet used_writes;
  std::int64_t compute_used = 0;
  bool fully_executed = true;
  std::vector<WriteEffect> effects;
  std::string output_digest;

  ObjectSet used() const { return set_union(used_reads, used_writes); }
};

/// Full outcome of a transaction that takes its guarded branch.
ExecOutcome full_outcome(const Transaction& tx);
/// Under-executed outcome: only non-contingent objects, t_base compute.
ExecOutcome under_outcome(const Transaction& tx);

ExecOutcome exec(const State& state, const Transaction& tx, const ContingencyRule& rule);

/// Applies effects of an outcome, returning the new state.
State apply_effects(State state, const std::vector<WriteEffect>& effects);

using RuleMap = std::map<std::string, ContingencyRule>;

struct ApplyResult {
  State state;
  std::map<std::string, ExecOutcome> outcomes;
  std::vector<std::string> order;  // linearization that was applied
};

/// Executes the schedule in a linearization of its precedence DAG, ready
/// transactions taken in id order. Transactions without a rule run
/// ContingencyRule::unconditional.
ApplyResult apply_schedule(const State& state, const Schedule& schedule, const RuleMap& rules);

/// Sequential application of `txs` in the given order.
ApplyResult apply_sequence(const State& state, std::span<const Transaction> txs, const RuleMap& rules);

inline constexpr std::size_t kContingencySearchCap = 6;

struct PoolEntry {
  Transaction tx;
  ContingencyRule rule;
};

/// Whether tx's usage of `o` differs across prefix schedules of length <= k
/// drawn (ordered, without repetition) from `pool`, starting at `initial`.
bool is_contingent_object(const Transaction& tx, const ContingencyRule& rule, const ObjectId& o,
                          std::span<const PoolEntry> pool, std::size_t k, const State& initial = {});

/// Two prefixes from the pool that give tx differing outcomes, if any exist.
struct ContingencyWitness {
  std::vector<std::string> prefix_a;
  std::vector<std::string> prefix_b;
  ExecOutcome outcome_a;
  ExecOutcome outcome_b;
};

std::optional<ContingencyWitness> find_contingency_witness(const Transaction& tx,
                                                           const ContingencyRule& rule,
                                                           std::span<const PoolEntry> pool,
                                                           std::size_t k, const State& initial = {});

}  // namespace parafee

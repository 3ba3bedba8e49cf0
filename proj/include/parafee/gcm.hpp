#pragma once

#include "parafee/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parafee {

inline constexpr std::size_t kShapleyCap = 10;
/// Default number of fake subsets a shill search may evaluate.
inline constexpr std::size_t kShillSearchBudget = 1 << 14;

/// Gas computation mechanisms. ComputeTime charges every transaction its own
/// compute t regardless of the block, the baseline that is shill proof for
/// schedulers but not efficient.
enum class Mechanism { Shapley, Tpm, ComputeTime };

std::string to_string(Mechanism mech);
Mechanism parse_mechanism(std::string_view text);

struct GasAssignment {
  std::map<std::string, Rational> per_tx;
  Rational total = 0;

  const Rational& at(const std::string& id) const;
};

/// Memoized exact makespans v(S) for every subset of a fixed transaction list.
class MakespanTable {
 public:
  MakespanTable(std::span<const Transaction> txs, std::int64_t n_cores);

  std::int64_t value(std::uint32_t mask) const;
  std::size_t size() const { return txs_.size(); }
  std::uint32_t full_mask() const { return (std::uint32_t{1} << txs_.size()) - 1; }

 private:
  std::vector<Transaction> txs_;
  std::int64_t n_cores_;
  mutable std::vector<std::int64_t> memo_;
};

Rational shapley_gas(std::span<const Transaction> txs, const std::string& tx_id, std::int64_t n_cores);
Rational tpm_gas(std::span<const Transaction> txs, const std::string& tx_id, std::int64_t n_cores);

GasAssignment gas_assignment(Mechanism mech, std::span<const Transaction> txs, std::int64_t n_cores);

struct EfficiencyResult {
  bool efficient = false;
  Rational residual = 0;  // Σ gas − v(T)
  Rational total_gas = 0;
  std::int64_t makespan = 0;
};

EfficiencyResult efficiency_check(Mechanism mech, std::span<const Transaction> txs, std::int64_t n_cores);

enum class Attacker { User, Scheduler };

std::string to_string(Attacker attacker);
Attacker parse_attacker(std::string_view text);

struct ShillReport {
  Attacker attacker = Attacker::User;
  Mechanism mechanism = Mechanism::Shapley;
  std::vector<Transaction> fake_txs;
  Rational baseline = 0;
  Rational attacked = 0;
  Rational profit = 0;
};

/// Outcome of an exhaustive search. An empty report is a proof of absence
/// over `subsets_searched` fake sets.
struct ShillSearchResult {
  std::optional<ShillReport> report;
  std::size_t subsets_searched = 0;
  std::size_t kmax = 0;
};

class SearchBudgetExceeded : public Error {
 public:
  SearchBudgetExceeded(const std::string& what, std::size_t explored, std::optional<ShillReport> best)
      : Error(what), explored_(explored), best_(std::move(best)) {}

  std::size_t explored() const { return explored_; }
  const std::optional<ShillReport>& best_so_far() const { return best_; }

 private:
  std::size_t explored_;
  std::optional<ShillReport> best_;
};

/// Max-profit fake set T' (|T'| <= kmax) violating
/// gas_T(victim) <= gas_{T∪T'}(victim) + gas_{T∪T'}(T').
ShillSearchResult user_shill_search(Mechanism mech, std::span<const Transaction> txs,
                                    const std::string& victim_id, std::span<const Transaction> pool,
                                    std::size_t kmax, std::int64_t n_cores,
                                    std::size_t budget = kShillSearchBudget);

/// Max-profit fake set violating gas_T(T) >= gas_{T∪T'}(T), profit counted on
/// the honest transactions only.
ShillSearchResult scheduler_shill_search(Mechanism mech, std::span<const Transaction> txs,
                                         std::span<const Transaction> pool, std::size_t kmax,
                                         std::int64_t n_cores, std::size_t budget = kShillSearchBudget);

/// Set Inclusion on one pair: gas_{base∪T1}(T1) <= gas_{base∪T2}(T2) for T1 ⊆ T2.
struct SetInclusionResult {
  bool holds = false;
  Rational lhs = 0;
  Rational rhs = 0;
};

SetInclusionResult set_inclusion_check(Mechanism mech, std::span<const Transaction> base,
                                       std::span<const Transaction> t1, std::span<const Transaction> t2,
                                       std::int64_t n_cores);

/// n+1 independent transactions of compute t on n cores: shill proofness
/// forces each to pay t while efficiency caps the total at v(all).
struct SpamEfficiencyWitness {
  std::int64_t n_cores = 0;
  std::int64_t t = 0;
  std::int64_t subset_makespan = 0;  // v of every n-subset
  bool subsets_uniform = false;      // all n-subsets share that makespan
  std::int64_t full_makespan = 0;    // v of all n+1
  std::int64_t required_total = 0;   // (n+1)·t
  bool contradiction = false;        // required_total > full_makespan
};

SpamEfficiencyWitness spam_efficiency_witness(std::int64_t n_cores, std::int64_t t);

}  // namespace parafee

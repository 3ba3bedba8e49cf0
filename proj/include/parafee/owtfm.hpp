#pragma once

#include "parafee/execution.hpp"
#include "parafee/fees.hpp"
#include "parafee/model.hpp"
#include "parafee/scheduling.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parafee {

enum class UpdateVariant { Exponential, Linear };

std::string to_string(UpdateVariant variant);
UpdateVariant parse_variant(std::string_view text);

struct ObjectPriceBook {
  std::map<ObjectId, Rational> prices;
  std::map<ObjectId, Rational> targets;
  Rational eta = Rational(1, 8);
  UpdateVariant variant = UpdateVariant::Exponential;

  const Rational& price(const ObjectId& o) const;
  const Rational& target(const ObjectId& o) const;

  /// Book pricing every object at `price` with a common target.
  static ObjectPriceBook uniform(const ObjectSet& objects, const Rational& target, const Rational& eta,
                                 UpdateVariant variant, const Rational& price = 1);
};

ValidationResult validate_book(const ObjectPriceBook& book);

enum class UtilizationBasis { Declared, Realized };

struct UtilizationRecord {
  std::map<ObjectId, std::int64_t> per_object;
  std::int64_t block = 0;

  std::int64_t at(const ObjectId& o) const;
};

/// Σ t·1{o ∈ R ∪ W} over the block.
UtilizationRecord utilization(std::span<const Transaction> block_txs, std::int64_t block = 0);

/// Realized variant: compute actually used, on objects actually used.
UtilizationRecord realized_utilization(std::span<const Transaction> block_txs,
                                       const std::map<std::string, ExecOutcome>& outcomes,
                                       std::int64_t block = 0);

/// Exponential results are rounded to 30 significant digits; Linear is exact.
Rational price_update(const Rational& p, std::int64_t U, const Rational& U_star, const Rational& eta,
                      UpdateVariant variant);

/// Next block's book; objects absent from the record have U = 0.
ObjectPriceBook advance(const ObjectPriceBook& book, const UtilizationRecord& record);

/// Σ over the given objects of π·p_o·t. Independent of the rest of the block.
class OwTfmRule final : public PricingRule {
 public:
  explicit OwTfmRule(ObjectPriceBook book) : book_(std::move(book)) {}
  std::string name() const override { return "owtfm"; }
  Rational price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                 const ObjectSet& writes) const override;
  const ObjectPriceBook& book() const { return book_; }

 private:
  ObjectPriceBook book_;
};

/// Used objects pay π·p_o·t, declared-unused objects α·π·p_o·t. f_base covers
/// (R ∪ W) \ (C_R ∪ C_W).
FeeQuote ow_fee(const Transaction& tx, const ExecOutcome& outcome, const ObjectPriceBook& book,
                const Rational& alpha, const Rational& gamma = 1);

struct AlphaBound {
  Rational value = 0;
  bool feasible = true;  // value <= 1
};

/// π_o·η·γ/(1−γ).
AlphaBound shill_alpha_bound(const Rational& eta, const Rational& gamma, const Rational& pi_o);

enum class PriorityAverage { ComputeWeighted, PerTransaction };

/// Single-object two-block setting: a fake may join block b, the victims in
/// block b+1 are fixed.
struct LemmaScenario {
  ObjectId object = ObjectId("o");
  Rational price = 1;                 // p_{o,b}
  Rational target = 1;                // U*_o
  std::int64_t base_utilization = 0;  // U_{o,b} without the fake
  std::vector<Transaction> victims;   // block b+1 transactions declaring o
  PriorityAverage averaging = PriorityAverage::ComputeWeighted;
};

/// p = 3, U* = 100, U_b = 100, victims totalling U* with compute-weighted π_o = 5.
LemmaScenario default_lemma_scenario();

Rational average_priority(const LemmaScenario& scenario);

struct SchedShillEval {
  Rational pi_o = 0;
  Rational victim_fee_before = 0;
  Rational victim_fee_after = 0;
  Rational fee_delta = 0;
  Rational fake_attainable = 0;  // π_s·p_{o,b}·t_s
  Rational fake_charge = 0;      // α·fake_attainable
  Rational burn_cost = 0;        // (1−γ)·fake_charge
  Rational gain = 0;             // γ·fee_delta
  Rational profit = 0;           // gain − burn_cost
  AlphaBound bound;
};

/// Linear updates throughout.
SchedShillEval owtfm_sched_shill_eval(const LemmaScenario& scenario, const Transaction& fake,
                                      const Rational& eta, const Rational& gamma, const Rational& alpha);

struct SimBlock {
  std::vector<Transaction> txs;
  RuleMap rules;
};

struct SimConfig {
  MachineConfig machine;
  Policy policy = Policy::Greedy;
  std::uint64_t seed = 0;
  Rational alpha = 0;
  Rational gamma = 1;
  std::int64_t blocks = 1;
  UtilizationBasis basis = UtilizationBasis::Declared;
  /// When set, one price covers all objects and its utilization is the sum
  /// of every per-object utilization.
  std::optional<ObjectId> aggregate;
  State initial_state;
};

struct BlockRecord {
  std::int64_t block = 0;
  std::map<ObjectId, Rational> prices;   // posted during the block
  std::map<ObjectId, Rational> targets;
  std::map<ObjectId, std::int64_t> utilization;
  std::map<std::string, FeeQuote> quotes;
  std::vector<std::string> included;
  Rational fees_collected = 0;  // Σ f_act
  Rational retained = 0;        // Σ r_act
  Rational burned = 0;          // Σ (f_act − r_act)
};

struct SimTrajectory {
  std::vector<BlockRecord> blocks;
  ObjectPriceBook final_book;
};

/// Runs `cfg.blocks` rounds, block i drawing demand from
/// demand[i % demand.size()].
SimTrajectory simulate_blocks(std::span<const SimBlock> demand, const SimConfig& cfg,
                              const ObjectPriceBook& book0);

enum class ConvergenceMode { SingleDim, MultiDim };
/// Substitutes: two near-quarter transactions plus a small one touching both
/// resources. AtTarget: one transaction per resource at exactly its target.
enum class ConvergenceDemand { Substitutes, AtTarget };

std::string to_string(ConvergenceMode mode);
ConvergenceMode parse_convergence_mode(std::string_view text);
std::string to_string(ConvergenceDemand demand);
ConvergenceDemand parse_convergence_demand(std::string_view text);

struct ConvergenceSetup {
  std::vector<SimBlock> demand;
  SimConfig cfg;
  ObjectPriceBook book;
  std::int64_t scale = 1;  // compute units per nominal unit
};

ConvergenceSetup convergence_setup(ConvergenceMode mode, ConvergenceDemand demand, std::int64_t G,
                                   const Rational& eta, const Rational& eps, std::int64_t blocks,
                                   UpdateVariant variant = UpdateVariant::Exponential);

SimTrajectory convergence_scenario(ConvergenceMode mode, ConvergenceDemand demand, std::int64_t G,
                                   const Rational& eta, const Rational& eps, std::int64_t blocks,
                                   UpdateVariant variant = UpdateVariant::Exponential);

/// block,object,price,utilization,target,fees_collected,burned
std::string trajectory_csv(const SimTrajectory& trajectory);

}  // namespace parafee

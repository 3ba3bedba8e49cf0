#pragma once

#include "parafee/execution.hpp"
#include "parafee/model.hpp"

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parafee {

struct FeeQuote {
  Rational f_base = 0;
  Rational f_ui = 0;
  Rational f_att = 0;
  Rational f_act = 0;
  Rational r_act = 0;
};

/// Place of f_act on the segment [f_ui, f_att].
struct RiskDivision {
  Rational alpha = 0;

  static RiskDivision user_friendly() { return {0}; }
  static RiskDivision even_steven() { return {Rational(1, 2)}; }
  static RiskDivision scheduler_friendly() { return {1}; }
};

ValidationResult validate_division(const RiskDivision& division);

enum class SchedulerPrior { Optimistic, Pessimistic, Median };

std::string to_string(SchedulerPrior prior);
SchedulerPrior parse_prior(std::string_view text);

/// The block a transaction is priced in.
struct PricingContext {
  std::span<const Transaction> txs;
  MachineConfig cfg;
};

/// Fee of `tx` as if it touched exactly `reads` and `writes`. Implementations
/// must be monotone in the object sets.
class PricingRule {
 public:
  virtual ~PricingRule() = default;
  virtual std::string name() const = 0;
  virtual Rational price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                         const ObjectSet& writes) const = 0;
};

/// g·t, independent of objects and of the rest of the block.
class ComputeProportionalRule final : public PricingRule {
 public:
  std::string name() const override { return "compute"; }
  Rational price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                 const ObjectSet& writes) const override;
};

/// g times the TPM gas of tx in its block, with tx's access sets replaced.
class TpmRule final : public PricingRule {
 public:
  std::string name() const override { return "tpm"; }
  Rational price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                 const ObjectSet& writes) const override;
};

/// g times the Shapley gas of tx in its block, with tx's access sets replaced.
class ShapleyRule final : public PricingRule {
 public:
  std::string name() const override { return "shapley"; }
  Rational price(const PricingContext& ctx, const Transaction& tx, const ObjectSet& reads,
                 const ObjectSet& writes) const override;
};

/// f_base on (R \ C_R, W \ C_W), f_att on (R, W), f_ui on the used sets;
/// f_act = α·f_att + (1−α)·f_ui and r_act = γ·f_act.
FeeQuote quote(const PricingRule& rule, const PricingContext& ctx, const Transaction& tx,
               const ExecOutcome& outcome, const RiskDivision& division, const Rational& gamma);

/// Builds the quote from already priced components; checks the ordering.
FeeQuote make_quote(const Rational& f_base, const Rational& f_ui, const Rational& f_att,
                    const RiskDivision& division, const Rational& gamma);

Rational user_risk(const FeeQuote& q);
Rational scheduler_risk(const FeeQuote& q);

/// Expected fee a scheduler with `prior` assigns a transaction.
Rational prior_expected_fee(SchedulerPrior prior, const RiskDivision& division, const Rational& f_att,
                            const Rational& f_base);

/// value = att·f_att + base·f_base.
struct PriorCoefficients {
  Rational att = 0;
  Rational base = 0;

  friend bool operator==(const PriorCoefficients&, const PriorCoefficients&) = default;
};

PriorCoefficients prior_coefficients(SchedulerPrior prior, const RiskDivision& division);

struct PriorTableRow {
  std::string division;
  RiskDivision value;
  std::array<PriorCoefficients, 3> cells;  // Optimistic, Pessimistic, Median
};

/// Rows UserFriendly, SchedulerFriendly, EvenSteven.
std::vector<PriorTableRow> prior_table();

/// Symbolic rendering such as "(3f_att+f_base)/4".
std::string render_coefficients(const PriorCoefficients& c);

struct ShillCheck {
  bool pass = false;
  Rational lhs = 0;
  Rational rhs = 0;
  Rational margin = 0;  // rhs − lhs
};

/// f_att(S, victim) <= f_att(S', victim) + α·f_att(S', T'), S' = T ∪ T'.
ShillCheck fee_user_shill_check(const PricingRule& rule, std::span<const Transaction> txs,
                                const std::string& victim_id, std::span<const Transaction> fakes,
                                const MachineConfig& cfg, const RiskDivision& division,
                                const Rational& gamma);

/// γ·(f_att(S', victim) − f_att(S, victim)) <= (1−γ)·α·f_att(S', T').
ShillCheck fee_sched_shill_check(const PricingRule& rule, std::span<const Transaction> txs,
                                 const std::string& victim_id, std::span<const Transaction> fakes,
                                 const MachineConfig& cfg, const RiskDivision& division,
                                 const Rational& gamma);

struct IndependenceInstance {
  std::string name;
  std::vector<Transaction> txs;
  MachineConfig cfg;
  std::vector<std::vector<Transaction>> fake_sets;
};

struct IndependenceCounterexample {
  std::string instance;
  std::string tx_id;
  std::vector<std::string> fake_ids;
  Rational before = 0;
  Rational after = 0;
};

struct IndependenceVerdict {
  bool independent = false;
  std::optional<IndependenceCounterexample> counterexample;
  /// Both fee-based shill checks pass at α = 0 for every (tx, fake set).
  bool shill_checks_pass = false;
  std::size_t comparisons = 0;
};

IndependenceVerdict independence_check(const PricingRule& rule,
                                       std::span<const IndependenceInstance> family,
                                       const Rational& gamma = Rational(1, 2));

}  // namespace parafee

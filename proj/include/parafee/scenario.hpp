#pragma once

#include "parafee/execution.hpp"
#include "parafee/fees.hpp"
#include "parafee/gcm.hpp"
#include "parafee/model.hpp"
#include "parafee/owtfm.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace parafee {

/// Itemized rejection of a scenario file; each item carries its line or
/// field path.
class ScenarioError : public Error {
 public:
  ScenarioError(std::string origin, std::vector<std::string> items);

  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

struct ShillPool {
  Attacker attacker = Attacker::User;
  std::string victim;  // user attacks only
  std::optional<Mechanism> mechanism;
  std::vector<Transaction> pool;
  std::size_t kmax = 1;
  std::optional<Rational> expect_profit;
};

struct OwtfmSettings {
  ObjectPriceBook book;
  std::int64_t blocks = 10;
  UtilizationBasis basis = UtilizationBasis::Declared;
};

struct ScheduleExpectation {
  std::optional<std::int64_t> makespan;
  std::optional<Rational> revenue;
  std::optional<std::vector<std::string>> dropped;
};

struct Expectations {
  // mechanism -> tx id -> gas, over honest transactions and over all.
  std::map<Mechanism, std::map<std::string, Rational>> gas_honest;
  std::map<Mechanism, std::map<std::string, Rational>> gas_all;
  std::map<Policy, ScheduleExpectation> schedules;
  std::optional<Rational> greedy_ratio;
};

struct Scenario {
  std::string name;
  ObjectSet objects;
  std::vector<Transaction> txs;     // honest and fake, in file order
  std::set<std::string> fake_ids;   // transactions flagged as fakes
  RuleMap rules;
  MachineConfig machine;
  RetentionConfig retention;
  RiskDivision division;
  SchedulerPrior prior = SchedulerPrior::Optimistic;
  std::optional<OwtfmSettings> owtfm;
  std::vector<ShillPool> shill_pools;
  std::vector<std::uint64_t> seeds;
  State initial_state;
  Expectations expect;
  std::string hash;  // FNV-1a of the canonical JSON

  std::vector<Transaction> honest() const;
  std::vector<Transaction> fakes() const;
  /// Book from the owtfm section, or price 1 and target block_limit per object.
  ObjectPriceBook price_book() const;
};

Scenario parse_scenario(const std::string& text, const std::string& origin = "<memory>");
Scenario load_scenario(const std::string& path);

/// 64-bit FNV-1a, 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string scenario_hash(const nlohmann::json& doc);

std::string rational_json(const Rational& value);
nlohmann::json transaction_json(const Transaction& tx);

}  // namespace parafee

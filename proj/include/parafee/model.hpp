#pragma once

#include "parafee/rational.hpp"

#include <compare>
#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace parafee {

/// Identifier of a unit of on-chain state. Ordering drives all tie-breaking.
struct ObjectId {
  std::string value;

  ObjectId() = default;
  ObjectId(std::string v) : value(std::move(v)) {}
  ObjectId(const char* v) : value(v) {}

  friend auto operator<=>(const ObjectId&, const ObjectId&) = default;
  friend bool operator==(const ObjectId&, const ObjectId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ObjectId& id) { return os << id.value; }

using ObjectSet = std::set<ObjectId>;

ObjectSet set_union(const ObjectSet& a, const ObjectSet& b);
ObjectSet set_difference(const ObjectSet& a, const ObjectSet& b);
bool intersects(const ObjectSet& a, const ObjectSet& b);
bool is_subset(const ObjectSet& sub, const ObjectSet& super);

struct Transaction {
  std::string id;
  std::int64_t t = 1;              // compute units on a standard machine
  Rational g = 1;                  // gas price per compute unit
  Rational pi = 1;                 // priority multiplier
  ObjectSet reads;
  ObjectSet writes;
  ObjectSet contingent_reads;
  ObjectSet contingent_writes;
  std::int64_t t_base = 1;         // compute when under-executing

  /// R ∪ W.
  ObjectSet declared() const { return set_union(reads, writes); }
  /// Objects used on the under-executed branch: (R \ C_R) ∪ (W \ C_W).
  ObjectSet deterministic() const;
  ObjectSet deterministic_reads() const { return set_difference(reads, contingent_reads); }
  ObjectSet deterministic_writes() const { return set_difference(writes, contingent_writes); }
  bool has_contingency() const { return !contingent_reads.empty() || !contingent_writes.empty(); }

  /// Transaction of compute `t` writing every object in `objects`; t_base = t.
  static Transaction simple(std::string id, std::int64_t t, ObjectSet objects, Rational g = 1);
};

enum class LimitMode { Makespan, TotalCompute };

struct MachineConfig {
  std::int64_t n_cores = 1;
  std::int64_t block_limit = 1;
  LimitMode limit_mode = LimitMode::Makespan;
};

struct RetentionConfig {
  Rational gamma = 1;
};

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationResult validate_transaction(const Transaction& tx);
ValidationResult validate_machine(const MachineConfig& cfg);
ValidationResult validate_retention(const RetentionConfig& cfg);

/// Declared-set conflict: a shared object with at least one write access.
bool conflicts(const Transaction& a, const Transaction& b);

/// Conflict evaluated on explicit access sets (e.g. realized used sets).
bool conflicts(const ObjectSet& reads_a, const ObjectSet& writes_a, const ObjectSet& reads_b,
               const ObjectSet& writes_b);

std::string to_string(LimitMode mode);
LimitMode parse_limit_mode(std::string_view text);

}  // namespace parafee

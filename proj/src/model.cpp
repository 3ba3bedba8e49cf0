#include "parafee/model.hpp"

#include <algorithm>
#include <iterator>

namespace parafee {

ObjectSet set_union(const ObjectSet& a, const ObjectSet& b) {
  ObjectSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

ObjectSet set_difference(const ObjectSet& a, const ObjectSet& b) {
  ObjectSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

bool intersects(const ObjectSet& a, const ObjectSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

bool is_subset(const ObjectSet& sub, const ObjectSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

ObjectSet Transaction::deterministic() const {
  return set_union(deterministic_reads(), deterministic_writes());
}

Transaction Transaction::simple(std::string id, std::int64_t t, ObjectSet objects, Rational g) {
  Transaction tx;
  tx.id = std::move(id);
  tx.t = t;
  tx.t_base = t;
  tx.g = std::move(g);
  tx.writes = std::move(objects);
  return tx;
}

ValidationResult validate_transaction(const Transaction& tx) {
  ValidationResult result;
  auto& v = result.violations;
  if (tx.id.empty()) v.emplace_back("transaction id is empty");
  if (tx.t <= 0) v.emplace_back("compute t must be positive");
  if (tx.t_base <= 0) v.emplace_back("t_base must be positive");
  if (tx.t_base > tx.t) v.emplace_back("t_base exceeds t");
  if (tx.g < 0) v.emplace_back("gas price must be non-negative");
  if (tx.pi < 1) v.emplace_back("priority pi must be at least 1");
  if (!is_subset(tx.contingent_reads, tx.reads)) v.emplace_back("contingent read not declared");
  if (!is_subset(tx.contingent_writes, tx.writes)) v.emplace_back("contingent write not declared");
  if (!tx.has_contingency() && tx.t_base != tx.t) {
    v.emplace_back("non-contingent transaction must have t_base = t");
  }
  return result;
}

ValidationResult validate_machine(const MachineConfig& cfg) {
  ValidationResult result;
  if (cfg.n_cores < 1) result.violations.emplace_back("n_cores must be at least 1");
  if (cfg.block_limit < 1) result.violations.emplace_back("block_limit must be at least 1");
  return result;
}

ValidationResult validate_retention(const RetentionConfig& cfg) {
  ValidationResult result;
  if (cfg.gamma <= 0 || cfg.gamma > 1) result.violations.emplace_back("gamma must lie in (0, 1]");
  return result;
}

bool conflicts(const ObjectSet& reads_a, const ObjectSet& writes_a, const ObjectSet& reads_b,
               const ObjectSet& writes_b) {
  return intersects(reads_a, writes_b) || intersects(writes_a, reads_b) ||
         intersects(writes_a, writes_b);
}

bool conflicts(const Transaction& a, const Transaction& b) {
  if (a.id == b.id) throw Error("self-conflict undefined for transaction '" + a.id + "'");
  return conflicts(a.reads, a.writes, b.reads, b.writes);
}

std::string to_string(LimitMode mode) {
  return mode == LimitMode::Makespan ? "Makespan" : "TotalCompute";
}

LimitMode parse_limit_mode(std::string_view text) {
  if (text == "Makespan" || text == "makespan") return LimitMode::Makespan;
  if (text == "TotalCompute" || text == "total_compute" || text == "total") {
    return LimitMode::TotalCompute;
  }
  throw Error("unknown limit_mode '" + std::string(text) + "'");
}

}  // namespace parafee

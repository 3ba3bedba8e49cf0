#include "parafee/gcm.hpp"

#include "parafee/scheduling.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <set>

namespace parafee {

namespace {

std::size_t index_of(std::span<const Transaction> txs, const std::string& id) {
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (txs[i].id == id) return i;
  }
  throw Error("transaction '" + id + "' is not in the set");
}

BigInt binomial(std::size_t n, std::size_t k) {
  BigInt r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

void check_shapley_cap(std::size_t size) {
  if (size > kShapleyCap) {
    throw CapExceeded("Shapley gas needs |T| <= " + std::to_string(kShapleyCap) + " (got " +
                      std::to_string(size) + ")");
  }
}

std::vector<Rational> shapley_all(std::span<const Transaction> txs, std::int64_t n_cores) {
  check_shapley_cap(txs.size());
  const std::size_t n = txs.size();
  MakespanTable table(txs, n_cores);
  std::vector<BigInt> weight(n == 0 ? 1 : n);
  for (std::size_t s = 0; s + 1 <= n; ++s) weight[s] = BigInt(n) * binomial(n - 1, s);
  std::vector<Rational> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = std::uint32_t{1} << i;
    for (std::uint32_t mask = 0; mask <= table.full_mask(); ++mask) {
      if (mask & bit) continue;
      const auto marginal = table.value(mask | bit) - table.value(mask);
      if (marginal != 0) {
        out[i] += Rational(BigInt(marginal), weight[static_cast<std::size_t>(std::popcount(mask))]);
      }
    }
  }
  return out;
}

void check_unique_ids(std::span<const Transaction> txs) {
  std::set<std::string> seen;
  for (const auto& tx : txs) {
    if (!seen.insert(tx.id).second) throw Error("duplicate transaction id '" + tx.id + "'");
  }
}

// Enumerates fake subsets by size, then lexicographic index order.
void for_each_fake_set(std::span<const Transaction> pool, std::size_t kmax, std::size_t budget,
                       const std::function<void(const std::vector<Transaction>&)>& visit,
                       const std::function<std::optional<ShillReport>()>& best) {
  std::size_t explored = 0;
  const std::size_t top = std::min(kmax, pool.size());
  for (std::size_t k = 1; k <= top; ++k) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      if (explored == budget) {
        throw SearchBudgetExceeded("shill search budget of " + std::to_string(budget) +
                                       " fake sets exceeded",
                                   explored, best());
      }
      std::vector<Transaction> fakes;
      for (const auto i : idx) fakes.push_back(pool[i]);
      visit(fakes);
      ++explored;
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == pool.size() - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

}  // namespace

std::string to_string(Mechanism mech) {
  switch (mech) {
    case Mechanism::Shapley: return "shapley";
    case Mechanism::Tpm: return "tpm";
    case Mechanism::ComputeTime: return "compute";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view text) {
  if (text == "shapley") return Mechanism::Shapley;
  if (text == "tpm") return Mechanism::Tpm;
  if (text == "compute") return Mechanism::ComputeTime;
  throw Error("unknown mechanism '" + std::string(text) + "'");
}

std::string to_string(Attacker attacker) { return attacker == Attacker::User ? "user" : "scheduler"; }

Attacker parse_attacker(std::string_view text) {
  if (text == "user") return Attacker::User;
  if (text == "scheduler") return Attacker::Scheduler;
  throw Error("unknown attacker '" + std::string(text) + "'");
}

const Rational& GasAssignment::at(const std::string& id) const {
  const auto it = per_tx.find(id);
  if (it == per_tx.end()) throw Error("no gas assigned to '" + id + "'");
  return it->second;
}

MakespanTable::MakespanTable(std::span<const Transaction> txs, std::int64_t n_cores)
    : txs_(txs.begin(), txs.end()), n_cores_(n_cores) {
  if (txs_.size() > kExactMakespanCap) {
    throw CapExceeded("instance too large for exact solver (" + std::to_string(txs_.size()) + " > " +
                      std::to_string(kExactMakespanCap) + " transactions)");
  }
  memo_.assign(std::size_t{1} << txs_.size(), -1);
}

std::int64_t MakespanTable::value(std::uint32_t mask) const {
  auto& slot = memo_[mask];
  if (slot < 0) {
    std::vector<Transaction> subset;
    for (std::size_t i = 0; i < txs_.size(); ++i) {
      if (mask & (std::uint32_t{1} << i)) subset.push_back(txs_[i]);
    }
    slot = makespan_exact(subset, n_cores_);
  }
  return slot;
}

Rational shapley_gas(std::span<const Transaction> txs, const std::string& tx_id, std::int64_t n_cores) {
  const auto i = index_of(txs, tx_id);
  return shapley_all(txs, n_cores)[i];
}

Rational tpm_gas(std::span<const Transaction> txs, const std::string& tx_id, std::int64_t n_cores) {
  const auto& tx = txs[index_of(txs, tx_id)];
  std::int64_t total = 0;
  for (const auto& other : txs) total += other.t;
  return Rational(tx.t) / total * makespan_exact(txs, n_cores);
}

GasAssignment gas_assignment(Mechanism mech, std::span<const Transaction> txs, std::int64_t n_cores) {
  check_unique_ids(txs);
  GasAssignment out;
  switch (mech) {
    case Mechanism::Shapley: {
      const auto values = shapley_all(txs, n_cores);
      for (std::size_t i = 0; i < txs.size(); ++i) out.per_tx[txs[i].id] = values[i];
      break;
    }
    case Mechanism::Tpm: {
      if (txs.empty()) break;
      std::int64_t total = 0;
      for (const auto& tx : txs) total += tx.t;
      const auto v = makespan_exact(txs, n_cores);
      for (const auto& tx : txs) out.per_tx[tx.id] = Rational(tx.t) / total * v;
      break;
    }
    case Mechanism::ComputeTime:
      for (const auto& tx : txs) out.per_tx[tx.id] = Rational(tx.t);
      break;
  }
  for (const auto& [id, gas] : out.per_tx) out.total += gas;
  return out;
}

EfficiencyResult efficiency_check(Mechanism mech, std::span<const Transaction> txs, std::int64_t n_cores) {
  const auto gas = gas_assignment(mech, txs, n_cores);
  EfficiencyResult r;
  r.makespan = makespan_exact(txs, n_cores);
  r.total_gas = gas.total;
  r.residual = gas.total - r.makespan;
  r.efficient = r.residual == 0;
  return r;
}

ShillSearchResult user_shill_search(Mechanism mech, std::span<const Transaction> txs,
                                    const std::string& victim_id, std::span<const Transaction> pool,
                                    std::size_t kmax, std::int64_t n_cores, std::size_t budget) {
  index_of(txs, victim_id);
  const auto baseline = gas_assignment(mech, txs, n_cores).at(victim_id);
  ShillSearchResult result;
  result.kmax = kmax;
  for_each_fake_set(
      pool, kmax, budget,
      [&](const std::vector<Transaction>& fakes) {
        std::vector<Transaction> all(txs.begin(), txs.end());
        all.insert(all.end(), fakes.begin(), fakes.end());
        const auto gas = gas_assignment(mech, all, n_cores);
        Rational attacked = gas.at(victim_id);
        for (const auto& f : fakes) attacked += gas.at(f.id);
        const Rational profit = baseline - attacked;
        ++result.subsets_searched;
        if (profit > 0 && (!result.report || profit > result.report->profit)) {
          result.report = ShillReport{Attacker::User, mech, fakes, baseline, attacked, profit};
        }
      },
      [&] { return result.report; });
  return result;
}

ShillSearchResult scheduler_shill_search(Mechanism mech, std::span<const Transaction> txs,
                                         std::span<const Transaction> pool, std::size_t kmax,
                                         std::int64_t n_cores, std::size_t budget) {
  const auto baseline = gas_assignment(mech, txs, n_cores).total;
  ShillSearchResult result;
  result.kmax = kmax;
  for_each_fake_set(
      pool, kmax, budget,
      [&](const std::vector<Transaction>& fakes) {
        std::vector<Transaction> all(txs.begin(), txs.end());
        all.insert(all.end(), fakes.begin(), fakes.end());
        const auto gas = gas_assignment(mech, all, n_cores);
        Rational attacked = 0;
        for (const auto& tx : txs) attacked += gas.at(tx.id);
        const Rational profit = attacked - baseline;
        ++result.subsets_searched;
        if (profit > 0 && (!result.report || profit > result.report->profit)) {
          result.report = ShillReport{Attacker::Scheduler, mech, fakes, baseline, attacked, profit};
        }
      },
      [&] { return result.report; });
  return result;
}

SetInclusionResult set_inclusion_check(Mechanism mech, std::span<const Transaction> base,
                                       std::span<const Transaction> t1, std::span<const Transaction> t2,
                                       std::int64_t n_cores) {
  std::set<std::string> ids2;
  for (const auto& tx : t2) ids2.insert(tx.id);
  for (const auto& tx : t1) {
    if (!ids2.contains(tx.id)) throw Error("set inclusion needs T1 ⊆ T2");
  }
  auto charge = [&](std::span<const Transaction> group) {
    std::vector<Transaction> all(base.begin(), base.end());
    all.insert(all.end(), group.begin(), group.end());
    const auto gas = gas_assignment(mech, all, n_cores);
    Rational sum = 0;
    for (const auto& tx : group) sum += gas.at(tx.id);
    return sum;
  };
  SetInclusionResult r;
  r.lhs = charge(t1);
  r.rhs = charge(t2);
  r.holds = r.lhs <= r.rhs;
  return r;
}

SpamEfficiencyWitness spam_efficiency_witness(std::int64_t n_cores, std::int64_t t) {
  if (n_cores < 1 || t < 1) throw Error("spam witness needs n >= 1 and t >= 1");
  std::vector<Transaction> txs;
  for (std::int64_t i = 1; i <= n_cores + 1; ++i) {
    txs.push_back(Transaction::simple("spam" + std::to_string(i), t, {ObjectId("x" + std::to_string(i))}));
  }
  SpamEfficiencyWitness w;
  w.n_cores = n_cores;
  w.t = t;
  w.full_makespan = makespan_exact(txs, n_cores);
  w.subsets_uniform = true;
  for (std::size_t skip = 0; skip < txs.size(); ++skip) {
    std::vector<Transaction> subset;
    for (std::size_t i = 0; i < txs.size(); ++i) {
      if (i != skip) subset.push_back(txs[i]);
    }
    const auto v = makespan_exact(subset, n_cores);
    if (skip == 0) w.subset_makespan = v;
    if (v != w.subset_makespan) w.subsets_uniform = false;
  }
  w.required_total = (n_cores + 1) * t;
  w.contradiction = w.required_total > w.full_makespan;
  return w;
}

}  // namespace parafee
